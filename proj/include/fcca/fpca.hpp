#pragma once

#include <Eigen/Dense>

#include "fcca/hilbert.hpp"

namespace fcca {

/// Sampling grid on [0,1] with quadrature weights summing to 1.
struct Grid {
  Eigen::VectorXd points;
  Eigen::VectorXd quad_weights;

  Eigen::Index size() const { return points.size(); }
  void validate() const;

  /// Midpoint rule: t_k = (2k-1)/(2p), weights 1/p.
  static Grid midpoint(Eigen::Index p);
};

/// n sample paths evaluated on a common grid. Rows are paths.
struct FunctionalDataset {
  Eigen::MatrixXd values;  // n x p
  Grid grid;
  bool centered = false;
  Eigen::VectorXd mean_curve;  // set by center()

  Eigen::Index n() const { return values.rows(); }
};

struct FpcaResult {
  EigenSystem eigensystem;
  Eigen::MatrixXd scores;  // n x m
  Eigen::VectorXd mean_curve;
};

/// Subtracts the column means; records them in mean_curve.
FunctionalDataset center(const FunctionalDataset& ds);

/// p x p empirical covariance kernel, divisor n-1. OpenMP over grid pairs.
Eigen::MatrixXd empirical_covariance(const FunctionalDataset& ds);

/// Serial reference implementation, entry-for-entry identical.
Eigen::MatrixXd empirical_covariance_serial(const FunctionalDataset& ds);

/// Quadrature-discretized integral eigenproblem: eigendecomposes
/// W^{1/2} K W^{1/2} and maps eigenvectors back by W^{-1/2}, so the returned
/// eigenfunctions are L2-orthonormal under the quadrature. Components with
/// eigenvalue below 1e-10 * lambda_1 are dropped with a warning.
EigenSystem eigendecompose_kernel(const Eigen::MatrixXd& kernel, const Grid& grid,
                                  Eigen::Index m);

/// Scores W_{kj} = sum_s w_s x_k(s) phi_j(s).
Eigen::MatrixXd compute_scores(const FunctionalDataset& ds, const EigenSystem& es);

/// Full pipeline: center, covariance, eigendecompose, scores.
FpcaResult fpca(const FunctionalDataset& ds, Eigen::Index m);

}  // namespace fcca
