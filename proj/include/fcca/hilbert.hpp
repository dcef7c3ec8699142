#pragma once

#include <Eigen/Dense>
#include <string>

#include "fcca/errors.hpp"

namespace fcca {

/// Truncated eigensystem of a covariance operator sampled on a grid.
/// Eigenfunctions are L2-orthonormal under the quadrature weights.
struct EigenSystem {
  Eigen::VectorXd eigenvalues;     // m, strictly positive, non-increasing
  Eigen::MatrixXd eigenfunctions;  // p x m, column j evaluates phi_j on the grid
  Eigen::VectorXd grid;            // p points in [0,1]
  Eigen::VectorXd quad_weights;    // p positive weights summing to 1
  std::string id;

  Eigen::Index size() const { return eigenvalues.size(); }
  Eigen::Index grid_size() const { return grid.size(); }

  /// Checks positivity/ordering of eigenvalues and that the quadrature Gram
  /// of the eigenfunctions is the identity to `tol`.
  void validate(double tol = 1e-8) const;
};

/// Element of H(S) stored in the orthonormal basis e_j = lambda_j^{1/2} phi_j,
/// so the H(S) inner product is the plain Euclidean dot product of `coords`.
struct HsVector {
  Eigen::VectorXd coords;
  std::string basis_ref;
};

enum class OperatorMode { correlation, covariance };

/// Finite-truncation coordinate matrix of a cross-operator C12 from H(S2)
/// into H(S1). `entries` is m1 x m2; in correlation mode entry (i,j) is the
/// correlation of the i-th and j-th principal scores of the two processes.
struct OperatorMatrix {
  Eigen::MatrixXd entries;
  std::string codomain_ref;  // eigensystem of process 1
  std::string domain_ref;    // eigensystem of process 2
  OperatorMode mode = OperatorMode::correlation;
};

/// phi-coordinates -> orthonormal coordinates, coord_j = raw_j / sqrt(lambda_j).
HsVector raw_to_ortho(const Eigen::VectorXd& raw, const EigenSystem& sys);

/// Inverse of raw_to_ortho.
Eigen::VectorXd ortho_to_raw(const HsVector& v, const EigenSystem& sys);

/// H(S) inner product; requires matching basis_ref.
double hs_inner(const HsVector& f, const HsVector& g);

/// Builds the coordinate matrix of C12 from the raw cross-covariance of
/// principal scores. Correlation mode rescales entry (i,j) by
/// 1/sqrt(lambda_1i lambda_2j); covariance mode keeps the entries verbatim.
OperatorMatrix build_cross_operator(const Eigen::MatrixXd& raw_cross_cov,
                                    const EigenSystem& sys1,
                                    const EigenSystem& sys2,
                                    OperatorMode mode = OperatorMode::correlation);

/// I - M^T M, the coordinate form of the concentration operator C22.1.
Eigen::MatrixXd concentration_operator(const OperatorMatrix& M);

struct Assumption1Result {
  bool pass;
  double spectral_norm;
};

/// Passes iff the largest singular value of M is <= 1 - tol.
Assumption1Result validate_assumption1(const OperatorMatrix& M, double tol = 1e-6);
Assumption1Result validate_assumption1(const Eigen::MatrixXd& M, double tol = 1e-6);

}  // namespace fcca
