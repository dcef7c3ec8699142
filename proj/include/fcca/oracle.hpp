#pragma once

#include <Eigen/Dense>

#include "fcca/hilbert.hpp"
#include "fcca/simulate.hpp"

namespace fcca {

/// Finite-dimensional covariance blocks of two or three random vectors.
struct CovBlocks {
  Eigen::MatrixXd s11, s22, s12;
  Eigen::MatrixXd s33, s13, s23;  // empty unless has_third
  bool has_third = false;
};

struct CcaSolution {
  Eigen::VectorXd correlations;
  Eigen::MatrixXd left_weights;   // columns a_i with a_i^T S a_i = 1
  Eigen::MatrixXd right_weights;
};

/// Classical Hotelling CCA: singular system of S11^{-1/2} S12 S22^{-1/2}.
CcaSolution hotelling_cca(const CovBlocks& blocks);

/// Roy's partial CCA: Hotelling CCA on the conditional blocks
/// S_{ij.1} = S_ij - S_i1 S11^{-1} S_1j for i,j in {2,3}.
CcaSolution roy_pcca(const CovBlocks& blocks);

/// Exact truncated cross-operators (correlation mode) of the simulation
/// models, computed from the i.i.d. normal coefficient structure. For
/// cca_pair only m12 is meaningful; for pcca_triple process 1 is the
/// conditioning process (rank one), so m12 and m13 are 1 x m.
struct AnalyticOperators {
  OperatorMatrix m12, m13, m23;
  bool triple = false;
};

AnalyticOperators analytic_model_operators(SimModel model, Eigen::Index m,
                                           double beta1 = 1.0, double beta2 = 2.0,
                                           Eigen::Index kl_terms = 20);

/// Correlation-mode cross-operators of finite covariance blocks, expressed
/// in each block's own eigenbasis. Used for the Hotelling/Roy equivalences.
AnalyticOperators operators_from_cov_blocks(const CovBlocks& blocks);

}  // namespace fcca
