#pragma once

#include <Eigen/Dense>

#include "fcca/fpca.hpp"
#include "fcca/hilbert.hpp"

namespace fcca {

/// Sample (partial) canonical correlation estimate. Column i of the
/// coefficient matrices holds the i-th singular vector pair; weight
/// functions are the corresponding grid-sampled curves.
struct CcaEstimate {
  Eigen::VectorXd correlations;   // d_1 >= d_2 >= ... >= 0
  Eigen::MatrixXd left_coeffs;    // m1 x d, coefficients in the ds1 eigenbasis
  Eigen::MatrixXd right_coeffs;   // m2 x d
  Eigen::MatrixXd left_weights;   // p x d weight functions for ds1
  Eigen::MatrixXd right_weights;  // p x d weight functions for ds2
  OperatorMode mode;
  Eigen::Index harmonics;
};

struct PccaEstimate : CcaEstimate {
  Eigen::MatrixXd regression_coeffs_2;  // conditioning-score OLS coefficients
  Eigen::MatrixXd regression_coeffs_3;
};

/// Sample CCA: FPCA on both datasets, m x m score cross-covariance
/// (or cross-correlation), singular value decomposition.
CcaEstimate estimate_cca(const FunctionalDataset& ds1, const FunctionalDataset& ds2,
                         Eigen::Index m, OperatorMode mode = OperatorMode::correlation);

/// Per-column OLS of W on Wcond (no intercept; scores are centered).
/// Residuals have zero sample covariance with every Wcond column.
Eigen::MatrixXd residualize_scores(const Eigen::MatrixXd& w,
                                   const Eigen::MatrixXd& w_cond);

/// Sample PCCA: FPCA all three datasets, residualize the ds2/ds3 scores on
/// the conditioning scores, then the CCA scheme on the residuals.
/// `m_cond` conditioning harmonics default to m.
PccaEstimate estimate_pcca(const FunctionalDataset& ds_cond,
                           const FunctionalDataset& ds2, const FunctionalDataset& ds3,
                           Eigen::Index m, OperatorMode mode = OperatorMode::correlation,
                           Eigen::Index m_cond = -1);

}  // namespace fcca
