#include "fcca/estimators.hpp"

#include <cmath>

#include "fcca/operator_algebra.hpp"

namespace fcca {

namespace {

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& w) {
  return w.rowwise() - w.colwise().mean();
}

/// Cross-covariance (divisor n-1) of centered scores, or its whitened form
/// S11^{-1/2} S12 S22^{-1/2}. FPCA scores have exactly diagonal sample
/// covariance, so whitening reduces to dividing by the score standard
/// deviations there; for residualized scores the full factor matters and
/// keeps the singular values genuine correlations in [0, 1].
Eigen::MatrixXd score_cross_matrix(const Eigen::MatrixXd& w1,
                                   const Eigen::MatrixXd& w2, OperatorMode mode) {
  const double inv = 1.0 / static_cast<double>(w1.rows() - 1);
  Eigen::MatrixXd a = w1.transpose() * w2 * inv;
  if (mode == OperatorMode::covariance) return a;
  Eigen::MatrixXd s1 = w1.transpose() * w1 * inv;
  Eigen::MatrixXd s2 = w2.transpose() * w2 * inv;
  return sym_inv_sqrt(s1) * a * sym_inv_sqrt(s2);
}

CcaEstimate svd_estimate(const Eigen::MatrixXd& a, const EigenSystem& es1,
                         const EigenSystem& es2, OperatorMode mode,
                         Eigen::Index harmonics) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sigma = svd.singularValues();
  Eigen::MatrixXd u = svd.matrixU(), v = svd.matrixV();
  canonicalize_svd(sigma, u, v);
  CcaEstimate out;
  out.correlations = sigma;
  out.left_coeffs = u;
  out.right_coeffs = v;
  out.left_weights = es1.eigenfunctions * u;
  out.right_weights = es2.eigenfunctions * v;
  out.mode = mode;
  out.harmonics = harmonics;
  return out;
}

}  // namespace

CcaEstimate estimate_cca(const FunctionalDataset& ds1, const FunctionalDataset& ds2,
                         Eigen::Index m, OperatorMode mode) {
  if (ds1.n() != ds2.n()) throw data_error("estimate_cca: sample counts differ");
  if (ds1.n() <= m) throw data_error("estimate_cca: need n > m");
  FpcaResult f1 = fpca(ds1, m);
  FpcaResult f2 = fpca(ds2, m);
  Eigen::MatrixXd w1 = center_columns(f1.scores);
  Eigen::MatrixXd w2 = center_columns(f2.scores);
  Eigen::MatrixXd a = score_cross_matrix(w1, w2, mode);
  return svd_estimate(a, f1.eigensystem, f2.eigensystem, mode, m);
}

Eigen::MatrixXd residualize_scores(const Eigen::MatrixXd& w,
                                   const Eigen::MatrixXd& w_cond) {
  if (w.rows() != w_cond.rows())
    throw std::invalid_argument("residualize_scores: row count mismatch");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(w_cond);
  if (qr.rank() < w_cond.cols())
    throw data_error("residualize_scores: conditioning scores rank-deficient");
  return w - w_cond * qr.solve(w);
}

PccaEstimate estimate_pcca(const FunctionalDataset& ds_cond,
                           const FunctionalDataset& ds2, const FunctionalDataset& ds3,
                           Eigen::Index m, OperatorMode mode, Eigen::Index m_cond) {
  if (ds_cond.n() != ds2.n() || ds2.n() != ds3.n())
    throw data_error("estimate_pcca: sample counts differ");
  if (m_cond < 0) m_cond = m;
  if (ds2.n() <= m + m_cond) throw data_error("estimate_pcca: need n > m + m_cond");

  FpcaResult fc = fpca(ds_cond, m_cond);
  FpcaResult f2 = fpca(ds2, m);
  FpcaResult f3 = fpca(ds3, m);
  Eigen::MatrixXd wc = center_columns(fc.scores);
  Eigen::MatrixXd w2 = center_columns(f2.scores);
  Eigen::MatrixXd w3 = center_columns(f3.scores);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wc);
  if (qr.rank() < wc.cols())
    throw data_error("estimate_pcca: conditioning scores rank-deficient");
  Eigen::MatrixXd b2 = qr.solve(w2);
  Eigen::MatrixXd b3 = qr.solve(w3);
  Eigen::MatrixXd r2 = center_columns(w2 - wc * b2);
  Eigen::MatrixXd r3 = center_columns(w3 - wc * b3);

  Eigen::MatrixXd a = score_cross_matrix(r2, r3, mode);
  PccaEstimate out;
  static_cast<CcaEstimate&>(out) =
      svd_estimate(a, f2.eigensystem, f3.eigensystem, mode, m);
  out.regression_coeffs_2 = b2;
  out.regression_coeffs_3 = b3;
  return out;
}

}  // namespace fcca
