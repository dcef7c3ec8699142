#include "fcca/hilbert.hpp"

#include <cmath>

namespace fcca {

void EigenSystem::validate(double tol) const {
  if (eigenvalues.size() == 0) throw data_error("EigenSystem: empty");
  if (eigenfunctions.rows() != grid.size() || eigenfunctions.cols() != eigenvalues.size())
    throw std::invalid_argument("EigenSystem: shape mismatch");
  if (quad_weights.size() != grid.size())
    throw std::invalid_argument("EigenSystem: weight/grid mismatch");
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
    if (!(eigenvalues[j] > 0.0))
      throw data_error("EigenSystem: non-positive eigenvalue");
    if (j > 0 && eigenvalues[j] > eigenvalues[j - 1] + 1e-14)
      throw data_error("EigenSystem: eigenvalues not non-increasing");
  }
  Eigen::MatrixXd gram =
      eigenfunctions.transpose() * quad_weights.asDiagonal() * eigenfunctions;
  double err = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()))
                   .cwiseAbs()
                   .maxCoeff();
  if (err > tol)
    throw data_error("EigenSystem: eigenfunctions not quadrature-orthonormal");
}

HsVector raw_to_ortho(const Eigen::VectorXd& raw, const EigenSystem& sys) {
  if (raw.size() != sys.size())
    throw std::invalid_argument("raw_to_ortho: dimension mismatch");
  HsVector out;
  out.coords.resize(raw.size());
  for (Eigen::Index j = 0; j < raw.size(); ++j) {
    if (!(sys.eigenvalues[j] > 0.0))
      throw data_error("raw_to_ortho: non-positive eigenvalue");
    out.coords[j] = raw[j] / std::sqrt(sys.eigenvalues[j]);
  }
  out.basis_ref = sys.id;
  return out;
}

Eigen::VectorXd ortho_to_raw(const HsVector& v, const EigenSystem& sys) {
  if (v.coords.size() != sys.size())
    throw std::invalid_argument("ortho_to_raw: dimension mismatch");
  return v.coords.cwiseProduct(sys.eigenvalues.cwiseSqrt());
}

double hs_inner(const HsVector& f, const HsVector& g) {
  if (f.basis_ref != g.basis_ref)
    throw std::invalid_argument("hs_inner: basis mismatch");
  if (f.coords.size() != g.coords.size())
    throw std::invalid_argument("hs_inner: dimension mismatch");
  return f.coords.dot(g.coords);
}

OperatorMatrix build_cross_operator(const Eigen::MatrixXd& raw_cross_cov,
                                    const EigenSystem& sys1, const EigenSystem& sys2,
                                    OperatorMode mode) {
  if (raw_cross_cov.rows() != sys1.size() || raw_cross_cov.cols() != sys2.size())
    throw std::invalid_argument("build_cross_operator: dimension mismatch");
  OperatorMatrix out;
  out.codomain_ref = sys1.id;
  out.domain_ref = sys2.id;
  out.mode = mode;
  if (mode == OperatorMode::covariance) {
    out.entries = raw_cross_cov;
    return out;
  }
  Eigen::VectorXd inv_sd1 = sys1.eigenvalues.cwiseSqrt().cwiseInverse();
  Eigen::VectorXd inv_sd2 = sys2.eigenvalues.cwiseSqrt().cwiseInverse();
  out.entries = inv_sd1.asDiagonal() * raw_cross_cov * inv_sd2.asDiagonal();
  // Score correlations; clip rounding spill just past +-1.
  const double cap = 1.0 + 1e-10;
  out.entries = out.entries.cwiseMax(-cap).cwiseMin(cap);
  return out;
}

Eigen::MatrixXd concentration_operator(const OperatorMatrix& m) {
  if (m.mode != OperatorMode::correlation)
    throw std::invalid_argument("concentration_operator: correlation mode required");
  Eigen::Index d = m.entries.cols();
  return Eigen::MatrixXd::Identity(d, d) - m.entries.transpose() * m.entries;
}

Assumption1Result validate_assumption1(const Eigen::MatrixXd& m, double tol) {
  if (!m.allFinite())
    throw std::invalid_argument("validate_assumption1: non-finite entries");
  double norm = m.size() == 0 ? 0.0 : m.jacobiSvd().singularValues()[0];
  return {norm <= 1.0 - tol, norm};
}

Assumption1Result validate_assumption1(const OperatorMatrix& m, double tol) {
  return validate_assumption1(m.entries, tol);
}

}  // namespace fcca
