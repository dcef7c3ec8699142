#include "fcca/oracle.hpp"

#include <cmath>

#include "fcca/operator_algebra.hpp"

namespace fcca {

namespace {

void check_square(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(name) + " must be square");
}

}  // namespace

CcaSolution hotelling_cca(const CovBlocks& blocks) {
  check_square(blocks.s11, "S11");
  check_square(blocks.s22, "S22");
  if (blocks.s12.rows() != blocks.s11.rows() || blocks.s12.cols() != blocks.s22.rows())
    throw std::invalid_argument("hotelling_cca: S12 shape mismatch");
  Eigen::MatrixXd w1 = sym_inv_sqrt(blocks.s11);
  Eigen::MatrixXd w2 = sym_inv_sqrt(blocks.s22);
  Eigen::MatrixXd n = w1 * blocks.s12 * w2;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(n, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sigma = svd.singularValues();
  Eigen::MatrixXd u = svd.matrixU(), v = svd.matrixV();
  canonicalize_svd(sigma, u, v);
  CcaSolution out;
  out.correlations = sigma.cwiseMin(1.0);
  out.left_weights = w1 * u;
  out.right_weights = w2 * v;
  return out;
}

CcaSolution roy_pcca(const CovBlocks& blocks) {
  if (!blocks.has_third)
    throw std::invalid_argument("roy_pcca: three blocks required");
  check_square(blocks.s11, "S11");
  Eigen::LDLT<Eigen::MatrixXd> s11(blocks.s11);
  if (s11.info() != Eigen::Success || !s11.isPositive())
    throw assumption_error("roy_pcca: S11 not positive definite", 0.0);
  CovBlocks cond;
  cond.s11 = blocks.s22 - blocks.s12.transpose() * s11.solve(blocks.s12);
  cond.s22 = blocks.s33 - blocks.s13.transpose() * s11.solve(blocks.s13);
  cond.s12 = blocks.s23 - blocks.s12.transpose() * s11.solve(blocks.s13);
  return hotelling_cca(cond);
}

namespace {

/// Exact L2[0,1] inner products <sqrt(2) sin(j pi t), sqrt(2) cos(pi t)>:
/// zero for odd j, 4j / (pi (j^2-1)) for even j.
double sine_cos_inner(Eigen::Index j) {
  if (j % 2 == 1) return 0.0;
  double jd = static_cast<double>(j);
  return 4.0 * jd / (M_PI * (jd * jd - 1.0));
}

struct ScoreBasis {
  Eigen::VectorXd eigenvalues;   // retained, descending
  Eigen::MatrixXd eigenvectors;  // columns in the orthonormalized coordinates
};

ScoreBasis eigen_retain(const Eigen::MatrixXd& sigma, Eigen::Index m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      (sigma + sigma.transpose()) / 2.0);
  const Eigen::Index n = sigma.rows();
  double floor = 1e-12 * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  ScoreBasis out;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < std::min(m, n); ++j) {
    Eigen::Index idx = n - 1 - j;
    if (es.eigenvalues()[idx] < floor) break;
    keep.push_back(idx);
  }
  if (keep.empty()) throw data_error("analytic_model_operators: rank 0 process");
  out.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
  out.eigenvectors.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j) {
    out.eigenvalues[static_cast<Eigen::Index>(j)] = es.eigenvalues()[keep[j]];
    out.eigenvectors.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
  }
  return out;
}

OperatorMatrix correlation_operator(const ScoreBasis& a, const ScoreBasis& b,
                                    const Eigen::MatrixXd& cross) {
  OperatorMatrix out;
  out.mode = OperatorMode::correlation;
  Eigen::MatrixXd raw = a.eigenvectors.transpose() * cross * b.eigenvectors;
  out.entries = a.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() * raw *
                b.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
  return out;
}

}  // namespace

AnalyticOperators analytic_model_operators(SimModel model, Eigen::Index m,
                                           double beta1, double beta2,
                                           Eigen::Index kl_terms) {
  if (m < 1 || m > kl_terms)
    throw std::invalid_argument("analytic_model_operators: need 1 <= m <= kl_terms");
  AnalyticOperators out;

  if (model == SimModel::cca_pair) {
    // Both eigensystems are diagonal in the sine basis with active
    // eigenvalues (1, 1/2, ..., 1/m); the single score covariance is
    // Cov(Z11, (Z11+Z21)/sqrt(2)) = 1/sqrt(2), with unit variances.
    out.m12.entries = Eigen::MatrixXd::Zero(m, m);
    out.m12.entries(0, 0) = 1.0 / std::sqrt(2.0);
    out.m12.mode = OperatorMode::correlation;
    out.triple = false;
    return out;
  }

  // Confounded triple. Function space: span of the K sines plus the cosine,
  // with the exact (non-orthogonal) Gram; coefficient space: the 2K+1 i.i.d.
  // standard normals (Z1_j, Z2_j, Zc).
  const Eigen::Index k = kl_terms;
  const Eigen::Index nb = k + 1;  // sines then cosine
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(nb, nb);
  for (Eigen::Index j = 1; j <= k; ++j) {
    double g = sine_cos_inner(j);
    gram(j - 1, k) = g;
    gram(k, j - 1) = g;
  }

  const Eigen::Index nz = 2 * k + 1;
  Eigen::MatrixXd l1 = Eigen::MatrixXd::Zero(nb, nz);  // conditioning: Zc cos
  Eigen::MatrixXd l2 = Eigen::MatrixXd::Zero(nb, nz);  // X1 of the pair - beta1 Zc cos
  Eigen::MatrixXd l3 = Eigen::MatrixXd::Zero(nb, nz);  // X2 of the pair - beta2 Zc cos
  const double isq2 = 1.0 / std::sqrt(2.0);
  l1(k, 2 * k) = isq2;
  for (Eigen::Index j = 0; j < k; ++j) l2(j, j) = 1.0 / std::sqrt(j + 1.0);
  l2(k, 2 * k) = -beta1 * isq2;
  l3(0, 0) = isq2;
  l3(0, k) = isq2;
  for (Eigen::Index j = 1; j < k; ++j) l3(j, k + j) = 1.0 / std::sqrt(j + 1.0);
  l3(k, 2 * k) = -beta2 * isq2;

  Eigen::MatrixXd gh = sym_sqrt(gram);
  Eigen::MatrixXd s1 = gh * l1 * l1.transpose() * gh;
  Eigen::MatrixXd s2 = gh * l2 * l2.transpose() * gh;
  Eigen::MatrixXd s3 = gh * l3 * l3.transpose() * gh;
  ScoreBasis b1 = eigen_retain(s1, 1);  // confounder process has rank one
  ScoreBasis b2 = eigen_retain(s2, m);
  ScoreBasis b3 = eigen_retain(s3, m);

  out.m12 = correlation_operator(b1, b2, gh * l1 * l2.transpose() * gh);
  out.m13 = correlation_operator(b1, b3, gh * l1 * l3.transpose() * gh);
  out.m23 = correlation_operator(b2, b3, gh * l2 * l3.transpose() * gh);
  out.triple = true;
  return out;
}

AnalyticOperators operators_from_cov_blocks(const CovBlocks& blocks) {
  ScoreBasis b1 = eigen_retain(blocks.s11, blocks.s11.rows());
  ScoreBasis b2 = eigen_retain(blocks.s22, blocks.s22.rows());
  AnalyticOperators out;
  out.m12 = correlation_operator(b1, b2, blocks.s12);
  if (blocks.has_third) {
    ScoreBasis b3 = eigen_retain(blocks.s33, blocks.s33.rows());
    out.m13 = correlation_operator(b1, b3, blocks.s13);
    out.m23 = correlation_operator(b2, b3, blocks.s23);
    out.triple = true;
  }
  return out;
}

}  // namespace fcca
