#include "fcca/simulate.hpp"

#include <cmath>

#include "fcca/rng.hpp"

namespace fcca {

void SimConfig::validate() const {
  if (n < 2) throw data_error("SimConfig: n must be >= 2");
  if (p < 2) throw data_error("SimConfig: p must be >= 2");
  if (kl_terms < 1) throw data_error("SimConfig: kl_terms must be >= 1");
}

namespace {

/// n x k matrix of standard normals, filled row-major so each sample draws
/// its coefficients consecutively.
Eigen::MatrixXd normal_matrix(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
  NormalStream stream(seed);
  Eigen::MatrixXd z(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) z(i, j) = stream.next();
  return z;
}

/// p x K matrix of sqrt(2) sin(j pi t) columns.
Eigen::MatrixXd sine_basis(const Grid& grid, Eigen::Index k) {
  Eigen::MatrixXd f(grid.size(), k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index s = 0; s < grid.size(); ++s)
      f(s, j) = std::sqrt(2.0) * std::sin((j + 1) * M_PI * grid.points[s]);
  return f;
}

struct PairDraws {
  Grid grid;
  Eigen::MatrixXd x1, x2;  // n x p path values
  Eigen::VectorXd zc;      // confounder draws, n
};

PairDraws draw_pair(const SimConfig& cfg, bool with_confounder) {
  cfg.validate();
  PairDraws d;
  d.grid = Grid::midpoint(cfg.p);
  const Eigen::Index k = cfg.kl_terms;
  Eigen::MatrixXd z1 = normal_matrix(cfg.n, k, substream_seed(cfg.seed, 0));
  Eigen::MatrixXd z2 = normal_matrix(cfg.n, k, substream_seed(cfg.seed, 1));

  Eigen::VectorXd scale(k);
  for (Eigen::Index j = 0; j < k; ++j) scale[j] = 1.0 / std::sqrt(j + 1.0);
  Eigen::MatrixXd basis = sine_basis(d.grid, k);

  Eigen::MatrixXd c1 = z1 * scale.asDiagonal();
  d.x1 = c1 * basis.transpose();

  // X2: first coefficient is (Z11 + Z21) on sin(pi t), i.e. (Z11+Z21)/sqrt(2)
  // on the orthonormal sqrt(2) sin(pi t).
  Eigen::MatrixXd c2 = z2 * scale.asDiagonal();
  c2.col(0) = (z1.col(0) + z2.col(0)) / std::sqrt(2.0);
  d.x2 = c2 * basis.transpose();

  if (with_confounder)
    d.zc = normal_matrix(cfg.n, 1, substream_seed(cfg.seed, 2)).col(0);
  return d;
}

FunctionalDataset make_dataset(Eigen::MatrixXd values, const Grid& grid) {
  FunctionalDataset ds;
  ds.values = std::move(values);
  ds.grid = grid;
  return ds;
}

}  // namespace

std::pair<FunctionalDataset, FunctionalDataset> simulate_cca_pair(const SimConfig& cfg) {
  PairDraws d = draw_pair(cfg, false);
  return {make_dataset(std::move(d.x1), d.grid), make_dataset(std::move(d.x2), d.grid)};
}

std::tuple<FunctionalDataset, FunctionalDataset, FunctionalDataset>
simulate_pcca_triple(const SimConfig& cfg) {
  PairDraws d = draw_pair(cfg, true);
  Eigen::VectorXd cos_curve(cfg.p);
  for (Eigen::Index s = 0; s < cfg.p; ++s)
    cos_curve[s] = std::cos(M_PI * d.grid.points[s]);
  Eigen::MatrixXd confound = d.zc * cos_curve.transpose();  // n x p
  Eigen::MatrixXd x2 = d.x1 - cfg.beta1 * confound;
  Eigen::MatrixXd x3 = d.x2 - cfg.beta2 * confound;
  return {make_dataset(std::move(confound), d.grid),
          make_dataset(std::move(x2), d.grid), make_dataset(std::move(x3), d.grid)};
}

FunctionalDataset simulate_kl(const Eigen::MatrixXd& basis,
                              const Eigen::MatrixXd& coeff_cov, Eigen::Index n,
                              std::uint64_t seed, const Grid& grid) {
  grid.validate();
  if (n < 1) throw data_error("simulate_kl: n must be >= 1");
  const Eigen::Index k = basis.cols();
  if (basis.rows() != grid.size())
    throw std::invalid_argument("simulate_kl: basis/grid mismatch");
  if (coeff_cov.rows() != k || coeff_cov.cols() != k)
    throw std::invalid_argument("simulate_kl: coefficient covariance shape");
  if ((coeff_cov - coeff_cov.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, coeff_cov.cwiseAbs().maxCoeff()))
    throw data_error("simulate_kl: coefficient covariance not symmetric");

  // Cholesky where possible (exact for diagonal covariances); PSD
  // eigen-factor fallback for rank-deficient input.
  Eigen::MatrixXd factor_t;  // transpose of the factor, coeffs = z * factor_t
  Eigen::LLT<Eigen::MatrixXd> llt(coeff_cov);
  if (llt.info() == Eigen::Success && coeff_cov.diagonal().minCoeff() > 0.0) {
    factor_t = llt.matrixL().transpose();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(coeff_cov);
    if (es.eigenvalues().minCoeff() <
        -1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
      throw data_error("simulate_kl: coefficient covariance not PSD");
    factor_t = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
               es.eigenvectors().transpose();
  }
  Eigen::MatrixXd z = normal_matrix(n, k, substream_seed(seed, 0));
  Eigen::MatrixXd coeffs = z * factor_t;
  return make_dataset(coeffs * basis.transpose(), grid);
}

}  // namespace fcca
