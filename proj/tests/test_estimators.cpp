#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fcca/estimators.hpp"
#include "fcca/oracle.hpp"
#include "fcca/rng.hpp"
#include "fcca/simulate.hpp"

using namespace fcca;

namespace {

FunctionalDataset from_rows(const Eigen::MatrixXd& values) {
  FunctionalDataset ds;
  ds.values = values;
  ds.grid = Grid::midpoint(values.cols());
  return ds;
}

Eigen::MatrixXd random_normal(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
  NormalStream stream(seed);
  Eigen::MatrixXd z(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) z(i, j) = stream.next();
  return z;
}

}  // namespace

TEST_CASE("self-CCA gives correlation one") {
  SimConfig cfg;
  cfg.n = 80;
  cfg.p = 60;
  cfg.seed = 1;
  auto [ds1, ds2] = simulate_cca_pair(cfg);
  CcaEstimate est = estimate_cca(ds1, ds1, 5, OperatorMode::correlation);
  CHECK(std::abs(est.correlations[0] - 1.0) <= 1e-10);
}

TEST_CASE("independent white-noise datasets have small correlations") {
  const Eigen::Index n = 2000, p = 20;
  FunctionalDataset a = from_rows(random_normal(n, p, 100));
  FunctionalDataset b = from_rows(random_normal(n, p, 101));
  CcaEstimate est = estimate_cca(a, b, 3, OperatorMode::correlation);
  CHECK(est.correlations.maxCoeff() < 0.1);
}

TEST_CASE("estimate_cca input validation") {
  SimConfig cfg;
  cfg.n = 8;
  cfg.p = 30;
  cfg.seed = 2;
  auto [ds1, ds2] = simulate_cca_pair(cfg);
  CHECK_THROWS_AS(estimate_cca(ds1, ds2, 8), data_error);  // n <= m
  FunctionalDataset short_ds = ds2;
  short_ds.values = ds2.values.topRows(5);
  CHECK_THROWS_AS(estimate_cca(ds1, short_ds, 3), data_error);
}

TEST_CASE("residualize_scores") {
  Eigen::MatrixXd wc = random_normal(50, 2, 7);
  wc.rowwise() -= wc.colwise().mean();

  // Orthogonal regressand passes through.
  Eigen::MatrixXd e = random_normal(50, 3, 8);
  e.rowwise() -= e.colwise().mean();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wc);
  Eigen::MatrixXd e_perp = e - wc * qr.solve(e);
  CHECK((residualize_scores(e_perp, wc) - e_perp).cwiseAbs().maxCoeff() <= 1e-10);

  // Perfect fit annihilates.
  Eigen::MatrixXd b(2, 3);
  b << 1, -2, 0.5, 0.3, 1, -1;
  CHECK(residualize_scores(wc * b, wc).cwiseAbs().maxCoeff() <= 1e-10);

  // W = Wcond + E with E orthogonal to Wcond.
  Eigen::MatrixXd w = wc + e_perp.leftCols(2);
  CHECK((residualize_scores(w, wc) - e_perp.leftCols(2)).cwiseAbs().maxCoeff() <=
        1e-10);

  // Residuals uncorrelated with the conditioning columns.
  Eigen::MatrixXd r = residualize_scores(e, wc);
  CHECK((wc.transpose() * r / 49.0).cwiseAbs().maxCoeff() <= 1e-10);

  // Rank-deficient conditioning matrix.
  Eigen::MatrixXd bad(50, 2);
  bad.col(0) = wc.col(0);
  bad.col(1) = 2.0 * wc.col(0);
  CHECK_THROWS_AS(residualize_scores(e, bad), data_error);
}

TEST_CASE("vacuous conditioning approximates plain CCA") {
  SimConfig cfg;
  cfg.n = 2000;
  cfg.p = 50;
  cfg.seed = 12;
  auto [ds2, ds3] = simulate_cca_pair(cfg);
  FunctionalDataset cond = from_rows(random_normal(cfg.n, cfg.p, 999));
  PccaEstimate p = estimate_pcca(cond, ds2, ds3, 4, OperatorMode::correlation, 2);
  CcaEstimate c = estimate_cca(ds2, ds3, 4, OperatorMode::correlation);
  CHECK(std::abs(p.correlations[0] - c.correlations[0]) <= 0.05);
}

TEST_CASE("PCCA of identical residual processes gives one") {
  SimConfig cfg;
  cfg.n = 120;
  cfg.p = 50;
  cfg.seed = 13;
  cfg.model = SimModel::pcca_triple;
  auto [cond, ds2, ds3] = simulate_pcca_triple(cfg);
  PccaEstimate est = estimate_pcca(cond, ds2, ds2, 4, OperatorMode::correlation);
  CHECK(std::abs(est.correlations[0] - 1.0) <= 1e-10);
}

TEST_CASE("permutation invariance") {
  SimConfig cfg;
  cfg.n = 60;
  cfg.p = 40;
  cfg.seed = 14;
  cfg.model = SimModel::pcca_triple;
  auto [cond, ds2, ds3] = simulate_pcca_triple(cfg);

  std::vector<Eigen::Index> perm(cfg.n);
  std::iota(perm.begin(), perm.end(), 0);
  for (Eigen::Index i = 0; i < cfg.n; ++i)
    std::swap(perm[i], perm[(i * 7 + 3) % cfg.n]);
  auto permute = [&](const FunctionalDataset& ds) {
    FunctionalDataset out = ds;
    for (Eigen::Index i = 0; i < cfg.n; ++i) out.values.row(i) = ds.values.row(perm[i]);
    return out;
  };

  // Equal up to summation rounding (column means accumulate in a different
  // order after the permutation).
  PccaEstimate a = estimate_pcca(cond, ds2, ds3, 4);
  PccaEstimate b = estimate_pcca(permute(cond), permute(ds2), permute(ds3), 4);
  CHECK((a.correlations - b.correlations).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((a.left_coeffs - b.left_coeffs).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((a.right_weights - b.right_weights).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("correlation-mode estimates are valid correlations") {
  SimConfig cfg;
  cfg.n = 90;
  cfg.p = 50;
  cfg.seed = 15;
  auto [ds1, ds2] = simulate_cca_pair(cfg);
  CcaEstimate est = estimate_cca(ds1, ds2, 6, OperatorMode::correlation);
  for (Eigen::Index i = 0; i < est.correlations.size(); ++i) {
    CHECK(est.correlations[i] >= 0.0);
    CHECK(est.correlations[i] <= 1.0 + 1e-10);
    if (i > 0) CHECK(est.correlations[i] <= est.correlations[i - 1] + 1e-14);
  }
  for (Eigen::Index i = 0; i < est.left_coeffs.cols(); ++i) {
    CHECK(est.left_coeffs.col(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.right_coeffs.col(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("finite-dimensional Hotelling equivalence") {
  // Data generated exactly in a 3-dimensional sine basis; FPCA retains all 3
  // components, so sample CCA must match the classical solution computed
  // from the coefficient covariance blocks.
  const Eigen::Index n = 50, p = 40, k = 3;
  Grid grid = Grid::midpoint(p);
  Eigen::MatrixXd basis(p, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index s = 0; s < p; ++s)
      basis(s, j) = std::sqrt(2.0) * std::sin((j + 1) * M_PI * grid.points[s]);

  Eigen::MatrixXd c1 = random_normal(n, k, 200);
  Eigen::MatrixXd mix(k, k);
  mix << 1, 0.4, 0, 0, 1, 0.3, 0.2, 0, 1;
  Eigen::MatrixXd c2 = 0.6 * c1 * mix + 0.8 * random_normal(n, k, 201);

  FunctionalDataset ds1 = from_rows(c1 * basis.transpose());
  FunctionalDataset ds2 = from_rows(c2 * basis.transpose());
  ds1.grid = grid;
  ds2.grid = grid;
  CcaEstimate est = estimate_cca(ds1, ds2, k, OperatorMode::correlation);

  // Coefficient covariance blocks from the exact quadrature coefficients.
  Eigen::MatrixXd gram = basis.transpose() * grid.quad_weights.asDiagonal() * basis;
  Eigen::MatrixXd a1 =
      (ds1.values.rowwise() - ds1.values.colwise().mean()) *
      grid.quad_weights.asDiagonal() * basis * gram.inverse();
  Eigen::MatrixXd a2 =
      (ds2.values.rowwise() - ds2.values.colwise().mean()) *
      grid.quad_weights.asDiagonal() * basis * gram.inverse();
  // Covariances in the L2 geometry of the (near-orthonormal) basis.
  CovBlocks blocks;
  blocks.s11 = gram.transpose() * (a1.transpose() * a1) * gram / (n - 1.0);
  blocks.s22 = gram.transpose() * (a2.transpose() * a2) * gram / (n - 1.0);
  blocks.s12 = gram.transpose() * (a1.transpose() * a2) * gram / (n - 1.0);
  CcaSolution oracle = hotelling_cca(blocks);
  for (Eigen::Index i = 0; i < k; ++i)
    CHECK(std::abs(est.correlations[i] - oracle.correlations[i]) <= 1e-8);
}
