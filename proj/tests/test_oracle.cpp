#include <doctest.h>

#include <cmath>

#include "fcca/operator_algebra.hpp"
#include "fcca/oracle.hpp"
#include "fcca/rng.hpp"

using namespace fcca;

namespace {

Eigen::MatrixXd random_spd(Eigen::Index d, std::uint64_t seed) {
  NormalStream stream(seed);
  Eigen::MatrixXd a(d, d + 2);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d + 2; ++j) a(i, j) = stream.next();
  return a * a.transpose() / static_cast<double>(d) +
         0.3 * Eigen::MatrixXd::Identity(d, d);
}

CovBlocks random_blocks3(Eigen::Index d1, Eigen::Index d2, Eigen::Index d3,
                         std::uint64_t seed) {
  Eigen::MatrixXd s = random_spd(d1 + d2 + d3, seed);
  CovBlocks b;
  b.s11 = s.block(0, 0, d1, d1);
  b.s22 = s.block(d1, d1, d2, d2);
  b.s12 = s.block(0, d1, d1, d2);
  b.s33 = s.block(d1 + d2, d1 + d2, d3, d3);
  b.s13 = s.block(0, d1 + d2, d1, d3);
  b.s23 = s.block(d1, d1 + d2, d2, d3);
  b.has_third = true;
  return b;
}

}  // namespace

TEST_CASE("hotelling_cca basics") {
  CovBlocks b;
  b.s11 = Eigen::MatrixXd::Identity(2, 2);
  b.s22 = Eigen::MatrixXd::Identity(2, 2);
  b.s12 = Eigen::MatrixXd::Zero(2, 2);
  CHECK(hotelling_cca(b).correlations.maxCoeff() == 0.0);

  CovBlocks s;
  s.s11 = Eigen::MatrixXd::Constant(1, 1, 4.0);
  s.s22 = Eigen::MatrixXd::Constant(1, 1, 9.0);
  s.s12 = Eigen::MatrixXd::Constant(1, 1, -3.0);
  CHECK(hotelling_cca(s).correlations[0] ==
        doctest::Approx(3.0 / 6.0).epsilon(1e-12));

  CovBlocks d;
  d.s11 = Eigen::MatrixXd::Identity(2, 2);
  d.s22 = Eigen::MatrixXd::Identity(2, 2);
  d.s12 = Eigen::Vector2d(0.8, 0.3).asDiagonal();
  Eigen::VectorXd rho = hotelling_cca(d).correlations;
  CHECK(rho[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(rho[1] == doctest::Approx(0.3).epsilon(1e-12));

  // Weight normalization a' S a = 1.
  CovBlocks r = random_blocks3(3, 3, 2, 50);
  CcaSolution sol = hotelling_cca(r);
  for (Eigen::Index i = 0; i < sol.correlations.size(); ++i) {
    CHECK(sol.left_weights.col(i).dot(r.s11 * sol.left_weights.col(i)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.left_weights.col(i).dot(r.s12 * sol.right_weights.col(i)) ==
          doctest::Approx(sol.correlations[i]).epsilon(1e-9));
  }
}

TEST_CASE("hotelling invariance under block-diagonal rescaling") {
  CovBlocks b = random_blocks3(3, 2, 2, 51);
  Eigen::MatrixXd t1(3, 3), t2(2, 2);
  t1 << 2, 0.5, 0, 0, 1, -0.3, 0, 0, 0.7;
  t2 << 1.5, 0.2, 0, -0.8;
  CovBlocks scaled;
  scaled.s11 = t1 * b.s11 * t1.transpose();
  scaled.s22 = t2 * b.s22 * t2.transpose();
  scaled.s12 = t1 * b.s12 * t2.transpose();
  CHECK((hotelling_cca(b).correlations - hotelling_cca(scaled).correlations)
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
}

TEST_CASE("roy_pcca reductions") {
  CovBlocks b = random_blocks3(2, 3, 3, 52);
  CovBlocks uncond = b;
  uncond.s12.setZero();
  uncond.s13.setZero();
  CovBlocks plain;
  plain.s11 = b.s22;
  plain.s22 = b.s33;
  plain.s12 = b.s23;
  CHECK((roy_pcca(uncond).correlations - hotelling_cca(plain).correlations)
            .cwiseAbs()
            .maxCoeff() <= 1e-12);

  CovBlocks vanishing = b;
  vanishing.s23 = b.s12.transpose() * b.s11.ldlt().solve(b.s13);
  CHECK(roy_pcca(vanishing).correlations.maxCoeff() <= 1e-12);

  CHECK(roy_pcca(b).correlations.maxCoeff() <= 1.0);
  CHECK(roy_pcca(b).correlations.minCoeff() >= 0.0);
}

TEST_CASE("roy_pcca against a brute-force sampling oracle") {
  CovBlocks b = random_blocks3(2, 2, 2, 53);
  Eigen::MatrixXd s(6, 6);
  s << b.s11, b.s12, b.s13, b.s12.transpose(), b.s22, b.s23, b.s13.transpose(),
      b.s23.transpose(), b.s33;
  Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(s).matrixL();

  const Eigen::Index n = 100000;
  NormalStream stream(54);
  Eigen::MatrixXd x(n, 6);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) x(i, j) = stream.next();
  x = x * chol.transpose();
  x.rowwise() -= x.colwise().mean();

  Eigen::MatrixXd x1 = x.leftCols(2), x2 = x.middleCols(2, 2), x3 = x.rightCols(2);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x1);
  Eigen::MatrixXd r2 = x2 - x1 * qr.solve(x2);
  Eigen::MatrixXd r3 = x3 - x1 * qr.solve(x3);
  CovBlocks sample;
  sample.s11 = r2.transpose() * r2 / (n - 1.0);
  sample.s22 = r3.transpose() * r3 / (n - 1.0);
  sample.s12 = r2.transpose() * r3 / (n - 1.0);
  Eigen::VectorXd mc = hotelling_cca(sample).correlations;
  Eigen::VectorXd exact = roy_pcca(b).correlations;
  CHECK((mc - exact).cwiseAbs().maxCoeff() <= 0.02);
}

TEST_CASE("analytic pair operators") {
  auto ops = analytic_model_operators(SimModel::cca_pair, 9);
  CHECK_FALSE(ops.triple);
  auto pairs = cca_from_operators(ops.m12);
  CHECK(std::abs(pairs[0].rho - 0.7071067811865476) <= 1e-12);
  for (size_t i = 1; i < pairs.size(); ++i) CHECK(pairs[i].rho <= 1e-12);
}

TEST_CASE("analytic triple operators") {
  auto ops = analytic_model_operators(SimModel::pcca_triple, 9);
  CHECK(ops.triple);
  auto pairs = pcca_from_operators(ops.m12, ops.m13, ops.m23);
  CHECK(std::abs(pairs[0].rho - 0.7071067811865476) <= 1e-12);
  for (size_t i = 1; i < pairs.size(); ++i) CHECK(pairs[i].rho <= 1e-12);
}

TEST_CASE("zero loadings collapse partial to plain correlations") {
  auto triple = analytic_model_operators(SimModel::pcca_triple, 6, 0.0, 0.0);
  auto pair = analytic_model_operators(SimModel::cca_pair, 6);
  auto partial = pcca_from_operators(triple.m12, triple.m13, triple.m23);
  auto plain = cca_from_operators(pair.m12);
  for (size_t i = 0; i < plain.size(); ++i)
    CHECK(std::abs(partial[i].rho - plain[i].rho) <= 1e-12);
}

TEST_CASE("operators_from_cov_blocks matches hotelling and roy") {
  for (int t = 0; t < 10; ++t) {
    CovBlocks b = random_blocks3(3, 2, 3, 500 + t);
    auto ops = operators_from_cov_blocks(b);
    auto cca_pairs = cca_from_operators(ops.m12);
    Eigen::VectorXd hote = hotelling_cca(b).correlations;
    for (size_t i = 0; i < cca_pairs.size(); ++i)
      CHECK(std::abs(cca_pairs[i].rho - hote[static_cast<Eigen::Index>(i)]) <= 1e-8);

    auto pcca_pairs = pcca_from_operators(ops.m12, ops.m13, ops.m23);
    Eigen::VectorXd roy = roy_pcca(b).correlations;
    for (size_t i = 0; i < pcca_pairs.size(); ++i)
      CHECK(std::abs(pcca_pairs[i].rho - roy[static_cast<Eigen::Index>(i)]) <= 1e-8);
  }
}

TEST_CASE("degenerate blocks rejected") {
  CovBlocks b;
  b.s11 = Eigen::MatrixXd::Zero(2, 2);
  b.s22 = Eigen::MatrixXd::Identity(2, 2);
  b.s12 = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(hotelling_cca(b), assumption_error);
}
