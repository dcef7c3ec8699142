#include "fcca/verify.hpp"

#include <algorithm>
#include <cmath>

#include "fcca/oracle.hpp"
#include "fcca/rng.hpp"

namespace fcca {

Eigen::VectorXd gram_project(const Eigen::MatrixXd& basis, const Eigen::VectorXd& h,
                             const Eigen::LDLT<Eigen::MatrixXd>& q_ldlt) {
  Eigen::MatrixXd qinv_basis = q_ldlt.solve(basis);
  Eigen::MatrixXd gram = basis.transpose() * qinv_basis;
  Eigen::VectorXd rhs = qinv_basis.transpose() * h;
  return basis * gram.ldlt().solve(rhs);
}

namespace {

Eigen::MatrixXd normal_mat(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  NormalStream stream(seed);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = stream.next();
  return m;
}

Eigen::VectorXd normal_vec(Eigen::Index n, std::uint64_t seed) {
  return normal_mat(n, 1, seed).col(0);
}

/// Block-normalized random SPD matrix: diagonal blocks become (numerically)
/// the identity, so the off-diagonal blocks are valid cross blocks of a
/// positive definite Q.
Eigen::MatrixXd normalized_spd(const std::vector<Eigen::Index>& dims,
                               std::uint64_t seed) {
  Eigen::Index n = 0;
  for (auto d : dims) n += d;
  Eigen::MatrixXd a = normal_mat(n, n + 2, seed);
  Eigen::MatrixXd s =
      a * a.transpose() / static_cast<double>(n) +
      0.5 * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index off = 0;
  for (auto d : dims) {
    w.block(off, off, d, d) = sym_inv_sqrt(s.block(off, off, d, d));
    off += d;
  }
  return w * s * w;
}

/// H(Q)-orthonormalizes the columns of `cols` through the Gram eigensystem.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& cols,
                               const Eigen::LDLT<Eigen::MatrixXd>& q_ldlt) {
  Eigen::MatrixXd gram = cols.transpose() * q_ldlt.solve(cols);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  return cols * es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
}

struct Accumulator {
  std::vector<IdentityCheck>& checks;

  void record(size_t idx, double err) {
    checks[idx].max_error = std::max(checks[idx].max_error, err);
  }
};

double rel_norm(const Eigen::MatrixXd& diff, double scale = 1.0) {
  if (diff.size() == 0) return 0.0;
  return diff.cwiseAbs().maxCoeff() / std::max(1.0, scale);
}

}  // namespace

BlockOperator2 random_block2(Eigen::Index m1, Eigen::Index m2, std::uint64_t seed,
                             double max_norm) {
  Eigen::MatrixXd m = normal_mat(m1, m2, substream_seed(seed, 0));
  NormalStream stream(substream_seed(seed, 1));
  double target = max_norm * (0.2 + 0.8 * stream.uniform());
  double norm = spectral_norm(m);
  if (norm > 0) m *= target / norm;
  return BlockOperator2{m};
}

BlockOperator3 random_block3(Eigen::Index m1, Eigen::Index m2, Eigen::Index m3,
                             std::uint64_t seed) {
  Eigen::MatrixXd qn = normalized_spd({m1, m2, m3}, substream_seed(seed, 0));
  BlockOperator3 q;
  q.m12 = qn.block(0, m1, m1, m2);
  q.m13 = qn.block(0, m1 + m2, m1, m3);
  q.m23 = qn.block(m1, m1 + m2, m2, m3);
  return q;
}

std::vector<IdentityCheck> run_verification(const VerifyOptions& opts) {
  if (opts.trials < 1 || opts.max_dim < 1)
    throw std::invalid_argument("run_verification: trials and max_dim must be >= 1");

  std::vector<IdentityCheck> checks = {
      {"q2_inverse_identity", 0.0, opts.tol_identity, false},
      {"q3_inverse_identity", 0.0, opts.tol_identity, false},
      {"q3_inverse_symmetry", 0.0, opts.tol_identity, false},
      {"congruence", 0.0, opts.tol_identity, false},
      {"projection_two_process", 0.0, opts.tol_oracle, false},
      {"projection_three_process", 0.0, opts.tol_oracle, false},
      {"bstarb_two_process", 0.0, opts.tol_oracle, false},
      {"bstarb_three_process", 0.0, opts.tol_oracle, false},
      {"spectral_mapping_two_process", 0.0, opts.tol_oracle, false},
      {"spectral_mapping_three_process", 0.0, opts.tol_oracle, false},
      {"sunder_orthonormality", 0.0, opts.tol_identity, false},
      {"conditional_norm_bound", 0.0, opts.tol_identity, false},
      {"hotelling_equivalence", 0.0, opts.tol_oracle, false},
      {"roy_equivalence", 0.0, opts.tol_oracle, false},
  };
  Accumulator acc{checks};

  for (int t = 0; t < opts.trials; ++t) {
    std::uint64_t s = substream_seed(opts.seed, static_cast<std::uint64_t>(t));
    auto dim = [&](std::uint64_t tag, Eigen::Index hi) {
      return static_cast<Eigen::Index>(1 + substream_seed(s, tag) %
                                               static_cast<std::uint64_t>(hi));
    };
    const Eigen::Index m1 = dim(11, opts.max_dim);
    const Eigen::Index m2 = dim(12, opts.max_dim);
    const Eigen::Index m3 = dim(13, opts.max_dim);

    BlockOperator2 q2 = random_block2(m1, m2, substream_seed(s, 21));
    BlockOperator3 q3 = random_block3(m1, m2, m3, substream_seed(s, 22));
    Eigen::MatrixXd q2f = assemble(q2);
    Eigen::MatrixXd q3f = assemble(q3);
    Eigen::LDLT<Eigen::MatrixXd> q2_ldlt(q2f);
    Eigen::LDLT<Eigen::MatrixXd> q3_ldlt(q3f);
    const Eigen::Index n2 = q2.total_dim(), n3 = q3.total_dim();

    // Closed-form inverses against the assembled Q.
    Eigen::MatrixXd inv2 = q2_inverse(q2);
    if (opts.inject_fault) inv2.topRightCorner(m1, m2) = -inv2.topRightCorner(m1, m2);
    acc.record(0, rel_norm(q2f * inv2 - Eigen::MatrixXd::Identity(n2, n2)));
    Eigen::MatrixXd inv3 = q3_inverse(q3);
    acc.record(1, rel_norm(q3f * inv3 - Eigen::MatrixXd::Identity(n3, n3)));
    acc.record(2, rel_norm(inv3 - inv3.transpose()));

    // Congruence: <Qa, Qb>_{H(Q)} = a^T Q b.
    {
      Eigen::VectorXd a = normal_vec(n3, substream_seed(s, 31));
      Eigen::VectorXd b = normal_vec(n3, substream_seed(s, 32));
      std::vector<Eigen::Index> dims = {m1, m2, m3};
      HQElement qa = q_apply(q3, HQElement::from_flat(a, dims));
      HQElement qb = q_apply(q3, HQElement::from_flat(b, dims));
      double lhs = hq_inner(qa, qb, q3f);
      double rhs = a.dot(q3f * b);
      acc.record(3, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }

    auto bases2 = m_bases(q2);
    auto bases3 = m_bases(q3);

    // Two-process projection: closed form vs the Gram normal equations.
    {
      Eigen::VectorXd f2 = normal_vec(m2, substream_seed(s, 41));
      auto [l1, rem] = project_L1_M2(f2, q2);
      Eigen::VectorXd h = l1.flat() + rem.flat();
      Eigen::VectorXd l1_oracle = gram_project(bases2[0], h, q2_ldlt);
      acc.record(4, rel_norm(l1.flat() - l1_oracle));
      acc.record(4, rel_norm(h - l1_oracle - rem.flat()));
      // Remainder must be H(Q)-orthogonal to M1.
      acc.record(4, rel_norm(bases2[0].transpose() * q2_ldlt.solve(rem.flat())));
    }

    // Three-process component decomposition vs the Gram oracle.
    {
      Eigen::VectorXd f3 = normal_vec(m3, substream_seed(s, 42));
      auto parts = project_M3_components(f3, q3);
      Eigen::VectorXd h = bases3[2] * f3;
      acc.record(5, rel_norm(parts[0].flat() + parts[1].flat() + parts[2].flat() - h));
      Eigen::MatrixXd b12(n3, m1 + m2);
      b12 << bases3[0], bases3[1];
      Eigen::VectorXd p1 = gram_project(bases3[0], h, q3_ldlt);
      Eigen::VectorXd p12 = gram_project(b12, h, q3_ldlt);
      acc.record(5, rel_norm(parts[0].flat() - p1));
      acc.record(5, rel_norm(parts[1].flat() - (p12 - p1)));
      acc.record(5, rel_norm(parts[2].flat() - (h - p12)));
    }

    // B*B closed forms vs the projection-composition oracle, built from
    // H(Q)-orthonormal bases of the L subspaces.
    {
      Eigen::MatrixXd l1b = orthonormalize(bases2[0], q2_ldlt);
      Eigen::MatrixXd r2 = bases2[1] - l1b * (l1b.transpose() * q2_ldlt.solve(bases2[1]));
      Eigen::MatrixXd l2b = orthonormalize(r2, q2_ldlt);
      Eigen::MatrixXd c = l2b.transpose() * q2_ldlt.solve(bases2[1]);
      Eigen::MatrixXd beta =
          l1b.transpose() * q2_ldlt.solve(bases2[1] * c.inverse());
      Eigen::VectorXd f2 = normal_vec(m2, substream_seed(s, 51));
      Eigen::VectorXd h = Eigen::VectorXd::Zero(n2);
      h.tail(m2) = f2;
      Eigen::VectorXd coords = l2b.transpose() * q2_ldlt.solve(h);
      Eigen::VectorXd res = l2b * (beta.transpose() * (beta * coords));
      acc.record(6, rel_norm(res.tail(m2) - bstarb_2(f2, q2)));
      acc.record(6, rel_norm(res.head(m1)));
    }
    {
      Eigen::MatrixXd l1b = orthonormalize(bases3[0], q3_ldlt);
      Eigen::MatrixXd r2 = bases3[1] - l1b * (l1b.transpose() * q3_ldlt.solve(bases3[1]));
      Eigen::MatrixXd l2b = orthonormalize(r2, q3_ldlt);
      Eigen::MatrixXd l12(n3, m1 + m2);
      l12 << l1b, l2b;
      Eigen::MatrixXd r3 = bases3[2] - l12 * (l12.transpose() * q3_ldlt.solve(bases3[2]));
      r3 -= l12 * (l12.transpose() * q3_ldlt.solve(r3));
      Eigen::MatrixXd l3b = orthonormalize(r3, q3_ldlt);
      Eigen::MatrixXd c = l3b.transpose() * q3_ldlt.solve(bases3[2]);
      Eigen::MatrixXd beta =
          l2b.transpose() * q3_ldlt.solve(bases3[2] * c.inverse());
      Eigen::VectorXd f3 = normal_vec(m3, substream_seed(s, 52));
      Eigen::VectorXd h = Eigen::VectorXd::Zero(n3);
      h.tail(m3) = f3;
      Eigen::VectorXd coords = l3b.transpose() * q3_ldlt.solve(h);
      Eigen::VectorXd res = l3b * (beta.transpose() * (beta * coords));
      acc.record(7, rel_norm(res.tail(m3) - bstarb_3(f3, q3)));
      acc.record(7, rel_norm(res.head(m1 + m2)));
    }

    // Spectral mapping: eigenvalues of B*B are rho^2 / (1 - rho^2).
    {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(q2.m12);
      Eigen::VectorXd rho = svd.singularValues();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          (bstarb2_matrix(q2) + bstarb2_matrix(q2).transpose()) / 2.0);
      for (Eigen::Index i = 0; i < std::min<Eigen::Index>(rho.size(), m2); ++i) {
        double expect = rho[i] * rho[i] / (1.0 - rho[i] * rho[i]);
        double got = es.eigenvalues()[m2 - 1 - i];
        acc.record(8, std::abs(got - expect) / std::max(1.0, std::abs(expect)));
      }
    }
    {
      OperatorMatrix om12{q3.m12, "", "", OperatorMode::correlation};
      OperatorMatrix om13{q3.m13, "", "", OperatorMode::correlation};
      OperatorMatrix om23{q3.m23, "", "", OperatorMode::correlation};
      auto pairs = pcca_from_operators(om12, om13, om23);
      Eigen::MatrixXd c0h = sym_inv_sqrt(c0_matrix(q3));
      Eigen::MatrixXd k = bstarb3_matrix(q3) * c0_matrix(q3);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          c0h * ((k + k.transpose()) / 2.0) * c0h);
      Eigen::Index npairs = static_cast<Eigen::Index>(pairs.size());
      for (Eigen::Index i = 0; i < std::min(npairs, m3); ++i) {
        double r = pairs[static_cast<size_t>(i)].rho;
        double expect = r * r / (1.0 - r * r);
        double got = es.eigenvalues()[m3 - 1 - i];
        acc.record(9, std::abs(got - expect) / std::max(1.0, std::abs(expect)));
      }
    }

    // Sunder bases: jointly orthonormal and spanning.
    {
      auto ls = sunder_decompose(bases3, q3f);
      Eigen::Index total = 0;
      for (const auto& l : ls) total += l.cols();
      Eigen::MatrixXd all(n3, total);
      Eigen::Index off = 0;
      for (const auto& l : ls) {
        all.middleCols(off, l.cols()) = l;
        off += l.cols();
      }
      acc.record(10, rel_norm(all.transpose() * q3_ldlt.solve(all) -
                              Eigen::MatrixXd::Identity(total, total)));
      Eigen::VectorXd h = normal_vec(n3, substream_seed(s, 61));
      acc.record(10, total == n3
                         ? rel_norm(all * (all.transpose() * q3_ldlt.solve(h)) - h)
                         : 1.0);
    }

    // Conditional norm bound for a valid Q.
    {
      Eigen::MatrixXd c221 =
          Eigen::MatrixXd::Identity(m2, m2) - q3.m12.transpose() * q3.m12;
      Eigen::MatrixXd c331 =
          Eigen::MatrixXd::Identity(m3, m3) - q3.m13.transpose() * q3.m13;
      Eigen::MatrixXd a = sym_inv_sqrt(c221) *
                          (q3.m23 - q3.m12.transpose() * q3.m13) * sym_inv_sqrt(c331);
      acc.record(11, std::max(0.0, spectral_norm(a) - 1.0));
    }

    // Hotelling / Roy equivalences on random covariance blocks.
    {
      const Eigen::Index d1 = dim(71, std::min<Eigen::Index>(opts.max_dim, 6));
      const Eigen::Index d2 = dim(72, std::min<Eigen::Index>(opts.max_dim, 6));
      const Eigen::Index d3 = dim(73, std::min<Eigen::Index>(opts.max_dim, 6));
      Eigen::Index nt = d1 + d2 + d3;
      Eigen::MatrixXd a = normal_mat(nt, nt + 2, substream_seed(s, 74));
      Eigen::MatrixXd sfull = a * a.transpose() / static_cast<double>(nt) +
                              0.3 * Eigen::MatrixXd::Identity(nt, nt);
      CovBlocks blocks;
      blocks.s11 = sfull.block(0, 0, d1, d1);
      blocks.s22 = sfull.block(d1, d1, d2, d2);
      blocks.s12 = sfull.block(0, d1, d1, d2);
      blocks.s33 = sfull.block(d1 + d2, d1 + d2, d3, d3);
      blocks.s13 = sfull.block(0, d1 + d2, d1, d3);
      blocks.s23 = sfull.block(d1, d1 + d2, d2, d3);
      blocks.has_third = true;

      auto ops = operators_from_cov_blocks(blocks);
      auto cca_pairs = cca_from_operators(ops.m12);
      CcaSolution hote = hotelling_cca(blocks);
      for (size_t i = 0; i < cca_pairs.size(); ++i)
        acc.record(12, std::abs(cca_pairs[i].rho -
                                hote.correlations[static_cast<Eigen::Index>(i)]));

      auto pcca_pairs = pcca_from_operators(ops.m12, ops.m13, ops.m23);
      CcaSolution roy = roy_pcca(blocks);
      for (size_t i = 0; i < pcca_pairs.size(); ++i)
        acc.record(13, std::abs(pcca_pairs[i].rho -
                                roy.correlations[static_cast<Eigen::Index>(i)]));
    }
  }

  for (auto& c : checks) c.pass = c.max_error <= c.tol;
  return checks;
}

}  // namespace fcca
