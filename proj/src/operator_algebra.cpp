#include "fcca/operator_algebra.hpp"

#include <algorithm>
#include <cmath>

namespace fcca {

void BlockOperator3::check_shapes() const {
  if (m13.rows() != m12.rows() || m23.rows() != m12.cols() ||
      m23.cols() != m13.cols())
    throw std::invalid_argument("BlockOperator3: inconsistent block shapes");
}

Eigen::VectorXd HQElement::flat() const {
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.size();
  Eigen::VectorXd v(total);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    v.segment(off, p.size()) = p;
    off += p.size();
  }
  return v;
}

HQElement HQElement::from_flat(const Eigen::VectorXd& v,
                               const std::vector<Eigen::Index>& dims) {
  HQElement h;
  Eigen::Index off = 0;
  for (auto d : dims) {
    h.parts.push_back(v.segment(off, d));
    off += d;
  }
  if (off != v.size())
    throw std::invalid_argument("HQElement::from_flat: dimension mismatch");
  return h;
}

Eigen::MatrixXd assemble(const BlockOperator2& q) {
  Eigen::Index m1 = q.dim1(), m2 = q.dim2();
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(m1 + m2, m1 + m2);
  full.block(0, m1, m1, m2) = q.m12;
  full.block(m1, 0, m2, m1) = q.m12.transpose();
  return full;
}

Eigen::MatrixXd assemble(const BlockOperator3& q) {
  q.check_shapes();
  Eigen::Index m1 = q.dim1(), m2 = q.dim2(), m3 = q.dim3();
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(m1 + m2 + m3, m1 + m2 + m3);
  full.block(0, m1, m1, m2) = q.m12;
  full.block(0, m1 + m2, m1, m3) = q.m13;
  full.block(m1, m1 + m2, m2, m3) = q.m23;
  full.block(m1, 0, m2, m1) = q.m12.transpose();
  full.block(m1 + m2, 0, m3, m1) = q.m13.transpose();
  full.block(m1 + m2, m1, m3, m2) = q.m23.transpose();
  return full;
}

HQElement q_apply(const BlockOperator2& q, const HQElement& h) {
  if (h.parts.size() != 2 || h.parts[0].size() != q.dim1() ||
      h.parts[1].size() != q.dim2())
    throw std::invalid_argument("q_apply: dimension mismatch");
  HQElement out;
  out.parts = {h.parts[0] + q.m12 * h.parts[1],
               h.parts[1] + q.m12.transpose() * h.parts[0]};
  return out;
}

HQElement q_apply(const BlockOperator3& q, const HQElement& h) {
  if (h.parts.size() != 3 || h.parts[0].size() != q.dim1() ||
      h.parts[1].size() != q.dim2() || h.parts[2].size() != q.dim3())
    throw std::invalid_argument("q_apply: dimension mismatch");
  HQElement out;
  out.parts = {h.parts[0] + q.m12 * h.parts[1] + q.m13 * h.parts[2],
               q.m12.transpose() * h.parts[0] + h.parts[1] + q.m23 * h.parts[2],
               q.m13.transpose() * h.parts[0] + q.m23.transpose() * h.parts[1] +
                   h.parts[2]};
  return out;
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return a.jacobiSvd().singularValues()[0];
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& a, double floor_rel) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const auto& ev = es.eigenvalues();
  double floor = floor_rel * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] < floor)
      throw assumption_error("sym_sqrt: matrix not positive definite", ev[i]);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& a, double floor_rel) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const auto& ev = es.eigenvalues();
  double floor = floor_rel * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] < floor)
      throw assumption_error("sym_inv_sqrt: matrix not positive definite", ev[i]);
  return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

namespace {

void require_assumption1(const Eigen::MatrixXd& m, double tol, const char* where) {
  double norm = spectral_norm(m);
  if (!(norm <= 1.0 - tol))
    throw assumption_error(std::string(where) + ": Assumption 1 violated", norm);
}

}  // namespace

Eigen::MatrixXd q2_inverse(const BlockOperator2& q, double tol) {
  require_assumption1(q.m12, tol, "q2_inverse");
  Eigen::Index m1 = q.dim1(), m2 = q.dim2();
  Eigen::MatrixXd c112 =
      Eigen::MatrixXd::Identity(m1, m1) - q.m12 * q.m12.transpose();
  Eigen::MatrixXd c221 =
      Eigen::MatrixXd::Identity(m2, m2) - q.m12.transpose() * q.m12;
  Eigen::MatrixXd c112_inv = c112.ldlt().solve(Eigen::MatrixXd::Identity(m1, m1));
  Eigen::MatrixXd c221_inv = c221.ldlt().solve(Eigen::MatrixXd::Identity(m2, m2));
  Eigen::MatrixXd inv(m1 + m2, m1 + m2);
  inv.topLeftCorner(m1, m1) = c112_inv;
  inv.topRightCorner(m1, m2) = -q.m12 * c221_inv;
  inv.bottomLeftCorner(m2, m1) = -q.m12.transpose() * c112_inv;
  inv.bottomRightCorner(m2, m2) = c221_inv;
  return inv;
}

Eigen::MatrixXd q3_inverse(const BlockOperator3& q, double tol) {
  q.check_shapes();
  require_assumption1(q.m12, tol, "q3_inverse (1,2)");
  require_assumption1(q.m13, tol, "q3_inverse (1,3)");
  Eigen::Index m1 = q.dim1(), m2 = q.dim2(), m3 = q.dim3();
  Eigen::MatrixXd c221 =
      Eigen::MatrixXd::Identity(m2, m2) - q.m12.transpose() * q.m12;
  Eigen::MatrixXd c331 =
      Eigen::MatrixXd::Identity(m3, m3) - q.m13.transpose() * q.m13;
  // Whitened conditional cross block; its norm < 1 is the Assumption 2 check.
  Eigen::MatrixXd a = sym_inv_sqrt(c221) * (q.m23 - q.m12.transpose() * q.m13) *
                      sym_inv_sqrt(c331);
  double vnorm = spectral_norm(a);
  if (!(vnorm <= 1.0 - tol))
    throw assumption_error("q3_inverse: Assumption 2 violated", vnorm);

  Eigen::Index ms = m2 + m3;
  Eigen::MatrixXd i_minus_v = Eigen::MatrixXd::Identity(ms, ms);
  i_minus_v.block(0, m2, m2, m3) += a;
  i_minus_v.block(m2, 0, m3, m2) += a.transpose();
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(ms, ms);
  dh.topLeftCorner(m2, m2) = sym_sqrt(c221);
  dh.bottomRightCorner(m3, m3) = sym_sqrt(c331);
  Eigen::MatrixXd g = dh * i_minus_v * dh;
  Eigen::MatrixXd g_inv = g.ldlt().solve(Eigen::MatrixXd::Identity(ms, ms));

  Eigen::MatrixXd e(m1, ms);
  e.leftCols(m2) = q.m12;
  e.rightCols(m3) = q.m13;
  Eigen::MatrixXd eg = e * g_inv;

  Eigen::MatrixXd inv(m1 + ms, m1 + ms);
  inv.topLeftCorner(m1, m1) =
      Eigen::MatrixXd::Identity(m1, m1) + eg * e.transpose();
  inv.topRightCorner(m1, ms) = -eg;
  inv.bottomLeftCorner(ms, m1) = -g_inv * e.transpose();
  inv.bottomRightCorner(ms, ms) = g_inv;
  return inv;
}

double hq_inner(const HQElement& h, const HQElement& hp,
                const Eigen::MatrixXd& q_full) {
  Eigen::VectorXd x = h.flat(), y = hp.flat();
  if (x.size() != q_full.rows() || y.size() != q_full.rows())
    throw std::invalid_argument("hq_inner: dimension mismatch");
  return x.dot(q_full.ldlt().solve(y));
}

double hq_inner(const HQElement& h, const HQElement& hp, const BlockOperator2& q) {
  return hq_inner(h, hp, assemble(q));
}

double hq_inner(const HQElement& h, const HQElement& hp, const BlockOperator3& q) {
  return hq_inner(h, hp, assemble(q));
}

std::pair<HQElement, HQElement> project_L1_M2(const Eigen::VectorXd& f2,
                                              const BlockOperator2& q) {
  if (f2.size() != q.dim2())
    throw std::invalid_argument("project_L1_M2: dimension mismatch");
  Eigen::VectorXd c12f2 = q.m12 * f2;
  HQElement l1, l2;
  l1.parts = {c12f2, q.m12.transpose() * c12f2};
  l2.parts = {Eigen::VectorXd::Zero(q.dim1()),
              f2 - q.m12.transpose() * c12f2};  // (0, C22.1 f2)
  return {l1, l2};
}

Eigen::MatrixXd c0_matrix(const BlockOperator3& q) {
  Eigen::Index m2 = q.dim2(), m3 = q.dim3();
  Eigen::MatrixXd c221 =
      Eigen::MatrixXd::Identity(m2, m2) - q.m12.transpose() * q.m12;
  Eigen::MatrixXd c331 =
      Eigen::MatrixXd::Identity(m3, m3) - q.m13.transpose() * q.m13;
  Eigen::MatrixXd c23_cond = q.m23 - q.m12.transpose() * q.m13;  // C23 - C21 C13
  return c331 - c23_cond.transpose() * c221.ldlt().solve(c23_cond);
}

std::array<HQElement, 3> project_M3_components(const Eigen::VectorXd& f3,
                                               const BlockOperator3& q) {
  q.check_shapes();
  if (f3.size() != q.dim3())
    throw std::invalid_argument("project_M3_components: dimension mismatch");
  Eigen::Index m2 = q.dim2();
  Eigen::MatrixXd c221 =
      Eigen::MatrixXd::Identity(m2, m2) - q.m12.transpose() * q.m12;
  Eigen::MatrixXd c23_cond = q.m23 - q.m12.transpose() * q.m13;
  Eigen::VectorXd c13f3 = q.m13 * f3;
  Eigen::VectorXd zero1 = Eigen::VectorXd::Zero(q.dim1());

  HQElement l1;
  l1.parts = {c13f3, q.m12.transpose() * c13f3, q.m13.transpose() * c13f3};

  // L2 component: (0, (C23 - C21 C13) f3, (C32 - C31 C12) C22.1^{-1} (C23 - C21 C13) f3)
  Eigen::VectorXd mid = c23_cond * f3;
  Eigen::VectorXd f2_star = c221.ldlt().solve(mid);
  HQElement l2;
  l2.parts = {zero1, mid, c23_cond.transpose() * f2_star};

  HQElement l3;
  l3.parts = {zero1, Eigen::VectorXd::Zero(m2), c0_matrix(q) * f3};
  return {l1, l2, l3};
}

Eigen::MatrixXd bstarb2_matrix(const BlockOperator2& q) {
  Eigen::Index m2 = q.dim2();
  Eigen::MatrixXd c2112 = q.m12.transpose() * q.m12;
  Eigen::MatrixXd c221 = Eigen::MatrixXd::Identity(m2, m2) - c2112;
  return c2112 * c221.ldlt().solve(Eigen::MatrixXd::Identity(m2, m2));
}

Eigen::VectorXd bstarb_2(const Eigen::VectorXd& f2_tilde, const BlockOperator2& q) {
  if (f2_tilde.size() != q.dim2())
    throw std::invalid_argument("bstarb_2: dimension mismatch");
  require_assumption1(q.m12, 1e-6, "bstarb_2");
  return bstarb2_matrix(q) * f2_tilde;
}

Eigen::MatrixXd bstarb3_matrix(const BlockOperator3& q) {
  Eigen::Index m2 = q.dim2(), m3 = q.dim3();
  Eigen::MatrixXd c221 =
      Eigen::MatrixXd::Identity(m2, m2) - q.m12.transpose() * q.m12;
  Eigen::MatrixXd c23_cond = q.m23 - q.m12.transpose() * q.m13;
  Eigen::MatrixXd k = c23_cond.transpose() * c221.ldlt().solve(c23_cond);
  Eigen::MatrixXd c0 = c0_matrix(q);
  return k * c0.ldlt().solve(Eigen::MatrixXd::Identity(m3, m3));
}

Eigen::VectorXd bstarb_3(const Eigen::VectorXd& f3_tilde, const BlockOperator3& q) {
  q.check_shapes();
  if (f3_tilde.size() != q.dim3())
    throw std::invalid_argument("bstarb_3: dimension mismatch");
  require_assumption1(q.m12, 1e-6, "bstarb_3 (1,2)");
  require_assumption1(q.m13, 1e-6, "bstarb_3 (1,3)");
  return bstarb3_matrix(q) * f3_tilde;
}

std::vector<Eigen::MatrixXd> m_bases(const BlockOperator2& q) {
  Eigen::Index m1 = q.dim1(), m2 = q.dim2();
  Eigen::MatrixXd b1(m1 + m2, m1), b2(m1 + m2, m2);
  b1.topRows(m1) = Eigen::MatrixXd::Identity(m1, m1);
  b1.bottomRows(m2) = q.m12.transpose();
  b2.topRows(m1) = q.m12;
  b2.bottomRows(m2) = Eigen::MatrixXd::Identity(m2, m2);
  return {b1, b2};
}

std::vector<Eigen::MatrixXd> m_bases(const BlockOperator3& q) {
  Eigen::Index m1 = q.dim1(), m2 = q.dim2(), m3 = q.dim3();
  Eigen::Index n = m1 + m2 + m3;
  Eigen::MatrixXd b1(n, m1), b2(n, m2), b3(n, m3);
  b1.topRows(m1) = Eigen::MatrixXd::Identity(m1, m1);
  b1.middleRows(m1, m2) = q.m12.transpose();
  b1.bottomRows(m3) = q.m13.transpose();
  b2.topRows(m1) = q.m12;
  b2.middleRows(m1, m2) = Eigen::MatrixXd::Identity(m2, m2);
  b2.bottomRows(m3) = q.m23.transpose();
  b3.topRows(m1) = q.m13;
  b3.middleRows(m1, m2) = q.m23;
  b3.bottomRows(m3) = Eigen::MatrixXd::Identity(m3, m3);
  return {b1, b2, b3};
}

std::vector<Eigen::MatrixXd> sunder_decompose(
    const std::vector<Eigen::MatrixXd>& subspace_bases,
    const Eigen::MatrixXd& q_full) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(q_full);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw assumption_error("sunder_decompose: Q not positive definite", 0.0);

  Eigen::Index n = q_full.rows();
  std::vector<Eigen::MatrixXd> out;
  Eigen::MatrixXd accum(n, 0);  // H(Q)-orthonormal columns accumulated so far
  for (const auto& basis : subspace_bases) {
    if (basis.rows() != n)
      throw std::invalid_argument("sunder_decompose: basis row mismatch");
    Eigen::MatrixXd r = basis;
    if (accum.cols() > 0)
      r -= accum * (accum.transpose() * ldlt.solve(basis));
    // Second pass for numerical orthogonality.
    if (accum.cols() > 0)
      r -= accum * (accum.transpose() * ldlt.solve(r));
    Eigen::MatrixXd gram = r.transpose() * ldlt.solve(r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    double max_ev = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(max_ev > 0) || es.eigenvalues().minCoeff() < 1e-10 * max_ev)
      throw assumption_error(
          "sunder_decompose: rank-deficient block (direct sum violated)",
          es.eigenvalues().minCoeff());
    Eigen::MatrixXd lk = r * es.eigenvectors() *
                         es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
    out.push_back(lk);
    Eigen::MatrixXd grown(n, accum.cols() + lk.cols());
    grown << accum, lk;
    accum = grown;
  }
  return out;
}

void canonicalize_svd(Eigen::VectorXd& sigma, Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  const Eigen::Index d = sigma.size();
  std::vector<Eigen::Index> order(d);
  for (Eigen::Index i = 0; i < d; ++i) order[i] = i;
  auto lex_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      if (v(r, a) < v(r, b) - 1e-12) return true;
      if (v(r, a) > v(r, b) + 1e-12) return false;
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (sigma[a] > sigma[b] + 1e-12) return true;
    if (sigma[a] < sigma[b] - 1e-12) return false;
    return lex_less(a, b);
  });
  Eigen::VectorXd s2(d);
  Eigen::MatrixXd u2(u.rows(), d), v2(v.rows(), d);
  for (Eigen::Index i = 0; i < d; ++i) {
    s2[i] = sigma[order[i]];
    u2.col(i) = u.col(order[i]);
    v2.col(i) = v.col(order[i]);
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::Index arg;
    v2.col(i).cwiseAbs().maxCoeff(&arg);
    if (v2(arg, i) < 0) {
      v2.col(i) = -v2.col(i);
      u2.col(i) = -u2.col(i);
    }
    // If the pair is effectively decoupled (zero singular value), fix the
    // left vector's sign independently as well.
    if (s2[i] <= 1e-12) {
      u2.col(i).cwiseAbs().maxCoeff(&arg);
      if (u2(arg, i) < 0) u2.col(i) = -u2.col(i);
    }
  }
  sigma = s2;
  u = u2;
  v = v2;
}

std::vector<CanonicalPair> cca_from_operators(const OperatorMatrix& m12, double tol) {
  if (m12.mode != OperatorMode::correlation)
    throw std::invalid_argument("cca_from_operators: correlation mode required");
  require_assumption1(m12.entries, tol, "cca_from_operators");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m12.entries,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sigma = svd.singularValues();
  Eigen::MatrixXd u = svd.matrixU(), v = svd.matrixV();
  canonicalize_svd(sigma, u, v);
  std::vector<CanonicalPair> out;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    out.push_back({sigma[i], u.col(i), v.col(i)});
  return out;
}

std::vector<CanonicalPair> pcca_from_operators(const OperatorMatrix& m12,
                                               const OperatorMatrix& m13,
                                               const OperatorMatrix& m23, double tol) {
  if (m12.mode != OperatorMode::correlation ||
      m13.mode != OperatorMode::correlation || m23.mode != OperatorMode::correlation)
    throw std::invalid_argument("pcca_from_operators: correlation mode required");
  BlockOperator3 q{m12.entries, m13.entries, m23.entries};
  q.check_shapes();
  require_assumption1(q.m12, tol, "pcca_from_operators (1,2)");
  require_assumption1(q.m13, tol, "pcca_from_operators (1,3)");
  Eigen::Index m2 = q.dim2(), m3 = q.dim3();
  Eigen::MatrixXd c221 =
      Eigen::MatrixXd::Identity(m2, m2) - q.m12.transpose() * q.m12;
  Eigen::MatrixXd c331 =
      Eigen::MatrixXd::Identity(m3, m3) - q.m13.transpose() * q.m13;
  Eigen::MatrixXd w2 = sym_inv_sqrt(c221);
  Eigen::MatrixXd w3 = sym_inv_sqrt(c331);
  // C33.1^{-1/2} (C32 - C31 C12) C22.1^{-1/2}, maps H(S2) -> H(S3).
  Eigen::MatrixXd nmat =
      w3 * (q.m23.transpose() - q.m13.transpose() * q.m12) * w2;
  double vnorm = spectral_norm(nmat);
  if (!(vnorm <= 1.0 - tol))
    throw assumption_error("pcca_from_operators: conditional norm bound violated",
                           vnorm);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(nmat,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sigma = svd.singularValues();
  Eigen::MatrixXd u3 = svd.matrixU(), v2 = svd.matrixV();
  canonicalize_svd(sigma, u3, v2);
  std::vector<CanonicalPair> out;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    Eigen::VectorXd f2 = w2 * v2.col(i);
    Eigen::VectorXd f3 = w3 * u3.col(i);
    f2.normalize();
    f3.normalize();
    out.push_back({sigma[i], f2, f3});
  }
  return out;
}

}  // namespace fcca
