#pragma once

#include <Eigen/Dense>
#include <array>
#include <utility>
#include <vector>

#include "fcca/hilbert.hpp"

namespace fcca {

/// Two-process block operator Q = [[I, M12],[M12^T, I]] in orthonormal
/// coordinates. M12 is the correlation-mode matrix of C12, m1 x m2.
struct BlockOperator2 {
  Eigen::MatrixXd m12;
  Eigen::Index dim1() const { return m12.rows(); }
  Eigen::Index dim2() const { return m12.cols(); }
  Eigen::Index total_dim() const { return m12.rows() + m12.cols(); }
};

/// Three-process Q with identity diagonal and cross blocks M12 (m1 x m2),
/// M13 (m1 x m3), M23 (m2 x m3).
struct BlockOperator3 {
  Eigen::MatrixXd m12, m13, m23;
  Eigen::Index dim1() const { return m12.rows(); }
  Eigen::Index dim2() const { return m12.cols(); }
  Eigen::Index dim3() const { return m13.cols(); }
  Eigen::Index total_dim() const { return dim1() + dim2() + dim3(); }
  void check_shapes() const;
};

/// Element of the ambient product space H0: two or three coordinate blocks.
struct HQElement {
  std::vector<Eigen::VectorXd> parts;

  Eigen::VectorXd flat() const;
  static HQElement from_flat(const Eigen::VectorXd& v,
                             const std::vector<Eigen::Index>& dims);
};

Eigen::MatrixXd assemble(const BlockOperator2& q);
Eigen::MatrixXd assemble(const BlockOperator3& q);

HQElement q_apply(const BlockOperator2& q, const HQElement& h);
HQElement q_apply(const BlockOperator3& q, const HQElement& h);

/// Closed-form inverse [[C11.2^{-1}, -C12 C22.1^{-1}],[-C21 C11.2^{-1}, C22.1^{-1}]].
Eigen::MatrixXd q2_inverse(const BlockOperator2& q, double tol = 1e-6);

/// Closed-form inverse through the Schur factor G = D^{1/2}(I - V)D^{1/2}
/// with D = diag(C22.1, C33.1) and V the whitened conditional cross block.
Eigen::MatrixXd q3_inverse(const BlockOperator3& q, double tol = 1e-6);

/// <h, Q^{-1} h'>_0, the H(Q) inner product. Solves against the assembled Q.
double hq_inner(const HQElement& h, const HQElement& hp, const Eigen::MatrixXd& q_full);
double hq_inner(const HQElement& h, const HQElement& hp, const BlockOperator2& q);
double hq_inner(const HQElement& h, const HQElement& hp, const BlockOperator3& q);

/// For h = (C12 f2, f2) in M2: returns the L1 projection (C12 f2, C21 C12 f2)
/// and the L2 remainder (0, C22.1 f2). The two sum to h.
std::pair<HQElement, HQElement> project_L1_M2(const Eigen::VectorXd& f2,
                                              const BlockOperator2& q);

/// For h = (C13 f3, C23 f3, f3) in M3: the L1, L2, L3 components, summing to h.
/// The L3 component is (0, 0, C0 f3).
std::array<HQElement, 3> project_M3_components(const Eigen::VectorXd& f3,
                                               const BlockOperator3& q);

/// Matrix of B*B restricted to the second slot: C21 C12 C22.1^{-1}.
Eigen::MatrixXd bstarb2_matrix(const BlockOperator2& q);
Eigen::VectorXd bstarb_2(const Eigen::VectorXd& f2_tilde, const BlockOperator2& q);

/// Matrix of B*B restricted to the third slot:
/// (C32 - C31 C12) C22.1^{-1} (C23 - C21 C13) C0^{-1}.
Eigen::MatrixXd bstarb3_matrix(const BlockOperator3& q);
Eigen::VectorXd bstarb_3(const Eigen::VectorXd& f3_tilde, const BlockOperator3& q);

/// C0 = C33.1 - (C32 - C31 C12) C22.1^{-1} (C23 - C21 C13).
Eigen::MatrixXd c0_matrix(const BlockOperator3& q);

/// Block Gram-Schmidt in the H(Q) metric: given spanning sets of subspaces
/// M_1,...,M_n (columns in ambient coordinates), returns H(Q)-orthonormal
/// bases of L_k = (sum_{i<=k} M_i) ∩ (sum_{i<k} M_i)^⊥. Throws on rank
/// deficiency (violated algebraic direct sum).
std::vector<Eigen::MatrixXd> sunder_decompose(
    const std::vector<Eigen::MatrixXd>& subspace_bases, const Eigen::MatrixXd& q_full);

struct CanonicalPair {
  double rho;
  Eigen::VectorXd f1;  // weight vector in the first (or second, for PCCA) space
  Eigen::VectorXd f2;  // weight vector in the second (or third) space
};

/// Canonical correlations and weight vectors: the singular system of M12.
std::vector<CanonicalPair> cca_from_operators(const OperatorMatrix& m12,
                                              double tol = 1e-6);

/// Partial canonical correlations: singular values of
/// C33.1^{-1/2} (C32 - C31 C12) C22.1^{-1/2}, with weight vectors
/// back-transformed through the inverse square roots. Pairs are (rho, f2, f3).
std::vector<CanonicalPair> pcca_from_operators(const OperatorMatrix& m12,
                                               const OperatorMatrix& m13,
                                               const OperatorMatrix& m23,
                                               double tol = 1e-6);

/// Symmetric PSD matrix powers via eigendecomposition; eigenvalues below
/// `floor_rel` times the largest raise an error.
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& a, double floor_rel = 1e-12);
Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& a, double floor_rel = 1e-12);

/// Spectral norm (largest singular value).
double spectral_norm(const Eigen::MatrixXd& a);

/// Deterministic singular system: values non-increasing, ties ordered by
/// lexicographic comparison of right singular vectors, sign fixed so the
/// largest-magnitude entry of each right vector is positive.
void canonicalize_svd(Eigen::VectorXd& sigma, Eigen::MatrixXd& u, Eigen::MatrixXd& v);

/// Spanning sets of the subspaces M_i in ambient coordinates, columns
/// Q applied to slot-i unit vectors.
std::vector<Eigen::MatrixXd> m_bases(const BlockOperator2& q);
std::vector<Eigen::MatrixXd> m_bases(const BlockOperator3& q);

}  // namespace fcca
