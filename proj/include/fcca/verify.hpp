#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fcca/operator_algebra.hpp"

namespace fcca {

struct IdentityCheck {
  std::string name;
  double max_error = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  int trials = 200;
  int max_dim = 8;
  std::uint64_t seed = 42;
  double tol_identity = 1e-9;  // exact-arithmetic matrix identities
  double tol_oracle = 1e-8;    // Gram/composition/Hotelling oracles
  bool inject_fault = false;   // negative control: flips a sign in the
                               // q2 inverse before checking it
};

/// Runs the operator identity suite on seeded random instances: Q inverses,
/// congruence, closed-form projections vs the Gram oracle, B*B closed forms
/// vs the projection-composition oracle, spectral mapping, Sunder
/// orthogonality, the conditional-norm bound, and the Hotelling/Roy oracle
/// equivalences.
std::vector<IdentityCheck> run_verification(const VerifyOptions& opts);

/// Projection of h onto span(columns of basis) in the metric <x, Q^{-1} y>,
/// by normal equations against the Gram matrix of the spanning set. This is
/// the independent oracle used by the closed-form projection tests.
Eigen::VectorXd gram_project(const Eigen::MatrixXd& basis, const Eigen::VectorXd& h,
                             const Eigen::LDLT<Eigen::MatrixXd>& q_ldlt);

/// Random block operators with valid assumptions (assembled Q positive
/// definite), drawn from a block-normalized random SPD matrix.
BlockOperator2 random_block2(Eigen::Index m1, Eigen::Index m2, std::uint64_t seed,
                             double max_norm = 0.9);
BlockOperator3 random_block3(Eigen::Index m1, Eigen::Index m2, Eigen::Index m3,
                             std::uint64_t seed);

}  // namespace fcca
