#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <tuple>
#include <utility>

#include "fcca/fpca.hpp"

namespace fcca {

enum class SimModel { cca_pair, pcca_triple };

struct SimConfig {
  Eigen::Index n = 0;
  Eigen::Index p = 100;        // grid size
  Eigen::Index kl_terms = 20;  // truncation of the sine expansions
  std::uint64_t seed = 0;
  SimModel model = SimModel::cca_pair;
  double beta1 = 1.0;  // confounder loadings for the pcca_triple model
  double beta2 = 2.0;

  void validate() const;
};

/// Pair of processes on the midpoint grid:
///   X1(t) = sum_j j^{-1/2} Z1j sqrt(2) sin(j pi t)
///   X2(t) = (Z11 + Z21) sin(pi t) + sum_{j>=2} j^{-1/2} Z2j sqrt(2) sin(j pi t)
/// with all Zij i.i.d. standard normal. First canonical correlation 1/sqrt(2).
std::pair<FunctionalDataset, FunctionalDataset> simulate_cca_pair(const SimConfig& cfg);

/// The confounded triple: conditioning paths Z cos(pi t); the other two are
/// the cca_pair outputs minus beta1 Z cos(pi t) and beta2 Z cos(pi t).
/// Returns (conditioning, X2, X3). With beta = (0,0) the last two are
/// bit-identical to simulate_cca_pair at the same seed.
std::tuple<FunctionalDataset, FunctionalDataset, FunctionalDataset>
simulate_pcca_triple(const SimConfig& cfg);

/// Generic finite Karhunen-Loeve generator: paths sum_j c_kj phi_j with
/// coefficient rows drawn N(0, coeff_cov). `basis` is p x K.
FunctionalDataset simulate_kl(const Eigen::MatrixXd& basis,
                              const Eigen::MatrixXd& coeff_cov, Eigen::Index n,
                              std::uint64_t seed, const Grid& grid);

}  // namespace fcca
