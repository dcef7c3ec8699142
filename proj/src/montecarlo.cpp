#include "fcca/montecarlo.hpp"

#include <cmath>

#include "fcca/rng.hpp"

namespace fcca {

McReport run_montecarlo(const McConfig& cfg) {
  if (cfg.replications < 2) throw data_error("run_montecarlo: replications >= 2");
  const Eigen::Index r = cfg.replications;
  McReport report;
  report.d1.resize(r);
  report.d2.resize(r);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (Eigen::Index i = 0; i < r; ++i) {
    SimConfig sim;
    sim.n = cfg.n;
    sim.p = cfg.grid_points;
    sim.kl_terms = cfg.kl_terms;
    sim.seed = substream_seed(cfg.seed, static_cast<std::uint64_t>(i));
    sim.model = cfg.model;
    Eigen::VectorXd d;
    if (cfg.model == SimModel::cca_pair) {
      auto [ds1, ds2] = simulate_cca_pair(sim);
      d = estimate_cca(ds1, ds2, cfg.harmonics, cfg.mode).correlations;
    } else {
      auto [dsc, ds2, ds3] = simulate_pcca_triple(sim);
      d = estimate_pcca(dsc, ds2, ds3, cfg.harmonics, cfg.mode).correlations;
    }
    report.d1[i] = d.size() > 0 ? d[0] : 0.0;
    report.d2[i] = d.size() > 1 ? d[1] : 0.0;
  }

  auto summarize = [r](const std::vector<double>& x, double& mean, double& sd) {
    mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(r);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    sd = std::sqrt(ss / static_cast<double>(r - 1));
  };
  summarize(report.d1, report.mean_d1, report.sd_d1);
  summarize(report.d2, report.mean_d2, report.sd_d2);
  return report;
}

}  // namespace fcca
