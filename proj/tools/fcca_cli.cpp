#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>

#include "fcca/estimators.hpp"
#include "fcca/io.hpp"
#include "fcca/montecarlo.hpp"
#include "fcca/simulate.hpp"
#include "fcca/verify.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json json_vector(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json json_columns(const Eigen::MatrixXd& m) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(json_vector(m.col(j)));
  return a;
}

ordered_json json_rows(const Eigen::MatrixXd& m) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    a.push_back(json_vector(m.row(i).transpose()));
  return a;
}

void emit_report(const ordered_json& report, const std::string& out_path) {
  std::string text = report.dump(2);
  text.push_back('\n');
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw fcca::io_error("cannot open for writing: " + out_path);
  out << text;
  if (!out) throw fcca::io_error("write failed: " + out_path);
}

fcca::SimModel parse_model(const std::string& s) {
  if (s == "cca" || s == "cca-pair") return fcca::SimModel::cca_pair;
  if (s == "pcca" || s == "pcca-triple") return fcca::SimModel::pcca_triple;
  throw CLI::ValidationError("--model", "unknown model: " + s);
}

fcca::OperatorMode parse_mode(const std::string& s) {
  return s == "covariance" ? fcca::OperatorMode::covariance
                           : fcca::OperatorMode::correlation;
}

ordered_json estimate_report(const char* command, const fcca::CcaEstimate& est,
                             const Eigen::VectorXd& grid, const std::string& mode) {
  ordered_json report;
  report["schema"] = 1;
  report["command"] = command;
  report["mode"] = mode;
  report["harmonics"] = est.harmonics;
  report["correlations"] = json_vector(est.correlations);
  report["left_coefficients"] = json_columns(est.left_coeffs);
  report["right_coefficients"] = json_columns(est.right_coeffs);
  report["grid"] = json_vector(grid);
  report["left_weight_functions"] = json_columns(est.left_weights);
  report["right_weight_functions"] = json_columns(est.right_weights);
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional canonical and partial canonical correlation analysis"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate synthetic process datasets");
  std::string sim_model = "cca-pair", sim_out = "sim";
  fcca::SimConfig sim_cfg;
  sim_cfg.n = 100;
  sim->add_option("--model", sim_model, "cca-pair or pcca-triple");
  sim->add_option("--n", sim_cfg.n, "number of sample paths");
  sim->add_option("--grid-points", sim_cfg.p, "grid size");
  sim->add_option("--kl-terms", sim_cfg.kl_terms, "expansion truncation");
  sim->add_option("--seed", sim_cfg.seed, "random seed");
  sim->add_option("--beta1", sim_cfg.beta1, "first confounder loading");
  sim->add_option("--beta2", sim_cfg.beta2, "second confounder loading");
  sim->add_option("--out", sim_out, "output file prefix");

  // fpca
  auto* fp = app.add_subcommand("fpca", "Functional principal component analysis");
  std::string fp_in, fp_out, fp_mode = "correlation";
  Eigen::Index fp_m = 9;
  bool fp_json = false;
  fp->add_option("--in", fp_in, "input CSV")->required();
  fp->add_option("--harmonics", fp_m, "number of components");
  fp->add_option("--out", fp_out, "output JSON path");
  fp->add_flag("--json", fp_json, "emit JSON (default)");

  // cca
  auto* cc = app.add_subcommand("cca", "Sample canonical correlation analysis");
  std::string cc_in1, cc_in2, cc_out, cc_mode = "correlation";
  Eigen::Index cc_m = 9;
  bool cc_json = false;
  cc->add_option("--in1", cc_in1, "first process CSV")->required();
  cc->add_option("--in2", cc_in2, "second process CSV")->required();
  cc->add_option("--harmonics", cc_m, "retained components per process");
  cc->add_option("--mode", cc_mode, "correlation or covariance")
      ->check(CLI::IsMember({"correlation", "covariance"}));
  cc->add_option("--out", cc_out, "output JSON path");
  cc->add_flag("--json", cc_json, "emit JSON (default)");

  // pcca
  auto* pc = app.add_subcommand("pcca", "Sample partial canonical correlation");
  std::string pc_cond, pc_in1, pc_in2, pc_out, pc_mode = "correlation";
  Eigen::Index pc_m = 9;
  bool pc_json = false;
  pc->add_option("--cond", pc_cond, "conditioning process CSV")->required();
  pc->add_option("--in1", pc_in1, "first process CSV")->required();
  pc->add_option("--in2", pc_in2, "second process CSV")->required();
  pc->add_option("--harmonics", pc_m, "retained components per process");
  pc->add_option("--mode", pc_mode, "correlation or covariance")
      ->check(CLI::IsMember({"correlation", "covariance"}));
  pc->add_option("--out", pc_out, "output JSON path");
  pc->add_flag("--json", pc_json, "emit JSON (default)");

  // montecarlo
  auto* mc = app.add_subcommand("montecarlo", "Replicated estimation experiment");
  std::string mc_model = "cca", mc_out, mc_mode = "covariance";
  fcca::McConfig mc_cfg;
  bool mc_json = false;
  mc->add_option("--model", mc_model, "cca or pcca");
  mc->add_option("--n", mc_cfg.n, "paths per replication");
  mc->add_option("--replications", mc_cfg.replications, "number of replications");
  mc->add_option("--harmonics", mc_cfg.harmonics, "retained components");
  mc->add_option("--grid-points", mc_cfg.grid_points, "grid size");
  mc->add_option("--kl-terms", mc_cfg.kl_terms, "expansion truncation");
  mc->add_option("--mode", mc_mode, "correlation or covariance")
      ->check(CLI::IsMember({"correlation", "covariance"}));
  mc->add_option("--seed", mc_cfg.seed, "random seed");
  mc->add_option("--out", mc_out, "output JSON path");
  mc->add_flag("--json", mc_json, "emit JSON (default)");

  // verify
  auto* vf = app.add_subcommand("verify", "Operator identity verification suite");
  fcca::VerifyOptions vf_opts;
  std::string vf_out;
  bool vf_json = false;
  vf->add_option("--trials", vf_opts.trials, "random trials");
  vf->add_option("--dim", vf_opts.max_dim, "maximum block dimension");
  vf->add_option("--seed", vf_opts.seed, "random seed");
  vf->add_option("--tol-identity", vf_opts.tol_identity, "matrix identity tolerance");
  vf->add_option("--tol-oracle", vf_opts.tol_oracle, "oracle comparison tolerance");
  vf->add_flag("--inject-fault", vf_opts.inject_fault,
               "negative control: corrupt the q2 inverse");
  vf->add_option("--out", vf_out, "output JSON path");
  vf->add_flag("--json", vf_json, "emit JSON (default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (sim->parsed()) {
      sim_cfg.model = parse_model(sim_model);
      if (sim_cfg.model == fcca::SimModel::cca_pair) {
        auto [ds1, ds2] = fcca::simulate_cca_pair(sim_cfg);
        fcca::write_dataset_csv(ds1, sim_out + "_1.csv");
        fcca::write_dataset_csv(ds2, sim_out + "_2.csv");
      } else {
        auto [dsc, ds2, ds3] = fcca::simulate_pcca_triple(sim_cfg);
        fcca::write_dataset_csv(dsc, sim_out + "_1.csv");
        fcca::write_dataset_csv(ds2, sim_out + "_2.csv");
        fcca::write_dataset_csv(ds3, sim_out + "_3.csv");
      }
      return 0;
    }

    if (fp->parsed()) {
      fcca::FunctionalDataset ds = fcca::read_dataset_csv(fp_in);
      fcca::FpcaResult res = fcca::fpca(ds, fp_m);
      ordered_json report;
      report["schema"] = 1;
      report["command"] = "fpca";
      report["harmonics"] = res.eigensystem.size();
      report["grid"] = json_vector(res.eigensystem.grid);
      report["mean_curve"] = json_vector(res.mean_curve);
      report["eigenvalues"] = json_vector(res.eigensystem.eigenvalues);
      report["eigenfunctions"] = json_columns(res.eigensystem.eigenfunctions);
      report["scores"] = json_rows(res.scores);
      emit_report(report, fp_out);
      return 0;
    }

    if (cc->parsed()) {
      fcca::FunctionalDataset ds1 = fcca::read_dataset_csv(cc_in1);
      fcca::FunctionalDataset ds2 = fcca::read_dataset_csv(cc_in2);
      fcca::CcaEstimate est = fcca::estimate_cca(ds1, ds2, cc_m, parse_mode(cc_mode));
      emit_report(estimate_report("cca", est, ds1.grid.points, cc_mode), cc_out);
      return 0;
    }

    if (pc->parsed()) {
      fcca::FunctionalDataset dsc = fcca::read_dataset_csv(pc_cond);
      fcca::FunctionalDataset ds1 = fcca::read_dataset_csv(pc_in1);
      fcca::FunctionalDataset ds2 = fcca::read_dataset_csv(pc_in2);
      fcca::PccaEstimate est =
          fcca::estimate_pcca(dsc, ds1, ds2, pc_m, parse_mode(pc_mode));
      ordered_json report = estimate_report("pcca", est, ds1.grid.points, pc_mode);
      report["regression_coefficients_1"] = json_rows(est.regression_coeffs_2);
      report["regression_coefficients_2"] = json_rows(est.regression_coeffs_3);
      emit_report(report, pc_out);
      return 0;
    }

    if (mc->parsed()) {
      mc_cfg.model = parse_model(mc_model);
      mc_cfg.mode = parse_mode(mc_mode);
      auto t0 = std::chrono::steady_clock::now();
      fcca::McReport rep = fcca::run_montecarlo(mc_cfg);
      auto t1 = std::chrono::steady_clock::now();
      ordered_json report;
      report["schema"] = 1;
      report["command"] = "montecarlo";
      ordered_json config;
      config["model"] = mc_model;
      config["n"] = mc_cfg.n;
      config["replications"] = mc_cfg.replications;
      config["harmonics"] = mc_cfg.harmonics;
      config["grid_points"] = mc_cfg.grid_points;
      config["kl_terms"] = mc_cfg.kl_terms;
      config["mode"] = mc_mode;
      config["seed"] = mc_cfg.seed;
      report["config"] = config;
      report["mean_d1"] = rep.mean_d1;
      report["sd_d1"] = rep.sd_d1;
      report["mean_d2"] = rep.mean_d2;
      report["sd_d2"] = rep.sd_d2;
      report["d1"] = rep.d1;
      report["d2"] = rep.d2;
      emit_report(report, mc_out);
      // Runtime is not part of the report so repeated runs stay byte-identical.
      std::cerr << "runtime_seconds "
                << std::chrono::duration<double>(t1 - t0).count() << "\n";
      return 0;
    }

    if (vf->parsed()) {
      auto checks = fcca::run_verification(vf_opts);
      ordered_json report;
      report["schema"] = 1;
      report["command"] = "verify";
      report["trials"] = vf_opts.trials;
      report["max_dim"] = vf_opts.max_dim;
      report["seed"] = vf_opts.seed;
      bool all_pass = true;
      ordered_json arr = ordered_json::array();
      for (const auto& c : checks) {
        ordered_json jc;
        jc["name"] = c.name;
        jc["max_error"] = c.max_error;
        jc["tol"] = c.tol;
        jc["pass"] = c.pass;
        arr.push_back(jc);
        all_pass = all_pass && c.pass;
      }
      report["checks"] = arr;
      report["all_pass"] = all_pass;
      emit_report(report, vf_out);
      return all_pass ? 0 : 1;
    }
  } catch (const fcca::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const fcca::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 65;
  } catch (const fcca::assumption_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 65;
  } catch (const CLI::ValidationError&) {
    std::cerr << "usage error: unknown option value\n";
    return 64;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 65;
  }
  return 64;
}
