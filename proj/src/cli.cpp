#include "ark/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "ark/diagnostics.hpp"
#include "ark/io.hpp"
#include "ark/knockoffs.hpp"
#include "ark/rng.hpp"
#include "ark/selection.hpp"
#include "ark/simulation.hpp"

namespace ark {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "Random seed (overrides the config)");
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory (default: standard output)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

/// Writes to <out>/<name> when an output directory is set, otherwise to stdout.
template <class F>
void emit(const CommonOptions& o, const std::string& name, F&& write) {
  if (o.out.empty()) {
    write(std::cout);
    return;
  }
  fs::create_directories(o.out);
  const std::string path = (fs::path(o.out) / name).string();
  std::ofstream file(path);
  if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  write(file);
}

int run_simulate(const std::string& config_path, const CommonOptions& o) {
  SimConfig config = load_config(config_path);
  if (o.seed) config.seed = *o.seed;
  config.threads = o.threads;
  const SimReport report = run_simulation(config);
  if (o.format == "json") {
    emit(o, "replications.json", [&](std::ostream& s) { s << replications_json(report).dump(2) << '\n'; });
    emit(o, "summary.json", [&](std::ostream& s) { s << summary_json(report).dump(2) << '\n'; });
  } else {
    emit(o, "replications.csv", [&](std::ostream& s) { write_replications_csv(s, report); });
    emit(o, "summary.csv", [&](std::ostream& s) { write_summary_csv(s, report); });
  }
  if (!o.out.empty()) {
    std::cout << "fdr=" << format_real(report.fdr) << " power=" << format_real(report.power)
              << " mcse=" << format_real(report.mcse) << " reps=" << report.successes()
              << " failures=" << report.failures.size() << "\n";
  }
  return 0;
}

int run_knockoffs(const std::string& x_path, const std::string& sigma_path,
                  std::optional<double> r, const CommonOptions& o) {
  const Matrix x = read_matrix_csv(x_path);
  const SymMatrix sigma = sigma_path.empty() ? shrinkage_covariance(x).sigma
                                             : SymMatrix(read_matrix_csv(sigma_path));
  const WorkingModel model = WorkingModel::from_covariance(sigma, r);
  const KnockoffBundle ko = gaussian_knockoffs(x, model, derive_seed(o.seed.value_or(1), {kTagKnockoffs}));
  emit(o, "x_hat.csv", [&](std::ostream& s) { write_matrix_csv(s, ko.x_hat); });
  return 0;
}

int run_select(const std::string& w_path, const std::string& rule, double q, int offset, int k,
               const std::string& beta_path, const CommonOptions& o) {
  const Vector w = read_vector_csv(w_path);
  const SelectionOutcome sel = rule == "kfwer" ? kfwer_threshold(w, k, q) : fdr_threshold(w, q, offset);
  std::optional<GroundTruth> truth;
  if (!beta_path.empty()) {
    truth = GroundTruth::from_beta(read_vector_csv(beta_path));
    if (truth->p() != w.size()) throw Error(ErrorKind::DimensionMismatch, "beta and W lengths differ");
  }
  if (o.format == "json") {
    nlohmann::json j = {{"rule", to_string(sel.rule)}, {"q", sel.q}, {"n_selected", sel.selected.size()}};
    j["threshold"] = std::isfinite(sel.threshold) ? nlohmann::json(sel.threshold) : nlohmann::json("inf");
    if (sel.rule == SelectionRule::kfwer) {
      j["k"] = sel.k;
      j["v"] = sel.v;
    } else {
      j["offset"] = sel.offset;
    }
    nlohmann::json idx = nlohmann::json::array();
    for (Eigen::Index s : sel.selected) idx.push_back(s + 1);
    j["selected"] = idx;
    if (truth) {
      const Score sc = score(sel, *truth);
      j["fdp"] = sc.fdp;
      j["power"] = sc.power;
    }
    emit(o, "selection.json", [&](std::ostream& s) { s << j.dump(2) << '\n'; });
  } else {
    emit(o, "selection.csv", [&](std::ostream& s) { write_selection_csv(s, sel, truth ? &*truth : nullptr); });
  }
  return 0;
}

struct DiagnoseInputs {
  std::string a, b, x, omega_hat, omega;
  std::optional<double> nu, r;
  int resamples = 20;
};

int run_diagnose(const DiagnoseInputs& in, const CommonOptions& o) {
  const Matrix a = read_matrix_csv(in.a);
  const Matrix b = read_matrix_csv(in.b);
  CouplingReport report;
  report.norm_1_2 = coupling_norm(a, b);
  std::optional<Matrix> x;
  if (!in.x.empty()) x = read_matrix_csv(in.x);
  if (!in.omega_hat.empty() || !in.omega.empty()) {
    if (in.omega_hat.empty() || in.omega.empty() || !in.r) {
      throw Error(ErrorKind::InvalidArgument, "--omega-hat, --omega and --r must be given together");
    }
    const SymMatrix omega_hat(read_matrix_csv(in.omega_hat));
    const SymMatrix omega(read_matrix_csv(in.omega));
    report.lemma2_constant = lemma2_condition_constant(knockoff_sqrt_factor(omega_hat, *in.r),
                                                       knockoff_sqrt_factor(omega, *in.r));
    if (x) {
      report.wasserstein_estimate =
          wasserstein_coupling_estimate(*x, omega_hat, omega, *in.r, in.resamples, o.seed.value_or(1)).mean;
    }
  }
  if (in.nu) {
    if (!x) throw Error(ErrorKind::InvalidArgument, "--nu needs --x (the observed features)");
    report.kl_stats = empirical_kl_t_vs_gaussian(*x, a, *in.nu);
  }
  emit(o, "coupling_report.json", [&](std::ostream& s) { s << coupling_report_json(report).dump(2) << '\n'; });
  if (report.kl_stats) emit(o, "kl.csv", [&](std::ostream& s) { write_kl_csv(s, *report.kl_stats); });
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Approximate model-X knockoffs: simulation and diagnostics"};
  app.require_subcommand(1);

  CommonOptions sim_opts, ko_opts, sel_opts, diag_opts;

  std::string config_path;
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo simulation from a config file");
  sim->add_option("--config", config_path, "Config file (key = value)")->required();
  add_common(sim, sim_opts);

  std::string x_path, sigma_path;
  std::optional<double> r;
  auto* ko = app.add_subcommand("knockoffs", "Generate Gaussian knockoffs for a feature matrix");
  ko->add_option("--x", x_path, "Feature matrix CSV")->required();
  ko->add_option("--sigma", sigma_path, "Working covariance CSV (default: shrinkage estimate)");
  ko->add_option("--r", r, "Equicorrelation parameter (default: 0.95 min(2 lambda_min, min diag))");
  add_common(ko, ko_opts);

  std::string w_path, rule = "fdr", beta_path;
  double q = 0.2;
  int offset = 0, k = 1;
  auto* sel = app.add_subcommand("select", "Threshold knockoff statistics");
  sel->add_option("--w", w_path, "Statistic vector CSV")->required();
  sel->add_option("--rule", rule, "Selection rule")->check(CLI::IsMember({"fdr", "kfwer"}));
  sel->add_option("--q", q, "Target level");
  sel->add_option("--offset", offset, "FDR offset (1 = knockoff+)")->check(CLI::IsMember({0, 1}));
  sel->add_option("--k", k, "k for the k-FWER rule")->check(CLI::PositiveNumber);
  sel->add_option("--beta", beta_path, "True coefficients CSV, enables fdp and power");
  add_common(sel, sel_opts);

  DiagnoseInputs diag_in;
  auto* diag = app.add_subcommand("diagnose", "Coupling diagnostics for paired knockoff matrices");
  diag->add_option("--a", diag_in.a, "Approximate knockoffs CSV")->required();
  diag->add_option("--b", diag_in.b, "Perfect knockoffs CSV")->required();
  diag->add_option("--x", diag_in.x, "Observed features CSV");
  diag->add_option("--omega-hat", diag_in.omega_hat, "Working precision CSV");
  diag->add_option("--omega", diag_in.omega, "True precision CSV");
  diag->add_option("--r", diag_in.r, "Equicorrelation parameter");
  diag->add_option("--nu", diag_in.nu, "Degrees of freedom for the empirical KL statistic");
  diag->add_option("--resamples", diag_in.resamples, "Noise resamples for the coupling estimate")
      ->check(CLI::PositiveNumber);
  add_common(diag, diag_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sim) return run_simulate(config_path, sim_opts);
    if (*ko) return run_knockoffs(x_path, sigma_path, r, ko_opts);
    if (*sel) return run_select(w_path, rule, q, offset, k, beta_path, sel_opts);
    if (*diag) return run_diagnose(diag_in, diag_opts);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.is_numerical() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ark
