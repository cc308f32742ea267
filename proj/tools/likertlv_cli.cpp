// likertlv: simulate, estimate and study longitudinal Likert latent variable models.
//
// Exit codes: 0 success, 1 estimation failure, 2 input error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "likertlv/cutpoints.hpp"
#include "likertlv/errors.hpp"
#include "likertlv/io.hpp"
#include "likertlv/reconstruction.hpp"
#include "likertlv/stem.hpp"
#include "likertlv/study.hpp"

namespace fs = std::filesystem;
using namespace likertlv;

namespace {

constexpr int kExitEstimation = 1;
constexpr int kExitInput = 2;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config '" + path + "': " + e.what());
  }
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

struct StemFlags {
  int iterations = 1000;
  int burn_in = -1;
  int gibbs_sweeps = 10;
  std::uint64_t seed = 1;
  int threads = 1;

  StemConfig config() const {
    StemConfig c;
    c.iterations = iterations;
    c.burn_in = burn_in;
    c.gibbs_sweeps = gibbs_sweeps;
    c.seed = seed;
    c.threads = threads;
    return c;
  }
};

void add_stem_flags(CLI::App* cmd, StemFlags& flags) {
  cmd->add_option("--iterations", flags.iterations, "StEM iterations R")->capture_default_str();
  cmd->add_option("--burn-in", flags.burn_in, "Iterations excluded from averages (default R/10)");
  cmd->add_option("--gibbs-sweeps", flags.gibbs_sweeps, "Gibbs scans per imputation")->capture_default_str();
  cmd->add_option("--seed", flags.seed, "Master seed")->capture_default_str();
  cmd->add_option("--threads", flags.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

std::string signed_square(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v * v;
  if (v < 0.0) s << "(-)";
  return s.str();
}

void print_parameter_table(std::ostream& out, const std::string& title, const ModelParams& p) {
  out << title << '\n' << std::left << std::setw(14) << "item";
  for (int j = 0; j < p.items(); ++j) out << std::setw(9) << j + 1;
  out << '\n' << std::setw(14) << "sigma^2";
  for (int j = 0; j < p.items(); ++j) out << std::setw(9) << signed_square(p.sigma[j]);
  out << '\n' << std::setw(14) << "tau^2";
  for (int j = 0; j < p.items(); ++j) out << std::setw(9) << signed_square(p.tau[j]);
  out << '\n' << std::setw(14) << "gamma^2";
  const Eigen::VectorXd g = p.gamma_sq();
  for (int j = 0; j < p.items(); ++j) out << std::setw(9) << signed_square(std::sqrt(g[j]));
  out << "\n\n" << std::right;
}

void print_cut_table(std::ostream& out, const std::string& title, const CutPointSet& cuts) {
  out << title << '\n' << std::left << std::setw(8) << "cut";
  for (int j = 0; j < cuts.items(); ++j) out << std::setw(9) << j + 1;
  out << '\n' << std::fixed << std::setprecision(2);
  for (int k = 0; k < cuts.num_cuts(); ++k) {
    out << std::setw(8) << ("z_" + std::to_string(k + 1));
    for (int j = 0; j < cuts.items(); ++j) out << std::setw(9) << cuts.cuts(j, k);
    out << '\n';
  }
  out << '\n' << std::right;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed) {
  StudyConfig config = study_config_from_json(read_json_file(config_path));
  if (seed) config.seed = *seed;
  if (config.replicates != 1) throw InputError("simulate: config must have replicates = 1");
  config.truth.validate();
  config.truth_cuts.validate();
  const SimulatedData sim = simulate(config.truth, config.truth_cuts, config.subjects, config.times, config.seed);
  auto data = open_output(fs::path(out_dir) / "data.csv");
  write_likert_csv(data, sim.observed);
  auto truth = open_output(fs::path(out_dir) / "truth.json");
  nlohmann::json doc = model_to_json(config.truth, config.truth_cuts);
  doc["subjects"] = config.subjects;
  doc["times"] = config.times;
  doc["seed"] = config.seed;
  truth << doc.dump(2) << '\n';
  std::cout << "wrote " << sim.observed.subjects() * sim.observed.items * sim.observed.times << " responses to "
            << (fs::path(out_dir) / "data.csv").string() << '\n';
  return 0;
}

int cmd_estimate(const std::string& data_path, const std::string& method, std::optional<int> categories,
                 const StemFlags& flags, const std::string& out_dir) {
  const LikertDataset data = read_likert_csv(data_path, categories);
  nlohmann::json doc;
  std::optional<StemChain> chain;
  if (method == "cr") {
    const CutPointEstimate mm = estimate_cuts(data);
    doc = fit_to_json(fit_frobenius(reconstruct(data, mm.pooled)));
    doc["cuts"] = cuts_to_json(mm.pooled);
    doc["num_categories"] = data.num_categories;
    doc["warnings"] = mm.warnings;
  } else {
    chain = run_stem(data, flags.config());
    doc = stem_to_json(*chain);
  }
  doc["subjects"] = data.subjects();
  doc["items"] = data.items;
  doc["times"] = data.times;
  const std::string text = doc.dump(2) + "\n";
  std::cout << text;
  if (!out_dir.empty()) {
    auto out = open_output(fs::path(out_dir) / "result.json");
    out << text;
    if (chain) {
      auto trace = open_output(fs::path(out_dir) / "trace.csv");
      write_trace_csv(trace, *chain);
    }
  }
  return 0;
}

int cmd_analyze(const std::string& data_path, std::optional<int> categories, const StemFlags& flags) {
  const LikertDataset data = read_likert_csv(data_path, categories);
  const CutPointEstimate mm = estimate_cuts(data);
  const FitResult cr = fit_frobenius(reconstruct(data, mm.pooled));
  StemConfig stem = flags.config();
  stem.init_params = cr.params;
  stem.init_cuts = mm.pooled;
  const StemChain chain = run_stem(data, stem);

  std::cout << data.subjects() << " subjects, " << data.items << " items, " << data.times << " time points, "
            << data.num_categories << " categories\n\n";
  print_cut_table(std::cout, "Method of moments cut points", mm.pooled);
  print_cut_table(std::cout, "StEM cut points", chain.final_cuts);
  print_parameter_table(std::cout, "Correlation reconstruction (H = " + std::to_string(cr.objective) + ")",
                        cr.params);
  print_parameter_table(std::cout, "StEM", chain.final_params);
  for (const auto& w : mm.warnings) std::cout << "warning: " << w << '\n';
  return 0;
}

int cmd_study(const std::string& config_path, const std::vector<std::string>& methods,
              std::optional<int> replicates, std::optional<std::uint64_t> seed, std::optional<int> threads,
              std::optional<int> iterations, std::optional<int> burn_in, std::optional<int> sweeps,
              const std::string& out_dir) {
  StudyConfig config = study_config_from_json(read_json_file(config_path));
  if (!methods.empty()) {
    config.run_cr = config.run_stem = false;
    for (const auto& m : methods) (m == "cr" ? config.run_cr : config.run_stem) = true;
  }
  if (replicates) config.replicates = *replicates;
  if (seed) config.seed = *seed;
  if (threads) config.threads = *threads;
  if (iterations) config.stem_iterations = *iterations;
  if (burn_in) config.stem_burn_in = *burn_in;
  if (sweeps) config.gibbs_sweeps = *sweeps;

  const RmseReport report = run_study(config);
  const std::string table = format_report(report);
  std::cout << table;
  for (const auto& f : report.failure_messages) std::cerr << "failed: " << f << '\n';
  if (!out_dir.empty()) {
    auto csv = open_output(fs::path(out_dir) / "report.csv");
    write_report_csv(csv, report);
    auto txt = open_output(fs::path(out_dir) / "report.txt");
    txt << table;
  }
  return report.replicates > 0 ? 0 : kExitEstimation;
}

int cmd_diagnostics(const std::string& trace_path, int max_lag, const std::string& out_path) {
  std::ifstream in(trace_path);
  if (!in) throw InputError("cannot open trace '" + trace_path + "'");
  const TraceSeries series = read_trace_csv(in);
  if (series.empty()) throw InputError("trace: no parameters");
  if (max_lag < 0) throw InputError("diagnostics: max lag must be nonnegative");
  for (const auto& [name, values] : series) {
    if (values.size() < 10)
      throw InputError("diagnostics: parameter '" + name + "' has fewer than 10 iterations");
  }

  std::ostringstream csv;
  csv << "parameter,lag,acf\n";
  for (const auto& [name, values] : series) {
    const std::vector<double> acf = autocorrelation(values, max_lag);
    for (std::size_t k = 0; k < acf.size(); ++k)
      csv << name << ',' << k << ',' << (std::isnan(acf[k]) ? std::string("NA") : format_double(acf[k])) << '\n';
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    fs::path path(out_path);
    if (fs::is_directory(path)) path /= "acf.csv";
    auto out = open_output(path);
    out << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signal, transient-error and measurement-error estimation for longitudinal Likert data"};
  app.require_subcommand(1);

  std::string config_path, out_dir, data_path, method = "cr", trace_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> categories, replicates, threads, iterations, burn_in, sweeps;
  std::vector<std::string> methods;
  StemFlags stem_flags;
  int max_lag = 50;

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one dataset from a config");
  simulate_cmd->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--out", out_dir, "Output directory")->required();
  simulate_cmd->add_option("--seed", seed, "Override the config seed");

  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate model parameters from a data CSV");
  estimate_cmd->add_option("data", data_path, "Long-format CSV")->required()->check(CLI::ExistingFile);
  estimate_cmd->add_option("--method", method, "cr or stem")
      ->check(CLI::IsMember({"cr", "stem"}))->capture_default_str();
  estimate_cmd->add_option("--categories", categories, "Number of Likert categories (default: max response)");
  estimate_cmd->add_option("--out", out_dir, "Directory for result.json (and trace.csv)");
  add_stem_flags(estimate_cmd, stem_flags);

  auto* analyze_cmd = app.add_subcommand("analyze", "Run both estimators and print summary tables");
  analyze_cmd->add_option("data", data_path, "Long-format CSV")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--categories", categories, "Number of Likert categories (default: max response)");
  add_stem_flags(analyze_cmd, stem_flags);

  auto* study_cmd = app.add_subcommand("study", "Monte Carlo RMSE study");
  study_cmd->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  study_cmd->add_option("--method", methods, "Methods to run (repeatable: cr, stem)")
      ->check(CLI::IsMember({"cr", "stem"}));
  study_cmd->add_option("--replicates", replicates, "Number of replicates M");
  study_cmd->add_option("--seed", seed, "Master seed");
  study_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  study_cmd->add_option("--iterations", iterations, "StEM iterations R");
  study_cmd->add_option("--burn-in", burn_in, "StEM burn-in");
  study_cmd->add_option("--gibbs-sweeps", sweeps, "Gibbs scans per imputation");
  study_cmd->add_option("--out", out_dir, "Directory for report.csv and report.txt");

  auto* diag_cmd = app.add_subcommand("diagnostics", "Autocorrelation of StEM traces");
  diag_cmd->add_option("trace", trace_path, "Trace CSV from estimate --method stem")->required()
      ->check(CLI::ExistingFile);
  diag_cmd->add_option("--max-lag", max_lag, "Largest lag")->capture_default_str();
  diag_cmd->add_option("--out", out_dir, "Output file or directory (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(config_path, out_dir, seed);
    if (*estimate_cmd) return cmd_estimate(data_path, method, categories, stem_flags, out_dir);
    if (*analyze_cmd) return cmd_analyze(data_path, categories, stem_flags);
    if (*study_cmd)
      return cmd_study(config_path, methods, replicates, seed, threads, iterations, burn_in, sweeps, out_dir);
    if (*diag_cmd) return cmd_diagnostics(trace_path, max_lag, out_dir);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEstimation;
  }
  return 0;
}
