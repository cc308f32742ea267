#include "likertlv/study.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "likertlv/cutpoints.hpp"
#include "likertlv/errors.hpp"
#include "likertlv/io.hpp"
#include "likertlv/parallel.hpp"
#include "likertlv/reconstruction.hpp"
#include "likertlv/rng.hpp"
#include "likertlv/stem.hpp"

namespace likertlv {

void StudyConfig::validate() const {
  truth.validate();
  truth_cuts.validate();
  if (truth_cuts.items() != truth.items()) throw InputError("study: cuts and loadings disagree on J");
  if (subjects < 1) throw InputError("study: subjects must be at least 1");
  if (times < 2) throw InputError("study: at least two time points are required");
  if (replicates < 1) throw InputError("study: replicates must be at least 1");
  if (!run_cr && !run_stem) throw InputError("study: no estimation method selected");
  if (run_stem) {
    StemConfig stem;
    stem.iterations = stem_iterations;
    stem.burn_in = stem_burn_in;
    stem.gibbs_sweeps = gibbs_sweeps;
    stem.validate();
  }
}

StudyConfig five_item_design(int subjects, int replicates) {
  StudyConfig config;
  config.truth.sigma = Eigen::Vector<double, 5>(0.8, 0.7, 0.6, 0.5, 0.4).cwiseSqrt();
  config.truth.tau = Eigen::Vector<double, 5>(std::sqrt(0.1), -std::sqrt(0.15), -std::sqrt(0.2),
                                              std::sqrt(0.25), std::sqrt(0.3));
  config.truth_cuts.num_categories = 5;
  config.truth_cuts.cuts.resize(5, 4);
  const Eigen::RowVector4d outer(-1.2, -0.5, 0.4, 0.8);
  const Eigen::RowVector4d inner(-0.85, -0.25, 0.25, 0.85);
  config.truth_cuts.cuts << outer, inner, inner, inner, outer;
  config.subjects = subjects;
  config.times = 2;
  config.replicates = replicates;
  return config;
}

StudyConfig study_config_from_json(const nlohmann::json& doc) {
  try {
    StudyConfig config;
    config.truth = params_from_json(doc);
    config.truth_cuts = cuts_from_json(doc);
    config.subjects = doc.value("subjects", config.subjects);
    config.times = doc.value("times", config.times);
    config.replicates = doc.value("replicates", config.replicates);
    config.seed = doc.value("seed", config.seed);
    config.threads = doc.value("threads", config.threads);
    if (doc.contains("methods")) {
      config.run_cr = config.run_stem = false;
      for (const auto& m : doc.at("methods")) {
        const auto name = m.get<std::string>();
        if (name == "cr") config.run_cr = true;
        else if (name == "stem") config.run_stem = true;
        else throw InputError("study config: unknown method '" + name + "'");
      }
    }
    if (doc.contains("stem")) {
      const auto& s = doc.at("stem");
      config.stem_iterations = s.value("iterations", config.stem_iterations);
      config.stem_burn_in = s.value("burn_in", config.stem_burn_in);
      config.gibbs_sweeps = s.value("gibbs_sweeps", config.gibbs_sweeps);
    }
    config.validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("study config: ") + e.what());
  }
}

std::uint64_t replicate_seed(std::uint64_t master, int index) {
  return derive_seed(master, Stream::replicate, {static_cast<std::uint64_t>(index)});
}

ReplicateResult run_replicate(const StudyConfig& config, int index) {
  ReplicateResult result;
  result.index = index;
  try {
    const std::uint64_t seed = replicate_seed(config.seed, index);
    const SimulatedData sim = simulate(config.truth, config.truth_cuts, config.subjects, config.times, seed);
    const CutPointEstimate mm = estimate_cuts(sim.observed);
    result.mm_cuts = mm.pooled;
    result.warnings += mm.warnings.size();
    const FitResult cr = fit_frobenius(reconstruct(sim.observed, mm.pooled));
    result.cr = cr.params;
    if (config.run_stem) {
      StemConfig stem;
      stem.iterations = config.stem_iterations;
      stem.burn_in = config.stem_burn_in;
      stem.gibbs_sweeps = config.gibbs_sweeps;
      stem.seed = derive_seed(seed, Stream::impute);
      stem.init_params = cr.params;
      stem.init_cuts = mm.pooled;
      const StemChain chain = run_stem(sim.observed, stem);
      result.stem = chain.final_params;
      result.stem_cuts = chain.final_cuts;
      result.warnings += chain.diagnostics.size();
    }
    result.ok = true;
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

RmseReport summarize(const StudyConfig& config, std::span<const ReplicateResult> results) {
  const int items = config.truth.items();
  const int num_cuts = config.truth_cuts.num_cuts();
  const ModelParams truth = canonicalize(config.truth);

  RmseReport report;
  report.has_cr = config.run_cr;
  report.has_stem = config.run_stem;
  report.cr_sigma = report.cr_tau = report.stem_sigma = report.stem_tau = Eigen::VectorXd::Zero(items);
  report.mm_cuts = report.stem_cuts = RowMatrixXd::Zero(items, num_cuts);

  int ok = 0;
  for (const ReplicateResult& r : results) {
    report.warnings += r.warnings;
    if (!r.ok) {
      ++report.failures;
      report.failure_messages.push_back("replicate " + std::to_string(r.index) + ": " + r.error);
      continue;
    }
    ++ok;
    const ModelParams cr = canonicalize(r.cr);
    report.cr_sigma += (cr.sigma - truth.sigma).cwiseAbs2();
    report.cr_tau += (cr.tau - truth.tau).cwiseAbs2();
    report.mm_cuts += (r.mm_cuts.cuts - config.truth_cuts.cuts).cwiseAbs2();
    if (config.run_stem) {
      const ModelParams stem = canonicalize(r.stem);
      report.stem_sigma += (stem.sigma - truth.sigma).cwiseAbs2();
      report.stem_tau += (stem.tau - truth.tau).cwiseAbs2();
      report.stem_cuts += (r.stem_cuts.cuts - config.truth_cuts.cuts).cwiseAbs2();
    }
  }
  report.replicates = ok;
  const double scale = ok > 0 ? 1.0 / ok : std::numeric_limits<double>::quiet_NaN();
  for (Eigen::VectorXd* v : {&report.cr_sigma, &report.cr_tau, &report.stem_sigma, &report.stem_tau})
    *v = (*v * scale).cwiseSqrt();
  for (RowMatrixXd* m : {&report.mm_cuts, &report.stem_cuts}) *m = (*m * scale).cwiseSqrt();
  return report;
}

RmseReport run_study(const StudyConfig& config, std::vector<ReplicateResult>* details) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<ReplicateResult> results(static_cast<std::size_t>(config.replicates));
  parallel_for(config.replicates, config.threads,
               [&](int i) { results[static_cast<std::size_t>(i)] = run_replicate(config, i); });
  RmseReport report = summarize(config, results);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (details) *details = std::move(results);
  return report;
}

void write_report_csv(std::ostream& out, const RmseReport& report) {
  out << "estimator,method,rmse\n";
  const auto items = static_cast<int>(report.cr_sigma.size());
  auto loadings = [&](const char* method, const Eigen::VectorXd& sigma, const Eigen::VectorXd& tau) {
    for (int j = 0; j < items; ++j) out << "sigma_" << j + 1 << ',' << method << ',' << format_double(sigma[j]) << '\n';
    for (int j = 0; j < items; ++j) out << "tau_" << j + 1 << ',' << method << ',' << format_double(tau[j]) << '\n';
  };
  auto cuts = [&](const char* method, const RowMatrixXd& m) {
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      for (Eigen::Index k = 0; k < m.cols(); ++k)
        out << "z_" << j + 1 << '_' << k + 1 << ',' << method << ',' << format_double(m(j, k)) << '\n';
  };
  if (report.has_cr) loadings("cr", report.cr_sigma, report.cr_tau);
  if (report.has_stem) loadings("stem", report.stem_sigma, report.stem_tau);
  if (report.has_cr) cuts("mm", report.mm_cuts);
  if (report.has_stem) cuts("stem", report.stem_cuts);
}

std::string format_report(const RmseReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  const auto items = static_cast<int>(report.cr_sigma.size());
  out << "RMSE over " << report.replicates << " replicates (" << report.failures << " failed, "
      << report.warnings << " warnings, " << std::setprecision(1) << report.wall_seconds << " s)\n"
      << std::setprecision(3);
  out << "\nEstimator      CR     StEM\n";
  auto cell = [&](bool has, double v) {
    if (has) out << std::setw(8) << v;
    else out << std::setw(8) << "-";
  };
  for (int j = 0; j < items; ++j) {
    out << "sigma_" << std::left << std::setw(6) << j + 1 << std::right;
    cell(report.has_cr, report.cr_sigma[j]);
    cell(report.has_stem, report.stem_sigma[j]);
    out << '\n';
  }
  for (int j = 0; j < items; ++j) {
    out << "tau_" << std::left << std::setw(8) << j + 1 << std::right;
    cell(report.has_cr, report.cr_tau[j]);
    cell(report.has_stem, report.stem_tau[j]);
    out << '\n';
  }
  out << "\nCut            MM     StEM\n";
  for (Eigen::Index j = 0; j < report.mm_cuts.rows(); ++j) {
    for (Eigen::Index k = 0; k < report.mm_cuts.cols(); ++k) {
      std::ostringstream name;
      name << "z_" << j + 1 << k + 1;
      out << std::left << std::setw(12) << name.str() << std::right;
      cell(report.has_cr, report.mm_cuts(j, k));
      cell(report.has_stem, report.stem_cuts(j, k));
      out << '\n';
    }
  }
  return out.str();
}

std::vector<double> autocorrelation(std::span<const double> series, int max_lag) {
  const auto n = static_cast<long>(series.size());
  std::vector<double> acf(static_cast<std::size_t>(std::max(max_lag, 0)) + 1,
                          std::numeric_limits<double>::quiet_NaN());
  if (n == 0) return acf;
  acf[0] = 1.0;
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double v : series) denom += (v - mean) * (v - mean);
  if (!(denom > 0.0)) return acf;
  for (long k = 1; k <= max_lag && k < n; ++k) {
    double num = 0.0;
    for (long t = 0; t + k < n; ++t) num += (series[static_cast<std::size_t>(t)] - mean) *
                                            (series[static_cast<std::size_t>(t + k)] - mean);
    acf[static_cast<std::size_t>(k)] = num / denom;
  }
  return acf;
}

}  // namespace likertlv
