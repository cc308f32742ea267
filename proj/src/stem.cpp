#include "likertlv/stem.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "likertlv/cutpoints.hpp"
#include "likertlv/parallel.hpp"
#include "likertlv/reconstruction.hpp"
#include "likertlv/spg.hpp"

namespace likertlv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoxMargin = 1e-6;

void check_compatible(const LikertDataset& data, const CutPointSet& cuts) {
  if (cuts.items() != data.items || cuts.num_categories != data.num_categories)
    throw InputError("cut points do not match the dataset");
}

struct Moments {
  Eigen::MatrixXd second;  // (1/n) sum_i x_i x_i'
  int subjects = 0;
  int times = 0;
};

Moments second_moments(const LatentDataset& latent) {
  Moments m;
  m.subjects = latent.subjects();
  m.times = latent.times;
  m.second = (latent.latent.transpose() * latent.latent) / static_cast<double>(m.subjects);
  return m;
}

// Per-subject negative Q1 and its gradient in (sigma, tau); nullopt if Sigma is singular.
std::optional<double> scaled_negative_q1(const Moments& m, const ModelParams& p, Eigen::VectorXd* grad) {
  const Eigen::MatrixXd sigma = build_covariance(p, m.times);
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd& l = llt.matrixLLT();
  const double min_pivot = l.diagonal().minCoeff();
  if (!(min_pivot > 1e-10)) return std::nullopt;
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
  const Eigen::MatrixXd inv_s = inv * m.second;
  const double value = 0.5 * (log_det + inv_s.trace());
  if (grad) {
    // d/dSigma [1/2 log|Sigma| + 1/2 tr(Sigma^-1 S)] = 1/2 (Sigma^-1 - Sigma^-1 S Sigma^-1)
    Eigen::MatrixXd w = 0.5 * (inv - inv_s * inv);
    w = 0.5 * (w + w.transpose()).eval();
    const LoadingGradient g = covariance_gradient(w, p, m.times);
    *grad << g.sigma, g.tau;
  }
  return value;
}

}  // namespace

void StemConfig::validate() const {
  if (iterations < 1) throw InputError("stem: iterations must be at least 1");
  if (effective_burn_in() >= iterations) throw InputError("stem: burn-in must be smaller than iterations");
  if (gibbs_sweeps < 1) throw InputError("stem: gibbs sweeps must be at least 1");
  if (inner_max_iterations < 1) throw InputError("stem: inner iterations must be at least 1");
}

TruncationBox response_box(const LikertDataset& data, const CutPointSet& cuts, int subject) {
  const int dim = data.items * data.times;
  TruncationBox box{Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
  for (int t = 0; t < data.times; ++t) {
    for (int j = 0; j < data.items; ++j) {
      const int col = latent_index(j, t, data.items);
      const int y = data.responses(subject, col);
      box.lower[col] = cuts.lower(j, y);
      box.upper[col] = cuts.upper(j, y);
    }
  }
  return box;
}

double clamp_into(double x, double lo, double hi) {
  if (x > lo && x < hi) return x;
  double margin = kBoxMargin;
  if (std::isfinite(lo) && std::isfinite(hi)) margin = std::min(margin, 0.25 * (hi - lo));
  return x <= lo ? lo + margin : hi - margin;
}

LatentDataset interior_latent(const LikertDataset& data, const CutPointSet& cuts) {
  data.validate();
  check_compatible(data, cuts);
  LatentDataset out{RowMatrixXd(data.subjects(), data.items * data.times), data.items, data.times};
  for (int i = 0; i < data.subjects(); ++i) {
    const TruncationBox box = response_box(data, cuts, i);
    for (Eigen::Index d = 0; d < box.size(); ++d) {
      const double lo = box.lower[d];
      const double hi = box.upper[d];
      double x;
      if (std::isfinite(lo) && std::isfinite(hi)) x = 0.5 * (lo + hi);
      else if (std::isfinite(lo)) x = lo + 0.5;
      else if (std::isfinite(hi)) x = hi - 0.5;
      else x = 0.0;
      out.latent(i, d) = x;
    }
  }
  return out;
}

LatentDataset impute_latent(const LikertDataset& data, const ModelParams& params, const CutPointSet& cuts,
                            const LatentDataset& previous, int sweeps, std::uint64_t seed,
                            std::uint64_t iteration, int threads, Warnings* warnings) {
  check_compatible(data, cuts);
  if (previous.subjects() != data.subjects() || previous.latent.cols() != data.responses.cols())
    throw InputError("impute_latent: previous latent values do not match the dataset");
  if (sweeps < 1) throw InputError("impute_latent: sweeps must be at least 1");

  Eigen::MatrixXd sigma = build_covariance(params, data.times);
  if (min_eigenvalue(sigma) <= 1e-10) {
    sigma = repair_correlation(sigma, 1e-8);
    if (warnings) warnings->push_back("iteration " + std::to_string(iteration) +
                                      ": covariance not positive definite; eigenvalues floored at 1e-8");
  }
  const TruncatedMvnGibbs sampler(sigma);

  LatentDataset out{previous.latent, data.items, data.times};
  parallel_for(data.subjects(), threads, [&](int i) {
    const TruncationBox box = response_box(data, cuts, i);
    Eigen::VectorXd x = out.latent.row(i).transpose();
    for (Eigen::Index d = 0; d < x.size(); ++d) x[d] = clamp_into(x[d], box.lower[d], box.upper[d]);
    Rng rng = make_rng(seed, Stream::impute, {iteration, static_cast<std::uint64_t>(i)});
    sampler.run(box, x, sweeps, rng);
    if (!box.contains(x))
      throw EstimationError("impute_latent: draw left the truncation box for subject " + std::to_string(i + 1));
    out.latent.row(i) = x.transpose();
  });
  return out;
}

double q1_objective(const LatentDataset& latent, const ModelParams& params) {
  params.validate();
  const Moments m = second_moments(latent);
  const std::optional<double> v = scaled_negative_q1(m, params, nullptr);
  if (!v) return -kInf;
  return -static_cast<double>(m.subjects) * *v;
}

ModelParams maximize_q1(const LatentDataset& latent, const ModelParams& warm, const Q1Options& options,
                        Warnings* warnings) {
  warm.validate();
  latent.validate();
  if (warm.items() != latent.items) throw InputError("maximize_q1: params and latent data disagree on J");
  const Moments m = second_moments(latent);
  const int items = warm.items();

  const SpgObjective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    return scaled_negative_q1(m, ModelParams{x.head(items), x.tail(items)}, &grad);
  };
  SpgOptions spg;
  spg.max_iterations = options.max_iterations;
  spg.tolerance = options.tolerance;

  Eigen::VectorXd x0(2 * items);
  x0 << warm.sigma, warm.tau;
  // A start on the disk boundary can make Sigma singular; pull it inward.
  Eigen::VectorXd scratch(2 * items);
  for (int shrink = 0; shrink < 200 && !objective(x0, scratch); ++shrink) x0 *= 0.99;
  const SpgResult r = spg_minimize(objective, project_loadings, x0, spg);
  if (!r.converged && warnings)
    warnings->push_back("maximize_q1: no convergence after " + std::to_string(r.iterations) +
                        " iterations; returning best iterate");
  ModelParams out{r.x.head(items), r.x.tail(items)};
  project_to_disk(out);
  return canonicalize(out);
}

CutPointSet update_cuts(const LatentDataset& latent, const LikertDataset& data, const CutPointSet& previous) {
  check_compatible(data, previous);
  const int categories = data.num_categories;
  CutPointSet out = previous;
  std::vector<double> highest(static_cast<std::size_t>(categories) + 1);
  std::vector<double> lowest(static_cast<std::size_t>(categories) + 1);
  for (int j = 0; j < data.items; ++j) {
    std::fill(highest.begin(), highest.end(), -kInf);
    std::fill(lowest.begin(), lowest.end(), kInf);
    for (int i = 0; i < data.subjects(); ++i) {
      for (int t = 0; t < data.times; ++t) {
        const auto y = static_cast<std::size_t>(data.at(i, j, t));
        const double x = latent.at(i, j, t);
        highest[y] = std::max(highest[y], x);
        lowest[y] = std::min(lowest[y], x);
      }
    }
    for (int k = 1; k < categories; ++k) {
      const double below = highest[static_cast<std::size_t>(k)];
      const double above = lowest[static_cast<std::size_t>(k) + 1];
      if (std::isfinite(below) && std::isfinite(above)) out.cuts(j, k - 1) = 0.5 * (below + above);
    }
  }
  return out;
}

long box_violations(const LatentDataset& latent, const LikertDataset& data, const CutPointSet& cuts) {
  check_compatible(data, cuts);
  long violations = 0;
  for (int i = 0; i < data.subjects(); ++i) {
    for (int t = 0; t < data.times; ++t) {
      for (int j = 0; j < data.items; ++j) {
        const int y = data.at(i, j, t);
        const double x = latent.at(i, j, t);
        if (!(cuts.lower(j, y) <= x && x < cuts.upper(j, y))) ++violations;
      }
    }
  }
  return violations;
}

StemChain run_stem(const LikertDataset& data, const StemConfig& config) {
  data.validate();
  config.validate();

  StemChain chain;
  ModelParams params;
  CutPointSet cuts;
  if (config.init_cuts) {
    cuts = *config.init_cuts;
  } else {
    CutPointEstimate mm = estimate_cuts(data);
    cuts = mm.pooled;
    chain.diagnostics.insert(chain.diagnostics.end(), mm.warnings.begin(), mm.warnings.end());
  }
  cuts.validate();
  check_compatible(data, cuts);
  if (config.init_params) {
    params = canonicalize(*config.init_params);
  } else {
    params = fit_frobenius(reconstruct(data, cuts)).params;
  }
  params.validate();
  if (params.items() != data.items) throw InputError("stem: initial params do not match the dataset");

  const int rounds = config.iterations;
  const int items = data.items;
  const int num_cuts = data.num_categories - 1;
  chain.burn_in = config.effective_burn_in();
  chain.sigma_trace.resize(rounds, items);
  chain.tau_trace.resize(rounds, items);
  chain.cut_trace.resize(rounds, items * num_cuts);

  const Q1Options q1{config.inner_max_iterations, config.inner_tolerance};
  LatentDataset latent = interior_latent(data, cuts);
  for (int r = 1; r <= rounds; ++r) {
    latent = impute_latent(data, params, cuts, latent, config.gibbs_sweeps, config.seed,
                           static_cast<std::uint64_t>(r), config.threads, &chain.diagnostics);
    params = maximize_q1(latent, params, q1, &chain.diagnostics);
    cuts = update_cuts(latent, data, cuts);

    chain.sigma_trace.row(r - 1) = params.sigma.transpose();
    chain.tau_trace.row(r - 1) = params.tau.transpose();
    chain.cut_trace.row(r - 1) = Eigen::Map<const Eigen::RowVectorXd>(cuts.cuts.data(), items * num_cuts);
  }

  const int kept = rounds - chain.burn_in;
  chain.final_params.sigma = chain.sigma_trace.bottomRows(kept).colwise().mean().transpose();
  chain.final_params.tau = chain.tau_trace.bottomRows(kept).colwise().mean().transpose();
  const Eigen::RowVectorXd mean_cuts = chain.cut_trace.bottomRows(kept).colwise().mean();
  chain.final_cuts.num_categories = data.num_categories;
  chain.final_cuts.cuts = Eigen::Map<const RowMatrixXd>(mean_cuts.data(), items, num_cuts);
  return chain;
}

}  // namespace likertlv
