#include "likertlv/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "likertlv/rng.hpp"
#include "likertlv/stats.hpp"

namespace likertlv {

Eigen::VectorXd ModelParams::gamma_sq() const {
  return (1.0 - sigma.array().square() - tau.array().square()).cwiseMax(0.0).matrix();
}

void ModelParams::validate() const {
  if (sigma.size() != tau.size()) throw InputError("model params: sigma and tau lengths differ");
  if (sigma.size() < 2) throw InputError("model params: at least two items are required");
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    if (!std::isfinite(sigma[j]) || !std::isfinite(tau[j]))
      throw InputError("model params: non-finite loading for item " + std::to_string(j + 1));
    if (sigma[j] * sigma[j] + tau[j] * tau[j] > 1.0 + kDiskTolerance)
      throw InputError("model params: sigma^2 + tau^2 exceeds 1 for item " + std::to_string(j + 1));
  }
}

double CutPointSet::lower(int item, int category) const {
  if (category <= 1) return -std::numeric_limits<double>::infinity();
  return cuts(item, category - 2);
}

double CutPointSet::upper(int item, int category) const {
  if (category >= num_categories) return std::numeric_limits<double>::infinity();
  return cuts(item, category - 1);
}

void CutPointSet::validate() const {
  if (num_categories < 2) throw InputError("cut points: at least two categories are required");
  if (cuts.cols() != num_categories - 1)
    throw InputError("cut points: expected " + std::to_string(num_categories - 1) +
                     " cuts per item, got " + std::to_string(cuts.cols()));
  for (Eigen::Index j = 0; j < cuts.rows(); ++j) {
    for (Eigen::Index k = 0; k < cuts.cols(); ++k) {
      if (!std::isfinite(cuts(j, k)))
        throw InputError("cut points: non-finite cut for item " + std::to_string(j + 1));
      if (k > 0 && !(cuts(j, k) > cuts(j, k - 1)))
        throw InputError("cut points: cuts of item " + std::to_string(j + 1) +
                         " are not strictly increasing");
    }
  }
}

void LikertDataset::validate() const {
  if (responses.rows() < 1) throw InputError("dataset: no subjects");
  if (items < 2) throw InputError("dataset: at least two items are required");
  if (times < 2) throw InputError("dataset: at least two time points are required");
  if (num_categories < 2) throw InputError("dataset: at least two categories are required");
  if (responses.cols() != static_cast<Eigen::Index>(items) * times)
    throw InputError("dataset: response matrix has the wrong number of columns");
  if (responses.minCoeff() < 1 || responses.maxCoeff() > num_categories)
    throw InputError("dataset: responses must lie in 1.." + std::to_string(num_categories));
}

void LatentDataset::validate() const {
  if (latent.cols() != static_cast<Eigen::Index>(items) * times)
    throw InputError("latent dataset: wrong number of columns");
  if (!latent.allFinite()) throw InputError("latent dataset: non-finite values");
}

Eigen::MatrixXd build_covariance(const ModelParams& params, int times) {
  params.validate();
  if (times < 1) throw InputError("build_covariance: at least one time point is required");
  const int items = params.items();
  const Eigen::MatrixXd between = params.sigma * params.sigma.transpose();
  Eigen::MatrixXd within = between + params.tau * params.tau.transpose();
  within.diagonal().setOnes();

  const int dim = items * times;
  Eigen::MatrixXd sigma(dim, dim);
  for (int s = 0; s < times; ++s) {
    for (int t = 0; t < times; ++t) {
      sigma.block(s * items, t * items, items, items) = (s == t) ? within : between;
    }
  }
  return sigma;
}

LoadingGradient covariance_gradient(const Eigen::MatrixXd& weights, const ModelParams& params,
                                    int times) {
  const int items = params.items();
  const int dim = items * times;
  if (weights.rows() != dim || weights.cols() != dim)
    throw InputError("covariance_gradient: weight matrix has the wrong size");

  Eigen::MatrixXd w = weights;
  w.diagonal().setZero();

  // Entry (a, b), a != b, equals sigma_i(a) sigma_i(b) [+ tau tau when same time].
  // Its derivative in sigma_j hits a once and b once, and w is symmetric, so
  // d/d sigma_j = 2 sum_{a in item j} sum_b w_ab sigma_i(b).
  Eigen::VectorXd sigma_long(dim);
  for (int t = 0; t < times; ++t) sigma_long.segment(t * items, items) = params.sigma;
  const Eigen::VectorXd ws = w * sigma_long;

  LoadingGradient grad{Eigen::VectorXd::Zero(items), Eigen::VectorXd::Zero(items)};
  for (int t = 0; t < times; ++t) {
    grad.sigma += 2.0 * ws.segment(t * items, items);
    grad.tau += 2.0 * w.block(t * items, t * items, items, items) * params.tau;
  }
  return grad;
}

int coarsen(double x, std::span<const double> cuts) {
  // upper_bound gives the number of cuts <= x.
  return static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin()) + 1;
}

SimulatedData simulate(const ModelParams& params, const CutPointSet& cuts, int subjects, int times,
                       std::uint64_t seed) {
  params.validate();
  cuts.validate();
  if (cuts.items() != params.items()) throw InputError("simulate: cut points and params disagree on J");
  if (subjects < 1) throw InputError("simulate: at least one subject is required");
  if (times < 1) throw InputError("simulate: at least one time point is required");

  const int items = params.items();
  const Eigen::VectorXd gamma = params.gamma_sq().cwiseSqrt();
  SimulatedData out;
  out.latent = LatentDataset{RowMatrixXd(subjects, items * times), items, times};
  out.observed = LikertDataset{RowMatrixXi(subjects, items * times), items, times, cuts.num_categories};

  Rng rng = make_rng(seed, Stream::simulate);
  for (int i = 0; i < subjects; ++i) {
    const double trait = standard_normal(rng);
    for (int t = 0; t < times; ++t) {
      const double transient = standard_normal(rng);
      for (int j = 0; j < items; ++j) {
        const double x = params.sigma[j] * trait + params.tau[j] * transient +
                         gamma[j] * standard_normal(rng);
        const int col = latent_index(j, t, items);
        out.latent.latent(i, col) = x;
        out.observed.responses(i, col) = coarsen(x, cuts.row(j));
      }
    }
  }
  return out;
}

namespace {

bool needs_flip(const Eigen::VectorXd& v) {
  const double sum = v.sum();
  if (sum != 0.0) return sum < 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (v[j] != 0.0) return v[j] < 0.0;
  }
  return false;
}

}  // namespace

ModelParams canonicalize(const ModelParams& params) {
  ModelParams out = params;
  if (needs_flip(out.sigma)) out.sigma = -out.sigma;
  if (needs_flip(out.tau)) out.tau = -out.tau;
  return out;
}

void project_to_disk(ModelParams& params) {
  for (Eigen::Index j = 0; j < params.sigma.size(); ++j) {
    const double r = std::hypot(params.sigma[j], params.tau[j]);
    if (r > 1.0) {
      params.sigma[j] /= r;
      params.tau[j] /= r;
    }
  }
}

}  // namespace likertlv
