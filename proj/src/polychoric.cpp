#include "likertlv/polychoric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "likertlv/errors.hpp"
#include "likertlv/stats.hpp"

namespace likertlv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbabilityFloor = 1e-300;
constexpr int kMaxBrentIterations = 200;

void check_cuts(std::span<const double> cuts, int categories, const char* which) {
  if (static_cast<int>(cuts.size()) != categories - 1)
    throw InputError(std::string("polychoric: ") + which + " has the wrong number of cuts");
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    if (!std::isfinite(cuts[k]) || (k > 0 && !(cuts[k] > cuts[k - 1])))
      throw InputError(std::string("polychoric: ") + which + " must be finite and strictly increasing");
  }
}

// Edges -inf, z_1, ..., z_C, +inf.
std::vector<double> edges(std::span<const double> cuts) {
  std::vector<double> e;
  e.reserve(cuts.size() + 2);
  e.push_back(-kInf);
  e.insert(e.end(), cuts.begin(), cuts.end());
  e.push_back(kInf);
  return e;
}

double log_likelihood_unchecked(const PairTable& table, const std::vector<double>& e1,
                                const std::vector<double>& e2, double rho) {
  const int k = table.categories;
  // cdf[a][b] = Phi2(e1[a], e2[b]; rho)
  std::vector<double> cdf(static_cast<std::size_t>((k + 1) * (k + 1)));
  auto at = [&](int a, int b) -> double& { return cdf[static_cast<std::size_t>(a * (k + 1) + b)]; };
  for (int a = 0; a <= k; ++a) {
    for (int b = 0; b <= k; ++b) at(a, b) = bivariate_norm_cdf(e1[a], e2[b], rho);
  }
  double ll = 0.0;
  for (int a = 1; a <= k; ++a) {
    for (int b = 1; b <= k; ++b) {
      const std::int64_t count = table.at(a, b);
      if (count == 0) continue;
      const double p = at(a, b) - at(a - 1, b) - at(a, b - 1) + at(a - 1, b - 1);
      ll += static_cast<double>(count) * std::log(std::max(p, kProbabilityFloor));
    }
  }
  return ll;
}

bool single_category(const PairTable& table, bool rows) {
  int occupied = 0;
  for (int a = 1; a <= table.categories; ++a) {
    std::int64_t margin = 0;
    for (int b = 1; b <= table.categories; ++b) margin += rows ? table.at(a, b) : table.at(b, a);
    if (margin > 0) ++occupied;
  }
  return occupied <= 1;
}

}  // namespace

PairTable::PairTable(int num_categories)
    : categories(num_categories),
      counts(static_cast<std::size_t>(num_categories) * static_cast<std::size_t>(num_categories), 0) {}

std::int64_t PairTable::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

PairTable PairTable::transposed() const {
  PairTable out(categories);
  for (int a = 1; a <= categories; ++a)
    for (int b = 1; b <= categories; ++b) out.at(b, a) = at(a, b);
  return out;
}

PairTable PairTable::from_columns(const LikertDataset& data, int column_a, int column_b) {
  PairTable table(data.num_categories);
  for (int i = 0; i < data.subjects(); ++i) ++table.at(data.responses(i, column_a), data.responses(i, column_b));
  return table;
}

double pair_log_likelihood(const PairTable& table, std::span<const double> cuts1,
                           std::span<const double> cuts2, double rho) {
  check_cuts(cuts1, table.categories, "cuts1");
  check_cuts(cuts2, table.categories, "cuts2");
  if (!(std::abs(rho) <= kRhoBound)) throw InputError("polychoric: |rho| exceeds 1 - 1e-6");
  return log_likelihood_unchecked(table, edges(cuts1), edges(cuts2), rho);
}

PolychoricFit fit_pair(const PairTable& table, std::span<const double> cuts1,
                       std::span<const double> cuts2) {
  check_cuts(cuts1, table.categories, "cuts1");
  check_cuts(cuts2, table.categories, "cuts2");
  if (table.total() <= 0 || single_category(table, true) || single_category(table, false))
    throw EstimationError("undefined correlation");

  const std::vector<double> e1 = edges(cuts1);
  const std::vector<double> e2 = edges(cuts2);
  auto negative_ll = [&](double rho) { return -log_likelihood_unchecked(table, e1, e2, rho); };

  // Seed grid -0.95, -0.90, ..., 0.95.
  constexpr int kGrid = 39;
  int best = 0;
  double best_value = kInf;
  for (int i = 0; i < kGrid; ++i) {
    const double value = negative_ll(-0.95 + 0.05 * i);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  const double lo = best == 0 ? -kRhoBound : -0.95 + 0.05 * (best - 1);
  const double hi = best == kGrid - 1 ? kRhoBound : -0.95 + 0.05 * (best + 1);

  std::uintmax_t iterations = kMaxBrentIterations;
  // 24 bits: final bracket half-width about 2^-22 (|rho| + 1/4), well under 1e-6.
  const auto [rho, value] = boost::math::tools::brent_find_minima(negative_ll, lo, hi, 24, iterations);

  PolychoricFit fit;
  fit.converged = iterations < static_cast<std::uintmax_t>(kMaxBrentIterations);
  if (value <= best_value) {
    fit.rho = rho;
    fit.log_likelihood = -value;
  } else {
    fit.rho = -0.95 + 0.05 * best;
    fit.log_likelihood = -best_value;
  }
  return fit;
}

}  // namespace likertlv
