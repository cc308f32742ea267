#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "likertlv/model.hpp"

namespace likertlv {

/// Fitted correlations are confined to [-kRhoBound, kRhoBound].
inline constexpr double kRhoBound = 1.0 - 1e-6;

/// Contingency table of two Likert variables with the same category count.
struct PairTable {
  int categories = 0;
  /// Row-major categories x categories; counts[(a - 1) * categories + (b - 1)].
  std::vector<std::int64_t> counts;

  PairTable() = default;
  explicit PairTable(int num_categories);

  std::int64_t& at(int a, int b) { return counts[index(a, b)]; }
  std::int64_t at(int a, int b) const { return counts[index(a, b)]; }
  std::int64_t total() const;
  PairTable transposed() const;

  /// Table of (Y_a, Y_b) over subjects for two latent columns a, b.
  static PairTable from_columns(const LikertDataset& data, int column_a, int column_b);

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a - 1) * static_cast<std::size_t>(categories) +
           static_cast<std::size_t>(b - 1);
  }
};

struct PolychoricFit {
  double rho = 0.0;
  double log_likelihood = 0.0;
  bool converged = false;
};

/// Sum over cells of count * log(max(p_cell(rho), 1e-300)), where p_cell is the
/// bivariate normal probability of the rectangle bounded by the plug-in cuts.
double pair_log_likelihood(const PairTable& table, std::span<const double> cuts1,
                           std::span<const double> cuts2, double rho);

/// Marginal plug-in maximum likelihood estimate of the latent correlation.
///
/// Scans rho in {-0.95, -0.90, ..., 0.95}, then refines around the best grid
/// point with Brent's method (golden section with parabolic steps) to 1e-6.
/// Throws EstimationError("undefined correlation") when either margin is
/// concentrated in a single category.
PolychoricFit fit_pair(const PairTable& table, std::span<const double> cuts1,
                       std::span<const double> cuts2);

}  // namespace likertlv
