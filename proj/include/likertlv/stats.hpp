#pragma once

#include <Eigen/Dense>

#include "likertlv/rng.hpp"

namespace likertlv {

double norm_pdf(double x);

/// Standard normal CDF. Saturates to exactly 0 / 1 at -inf / +inf.
double norm_cdf(double x);

/// Upper tail 1 - Phi(x), accurate far into the right tail.
double norm_ccdf(double x);

/// Inverse of norm_cdf on (0, 1). Throws InputError outside the open interval.
double norm_quantile(double p);

/// Standard bivariate normal density with correlation rho.
double bivariate_norm_pdf(double x, double y, double rho);

/// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.
///
/// Computed from Phi(x)Phi(y) plus the integral of the density over the
/// correlation, d/d(rho) Phi2 = phi2. The integral is taken in the angle
/// r = sin(theta), which removes the 1/sqrt(1 - r^2) endpoint behaviour, with
/// adaptive Gauss-Legendre quadrature. Infinite arguments are accepted.
/// Requires |rho| <= 1 - 1e-10.
double bivariate_norm_cdf(double x, double y, double rho);

/// Per-coordinate bounds of a box; infinite bounds allowed.
struct TruncationBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index size() const { return lower.size(); }
  /// Throws InputError unless sizes match and lower < upper everywhere.
  void validate() const;
  /// Strict membership lower < x < upper on every coordinate.
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// One draw from N(mean, sd^2) restricted to (lo, hi).
///
/// Inversion of the truncated CDF, using the lower tail when the interval lies
/// below zero and the upper tail when it lies above, so intervals deep in a tail
/// keep full relative precision. Beyond ~35 standard deviations the tail mass
/// underflows and an exponential rejection kernel takes over.
double sample_truncated_normal(double mean, double sd, double lo, double hi, Rng& rng);

/// Systematic-scan Gibbs sampler for a zero-mean normal restricted to a box.
///
/// The precision matrix is formed once at construction; each coordinate update
/// draws from the univariate conditional
///   x_d | x_-d ~ N(x_d - (Q x)_d / Q_dd, 1 / Q_dd)
/// truncated to the box.
class TruncatedMvnGibbs {
 public:
  /// Throws InputError if sigma is not symmetric positive definite with
  /// minimum eigenvalue above 1e-10.
  explicit TruncatedMvnGibbs(const Eigen::MatrixXd& sigma);

  Eigen::Index dimension() const { return precision_.rows(); }

  /// Runs `sweeps` full scans in place. `x` must start inside the box.
  void run(const TruncationBox& box, Eigen::Ref<Eigen::VectorXd> x, int sweeps,
           Rng& rng) const;

 private:
  Eigen::MatrixXd precision_;
  Eigen::VectorXd conditional_sd_;
};

Eigen::VectorXd gibbs_truncated_mvn(const Eigen::MatrixXd& sigma, const TruncationBox& box,
                                    const Eigen::VectorXd& start, int sweeps, Rng& rng);

/// Minimum eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

/// Clips eigenvalues at `floor` and rescales the result to unit diagonal.
Eigen::MatrixXd repair_correlation(const Eigen::MatrixXd& symmetric, double floor = 1e-8);

}  // namespace likertlv
