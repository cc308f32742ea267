#include "likertlv/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "likertlv/errors.hpp"

namespace likertlv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// 10-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
constexpr std::array<double, 5> kGlNodes = {
    0.14887433898163121088, 0.43339539412924719080, 0.67940956829902440623,
    0.86506336668898451073, 0.97390652851717172008};
constexpr std::array<double, 5> kGlWeights = {
    0.29552422471475287017, 0.26926671930999635509, 0.21908636251598204400,
    0.14945134915058059315, 0.06667134430868813759};

template <class F>
double gauss_legendre(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    const double dx = half * kGlNodes[i];
    sum += kGlWeights[i] * (f(mid - dx) + f(mid + dx));
  }
  return sum * half;
}

template <class F>
double adaptive_gl(const F& f, double a, double b, double whole, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_legendre(f, a, mid);
  const double right = gauss_legendre(f, mid, b);
  const double refined = left + right;
  if (depth <= 0 || std::abs(refined - whole) <= 1e-14) return refined;
  return adaptive_gl(f, a, mid, left, depth - 1) + adaptive_gl(f, mid, b, right, depth - 1);
}

// Tail draw for a standard normal restricted to (a, b) with a large and
// positive, where the tail probabilities are no longer representable.
double far_tail_draw(double a, double b, Rng& rng) {
  if (b - a < 1.0 / a) {
    // Narrow slab: uniform proposal, density ratio bounded below by exp(-a(b-a) - (b-a)^2/2).
    for (;;) {
      const double z = a + (b - a) * uniform_open(rng);
      if (uniform_open(rng) <= std::exp(-0.5 * (z - a) * (z + a))) return z;
    }
  }
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(uniform_open(rng)) / rate;
    if (z >= b) continue;
    const double d = z - rate;
    if (uniform_open(rng) <= std::exp(-0.5 * d * d)) return z;
  }
}

// Standard normal restricted to (a, b), a >= 0.
double upper_side_draw(double a, double b, Rng& rng) {
  if (a > 35.0) return far_tail_draw(a, b, rng);
  const double qa = norm_ccdf(a);
  const double qb = norm_ccdf(b);
  const double q = qa - uniform_open(rng) * (qa - qb);
  return -norm_quantile(q);
}

}  // namespace

double standard_normal(Rng& rng) { return norm_quantile(uniform_open(rng)); }

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) {
  if (x == -kInf) return 0.0;
  if (x == kInf) return 1.0;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double norm_ccdf(double x) { return norm_cdf(-x); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("norm_quantile: probability must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
}

double bivariate_norm_pdf(double x, double y, double rho) {
  const double one_minus = 1.0 - rho * rho;
  const double quad = (x * x - 2.0 * rho * x * y + y * y) / one_minus;
  return std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(one_minus));
}

double bivariate_norm_cdf(double x, double y, double rho) {
  if (std::isnan(x) || std::isnan(y) || std::isnan(rho))
    throw InputError("bivariate_norm_cdf: NaN argument");
  if (std::abs(rho) > 1.0 - 1e-10)
    throw InputError("bivariate_norm_cdf: |rho| must not exceed 1 - 1e-10");
  if (x == -kInf || y == -kInf) return 0.0;
  if (x == kInf) return norm_cdf(y);
  if (y == kInf) return norm_cdf(x);

  const double base = norm_cdf(x) * norm_cdf(y);
  if (rho == 0.0) return base;

  const double xx_yy = x * x + y * y;
  const double xy2 = 2.0 * x * y;
  auto integrand = [&](double theta) {
    const double s = std::sin(theta);
    const double c2 = 1.0 - s * s;
    return std::exp(-(xx_yy - xy2 * s) / (2.0 * c2));
  };
  const double upper = std::asin(rho);
  const double integral = adaptive_gl(integrand, 0.0, upper, gauss_legendre(integrand, 0.0, upper), 12);
  const double value = base + integral / (2.0 * std::numbers::pi);
  return std::clamp(value, 0.0, 1.0);
}

void TruncationBox::validate() const {
  if (lower.size() != upper.size()) throw InputError("truncation box: bound sizes differ");
  for (Eigen::Index d = 0; d < lower.size(); ++d) {
    if (std::isnan(lower[d]) || std::isnan(upper[d]) || !(lower[d] < upper[d]))
      throw InputError("truncation box: lower bound must be below upper bound");
  }
}

bool TruncationBox::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    if (!(x[d] > lower[d] && x[d] < upper[d])) return false;
  }
  return true;
}

double sample_truncated_normal(double mean, double sd, double lo, double hi, Rng& rng) {
  if (!(sd > 0.0) || !std::isfinite(sd)) throw InputError("sample_truncated_normal: sd must be positive");
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
    throw InputError("sample_truncated_normal: empty interval");

  const double a = (lo - mean) / sd;
  const double b = (hi - mean) / sd;
  double z;
  if (a >= 0.0) {
    z = upper_side_draw(a, b, rng);
  } else if (b <= 0.0) {
    z = -upper_side_draw(-b, -a, rng);
  } else {
    const double pa = norm_cdf(a);
    const double pb = norm_cdf(b);
    double p = pa + uniform_open(rng) * (pb - pa);
    p = std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
    z = norm_quantile(p);
  }

  double x = mean + sd * z;
  if (!(x > lo)) x = std::nextafter(lo, kInf);
  if (!(x < hi)) x = std::nextafter(hi, -kInf);
  if (!(x > lo)) x = 0.5 * (lo + hi);  // interval narrower than two ulps
  return x;
}

TruncatedMvnGibbs::TruncatedMvnGibbs(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
    throw InputError("gibbs: covariance must be a non-empty square matrix");
  if (!sigma.isApprox(sigma.transpose(), 1e-12))
    throw InputError("gibbs: covariance must be symmetric");
  if (min_eigenvalue(sigma) <= 1e-10)
    throw InputError("gibbs: covariance is not positive definite");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  precision_ = llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
  precision_ = 0.5 * (precision_ + precision_.transpose()).eval();
  conditional_sd_ = precision_.diagonal().cwiseInverse().cwiseSqrt();
}

void TruncatedMvnGibbs::run(const TruncationBox& box, Eigen::Ref<Eigen::VectorXd> x, int sweeps,
                            Rng& rng) const {
  const Eigen::Index dim = dimension();
  if (box.size() != dim || x.size() != dim) throw InputError("gibbs: dimension mismatch");
  if (!box.contains(x)) throw InputError("gibbs: start point lies outside the truncation box");
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (Eigen::Index d = 0; d < dim; ++d) {
      const double qdd = precision_(d, d);
      const double mean = x[d] - precision_.row(d).dot(x) / qdd;
      x[d] = sample_truncated_normal(mean, conditional_sd_[d], box.lower[d], box.upper[d], rng);
    }
  }
}

Eigen::VectorXd gibbs_truncated_mvn(const Eigen::MatrixXd& sigma, const TruncationBox& box,
                                    const Eigen::VectorXd& start, int sweeps, Rng& rng) {
  if (sweeps < 1) throw InputError("gibbs: sweeps must be at least 1");
  box.validate();
  TruncatedMvnGibbs sampler(sigma);
  Eigen::VectorXd x = start;
  sampler.run(box, x, sweeps, rng);
  return x;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

Eigen::MatrixXd repair_correlation(const Eigen::MatrixXd& symmetric, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric);
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd repaired = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::VectorXd scale = repaired.diagonal().cwiseSqrt().cwiseInverse();
  repaired = scale.asDiagonal() * repaired * scale.asDiagonal();
  repaired = 0.5 * (repaired + repaired.transpose()).eval();
  repaired.diagonal().setOnes();
  return repaired;
}

}  // namespace likertlv
