#ifndef LSDRIFT_NUMERICS_HPP
#define LSDRIFT_NUMERICS_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <type_traits>
#include <utility>
#include <vector>

#include "lsdrift/error.hpp"

/**
 * \file
 * \brief Deterministic numerical kernels: adaptive quadrature, scalar
 * minimization, special functions and random variates.
 */

namespace lsdrift::numerics {

/// Non-owning reference to a `double(double)` callable.
///
/// Quadrature and minimization are called in tight nested loops; this avoids
/// the allocation and indirection cost of `std::function`.
class FunctionRef {
 public:
  template <class F, std::enable_if_t<!std::is_same_v<std::decay_t<F>, FunctionRef>, int> = 0>
  FunctionRef(F&& f) noexcept  // NOLINT(google-explicit-constructor)
      : object_(const_cast<void*>(static_cast<const void*>(std::addressof(f)))),
        call_([](void* object, double x) -> double { return (*static_cast<std::remove_reference_t<F>*>(object))(x); }) {}

  double operator()(double x) const { return call_(object_, x); }

 private:
  void* object_;
  double (*call_)(void*, double);
};

struct QuadratureSpec {
  double absolute_tolerance = 1e-10;
  double relative_tolerance = 1e-8;
  std::size_t max_subdivisions = 1'000'000;

  /// Throws if a tolerance is not strictly positive or max_subdivisions is 0.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< conservative estimate of |value - exact|
  std::size_t intervals = 0;
};

/// Thrown when adaptive quadrature exhausts its subdivision budget.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& message, double best_estimate, double error_estimate)
      : Error(ErrorKind::numerical, "numerics", message), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature on [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate is at most max(abs_tol, rel_tol * |value|). Per-interval error is
/// |K15 - G7| with a floor for roundoff, which overestimates the true error for
/// smooth integrands.
QuadratureResult integrate_detailed(FunctionRef f, double a, double b, const QuadratureSpec& spec = {});

inline double integrate(FunctionRef f, double a, double b, const QuadratureSpec& spec = {}) {
  return integrate_detailed(f, a, b, spec).value;
}

/// Integral over (0, inf) using the substitution u = x / (1 + x), which maps
/// the half-line onto (0, 1) with dx = du / (1 - u)^2.
QuadratureResult integrate_halfline_detailed(FunctionRef f, const QuadratureSpec& spec = {});

inline double integrate_halfline(FunctionRef f, const QuadratureSpec& spec = {}) {
  return integrate_halfline_detailed(f, spec).value;
}

/// Half-line integral split at the given interior abscissae (in x). Use this
/// when the integrand has a narrow peak that a coarse initial rule could miss.
QuadratureResult integrate_halfline_breaks(FunctionRef f, const std::vector<double>& breaks,
                                           const QuadratureSpec& spec = {});

/// Integral over [a, b] split at the given interior points.
QuadratureResult integrate_breaks(FunctionRef f, double a, double b, const std::vector<double>& breaks,
                                  const QuadratureSpec& spec = {});

struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
};

/// Minimum of f over [lo, hi] by a uniform grid scan followed by golden-section
/// refinement around the best grid point. Unimodality is not assumed.
ScalarMinimum minimize_scalar(FunctionRef f, double lo, double hi, double tol = 1e-10, std::size_t grid_points = 1001);

/// Maximum of f over [lo, hi]; `value` holds the maximum.
ScalarMinimum maximize_scalar(FunctionRef f, double lo, double hi, double tol = 1e-10, std::size_t grid_points = 1001);

/// Error function. Delegates to the C library, whose implementation is
/// accurate to a few ulp over the whole real line.
inline double erf(double x) { return std::erf(x); }

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617639;

/// log N(x; mean, variance).
inline double log_normal_pdf(double x, double mean, double variance) {
  const double z = x - mean;
  return -kLogSqrt2Pi - 0.5 * std::log(variance) - 0.5 * z * z / variance;
}

inline double normal_pdf(double x, double mean, double variance) { return std::exp(log_normal_pdf(x, mean, variance)); }

/// P(Z > z) for standard normal Z, accurate in the far tail.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// log density of a chi-square variate with `dof` degrees of freedom; -inf for x <= 0.
double log_chi_squared_pdf(double x, double dof);

/// log of the inverse-gamma(shape, scale) density.
double log_inverse_gamma_pdf(double x, double shape, double scale);

/// A reproducible random stream identified by (seed, stream_index).
///
/// Streams with different indices are seeded through `std::seed_seq` from all
/// four 32-bit words of the pair. A stream is a value: copying it forks an
/// identical sequence. It must not be shared between threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  std::mt19937_64& engine() noexcept { return engine_; }

  double standard_normal() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

double draw_normal(RngStream& stream, double mean, double variance);

/// Gamma variate with the given shape and rate (mean shape / rate).
double draw_gamma(RngStream& stream, double shape, double rate);

/// Inverse-gamma variate: the reciprocal of gamma(shape, rate = scale).
double draw_inverse_gamma(RngStream& stream, double shape, double scale);

/// Chi-square variate; zero degrees of freedom yields exactly 0.
double draw_chi_squared(RngStream& stream, double dof);

}  // namespace lsdrift::numerics

#endif
