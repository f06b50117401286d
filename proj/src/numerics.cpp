#include "lsdrift/numerics.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace lsdrift::numerics {

namespace {

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule
// (QUADPACK qk15). Odd-indexed nodes belong to the Gauss rule.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Interval& other) const { return error < other.error; }
};

double checked(FunctionRef f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "integrand is not finite at x = " << x;
    throw numerical_error("numerics", msg.str());
  }
  return y;
}

Interval gauss_kronrod(FunctionRef f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked(f, center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = checked(f, center - dx);
    const double f2 = checked(f, center + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum * std::abs(half);
  const double error = std::max(std::abs((kronrod - gauss) * half), roundoff);
  return {a, b, value, error};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(absolute_tolerance > 0.0) || !(relative_tolerance > 0.0)) {
    throw invalid_argument("numerics", "quadrature tolerances must be strictly positive");
  }
  if (max_subdivisions < 1) throw invalid_argument("numerics", "max_subdivisions must be at least 1");
}

QuadratureResult integrate_detailed(FunctionRef f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw invalid_argument("numerics", "integrate requires finite a < b");
  }

  std::priority_queue<Interval> heap;
  const Interval first = gauss_kronrod(f, a, b);
  heap.push(first);
  double total = first.value;
  double total_error = first.error;
  std::size_t subdivisions = 0;

  auto tolerance = [&] { return std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(total)); };

  while (total_error > tolerance()) {
    if (subdivisions >= spec.max_subdivisions) {
      throw QuadratureError("quadrature did not converge within max_subdivisions", total, total_error);
    }
    const Interval worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // Interval cannot be bisected further in double precision.
      throw QuadratureError("quadrature interval reached machine resolution", total, total_error);
    }
    heap.pop();
    const Interval left = gauss_kronrod(f, worst.a, mid);
    const Interval right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;

    // Resum periodically so that incremental updates do not drift.
    if (subdivisions % 256 == 0) {
      auto copy = heap;
      total = 0.0;
      total_error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        total_error += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, total_error, heap.size()};
}

QuadratureResult integrate_halfline_detailed(FunctionRef f, const QuadratureSpec& spec) {
  auto mapped = [&](double u) {
    const double one_minus = 1.0 - u;
    const double x = u / one_minus;
    return f(x) / (one_minus * one_minus);
  };
  return integrate_detailed(mapped, 0.0, 1.0, spec);
}

QuadratureResult integrate_breaks(FunctionRef f, double a, double b, const std::vector<double>& breaks,
                                  const QuadratureSpec& spec) {
  std::vector<double> points{a};
  for (double x : breaks) {
    if (x > a && x < b) points.push_back(x);
  }
  points.push_back(b);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  // Each piece gets an equal share of the absolute tolerance.
  QuadratureSpec piece = spec;
  piece.absolute_tolerance = spec.absolute_tolerance / static_cast<double>(points.size() - 1);
  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const QuadratureResult r = integrate_detailed(f, points[i], points[i + 1], piece);
    total.value += r.value;
    total.error += r.error;
    total.intervals += r.intervals;
  }
  return total;
}

QuadratureResult integrate_halfline_breaks(FunctionRef f, const std::vector<double>& breaks,
                                           const QuadratureSpec& spec) {
  auto mapped = [&](double u) {
    const double one_minus = 1.0 - u;
    const double x = u / one_minus;
    return f(x) / (one_minus * one_minus);
  };
  std::vector<double> ubreaks;
  for (double x : breaks) {
    if (x > 0.0 && std::isfinite(x)) ubreaks.push_back(x / (1.0 + x));
  }
  return integrate_breaks(mapped, 0.0, 1.0, ubreaks, spec);
}

ScalarMinimum minimize_scalar(FunctionRef f, double lo, double hi, double tol, std::size_t grid_points) {
  if (!(lo < hi)) throw invalid_argument("numerics", "minimize_scalar requires lo < hi");
  if (grid_points < 3) grid_points = 3;

  auto eval = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "objective is not finite at x = " << x;
      throw numerical_error("numerics", msg.str());
    }
    return y;
  };

  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = (i + 1 == grid_points) ? hi : lo + step * static_cast<double>(i);
    const double y = eval(x);
    if (y < best_value) {
      best_value = y;
      best = i;
    }
  }
  ScalarMinimum result{best + 1 == grid_points ? hi : lo + step * static_cast<double>(best), best_value};

  // Golden-section search on the bracket formed by the neighbouring grid points.
  double a = best == 0 ? lo : lo + step * static_cast<double>(best - 1);
  double b = best + 1 >= grid_points ? hi : std::min(hi, lo + step * static_cast<double>(best + 1));
  constexpr double kInvPhi = 0.6180339887498948482;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  for (int iter = 0; iter < 200 && (b - a) > tol; ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }
  if (fc < result.value) result = {c, fc};
  if (fd < result.value) result = {d, fd};
  return result;
}

ScalarMinimum maximize_scalar(FunctionRef f, double lo, double hi, double tol, std::size_t grid_points) {
  auto negated = [&](double x) { return -f(x); };
  const ScalarMinimum m = minimize_scalar(negated, lo, hi, tol, grid_points);
  return {m.argmin, -m.value};
}

double log_chi_squared_pdf(double x, double dof) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double half = 0.5 * dof;
  return (half - 1.0) * std::log(x) - 0.5 * x - half * std::log(2.0) - std::lgamma(half);
}

double log_inverse_gamma_pdf(double x, double shape, double scale) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index) : seed_(seed), stream_index_(stream_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_index), static_cast<std::uint32_t>(stream_index >> 32),
                    0x6c736466u};
  engine_.seed(seq);
}

double draw_normal(RngStream& stream, double mean, double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
    throw invalid_argument("numerics", "draw_normal requires finite mean and variance > 0");
  }
  return mean + std::sqrt(variance) * stream.standard_normal();
}

double draw_gamma(RngStream& stream, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw invalid_argument("numerics", "draw_gamma requires shape > 0 and rate > 0");
  }
  return std::gamma_distribution<double>(shape, 1.0 / rate)(stream.engine());
}

double draw_inverse_gamma(RngStream& stream, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
    throw invalid_argument("numerics", "draw_inverse_gamma requires shape > 0 and scale > 0");
  }
  return 1.0 / draw_gamma(stream, shape, scale);
}

double draw_chi_squared(RngStream& stream, double dof) {
  if (dof == 0.0) return 0.0;
  if (!(dof > 0.0)) throw invalid_argument("numerics", "draw_chi_squared requires dof >= 0");
  return draw_gamma(stream, 0.5 * dof, 0.5);
}

}  // namespace lsdrift::numerics
