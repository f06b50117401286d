#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsdrift/error.hpp"
#include "lsdrift/numerics.hpp"

using namespace lsdrift::numerics;

namespace {

struct Moments {
  double mean = 0.0, var = 0.0, n = 0.0;
};

template <typename Draw>
Moments sample_moments(std::size_t count, Draw&& draw) {
  double m = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = draw();
    const double d = x - m;
    m += d / static_cast<double>(i + 1);
    m2 += d * (x - m);
  }
  return {m, m2 / static_cast<double>(count - 1), static_cast<double>(count)};
}

}  // namespace

TEST_CASE("integrate: closed-form values") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return normal_pdf(x, 0.0, 1.0); }, -8.0, 8.0) == doctest::Approx(1.0).epsilon(1e-10));
  // Inverse gamma (shape 5, scale 4) through u = 1/(1+A).
  const double ig = integrate(
      [](double u) {
        const double A = (1.0 - u) / u;
        return std::exp(log_inverse_gamma_pdf(A, 5.0, 4.0)) / (u * u);
      },
      0.0, 1.0);
  CHECK(ig == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("integrate_halfline: closed-form values") {
  CHECK(integrate_halfline([](double x) { return std::exp(-x); }) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_halfline([](double x) { return x * std::exp(-x); }) == doctest::Approx(1.0).epsilon(1e-10));
  const double mean = integrate_halfline([](double A) { return A * std::exp(log_inverse_gamma_pdf(A, 3.0, 2.0)); });
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("integrate: error estimates are conservative on closed-form integrals") {
  struct Case {
    double (*f)(double);
    double a, b, exact;
  };
  const std::vector<Case> cases{
      {[](double x) { return x * x; }, 0, 1, 1.0 / 3.0},
      {[](double x) { return std::exp(x); }, 0, 1, std::exp(1.0) - 1.0},
      {[](double x) { return std::sin(x); }, 0, M_PI, 2.0},
      {[](double x) { return std::cos(x); }, 0, M_PI / 2, 1.0},
      {[](double x) { return 1.0 / (1.0 + x * x); }, -1, 1, M_PI / 2},
      {[](double x) { return std::sqrt(x); }, 0, 1, 2.0 / 3.0},
      {[](double x) { return std::log(x); }, 0, 1, -1.0},
      {[](double x) { return 1.0 / std::sqrt(x); }, 0, 1, 2.0},
      {[](double x) { return std::exp(-x * x); }, -10, 10, std::sqrt(M_PI)},
      {[](double x) { return x * std::exp(-x); }, 0, 40, 1.0 - 41.0 * std::exp(-40.0)},
      {[](double x) { return std::pow(x, 7); }, -1, 2, (256.0 - 1.0) / 8.0},
      {[](double x) { return std::abs(x - 0.3); }, 0, 1, 0.045 + 0.245},
      {[](double x) { return 1.0 / x; }, 1, M_E, 1.0},
      {[](double x) { return std::exp(-50.0 * (x - 0.5) * (x - 0.5)); }, 0, 1,
       std::sqrt(M_PI / 50.0) * std::erf(0.5 * std::sqrt(50.0))},
      {[](double x) { return std::sin(20.0 * x); }, 0, M_PI, 0.0},
      {[](double x) { return x * std::sin(x); }, 0, M_PI, M_PI},
      {[](double x) { return std::tanh(x); }, -2, 3, std::log(std::cosh(3.0) / std::cosh(2.0))},
      {[](double x) { return 1.0 / (1.0 + 25.0 * x * x); }, -1, 1, 0.4 * std::atan(5.0)},
      {[](double x) { return std::cbrt(x); }, 0, 8, 12.0},
      {[](double x) { return std::exp(-x) * std::cos(x); }, 0, 20,
       0.5 * (1.0 + std::exp(-20.0) * (std::sin(20.0) - std::cos(20.0)))},
  };
  for (const auto& c : cases) {
    const QuadratureResult r = integrate_detailed(c.f, c.a, c.b);
    CHECK(std::abs(r.value - c.exact) <= r.error + 1e-15);
  }
}

TEST_CASE("integrate: non-convergence carries the best estimate") {
  QuadratureSpec tight;
  tight.absolute_tolerance = 1e-300;
  tight.relative_tolerance = 1e-300;
  tight.max_subdivisions = 5;
  try {
    (void)integrate([](double x) { return std::sin(50.0 * x); }, 0.0, 10.0, tight);
    FAIL("expected a quadrature error");
  } catch (const QuadratureError& e) {
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.error_estimate() > 0.0);
  }
}

TEST_CASE("integrate: invalid inputs") {
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 1.0, 0.0), lsdrift::Error);
  QuadratureSpec bad;
  bad.relative_tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), lsdrift::Error);
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / (x - 0.5); }, 0.0, 1.0), lsdrift::Error);
}

TEST_CASE("minimize_scalar") {
  const auto a = minimize_scalar([](double x) { return (x - 2.0) * (x - 2.0); }, 0.0, 5.0);
  CHECK(a.argmin == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(a.value == doctest::Approx(0.0));
  const auto b = minimize_scalar([](double x) { return std::cos(x); }, 0.0, 2.0 * M_PI);
  CHECK(b.argmin == doctest::Approx(M_PI).epsilon(1e-6));
  CHECK(b.value == doctest::Approx(-1.0).epsilon(1e-12));
  // Boundary infimum of a normal density over its variance.
  const auto c = minimize_scalar([](double A) { return normal_pdf(0.05, 0.0, A / 100.0); }, 0.9, 1.1);
  CHECK(c.argmin == doctest::Approx(1.1).epsilon(1e-9));
  double brute = 1e300;
  for (int i = 0; i <= 100000; ++i) brute = std::min(brute, normal_pdf(0.05, 0.0, (0.9 + 0.2 * i / 100000.0) / 100.0));
  CHECK(c.value <= brute + 1e-12);
  // Two separated wells: the grid scan finds the deeper one.
  const auto d = minimize_scalar([](double x) { return std::min((x - 1) * (x - 1), (x - 4) * (x - 4) - 0.5); }, 0, 5);
  CHECK(d.argmin == doctest::Approx(4.0).epsilon(1e-6));
  const auto e = maximize_scalar([](double x) { return -(x - 1.5) * (x - 1.5); }, 0.0, 3.0);
  CHECK(e.argmin == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("minimize_scalar names a non-finite abscissa") {
  try {
    (void)minimize_scalar([](double x) { return x > 0.5 ? NAN : x; }, 0.0, 1.0);
    FAIL("expected an error");
  } catch (const lsdrift::Error& e) {
    CHECK(std::string(e.what()).find("not finite at x = ") != std::string::npos);
  }
}

TEST_CASE("erf") {
  CHECK(lsdrift::numerics::erf(0.0) == 0.0);
  CHECK(lsdrift::numerics::erf(-0.7) == -lsdrift::numerics::erf(0.7));
  CHECK(lsdrift::numerics::erf(1.0) == doctest::Approx(0.8427007929497148693).epsilon(1e-14));
  CHECK(lsdrift::numerics::erf(0.7) == doctest::Approx(0.67780119383741847297).epsilon(1e-14));
}

TEST_CASE("log densities against reference values") {
  CHECK(log_inverse_gamma_pdf(1.3, 5.0, 4.0) == doctest::Approx(-0.8976906884765159).epsilon(1e-13));
  CHECK(log_chi_squared_pdf(2.5, 7.0) == doctest::Approx(-2.586261904621495).epsilon(1e-13));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_sf(1.0) + normal_cdf(1.0) == doctest::Approx(1.0));
}

TEST_CASE("RngStream determinism and independence") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.standard_normal();
    CHECK(x == b.standard_normal());
    differ = differ || x != c.standard_normal();
  }
  CHECK(differ);
  // Streams 0 and 1 under one seed are uncorrelated.
  RngStream s0(1, 0), s1(1, 1);
  double sxy = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sxy += s0.standard_normal() * s1.standard_normal();
  CHECK(std::abs(sxy / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("variate generators: first two moments within 4 SE") {
  const std::size_t N = 200000;
  RngStream s(2024, 0);
  for (double mean : {-3.0, 0.0, 0.5, 2.0, 10.0}) {
    for (double var : {0.01, 1.0}) {
      const Moments m = sample_moments(N, [&] { return draw_normal(s, mean, var); });
      CHECK(std::abs(m.mean - mean) < 4.0 * std::sqrt(var / N));
      CHECK(std::abs(m.var - var) < 4.0 * var * std::sqrt(2.0 / N));
    }
  }
  for (double shape : {0.5, 1.0, 2.5, 5.0, 20.0}) {
    for (double rate : {0.5, 3.0}) {
      const Moments m = sample_moments(N, [&] { return draw_gamma(s, shape, rate); });
      const double mu = shape / rate, var = shape / (rate * rate);
      CHECK(std::abs(m.mean - mu) < 4.0 * std::sqrt(var / N));
      // Var of the sample variance uses the fourth central moment 3 var^2 + 6 shape / rate^4.
      const double mu4 = 3.0 * var * var + 6.0 * shape / std::pow(rate, 4);
      CHECK(std::abs(m.var - var) < 4.0 * std::sqrt((mu4 - var * var) / N));
    }
  }
  for (double dof : {1.0, 3.0, 8.0, 30.0, 98.0}) {
    const Moments m = sample_moments(N, [&] { return draw_chi_squared(s, dof); });
    CHECK(std::abs(m.mean - dof) < 4.0 * std::sqrt(2.0 * dof / N));
  }
  CHECK(draw_chi_squared(s, 0.0) == 0.0);
}

TEST_CASE("inverse gamma (shape 5, scale 4): mean 1 and second moment 4/3") {
  RngStream s(7, 3);
  const std::size_t N = 1000000;
  double m1 = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double a = draw_inverse_gamma(s, 5.0, 4.0);
    m1 += a;
    m2 += a * a;
    m4 += a * a * a * a;
  }
  m1 /= N;
  m2 /= N;
  m4 /= N;
  const double var = 4.0 / 3.0 - 1.0;  // 1/3
  CHECK(std::abs(m1 - 1.0) < 3.0 * std::sqrt(var / N));
  CHECK(std::abs(m2 - 4.0 / 3.0) < 3.0 * std::sqrt((m4 - m2 * m2) / N));
}

TEST_CASE("variate generators reject invalid parameters") {
  RngStream s(1, 1);
  CHECK_THROWS_AS(draw_normal(s, 0.0, 0.0), lsdrift::Error);
  CHECK_THROWS_AS(draw_gamma(s, -1.0, 1.0), lsdrift::Error);
  CHECK_THROWS_AS(draw_inverse_gamma(s, 1.0, 0.0), lsdrift::Error);
}
