#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsdrift/error.hpp"
#include "lsdrift/gibbs_bound.hpp"

using namespace lsdrift::model;

namespace {

Dataset centered_data(std::size_t n, double center) {
  lsdrift::numerics::RngStream s(n, 77);
  std::vector<double> y(n);
  for (double& v : y) v = s.standard_normal();
  const Dataset raw = sufficient_stats(y);
  const double scale = std::sqrt((1.0 + center) * static_cast<double>(n - 1) / raw.delta);
  for (double& v : y) v = raw.y_bar + (v - raw.y_bar) * scale;
  return sufficient_stats(y);
}

const GibbsBoundReport& report_n200() {
  static const GibbsBoundReport r = [] {
    const ModelConfig cfg;
    const Dataset ds = centered_data(200, 2.0);
    return assemble_gibbs_bound(ds, cfg, large_set_with_threshold(ds, cfg, 1.0), std::nullopt, 50);
  }();
  return r;
}

}  // namespace

TEST_CASE("assembled report satisfies every constituent invariant") {
  const GibbsBoundReport& r = report_n200();
  const BoundConstants& c = r.constants;
  CHECK(c.T == 1.0);
  CHECK(c.center == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c.lambda_T == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(c.d > 2.0 * c.b_drift / (1.0 - c.lambda_T));
  CHECK(c.epsilon > 0.0);
  CHECK(c.epsilon <= 1.0);
  CHECK(c.q_mass >= 0.0);
  CHECK(c.q_mass <= 1.0);
  CHECK(c.q_mass == std::max(c.q_mass_remark, c.q_mass_direct));
  CHECK(c.alpha > 1.0);
  CHECK(c.Lambda >= 1.0);
  CHECK(c.r > 0.0);
  CHECK(c.r < 1.0);
  CHECK(c.gamma > 0.0);
  CHECK(c.gamma <= 1.0);
  CHECK(c.log_gamma < 0.0);
  CHECK(c.initial_drift == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.C1 == doctest::Approx(2.0 + c.b_drift / (1.0 - c.lambda_T)).epsilon(1e-15));
  CHECK(r.K_bar >= 1.0);
  CHECK(r.N_c >= 2.0);
  CHECK(r.curve.size() == 50);
  r.drift.validate();
  r.minorization.validate();
}

TEST_CASE("bound curve: additivity, clamping and monotone coupling term") {
  const GibbsBoundReport& r = report_n200();
  double prev = 2.0;
  for (const auto& p : r.curve) {
    CHECK(p.total == doctest::Approx(p.term1 + p.term2 + p.tail).epsilon(1e-12));
    CHECK(p.clamped_total == std::clamp(p.total, 0.0, 1.0));
    CHECK(p.term1 <= prev);
    prev = p.term1;
  }
}

TEST_CASE("bound at k = 1 matches a term-by-term recomputation") {
  const GibbsBoundReport& r = report_n200();
  const BoundConstants& c = r.constants;
  const long double la = std::log(static_cast<long double>(c.alpha));
  const long double w = 1.0L + c.initial_drift + c.b_drift / (1.0L - c.lambda_T);
  const long double num = std::exp(c.r * (la + std::log(static_cast<long double>(c.Lambda)))) * w - std::exp(c.r * la);
  const long double den = std::exp(la) - std::exp(c.r * la);
  const long double term1 = std::pow(1.0L - static_cast<long double>(c.epsilon) * c.q_mass, static_cast<long double>(c.r));
  const double n = static_cast<double>(r.n);
  const double tail = c.C3 / std::sqrt(n) + c.C2 * 2.0 / n;
  const double total = static_cast<double>(term1 + num / den) + tail;
  CHECK(r.curve.front().total == doctest::Approx(total).epsilon(1e-10));
}

TEST_CASE("extended bound") {
  const GibbsBoundReport& r = report_n200();
  const ModelConfig cfg;
  const Dataset ds = centered_data(200, 2.0);
  const ChainState x0 = initial_state(ds, cfg);
  const BoundConstants& c = r.constants;
  // f(x0) = 0 reduces to C1 gamma^k + C2 k(1+k)/n + C3 k/sqrt(n).
  const double v = extended_bound_general_start(x0, ds, cfg, 10, r);
  CHECK(v == doctest::Approx(c.C1 * std::exp(10.0 * c.log_gamma) + c.C2 * 110.0 / 200.0 + c.C3 * 10.0 / std::sqrt(200.0))
                 .epsilon(1e-12));
  double prev = 0.0;
  for (double f0 : {0.0, 1.0, 10.0, 100.0}) {
    const double e = extended_bound_from_drift(f0, 20, 200, c);
    CHECK(e >= prev);
    prev = e;
  }
  ChainState out = x0;
  out.A = 0.5;
  CHECK_THROWS_WITH_AS(extended_bound_general_start(out, ds, cfg, 10, r), doctest::Contains("outside the large set"),
                       lsdrift::Error);
}

TEST_CASE("logarithmic mixing from a far start with well-behaved constants") {
  // Structural check of the O(log n) consequence with constants of order one:
  // f(x0) = n/(2 log n) at n = 10^4, k = c' log n.
  BoundConstants c;
  c.C1 = 3.0;
  c.log_gamma = std::log(0.5);
  c.C2 = 1.0;
  c.C3 = 0.1;
  c.C4 = 0.1;
  const std::size_t n = 10000;
  const double f0 = n / (2.0 * std::log(static_cast<double>(n)));
  const auto k = static_cast<std::int64_t>(std::ceil(1.7 * std::log(static_cast<double>(n))));
  CHECK(extended_bound_from_drift(f0, k, n, c) < 0.25);
}

TEST_CASE("assembly errors") {
  const ModelConfig cfg;
  const Dataset bad = dataset_from_stats(100, 0.0, 1.5 * 99.0);
  CHECK_THROWS_WITH_AS(assemble_gibbs_bound(bad, cfg, LargeSetSpec{0.1, 0.5}, std::nullopt, 10),
                       doctest::Contains("data assumption"), lsdrift::Error);
  const Dataset ds = centered_data(100, 2.0);
  CHECK_THROWS_AS(assemble_gibbs_bound(ds, cfg, default_large_set(ds, cfg), 1.0, 10), lsdrift::Error);
  CHECK_THROWS_AS(assemble_gibbs_bound(ds, cfg, default_large_set(ds, cfg), std::nullopt, 0), lsdrift::Error);
}

TEST_CASE("default small-set level") { CHECK(default_small_set_level(2.0, 0.5) == doctest::Approx(10.0)); }
