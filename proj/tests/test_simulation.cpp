#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsdrift/error.hpp"
#include "lsdrift/simulation.hpp"

using namespace lsdrift::sim;
using namespace lsdrift::model;
using lsdrift::numerics::RngStream;

namespace {

Dataset centered_data(std::size_t n, double center, std::uint64_t seed = 3) {
  RngStream s(seed, 0);
  std::vector<double> y(n);
  for (double& v : y) v = s.standard_normal();
  const Dataset raw = sufficient_stats(y);
  const double scale = std::sqrt((1.0 + center) * static_cast<double>(n - 1) / raw.delta);
  for (double& v : y) v = raw.y_bar + (v - raw.y_bar) * scale;
  return sufficient_stats(y);
}

SimulationPlan plan(std::size_t chains, std::size_t steps, std::uint64_t seed = 1, unsigned threads = 1) {
  SimulationPlan p;
  p.n_chains = chains;
  p.n_steps = steps;
  p.seed = seed;
  p.threads = threads;
  return p;
}

}  // namespace

TEST_CASE("plan invariants") {
  SimulationPlan p = plan(1, 10);
  p.burn_in = 10;
  CHECK_THROWS_AS(p.validate(), lsdrift::Error);
  p = plan(0, 10);
  CHECK_THROWS_AS(p.validate(), lsdrift::Error);
}

TEST_CASE("ensemble is deterministic and independent of the worker count") {
  const ModelConfig cfg;
  const Dataset ds = centered_data(50, 2.0);
  const LargeSetSpec spec = default_large_set(ds, cfg);
  const ChainState x0 = initial_state(ds, cfg);
  const EnsembleSummary a = run_ensemble(plan(16, 30, 5, 1), ds, cfg, x0, spec);
  const EnsembleSummary b = run_ensemble(plan(16, 30, 5, 4), ds, cfg, x0, spec);
  REQUIRE(a.traces.size() == 16);
  for (std::size_t c = 0; c < 16; ++c) {
    REQUIRE(a.traces[c].size() == 31);
    for (std::size_t i = 0; i < a.traces[c].size(); ++i) {
      CHECK(a.traces[c][i].A == b.traces[c][i].A);
      CHECK(a.traces[c][i].theta_bar == b.traces[c][i].theta_bar);
      const TraceRecord& t = a.traces[c][i];
      CHECK(std::abs(t.f - drift_value(t.theta_bar, t.A, ds, cfg)) <= 1e-10 * std::max(1.0, t.f));
      CHECK(t.in_large_set == spec.contains(t.A));
    }
  }
  // Chains use distinct streams.
  CHECK(a.traces[0][5].A != a.traces[1][5].A);
}

TEST_CASE("ensemble mean of f after one step matches the expected drift") {
  const ModelConfig cfg;
  const Dataset ds = centered_data(100, 2.0);
  const LargeSetSpec spec = default_large_set(ds, cfg);
  const ChainState x0 = initial_state(ds, cfg);
  const EnsembleSummary e = run_ensemble(plan(100000, 1, 9, 0), ds, cfg, x0, spec);
  double m = 0.0, m2 = 0.0;
  for (const auto& t : e.traces) {
    m += t[1].f;
    m2 += t[1].f * t[1].f;
  }
  const double N = 100000.0;
  m /= N;
  const double se = std::sqrt((m2 / N - m * m) / N);
  CHECK(std::abs(m - expected_drift(x0.theta_bar, x0.A, ds, cfg)) < 3.0 * se);
}

TEST_CASE("trace chain transform") {
  const LargeSetSpec spec{1.0, 2.0};
  std::vector<TraceRecord> in;
  for (int i = 0; i < 10; ++i) in.push_back({i, 0.0, 2.0, 0.0, true});
  CHECK(trace_chain_transform(in, spec).size() == in.size());
  for (int i = 4; i < 7; ++i) in[i].A = 3.5;
  const auto out = trace_chain_transform(in, spec);
  CHECK(out.size() == in.size() - 3);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].step == static_cast<std::int64_t>(i));
}

TEST_CASE("restricted kernel step") {
  const ModelConfig cfg;
  const Dataset ds = centered_data(30, 2.0);
  const LargeSetSpec spec = default_large_set(ds, cfg);
  const ChainState x0 = initial_state(ds, cfg).summary();
  // With a large set covering every A the proposal is never rejected, so the
  // output equals the plain step under shared randomness.
  const LargeSetSpec wide{1e-9, spec.center};
  int rejected = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    RngStream a(i, 0), b(i, 0);
    const ChainState g = gibbs_step(x0, ds, cfg, a);
    if (wide.contains(g.A)) {
      const ChainState r = restricted_kernel_step(x0, ds, cfg, wide, b);
      CHECK(r.A == g.A);
      CHECK(r.theta_bar == g.theta_bar);
    }
    RngStream c(i, 0), d(i, 0);
    const ChainState g2 = gibbs_step(x0, ds, cfg, c);
    const ChainState r2 = restricted_kernel_step(x0, ds, cfg, spec, d);
    if (!spec.contains(g2.A)) {
      ++rejected;
      CHECK(r2.A == x0.A);
      CHECK(r2.theta_bar == g2.theta_bar);
      CHECK(r2.mu == g2.mu);
    } else {
      CHECK(r2.A == g2.A);
    }
  }
  CHECK(rejected > 0);
  ChainState outside = x0;
  outside.A = 0.1;
  RngStream e(1, 1);
  CHECK_THROWS_AS(restricted_kernel_step(outside, ds, cfg, spec, e), lsdrift::Error);
}

TEST_CASE("binned TV estimator") {
  RngStream s(12, 0);
  std::vector<Point2> a(100000), b(100000), far(100000);
  for (auto& p : a) p = {s.standard_normal(), 1.0 + s.uniform()};
  CHECK(tv_lower_bound_estimate(a, a, 16, 16).tv == 0.0);
  for (auto& p : far) p = {s.standard_normal(), 5.0 + s.uniform()};
  CHECK(tv_lower_bound_estimate(a, far, 16, 16).tv == doctest::Approx(1.0));
  // Shifted normals in theta_bar with the same A law: true TV = 2 Phi(1/2) - 1.
  const double truth = 2.0 * lsdrift::numerics::normal_cdf(0.5) - 1.0;
  for (auto& p : b) p = {1.0 + s.standard_normal(), 1.0 + s.uniform()};
  const TvEstimate est = tv_lower_bound_estimate(a, b, 1, 64);
  CHECK(est.tv <= truth + 3.0 * est.se);
  CHECK(est.tv > 0.3);
}

TEST_CASE("binned TV is a lower bound on known pairs") {
  RngStream s(13, 0);
  for (int i = 0; i < 10; ++i) {
    const double shift = 0.1 * (i + 1);
    const double truth = 2.0 * lsdrift::numerics::normal_cdf(shift / 2.0) - 1.0;
    std::vector<Point2> a(20000), b(20000);
    for (auto& p : a) p = {s.standard_normal(), 1.0 + s.uniform()};
    for (auto& p : b) p = {shift + s.standard_normal(), 1.0 + s.uniform()};
    const TvEstimate est = tv_lower_bound_estimate(a, b, 4, 16);
    CHECK(est.tv <= truth + 3.0 * est.se);
  }
}

TEST_CASE("exit frequencies") {
  const ModelConfig cfg;
  const Dataset ds = centered_data(100, 2.0);
  const LargeSetSpec spec = default_large_set(ds, cfg);
  const ChainState x0 = initial_state(ds, cfg);
  const ExitFrequencies e = exit_probability_estimate(plan(20000, 10, 3, 0), ds, cfg, spec, x0);
  REQUIRE(e.p_hat.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(e.p_hat[i] >= 0.0);
    CHECK(e.p_hat[i] <= 1.0);
    CHECK(e.se[i] == doctest::Approx(std::sqrt(e.p_hat[i] * (1 - e.p_hat[i]) / 20000.0)));
  }
  const double b = drift_offset_b(ds, cfg, spec);
  for (std::int64_t k = 1; k <= 10; ++k) {
    CHECK(e.cumulative[k - 1] <= tail_probability_bound(k, ds, cfg, spec, b) + 3.0 * e.cumulative_se[k - 1]);
  }
  // A tiny T leaves almost no room to exit.
  const LargeSetSpec wide{1e-6, spec.center};
  const ExitFrequencies w = exit_probability_estimate(plan(5000, 5, 4, 0), ds, cfg, wide, x0);
  for (double p : w.p_hat) CHECK(p < 0.01);
}

TEST_CASE("return-time statistics") {
  const ModelConfig cfg;
  const Dataset ds = centered_data(50, 2.0);
  const LargeSetSpec spec = default_large_set(ds, cfg);
  const ChainState x0 = initial_state(ds, cfg);
  const HittingStats h = hitting_time_stats(plan(3000, 80, 21, 0), 200, SmallSet{4.0}, ds, cfg, spec, x0);
  for (const auto& g : h.gaps) {
    for (auto r : g) CHECK(r >= 1);
  }
  for (std::size_t k = 1; k < h.hits_before_k_total.size(); ++k) {
    CHECK(h.hits_before_k_total[k] >= h.hits_before_k_total[k - 1]);
  }
  for (std::int64_t j = 1; j <= 5; ++j) {
    for (std::int64_t k : {5, 10, 20, 50}) {
      if (k <= j) continue;
      for (double alpha : {1.02, 1.05, 1.1}) {
        CHECK(h.prob_fewer_hits(k, j) <= h.markov_bound(alpha, k, j) + 3.0 * h.prob_se(k, j));
      }
    }
  }
  // Both chains start at f = 0 inside R x R: t_1 = 0 and N_k >= 1.
  const HittingStats z = hitting_time_stats(plan(50, 10, 22, 1), 0, SmallSet{4.0}, ds, cfg, spec, x0);
  for (const auto& g : z.gaps) {
    REQUIRE_FALSE(g.empty());
    CHECK(g.front() == 1);
  }
  CHECK(z.prob_fewer_hits(1, 1) == 0.0);
  CHECK_THROWS_AS(h.markov_bound(1.05, 3, 3), lsdrift::Error);
}

TEST_CASE("chain functional mean") {
  const ModelConfig cfg;
  const Dataset ds = centered_data(50, 2.0);
  RngStream s(30, 0);
  const ChainMean m = chain_functional_mean(
      ds, cfg, initial_state(ds, cfg), [](const ChainState& x) { return 1.0 / x.A; }, 200000, 1000, s);
  CHECK(std::abs(m.mean - expected_inv_A(ds, cfg)) < 3.0 * m.se);
}
