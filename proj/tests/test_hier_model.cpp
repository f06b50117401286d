#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsdrift/error.hpp"
#include "lsdrift/hier_model.hpp"

using namespace lsdrift::model;
using lsdrift::numerics::RngStream;

namespace {

// n = 10, y_bar = 0, delta/(n-1) = 3 so the center is 2.
Dataset small_data() { return dataset_from_stats(10, 0.0, 27.0); }

Dataset data_with_spread(std::size_t n, double spread, std::uint64_t seed) {
  RngStream s(seed, 0);
  std::vector<double> y(n);
  for (double& v : y) v = s.standard_normal();
  const Dataset raw = sufficient_stats(y);
  const double scale = std::sqrt(spread * static_cast<double>(n - 1) / raw.delta);
  for (double& v : y) v = raw.y_bar + (v - raw.y_bar) * scale;
  return sufficient_stats(y);
}

}  // namespace

TEST_CASE("sufficient statistics") {
  const Dataset z = sufficient_stats({0, 0, 0, 0});
  CHECK(z.y_bar == 0.0);
  CHECK(z.delta == 0.0);
  const Dataset two = sufficient_stats({1, -1});
  CHECK(two.y_bar == 0.0);
  CHECK(two.delta == 2.0);
  RngStream s(3, 3);
  std::vector<double> y(10000);
  for (double& v : y) v = s.standard_normal();
  const Dataset big = sufficient_stats(y);
  CHECK(std::abs(big.spread() - 1.0) < 4.0 * std::sqrt(2.0 / 9999.0));
  CHECK_THROWS_AS(sufficient_stats({1.0}), lsdrift::Error);
  CHECK_THROWS_AS(sufficient_stats({1.0, NAN}), lsdrift::Error);
}

TEST_CASE("data assumption") {
  const ModelConfig cfg;
  CHECK(check_data_assumption(dataset_from_stats(10, 0.0, 27.0), cfg));
  CHECK_FALSE(check_data_assumption(dataset_from_stats(10, 0.0, 13.5), cfg));
  CHECK(check_data_assumption(dataset_from_stats(10, 0.0, 18.0), cfg));
}

TEST_CASE("model config invariants") {
  ModelConfig cfg;
  cfg.V = 0.0;
  CHECK_THROWS_AS(cfg.validate(), lsdrift::Error);
  cfg = ModelConfig{};
  cfg.prior_scale_b = -1.0;
  CHECK_THROWS_AS(cfg.validate(), lsdrift::Error);
}

TEST_CASE("initial state and drift value") {
  const ModelConfig cfg;
  const Dataset ds = data_with_spread(12, 3.0, 1);
  const ChainState x = initial_state(ds, cfg);
  CHECK(x.A == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(x.theta_bar == ds.y_bar);
  CHECK(drift_value(x, ds, cfg) == doctest::Approx(0.0).epsilon(1e-20));

  const ChainState fb = initial_state(dataset_from_stats(10, 0.0, 4.5), cfg);
  CHECK(fb.A == doctest::Approx(0.5).epsilon(1e-15));

  // theta_i = Y_i and A = delta/(n-1) gives f = n V^2.
  ChainState at_data;
  at_data.theta = ds.y;
  at_data.A = ds.spread();
  at_data.refresh();
  CHECK(drift_value(at_data, ds, cfg) == doctest::Approx(12.0).epsilon(1e-12));

  const Dataset four = dataset_from_stats(4, 0.0, 9.0);
  CHECK(drift_value(1.0, 3.0, four, cfg) == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("lambda factor and lambda_T") {
  CHECK(lambda_factor(0.0, 1.0) == 1.0);
  CHECK(lambda_factor(1.0, 1.0) == doctest::Approx(0.5625).epsilon(1e-15));
  double prev = lambda_factor(1e-6, 1.0);
  for (int i = 1; i <= 10000; ++i) {
    const double v = lambda_factor(1e-6 + 0.01 * i, 1.0);
    CHECK(v < prev);
    prev = v;
  }
  const Dataset ds = small_data();
  CHECK(lambda_T(LargeSetSpec{1.0, 2.0}, 1.0) == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(lambda_T(LargeSetSpec{2.0, 3.0}, 1.0) == doctest::Approx(25.0 / 81.0).epsilon(1e-15));
  CHECK_THROWS_AS(large_set_with_threshold(ds, ModelConfig{}, 0.0), lsdrift::Error);
  CHECK_THROWS_AS(large_set_with_threshold(ds, ModelConfig{}, 2.5), lsdrift::Error);
}

TEST_CASE("large set membership") {
  const LargeSetSpec spec{1.0, 2.0};
  ChainState x;
  x.A = 1.0;
  CHECK(in_large_set(x, spec));
  x.A = 2.0;
  CHECK(in_large_set(x, spec));
  x.A = 3.0 + 1e-9;
  CHECK_FALSE(in_large_set(x, spec));
  const LargeSetSpec def = default_large_set(small_data(), ModelConfig{});
  CHECK(def.T == 1.0);
  CHECK(def.center == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("gibbs_step conditional moments") {
  // theta_i' with mu' = 0, Y_i = 2, A = V = 1 has mean 1 and variance 1/2;
  // mu' is drawn first, so the marginal check uses a tight mu' (large n).
  const ModelConfig cfg;
  const std::size_t n = 100;
  std::vector<double> y(n, 0.0);
  y[0] = 2.0;
  y[1] = -2.0;
  const Dataset ds = sufficient_stats(y);
  ChainState x;
  x.A = 1.0;
  x.theta.assign(n, 0.0);
  x.refresh();
  RngStream s(17, 0);
  const int N = 200000;
  double m_mu = 0.0, v_mu = 0.0, m_t = 0.0, v_t = 0.0;
  for (int i = 0; i < N; ++i) {
    ChainState z = x;
    // mu' ~ N(0, 1/100); theta_0' ~ N(mu'/2 + 1, 1/2) so marginal mean 1, variance 1/2 + 1/400.
    gibbs_step_inplace(z, ds, cfg, s);
    m_mu += z.mu;
    v_mu += z.mu * z.mu;
    m_t += z.theta[0];
    v_t += (z.theta[0] - 1.0) * (z.theta[0] - 1.0);
  }
  m_mu /= N;
  v_mu /= N;
  m_t /= N;
  v_t /= N;
  CHECK(std::abs(m_mu) < 4.0 * std::sqrt(0.01 / N));
  CHECK(std::abs(v_mu - 0.01) < 4.0 * 0.01 * std::sqrt(2.0 / N));
  CHECK(std::abs(m_t - 1.0) < 4.0 * std::sqrt(0.5025 / N));
  CHECK(std::abs(v_t - 0.5025) < 4.0 * 0.5025 * std::sqrt(2.0 / N));
}

TEST_CASE("A update has the inverse-gamma conditional mean") {
  // a = 3, b = 2, n = 5, S' = 1: E A' = (2 + 2)/(3 + 2 - 1) = 1. With V tiny,
  // theta' is essentially Y so S' = delta/(n-1) = 1.
  ModelConfig cfg;
  cfg.V = 1e-12;
  cfg.prior_shape_a = 3.0;
  cfg.prior_scale_b = 2.0;
  const Dataset unit = sufficient_stats({-std::sqrt(1.6), -std::sqrt(0.4), 0.0, std::sqrt(0.4), std::sqrt(1.6)});
  CHECK(unit.spread() == doctest::Approx(1.0).epsilon(1e-14));
  ChainState x;
  x.A = 1.0;
  x.theta = unit.y;
  x.refresh();
  RngStream s(23, 0);
  const int N = 200000;
  double m = 0.0;
  for (int i = 0; i < N; ++i) {
    ChainState z = x;
    gibbs_step_inplace(z, unit, cfg, s);
    m += z.A;
  }
  m /= N;
  // shape 5, scale 4: variance 16/(16 * 3) = 1/3.
  CHECK(std::abs(m - 1.0) < 4.0 * std::sqrt(1.0 / 3.0 / N));
}

TEST_CASE("summary kernel matches the full kernel in law") {
  const ModelConfig cfg;
  const Dataset ds = data_with_spread(30, 3.0, 4);
  ChainState full = initial_state(ds, cfg);
  full.A = 1.7;
  full.refresh();
  const ChainState summ = full.summary();
  CHECK_FALSE(summ.is_full());
  RngStream a(1, 1), b(1, 2);
  const int N = 100000;
  double fa = 0.0, fb = 0.0, fa2 = 0.0, fb2 = 0.0;
  for (int i = 0; i < N; ++i) {
    ChainState x = full, y = summ;
    gibbs_step_inplace(x, ds, cfg, a);
    gibbs_step_inplace(y, ds, cfg, b);
    fa += x.S;
    fb += y.S;
    fa2 += x.S * x.S;
    fb2 += y.S * y.S;
  }
  const double ma = fa / N, mb = fb / N;
  const double se = std::sqrt((fa2 / N - ma * ma + fb2 / N - mb * mb) / N);
  CHECK(std::abs(ma - mb) < 4.0 * se);
}

TEST_CASE("conditional S moments") {
  const ModelConfig cfg;
  const SMoments m = conditional_S_moments(1.0, small_data(), cfg);
  CHECK(m.mean == doctest::Approx(1.25).epsilon(1e-15));
  const SMoments v = conditional_S_moments(1.0, dataset_from_stats(5, 0.0, 12.0), cfg);
  CHECK(v.variance == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(v.second_moment == doctest::Approx(v.variance + v.mean * v.mean).epsilon(1e-15));
  CHECK(conditional_S_moments(1e-12, small_data(), cfg).mean < 1e-11);

  // Monte Carlo oracle for the variance at n = 5, A = 1, delta = 12.
  std::vector<double> y{-2.0, -1.0, 0.0, 1.0, 2.0};
  const double scale = std::sqrt(12.0 / 10.0);
  for (double& t : y) t *= scale;
  const Dataset ds = sufficient_stats(y);
  ChainState x;
  x.A = 1.0;
  x.theta = y;
  x.refresh();
  RngStream s(31, 0);
  const int N = 400000;
  double m1 = 0.0, m2 = 0.0, m4 = 0.0;
  for (int i = 0; i < N; ++i) {
    ChainState z = x;
    // Only (mu', theta') matter for S'; A' is drawn afterwards.
    gibbs_step_inplace(z, ds, cfg, s);
    const double d = z.S - v.mean;
    m1 += z.S;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m1 /= N;
  m2 /= N;
  m4 /= N;
  CHECK(std::abs(m1 - v.mean) < 4.0 * std::sqrt(0.5 / N));
  CHECK(std::abs(m2 - 0.5) < 4.0 * std::sqrt((m4 - m2 * m2) / N));
}

TEST_CASE("expected drift against nested quadrature") {
  // Reference values: nested adaptive quadrature over mu', the W direction and
  // the chi-square remainder of the theta update, with inverse-gamma moments.
  const ModelConfig cfg;
  const Dataset ds = small_data();
  CHECK(expected_drift(0.3, 1.5, ds, cfg) == doctest::Approx(11.345858585858588).epsilon(1e-10));
  CHECK(expected_drift(-1.0, 3.2, ds, cfg) == doctest::Approx(18.9712788021826).epsilon(1e-10));
  CHECK(expected_drift(0.0, 2.0, ds, cfg) == doctest::Approx(12.606060606060607).epsilon(1e-10));
  for (double t : {0.1, 0.7, 3.0}) CHECK(expected_drift(t, 1.3, ds, cfg) == expected_drift(-t, 1.3, ds, cfg));
}

TEST_CASE("expected drift against a one-step Monte Carlo oracle") {
  const ModelConfig cfg;
  const Dataset ds = data_with_spread(100, 3.0, 8);
  const LargeSetSpec spec = default_large_set(ds, cfg);
  ChainState x;
  x.A = spec.T;
  x.theta.assign(ds.n, ds.y_bar + 0.3);
  x.refresh();
  RngStream s(41, 0);
  const int N = 200000;
  double m = 0.0, m2 = 0.0;
  for (int i = 0; i < N; ++i) {
    ChainState z = x;
    gibbs_step_inplace(z, ds, cfg, s);
    const double f = drift_value(z, ds, cfg);
    m += f;
    m2 += f * f;
  }
  m /= N;
  const double se = std::sqrt((m2 / N - m * m) / N);
  CHECK(std::abs(m - expected_drift(ds.y_bar + 0.3, spec.T, ds, cfg)) < 3.0 * se);
}

TEST_CASE("drift inequality on a grid over the large set") {
  const ModelConfig cfg;
  const Dataset ds = data_with_spread(100, 3.0, 9);
  const LargeSetSpec spec = default_large_set(ds, cfg);
  const DriftOffset off = drift_offset(ds, cfg, spec);
  CHECK(off.max_theta_gap <= 0.0);
  CHECK(off.b >= off.raw_supremum);
  const double lt = lambda_T(spec, cfg.V);
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double tb = ds.y_bar - 10.0 + 20.0 * i / 99.0;
      const double A = spec.T + (spec.upper() - spec.T) * j / 99.0;
      const double e = expected_drift(tb, A, ds, cfg);
      const double f = drift_value(tb, A, ds, cfg);
      CHECK(e <= lambda_factor(A, cfg.V) * f + off.b);
      CHECK(e - lt * f <= off.b);
    }
  }
  CHECK(expected_drift(ds.y_bar, spec.center, ds, cfg) <= off.b);
}

TEST_CASE("drift offset stays bounded in n") {
  const ModelConfig cfg;
  const Dataset small = data_with_spread(100, 3.0, 10);
  const Dataset large = data_with_spread(6400, 3.0, 10);
  const double b100 = drift_offset_b(small, cfg, default_large_set(small, cfg));
  const double b6400 = drift_offset_b(large, cfg, default_large_set(large, cfg));
  CHECK(b6400 / b100 < 2.0);
  CHECK(b100 / b6400 < 2.0);
}

TEST_CASE("tail probability bound") {
  const ModelConfig cfg;
  const Dataset ds = dataset_from_stats(100, 0.0, 3.0 * 99.0);
  const LargeSetSpec spec{1.0, 2.0};
  CHECK(tail_probability_bound(5, ds, cfg, spec, 1.0) == doctest::Approx(1.65).epsilon(1e-14));
  CHECK(tail_probability_bound(0, ds, cfg, spec, 1.0) == 0.0);
  const TailCoefficients tc = tail_coefficients(ds, cfg, spec, 1.0);
  CHECK(tc.C3 * 5.0 / 10.0 + tc.C2 * 30.0 / 100.0 == doctest::Approx(1.65).epsilon(1e-14));
}

TEST_CASE("posterior mean of 1/A") {
  const ModelConfig cfg;
  // Reference: adaptive quadrature of the marginal posterior of A.
  CHECK(expected_inv_A(dataset_from_stats(10, 0.0, 27.0), cfg) == doctest::Approx(1.2143979824435627).epsilon(1e-8));
  CHECK(expected_inv_A(dataset_from_stats(50, 0.0, 147.0), cfg) == doctest::Approx(0.6140425892715335).epsilon(1e-8));
  for (std::size_t n : {100, 400, 1600, 6400}) {
    const double h = expected_inv_A(dataset_from_stats(n, 0.0, 3.0 * static_cast<double>(n - 1)), cfg);
    CHECK(h <= 2.0 / cfg.delta_margin);
  }
  ModelConfig loose;
  loose.delta_margin = 0.5;
  const double h400 = expected_inv_A(dataset_from_stats(400, 0.0, 2.0 * 399.0), loose);
  CHECK(std::abs(h400 - 1.0) < 0.15);
  const double h6400 = expected_inv_A(dataset_from_stats(6400, 0.0, 2.0 * 6399.0), loose);
  CHECK(std::abs(h6400 - 1.0) < std::abs(h400 - 1.0));
}

TEST_CASE("expected drift requires enough posterior shape") {
  ModelConfig cfg;
  cfg.prior_shape_a = 0.1;
  const Dataset ds = dataset_from_stats(3, 0.0, 20.0);
  CHECK_THROWS_AS(expected_drift(0.0, 1.0, ds, cfg), lsdrift::Error);
}
