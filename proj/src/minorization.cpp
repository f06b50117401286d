#include "lsdrift/minorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "lsdrift/error.hpp"

namespace lsdrift::minorization {

namespace {

constexpr const char* kModule = "minorization";
constexpr double kLogFloor = -1e4;  // exp() of this is 0 in double
constexpr std::size_t kInnerGrid = 33;

using numerics::FunctionRef;

/// Infimum over A in [lo, hi] of exp(log_density(A)).
double inf_over_A(FunctionRef log_density, double lo, double hi) {
  if (hi - lo <= 1e-13 * std::max(1.0, std::abs(lo))) return std::exp(std::max(kLogFloor, log_density(0.5 * (lo + hi))));
  auto clamped = [&](double A) { return std::max(kLogFloor, log_density(A)); };
  const auto m = numerics::minimize_scalar(clamped, lo, hi, 1e-7 * (hi - lo), kInnerGrid);
  return std::exp(m.value);
}

std::vector<double> uniform_breaks(double a, double b, int pieces) {
  std::vector<double> out;
  for (int i = 1; i < pieces; ++i) out.push_back(a + (b - a) * i / pieces);
  return out;
}

struct SFamily {
  double V;
  double delta;
  double m;  // n - 1
  double sigma2(double A) const { return A * V / (V + A); }
  double shift(double A) const {
    const double k = A / (V + A);
    return k * k * delta / m;
  }
  double scale(double A) const { return sigma2(A) / m; }
  double log_density(double A, double s) const {
    const double sc = scale(A);
    const double x = (s - shift(A)) / sc;
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return numerics::log_chi_squared_pdf(x, m) - std::log(sc);
  }
};

/// Probability that A' ~ IG(shape, b + m s / 2) falls outside [T, upper].
double exit_given_s(double s, const model::Dataset& ds, const model::ModelConfig& cfg, const model::LargeSetSpec& spec) {
  const double m = static_cast<double>(ds.n - 1);
  const double shape = cfg.prior_shape_a + 0.5 * m;
  const double beta = cfg.prior_scale_b + 0.5 * m * s;
  // A' < T  <=>  G > 1/T  and  A' > U  <=>  G < 1/U  for G ~ Gamma(shape, rate beta).
  return boost::math::gamma_q(shape, beta / spec.T) + boost::math::gamma_p(shape, beta / spec.upper());
}

struct SourceMoments {
  double mean_mu, mean_tb;
  double v_mu, cov, v_tb;
  double mean_c, v_c;
  double rate_q;  // Q ~ Gamma((n-2)/2, rate_q)
};

SourceMoments source_moments(const KernelSource& x, const model::Dataset& ds, const model::ModelConfig& cfg) {
  const double n = static_cast<double>(ds.n);
  const double k = x.A / (cfg.V + x.A);
  const double sigma2 = x.A * cfg.V / (cfg.V + x.A);
  SourceMoments s;
  s.mean_mu = x.theta_bar;
  s.mean_tb = (1.0 - k) * x.theta_bar + k * ds.y_bar;
  s.v_mu = x.A / n;
  s.cov = (1.0 - k) * s.v_mu;
  s.v_tb = (1.0 - k) * (1.0 - k) * s.v_mu + sigma2 / n;
  s.mean_c = k * ds.delta;
  s.v_c = sigma2 * ds.delta;
  s.rate_q = 0.5 / sigma2;
  return s;
}

struct Gauss2 {
  double m1, m2;
  double p11, p12, p22;  // precision
  double log_det_cov;
  double l11, l21, l22;  // Cholesky factor of the covariance

  static Gauss2 from_cov(double m1, double m2, double c11, double c12, double c22) {
    Gauss2 g;
    g.m1 = m1;
    g.m2 = m2;
    const double det = c11 * c22 - c12 * c12;
    g.p11 = c22 / det;
    g.p12 = -c12 / det;
    g.p22 = c11 / det;
    g.log_det_cov = std::log(det);
    g.l11 = std::sqrt(c11);
    g.l21 = c12 / g.l11;
    g.l22 = std::sqrt(c22 - g.l21 * g.l21);
    return g;
  }
  static Gauss2 from_precision(double m1, double m2, double p11, double p12, double p22) {
    const double det = p11 * p22 - p12 * p12;
    return from_cov(m1, m2, p22 / det, -p12 / det, p11 / det);
  }
  double log_pdf(double x1, double x2) const {
    const double d1 = x1 - m1, d2 = x2 - m2;
    return -std::log(2.0 * numerics::kPi) - 0.5 * log_det_cov - 0.5 * (p11 * d1 * d1 + 2.0 * p12 * d1 * d2 + p22 * d2 * d2);
  }
};

double log_gamma_pdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

void require_oracle_data(const model::Dataset& ds) {
  if (ds.n < 3) throw invalid_argument(kModule, "the overlap oracle needs n >= 3");
  if (!(ds.delta > 0.0)) throw invalid_argument(kModule, "the overlap oracle needs delta > 0");
}

}  // namespace

void SmallSetBox::validate() const {
  if (!(theta_bar_halfwidth >= 0.0) || !(A_halfwidth >= 0.0)) throw invalid_argument(kModule, "box halfwidths must be >= 0");
  if (!std::isfinite(A_center) || !std::isfinite(theta_bar_center)) throw invalid_argument(kModule, "box center must be finite");
  if (!(A_center - A_halfwidth > 0.0)) throw invalid_argument(kModule, "small-set box reaches A <= 0");
}

SmallSetBox SmallSetBox::from_level(const model::Dataset& ds, const model::ModelConfig& cfg, double d) {
  if (!(d >= 0.0)) throw invalid_argument(kModule, "small-set level d must be >= 0");
  const double h = std::sqrt(d / static_cast<double>(ds.n));
  SmallSetBox box{h, h, model::drift_center(ds, cfg), ds.y_bar};
  box.validate();
  return box;
}

EpsilonBreakdown epsilon_breakdown(const SmallSetBox& box, const model::Dataset& ds, const model::ModelConfig& cfg,
                                   const numerics::QuadratureSpec& q, const model::LargeSetSpec* large_set) {
  box.validate();
  cfg.validate();
  if (ds.n < 2) throw invalid_argument(kModule, "dataset needs n >= 2");
  const double n = static_cast<double>(ds.n);
  const double a_lo = box.A_lo(), a_hi = box.A_hi();
  const double h = box.theta_bar_halfwidth;

  // Values can be far below the default absolute tolerance, so only the
  // relative tolerance is effective.
  numerics::QuadratureSpec tiny = q;
  tiny.absolute_tolerance = 1e-300;

  EpsilonBreakdown out;

  // S-factor.
  const SFamily fam{cfg.V, ds.delta, n - 1.0};
  auto inf_s_density = [&](double s) {
    auto ld = [&](double A) { return fam.log_density(A, s); };
    return inf_over_A(ld, a_lo, a_hi);
  };
  const double s_lo = std::max(fam.shift(a_lo), fam.shift(a_hi));
  const double spread = fam.m + 40.0 * std::sqrt(2.0 * fam.m);
  const double s_hi = std::max(fam.shift(a_lo) + fam.scale(a_lo) * spread, fam.shift(a_hi) + fam.scale(a_hi) * spread);
  const auto s_breaks = uniform_breaks(s_lo, s_hi, 64);
  const numerics::QuadratureResult s_res = numerics::integrate_breaks(inf_s_density, s_lo, s_hi, s_breaks, tiny);
  out.s_factor = s_res.value;
  out.s_factor_error = s_res.error;

  if (large_set != nullptr) {
    auto outside = [&](double s) { return inf_s_density(s) * exit_given_s(s, ds, cfg, *large_set); };
    const numerics::QuadratureResult o = numerics::integrate_breaks(outside, s_lo, s_hi, s_breaks, tiny);
    const double denom = out.s_factor - out.s_factor_error;
    out.q_exit_fraction = denom > 0.0 ? std::min(1.0, (o.value + o.error) / denom) : 1.0;
  }

  // theta_bar-factor g(mu), a lower bound after subtracting its quadrature error.
  auto mean_tb = [&](double A, double mu) { return (mu * cfg.V + ds.y_bar * A) / (cfg.V + A); };
  auto var_tb = [&](double A) { return A * cfg.V / (n * (cfg.V + A)); };
  numerics::QuadratureSpec inner = q;
  inner.absolute_tolerance = std::max(1e-14, q.absolute_tolerance * 1e-2);
  inner.relative_tolerance = std::max(1e-9, q.relative_tolerance);
  auto g = [&](double mu) {
    const double m1 = mean_tb(a_lo, mu), m2 = mean_tb(a_hi, mu);
    const double lo = std::min(m1, m2), hi = std::max(m1, m2);
    const double sd = std::sqrt(var_tb(a_hi));
    auto inf_density = [&](double tb) {
      auto ld = [&](double A) { return numerics::log_normal_pdf(tb, mean_tb(A, mu), var_tb(A)); };
      return inf_over_A(ld, a_lo, a_hi);
    };
    std::vector<double> breaks{lo, 0.5 * (lo + hi), hi, lo - 3.0 * sd, hi + 3.0 * sd};
    const auto r = numerics::integrate_breaks(inf_density, lo - 12.0 * sd, hi + 12.0 * sd, breaks, inner);
    return std::max(0.0, r.value - r.error);
  };

  // mu-factor. The farthest theta_bar corner minimises the density in theta_bar;
  // in A the density is unimodal, so the minimum sits at an endpoint.
  auto inf_mu_density = [&](double mu) {
    const double z = std::abs(mu - ds.y_bar) + h;
    return std::min(numerics::normal_pdf(z, 0.0, a_lo / n), numerics::normal_pdf(z, 0.0, a_hi / n));
  };
  const double mu_sd = std::sqrt(a_hi / n);
  const double reach = h + 12.0 * mu_sd;
  std::vector<double> mu_breaks = uniform_breaks(ds.y_bar - reach, ds.y_bar + reach, 48);
  mu_breaks.push_back(ds.y_bar);
  mu_breaks.push_back(ds.y_bar - h);
  mu_breaks.push_back(ds.y_bar + h);
  auto mu_integrand = [&](double mu) { return g(mu) * inf_mu_density(mu); };
  const numerics::QuadratureResult mu_res =
      numerics::integrate_breaks(mu_integrand, ds.y_bar - reach, ds.y_bar + reach, mu_breaks, tiny);
  out.mu_factor = mu_res.value;
  out.mu_factor_error = mu_res.error;
  // Outside the window the infimum is below N(y_bar, A_hi/n) and g <= 1.
  out.truncation_mass = 2.0 * numerics::normal_sf(reach / mu_sd);

  const double s_lower = out.s_factor - out.s_factor_error;
  const double mu_lower = out.mu_factor - out.mu_factor_error;
  if (!(s_lower > 0.0) || !(mu_lower > 0.0)) throw numerical_error(kModule, "degenerate small set");
  out.epsilon = std::min(1.0, s_lower * mu_lower);
  return out;
}

double epsilon_lower_bound(const SmallSetBox& box, const model::Dataset& ds, const model::ModelConfig& cfg,
                           const numerics::QuadratureSpec& q) {
  return epsilon_breakdown(box, ds, cfg, q).epsilon;
}

double q_mass_lower_bound(double epsilon, double exit_prob_upper) {
  if (!(epsilon > 0.0)) throw invalid_argument(kModule, "epsilon must be > 0");
  if (!(exit_prob_upper >= 0.0)) throw invalid_argument(kModule, "exit probability bound must be >= 0");
  return std::clamp(1.0 - exit_prob_upper / epsilon, 0.0, 1.0);
}

double exit_probability_upper(const SmallSetBox& box, const model::Dataset& ds, const model::ModelConfig& cfg,
                              const model::LargeSetSpec& spec) {
  box.validate();
  spec.validate();
  const double n = static_cast<double>(ds.n);
  const double edge = spec.center - spec.T;
  auto markov = [&](double A) { return model::expected_drift_A_part(A, ds, cfg) / (n * edge * edge); };
  double best = markov(box.A_center);
  if (box.A_halfwidth > 0.0) best = std::min(best, numerics::minimize_scalar(markov, box.A_lo(), box.A_hi()).value);
  return std::min(1.0, best);
}

std::array<KernelSource, 5> box_corners(const SmallSetBox& box) {
  const double t = box.theta_bar_center, h = box.theta_bar_halfwidth;
  return {KernelSource{t - h, box.A_lo()}, KernelSource{t - h, box.A_hi()}, KernelSource{t + h, box.A_lo()},
          KernelSource{t + h, box.A_hi()}, KernelSource{t, box.A_center}};
}

KernelPoint draw_kernel_point(const KernelSource& x, const model::Dataset& ds, const model::ModelConfig& cfg,
                              numerics::RngStream& stream) {
  require_oracle_data(ds);
  const double n = static_cast<double>(ds.n);
  const double k = x.A / (cfg.V + x.A);
  const double sigma2 = x.A * cfg.V / (cfg.V + x.A);
  KernelPoint y;
  y.mu = numerics::draw_normal(stream, x.theta_bar, x.A / n);
  y.theta_bar = numerics::draw_normal(stream, (1.0 - k) * y.mu + k * ds.y_bar, sigma2 / n);
  y.C = numerics::draw_normal(stream, k * ds.delta, sigma2 * ds.delta);
  y.Q = sigma2 * numerics::draw_chi_squared(stream, n - 2.0);
  return y;
}

double log_kernel_density(const KernelSource& x, const KernelPoint& y, const model::Dataset& ds,
                          const model::ModelConfig& cfg) {
  require_oracle_data(ds);
  const double n = static_cast<double>(ds.n);
  const double k = x.A / (cfg.V + x.A);
  const double sigma2 = x.A * cfg.V / (cfg.V + x.A);
  return numerics::log_normal_pdf(y.mu, x.theta_bar, x.A / n) +
         numerics::log_normal_pdf(y.theta_bar, (1.0 - k) * y.mu + k * ds.y_bar, sigma2 / n) +
         numerics::log_normal_pdf(y.C, k * ds.delta, sigma2 * ds.delta) +
         log_gamma_pdf(y.Q, 0.5 * (n - 2.0), 0.5 / sigma2);
}

OverlapEstimate pair_overlap(const KernelSource& a, const KernelSource& b, const model::Dataset& ds,
                             const model::ModelConfig& cfg, numerics::RngStream& stream, std::size_t n_samples,
                             OverlapProposal proposal) {
  require_oracle_data(ds);
  if (n_samples < 2) throw invalid_argument(kModule, "the overlap oracle needs at least 2 samples");
  const double n = static_cast<double>(ds.n);
  const double q_shape = 0.5 * (n - 2.0);

  // Proposal pieces for the bridge: precision-averaged Gaussians and a gamma
  // with the averaged rate are the normalised geometric mean of the two kernels.
  const SourceMoments ma = source_moments(a, ds, cfg), mb = source_moments(b, ds, cfg);
  const Gauss2 ga = Gauss2::from_cov(ma.mean_mu, ma.mean_tb, ma.v_mu, ma.cov, ma.v_tb);
  const Gauss2 gb = Gauss2::from_cov(mb.mean_mu, mb.mean_tb, mb.v_mu, mb.cov, mb.v_tb);
  const double p11 = 0.5 * (ga.p11 + gb.p11), p12 = 0.5 * (ga.p12 + gb.p12), p22 = 0.5 * (ga.p22 + gb.p22);
  const double h1 = 0.5 * (ga.p11 * ga.m1 + ga.p12 * ga.m2 + gb.p11 * gb.m1 + gb.p12 * gb.m2);
  const double h2 = 0.5 * (ga.p12 * ga.m1 + ga.p22 * ga.m2 + gb.p12 * gb.m1 + gb.p22 * gb.m2);
  const double det = p11 * p22 - p12 * p12;
  const Gauss2 gq = Gauss2::from_precision((p22 * h1 - p12 * h2) / det, (p11 * h2 - p12 * h1) / det, p11, p12, p22);
  const double prec_c = 0.5 * (1.0 / ma.v_c + 1.0 / mb.v_c);
  const double mean_c = 0.5 * (ma.mean_c / ma.v_c + mb.mean_c / mb.v_c) / prec_c;
  const double rate_q = 0.5 * (ma.rate_q + mb.rate_q);

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    double w;
    if (proposal == OverlapProposal::direct) {
      const KernelPoint y = draw_kernel_point(a, ds, cfg, stream);
      const double la = log_kernel_density(a, y, ds, cfg);
      const double lb = log_kernel_density(b, y, ds, cfg);
      const double diff = lb - la;
      if (std::isnan(diff) || !std::isfinite(la)) throw numerical_error(kModule, "density ratio is not finite");
      w = diff >= 0.0 ? 1.0 : std::exp(diff);
    } else {
      const double z1 = stream.standard_normal(), z2 = stream.standard_normal();
      KernelPoint y;
      y.mu = gq.m1 + gq.l11 * z1;
      y.theta_bar = gq.m2 + gq.l21 * z1 + gq.l22 * z2;
      y.C = mean_c + stream.standard_normal() / std::sqrt(prec_c);
      y.Q = numerics::draw_gamma(stream, q_shape, rate_q);
      const double lq = gq.log_pdf(y.mu, y.theta_bar) + numerics::log_normal_pdf(y.C, mean_c, 1.0 / prec_c) +
                        log_gamma_pdf(y.Q, q_shape, rate_q);
      const double la = log_kernel_density(a, y, ds, cfg);
      const double lb = log_kernel_density(b, y, ds, cfg);
      const double lmin = std::min(la, lb) - lq;
      if (std::isnan(lmin) || !std::isfinite(lq)) throw numerical_error(kModule, "density ratio is not finite");
      w = std::exp(lmin);
    }
    sum += w;
    sum_sq += w * w;
  }
  const double N = static_cast<double>(n_samples);
  const double mean = sum / N;
  const double var = std::max(0.0, (sum_sq - N * mean * mean) / (N - 1.0));
  OverlapEstimate out;
  out.overlap = mean;
  out.se = std::sqrt(var / N);
  return out;
}

OverlapEstimate overlap_oracle_mc(const SmallSetBox& box, const model::Dataset& ds, const model::ModelConfig& cfg,
                                  numerics::RngStream& stream, std::size_t n_samples, OverlapProposal proposal) {
  box.validate();
  const auto corners = box_corners(box);
  OverlapEstimate best;
  best.overlap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < corners.size(); ++i) {
    for (std::size_t j = i + 1; j < corners.size(); ++j) {
      OverlapEstimate e = pair_overlap(corners[i], corners[j], ds, cfg, stream, n_samples, proposal);
      if (e.overlap < best.overlap) {
        e.first = i;
        e.second = j;
        best = e;
      }
    }
  }
  return best;
}

}  // namespace lsdrift::minorization
