#include "lsdrift/hier_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsdrift/error.hpp"

namespace lsdrift::model {

namespace {

constexpr const char* kModule = "hier_model";

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double posterior_shape(const Dataset& ds, const ModelConfig& cfg) {
  return cfg.prior_shape_a + 0.5 * static_cast<double>(ds.n - 1);
}

}  // namespace

Dataset sufficient_stats(std::vector<double> y) {
  if (y.size() < 2) throw invalid_argument(kModule, "a dataset needs at least 2 observations");
  CompensatedSum sum;
  for (double v : y) {
    if (!std::isfinite(v)) throw invalid_argument(kModule, "observations must be finite");
    sum.add(v);
  }
  Dataset ds;
  ds.n = y.size();
  ds.y_bar = sum.value() / static_cast<double>(ds.n);
  CompensatedSum squares;
  for (double v : y) {
    const double d = v - ds.y_bar;
    squares.add(d * d);
  }
  ds.delta = squares.value();
  ds.y = std::move(y);
  return ds;
}

Dataset dataset_from_stats(std::size_t n, double y_bar, double delta) {
  if (n < 2) throw invalid_argument(kModule, "a dataset needs at least 2 observations");
  if (!std::isfinite(y_bar) || !std::isfinite(delta) || delta < 0.0) {
    throw invalid_argument(kModule, "y_bar must be finite and delta finite and >= 0");
  }
  Dataset ds;
  ds.n = n;
  ds.y_bar = y_bar;
  ds.delta = delta;
  return ds;
}

void ModelConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(V)) throw invalid_argument(kModule, "V must be > 0");
  if (!positive(prior_shape_a)) throw invalid_argument(kModule, "prior shape a must be > 0");
  if (!positive(prior_scale_b)) throw invalid_argument(kModule, "prior scale b must be > 0");
  if (!positive(delta_margin)) throw invalid_argument(kModule, "delta margin must be > 0");
}

bool check_data_assumption(const Dataset& ds, const ModelConfig& cfg) {
  return ds.spread() >= cfg.V + cfg.delta_margin;
}

double drift_center(const Dataset& ds, const ModelConfig& cfg) { return ds.spread() - cfg.V; }

void ChainState::refresh() {
  if (theta.empty()) return;
  CompensatedSum sum;
  for (double t : theta) sum.add(t);
  theta_bar = sum.value() / static_cast<double>(theta.size());
  CompensatedSum squares;
  for (double t : theta) {
    const double d = t - theta_bar;
    squares.add(d * d);
  }
  S = theta.size() > 1 ? squares.value() / static_cast<double>(theta.size() - 1) : 0.0;
}

ChainState ChainState::summary() const { return make_summary_state(mu, A, theta_bar, S); }

ChainState make_summary_state(double mu, double A, double theta_bar, double S) {
  ChainState x;
  x.mu = mu;
  x.A = A;
  x.theta_bar = theta_bar;
  x.S = S;
  return x;
}

ChainState initial_state(const Dataset& ds, const ModelConfig& cfg) {
  const double center = drift_center(ds, cfg);
  ChainState x;
  x.mu = 0.0;
  x.A = center > 0.0 ? center : ds.spread();
  if (!(x.A > 0.0)) throw invalid_argument(kModule, "initial A is not positive (delta = 0)");
  x.theta_bar = ds.y_bar;
  x.S = 0.0;
  if (!ds.y.empty()) x.theta.assign(ds.n, ds.y_bar);
  return x;
}

double drift_value(double theta_bar, double A, const Dataset& ds, const ModelConfig& cfg) {
  const double n = static_cast<double>(ds.n);
  const double dt = theta_bar - ds.y_bar;
  const double da = drift_center(ds, cfg) - A;
  return n * dt * dt + n * da * da;
}

double drift_value(const ChainState& x, const Dataset& ds, const ModelConfig& cfg) {
  return drift_value(x.theta_bar, x.A, ds, cfg);
}

double lambda_factor(double A, double V) {
  if (!(A >= 0.0)) throw invalid_argument(kModule, "lambda_factor requires A >= 0");
  const double num = V * V + 2.0 * V * A;
  const double ratio = num / (num + A * A);
  return ratio * ratio;
}

void LargeSetSpec::validate() const {
  if (!std::isfinite(T) || !std::isfinite(center)) throw invalid_argument(kModule, "large set parameters must be finite");
  if (!(T > 0.0)) throw invalid_argument(kModule, "threshold T must be > 0");
  if (!(T < center)) throw invalid_argument(kModule, "threshold T must be below the drift center");
}

LargeSetSpec default_large_set(const Dataset& ds, const ModelConfig& cfg) {
  const double center = drift_center(ds, cfg);
  return large_set_with_threshold(ds, cfg, std::min(cfg.delta_margin, 0.5 * center));
}

LargeSetSpec large_set_with_threshold(const Dataset& ds, const ModelConfig& cfg, double T) {
  LargeSetSpec spec{T, drift_center(ds, cfg)};
  spec.validate();
  return spec;
}

double lambda_T(const LargeSetSpec& spec, double V) {
  if (!(spec.T > 0.0)) throw invalid_argument(kModule, "threshold T must be > 0");
  return lambda_factor(spec.T, V);
}

bool in_large_set(const ChainState& x, const LargeSetSpec& spec) { return spec.contains(x.A); }

void gibbs_step_inplace(ChainState& x, const Dataset& ds, const ModelConfig& cfg, numerics::RngStream& stream) {
  const double n = static_cast<double>(ds.n);
  const double V = cfg.V;
  const double A = x.A;
  const double shrink = A / (V + A);  // weight on Y_i
  const double sigma2 = A * V / (V + A);

  x.mu = numerics::draw_normal(stream, x.theta_bar, A / n);
  const double pull = x.mu * V / (V + A);

  if (x.is_full()) {
    if (ds.y.size() != ds.n || x.theta.size() != ds.n) {
      throw invalid_argument(kModule, "full Gibbs step needs the observations and a theta vector of length n");
    }
    const double sd = std::sqrt(sigma2);
    for (std::size_t i = 0; i < ds.n; ++i) x.theta[i] = pull + shrink * ds.y[i] + sd * stream.standard_normal();
    x.refresh();
  } else {
    // theta_bar' is independent of the within-group spread. Projecting the
    // noise on the unit vector along (Y - y_bar) leaves one N(0,1) coordinate
    // that interacts with the data and n-2 orthogonal ones.
    x.theta_bar = numerics::draw_normal(stream, pull + shrink * ds.y_bar, sigma2 / n);
    const double sigma = std::sqrt(sigma2);
    const double along = shrink * std::sqrt(ds.delta) + sigma * stream.standard_normal();
    const double rest = sigma2 * numerics::draw_chi_squared(stream, n - 2.0);
    x.S = (along * along + rest) / (n - 1.0);
  }

  const double shape = posterior_shape(ds, cfg);
  const double scale = cfg.prior_scale_b + 0.5 * (n - 1.0) * x.S;
  x.A = numerics::draw_inverse_gamma(stream, shape, scale);
}

ChainState gibbs_step(const ChainState& x, const Dataset& ds, const ModelConfig& cfg, numerics::RngStream& stream) {
  ChainState next = x;
  gibbs_step_inplace(next, ds, cfg, stream);
  return next;
}

SMoments conditional_S_moments(double A, const Dataset& ds, const ModelConfig& cfg) {
  if (!(A > 0.0)) throw invalid_argument(kModule, "conditional_S_moments requires A > 0");
  const double m = static_cast<double>(ds.n - 1);
  const double sigma2 = A * cfg.V / (cfg.V + A);
  const double k = A / (cfg.V + A);
  SMoments out;
  out.mean = sigma2 + k * k * ds.delta / m;
  out.variance = (2.0 * m * sigma2 * sigma2 + 4.0 * k * k * sigma2 * ds.delta) / (m * m);
  out.second_moment = out.variance + out.mean * out.mean;
  return out;
}

double expected_drift_A_part(double A, const Dataset& ds, const ModelConfig& cfg) {
  if (!(A > 0.0)) throw invalid_argument(kModule, "expected_drift requires A > 0");
  const double shape = posterior_shape(ds, cfg);
  if (!(shape > 2.0)) throw invalid_argument(kModule, "a + (n-1)/2 must exceed 2 for the second moment of A'");
  const double n = static_cast<double>(ds.n);
  const double m = n - 1.0;
  const double c = drift_center(ds, cfg);
  const double bp = cfg.prior_scale_b;
  const SMoments s = conditional_S_moments(A, ds, cfg);

  // A' | S ~ IG(shape, bp + m S / 2): E A' = beta/(shape-1), E A'^2 = beta^2/((shape-1)(shape-2)).
  const double e_beta = bp + 0.5 * m * s.mean;
  const double e_beta2 = bp * bp + bp * m * s.mean + 0.25 * m * m * s.second_moment;
  const double e_a = e_beta / (shape - 1.0);
  const double e_a2 = e_beta2 / ((shape - 1.0) * (shape - 2.0));
  return n * (c * c - 2.0 * c * e_a + e_a2);
}

double expected_drift(double theta_bar, double A, const Dataset& ds, const ModelConfig& cfg) {
  if (!(A > 0.0)) throw invalid_argument(kModule, "expected_drift requires A > 0");
  const double n = static_cast<double>(ds.n);
  const double V = cfg.V;
  const double sigma2 = A * V / (V + A);
  const double pull = V / (V + A);
  const double dt = theta_bar - ds.y_bar;
  // theta_bar' - y_bar = pull (mu' - y_bar) + noise of variance sigma2/n, with mu' ~ N(theta_bar, A/n).
  const double theta_part = n * pull * pull * (dt * dt + A / n) + sigma2;
  return theta_part + expected_drift_A_part(A, ds, cfg);
}

DriftOffset drift_offset(const Dataset& ds, const ModelConfig& cfg, const LargeSetSpec& spec) {
  cfg.validate();
  spec.validate();
  const double n = static_cast<double>(ds.n);
  const double c = spec.center;
  auto gap_at_ybar = [&](double A) {
    const double da = c - A;
    return expected_drift(ds.y_bar, A, ds, cfg) - lambda_factor(A, cfg.V) * n * da * da;
  };
  const numerics::ScalarMinimum best = numerics::maximize_scalar(gap_at_ybar, spec.T, spec.upper(), 1e-12);
  if (!std::isfinite(best.value)) throw numerical_error(kModule, "drift offset supremum is not finite");

  DriftOffset out;
  out.raw_supremum = best.value;
  out.argmax_A = best.argmin;
  out.b = kDriftSafetyFactor * std::max(0.0, best.value);

  // Guard: the theta_bar coefficient of [E f' - lambda(A) f] must be <= 0 on R_T.
  out.max_theta_gap = -std::numeric_limits<double>::infinity();
  constexpr int kGuard = 201;
  for (int i = 0; i < kGuard; ++i) {
    const double A = spec.T + (spec.upper() - spec.T) * i / (kGuard - 1);
    const double pull = cfg.V / (cfg.V + A);
    out.max_theta_gap = std::max(out.max_theta_gap, pull * pull - lambda_factor(A, cfg.V));
    for (double offset : {0.1, 1.0, 10.0}) {
      const double t = ds.y_bar + offset;
      const double da = c - A;
      const double value = expected_drift(t, A, ds, cfg) - lambda_factor(A, cfg.V) * (n * offset * offset + n * da * da);
      if (value > out.b) throw numerical_error(kModule, "drift offset reduction to theta_bar = y_bar failed");
    }
  }
  if (out.max_theta_gap > 1e-14) throw numerical_error(kModule, "theta_bar coefficient gap is positive on R_T");
  return out;
}

double drift_offset_b(const Dataset& ds, const ModelConfig& cfg, const LargeSetSpec& spec) {
  return drift_offset(ds, cfg, spec).b;
}

TailCoefficients tail_coefficients(const Dataset& ds, const ModelConfig& cfg, const LargeSetSpec& spec, double b) {
  const double edge = spec.center - spec.T;
  if (edge == 0.0) throw invalid_argument(kModule, "center equals T");
  if (!(b >= 0.0)) throw invalid_argument(kModule, "b must be >= 0");
  TailCoefficients out;
  out.C2 = b / (2.0 * edge * edge);
  out.C3 = std::sqrt(b) * (2.0 * cfg.V / cfg.delta_margin + 1.0) / std::abs(edge);
  out.pi_exit = out.C3 / std::sqrt(static_cast<double>(ds.n));
  return out;
}

double tail_probability_bound(std::int64_t k, const Dataset& ds, const ModelConfig& cfg, const LargeSetSpec& spec,
                              double b) {
  if (k < 0) throw invalid_argument(kModule, "k must be >= 0");
  const TailCoefficients t = tail_coefficients(ds, cfg, spec, b);
  const double kk = static_cast<double>(k);
  const double n = static_cast<double>(ds.n);
  return kk * t.pi_exit + t.C2 * kk * (1.0 + kk) / n;
}

double expected_inv_A(const Dataset& ds, const ModelConfig& cfg, const numerics::QuadratureSpec& q) {
  cfg.validate();
  const double half_m = 0.5 * static_cast<double>(ds.n - 1);
  auto log_kernel = [&](double A) {
    return -(cfg.prior_shape_a + 1.0) * std::log(A) - cfg.prior_scale_b / A - half_m * std::log(cfg.V + A) -
           ds.delta / (2.0 * (cfg.V + A));
  };
  // Locate the mode on a log scale, then normalise by it so the integrands peak at 1.
  auto neg_on_log = [&](double t) { return -log_kernel(std::exp(t)); };
  const double lo = std::log(1e-8), hi = std::log(1e8);
  const numerics::ScalarMinimum mode = numerics::minimize_scalar(neg_on_log, lo, hi, 1e-12, 4001);
  const double a_star = std::exp(mode.argmin);
  const double peak = -mode.value;

  // Curvature-based width of the peak in A.
  const double h = 1e-4 * a_star;
  const double curv = (log_kernel(a_star + h) - 2.0 * log_kernel(a_star) + log_kernel(a_star - h)) / (h * h);
  const double width = curv < 0.0 ? 1.0 / std::sqrt(-curv) : a_star;
  std::vector<double> breaks;
  for (double z : {-30.0, -10.0, -3.0, 0.0, 3.0, 10.0, 30.0}) {
    const double A = a_star + z * width;
    if (A > 0.0) breaks.push_back(A);
  }
  breaks.push_back(a_star * 1e-3);
  breaks.push_back(a_star * 1e3);

  auto denominator = [&](double A) {
    if (!(A > 0.0) || !std::isfinite(A)) return 0.0;
    return std::exp(log_kernel(A) - peak);
  };
  auto numerator = [&](double A) {
    if (!(A > 0.0) || !std::isfinite(A)) return 0.0;
    return std::exp(log_kernel(A) - peak) / A;
  };
  numerics::QuadratureSpec spec = q;
  spec.absolute_tolerance = std::min(q.absolute_tolerance, 1e-14 * width);
  const double den = numerics::integrate_halfline_breaks(denominator, breaks, spec).value;
  const double num = numerics::integrate_halfline_breaks(numerator, breaks, spec).value;
  if (!(den > 0.0) || !std::isfinite(num)) throw numerical_error(kModule, "posterior normaliser for 1/A is degenerate");
  return num / den;
}

}  // namespace lsdrift::model
