#include "lsdrift/bound_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lsdrift/error.hpp"

namespace lsdrift::bound {

namespace {

constexpr const char* kModule = "bound_core";

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void DriftParameters::validate() const {
  if (!finite(lambda) || !(lambda > 0.0 && lambda < 1.0)) throw invalid_argument(kModule, "lambda must lie in (0, 1)");
  if (!finite(b_drift) || b_drift < 0.0) throw invalid_argument(kModule, "b_drift must be finite and >= 0");
  if (!finite(initial_drift_expectation) || initial_drift_expectation < 0.0) {
    throw invalid_argument(kModule, "initial drift expectation must be finite and >= 0");
  }
  if (!finite(d_small) || !(d_small > 2.0 * b_drift / (1.0 - lambda))) {
    throw invalid_argument(kModule, "d_small must exceed 2 b / (1 - lambda)");
  }
}

void MinorizationCertificate::validate() const {
  if (!finite(epsilon) || !(epsilon > 0.0 && epsilon <= 1.0)) throw invalid_argument(kModule, "epsilon must lie in (0, 1]");
  if (!finite(q_mass_lower) || q_mass_lower < 0.0 || q_mass_lower > 1.0) {
    throw invalid_argument(kModule, "q_mass_lower must lie in [0, 1]");
  }
  if (!(eps_q() < 1.0)) throw invalid_argument(kModule, "epsilon * q_mass_lower must be < 1");
}

double TailSequence::cumulative(std::int64_t k) const {
  if (k <= 0 || !cumulative_exit_bound) return 0.0;
  return cumulative_exit_bound(k);
}

AlphaLambda derive_alpha_lambda(const DriftParameters& p) {
  p.validate();
  const double denom = 1.0 + 2.0 * p.b_drift + p.lambda * p.d_small;
  const double gap = p.d_small - 2.0 * p.b_drift - p.lambda * p.d_small;
  if (!(gap > 0.0)) throw numerical_error(kModule, "small set too small relative to drift constants");
  AlphaLambda out;
  out.alpha = (1.0 + p.d_small) / denom;
  out.log_alpha = std::log1p(gap / denom);
  out.Lambda = 1.0 + 2.0 * (p.lambda * p.d_small + p.b_drift);
  if (!(out.log_alpha > 0.0)) throw numerical_error(kModule, "small set too small relative to drift constants");
  return out;
}

OptimalR optimal_r(double alpha, double Lambda, double eps_q) {
  return optimal_r(AlphaLambda{alpha, Lambda, std::log(alpha)}, eps_q);
}

OptimalR optimal_r(const AlphaLambda& al, double eps_q) {
  if (!(eps_q > 0.0)) throw invalid_argument(kModule, "no minorization mass (eps_q <= 0)");
  if (!(eps_q < 1.0)) throw invalid_argument(kModule, "eps_q must be < 1");
  if (!(al.log_alpha > 0.0) || !finite(al.log_alpha)) throw invalid_argument(kModule, "alpha must exceed 1");
  if (!(al.Lambda >= 1.0) || !finite(al.Lambda)) throw invalid_argument(kModule, "Lambda must be >= 1");

  const double log_one_minus = std::log1p(-eps_q);
  const double log_alpha_lambda = al.log_alpha + std::log(al.Lambda);
  OptimalR out;
  out.r = al.log_alpha / (log_alpha_lambda - log_one_minus);
  out.log_gamma = out.r * log_one_minus;
  out.gamma = std::exp(out.log_gamma);
  return out;
}

DerivedConstants derive_constants(const DriftParameters& p, const MinorizationCertificate& m,
                                  std::optional<double> r_override) {
  m.validate();
  const AlphaLambda al = derive_alpha_lambda(p);
  DerivedConstants dc;
  dc.alpha = al.alpha;
  dc.Lambda = al.Lambda;
  dc.log_alpha = al.log_alpha;
  if (r_override) {
    const double r = *r_override;
    if (!(r > 0.0 && r < 1.0)) throw invalid_argument(kModule, "r must lie in (0, 1)");
    const double coupling = r * std::log1p(-m.eps_q());
    const double drift = r * (al.log_alpha + std::log(al.Lambda)) - al.log_alpha;
    dc.r = r;
    dc.log_gamma = std::max(coupling, drift);
    dc.gamma = std::exp(dc.log_gamma);
    return dc;
  }
  const OptimalR opt = optimal_r(al, m.eps_q());
  dc.r = opt.r;
  dc.gamma = opt.gamma;
  dc.log_gamma = opt.log_gamma;
  return dc;
}

BoundTerms evaluate_bound_terms(const DriftParameters& p, const MinorizationCertificate& m, const DerivedConstants& dc,
                                const TailSequence& t, std::int64_t k) {
  p.validate();
  m.validate();
  if (k < 1) throw invalid_argument(kModule, "k must be a positive integer");
  if (!(dc.r > 0.0)) throw invalid_argument(kModule, "r must be positive");
  if (!(dc.r < 1.0)) throw invalid_argument(kModule, "r >= 1 makes alpha^k - alpha^{rk} non-positive");

  using LD = long double;
  const LD kk = static_cast<LD>(k);
  const LD r = dc.r;
  const LD log_alpha = dc.log_alpha > 0.0 ? static_cast<LD>(dc.log_alpha) : std::log(static_cast<LD>(dc.alpha));
  const LD log_alpha_lambda = log_alpha + std::log(static_cast<LD>(dc.Lambda));
  const LD w = 1.0L + static_cast<LD>(p.initial_drift_expectation) +
               static_cast<LD>(p.b_drift) / (1.0L - static_cast<LD>(p.lambda));

  // Numerator and denominator of the drift term are divided by alpha^k.
  const LD coupling = std::exp(r * kk * std::log1p(-static_cast<LD>(m.eps_q())));
  const LD lead = std::exp(kk * (r * log_alpha_lambda - log_alpha));
  const LD shrink_exponent = (r - 1.0L) * kk * log_alpha;
  const LD numerator = lead * w - std::exp(shrink_exponent);
  const LD denominator = -std::expm1(shrink_exponent);
  if (!(denominator > 0.0L)) throw numerical_error(kModule, "alpha^k - alpha^{rk} is not positive");

  BoundTerms out;
  out.coupling = static_cast<double>(coupling);
  out.drift = static_cast<double>(numerator / denominator);
  out.tail = t.total(k);
  out.total = static_cast<double>(coupling + numerator / denominator + static_cast<LD>(out.tail));
  if (!finite(out.total)) throw numerical_error(kModule, "bound evaluated to a non-finite value at k = " + std::to_string(k));
  return out;
}

double evaluate_bound(const DriftParameters& p, const MinorizationCertificate& m, const DerivedConstants& dc,
                      const TailSequence& t, std::int64_t k) {
  return evaluate_bound_terms(p, m, dc, t, k).total;
}

double classic_bound(const DriftParameters& p, double epsilon, std::int64_t k) {
  const MinorizationCertificate m{epsilon, 1.0};
  const DerivedConstants dc = derive_constants(p, m);
  return evaluate_bound(p, m, dc, TailSequence::zero(), k);
}

MixingCertificate mixing_time_certificate(double C1, double C2, double C3, double gamma, double c, double N) {
  if (!(gamma > 0.0)) throw invalid_argument(kModule, "gamma must be positive");
  if (!(gamma < 1.0)) throw invalid_argument(kModule, "gamma >= 1 gives no geometric decay");
  return mixing_time_certificate_log(C1, C2, C3, std::log(gamma), c, N);
}

MixingCertificate mixing_time_certificate_log(double C1, double C2, double C3, double log_gamma, double c, double N) {
  if (!(C1 > 0.0) || !(C2 > 0.0) || !(C3 > 0.0)) throw invalid_argument(kModule, "C1, C2, C3 must be positive");
  if (!(c > 0.0 && c < 1.0)) throw invalid_argument(kModule, "c must lie in (0, 1)");
  if (!(log_gamma < 0.0)) throw invalid_argument(kModule, "gamma >= 1 gives no geometric decay");
  MixingCertificate out;
  const double k_raw = (std::log(C1) - std::log(c / 3.0)) / -log_gamma;
  out.K_bar = std::max(1.0, std::ceil(k_raw));
  const double from_c3 = out.K_bar * 3.0 * C3 / c;
  const double from_c2 = (out.K_bar + 1.0) * (out.K_bar + 1.0) * 3.0 * C2 / c;
  out.N_c = std::ceil(std::max({N, from_c3 * from_c3, from_c2}));
  if (!finite(out.K_bar) || !finite(out.N_c)) throw numerical_error(kModule, "mixing time certificate overflowed");
  return out;
}

}  // namespace lsdrift::bound
