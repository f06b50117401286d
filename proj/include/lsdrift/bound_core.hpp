#ifndef LSDRIFT_BOUND_CORE_HPP
#define LSDRIFT_BOUND_CORE_HPP

#include <cstdint>
#include <functional>
#include <optional>

/**
 * \file
 * \brief Model-agnostic drift/minorization certificates and the total
 * variation bound for chains satisfying a drift condition on a large set.
 */

namespace lsdrift::bound {

/// Drift constants: E[f(X1)|X0=x] <= lambda f(x) + b on the large set, with
/// the small set {f <= d_small}.
struct DriftParameters {
  double lambda = 0.0;
  double b_drift = 0.0;
  double d_small = 0.0;
  double initial_drift_expectation = 0.0;  ///< E_nu[f] for the initial law nu

  /// Throws unless 0 < lambda < 1, b >= 0, E_nu f >= 0 and d > 2b/(1-lambda).
  void validate() const;
};

struct MinorizationCertificate {
  double epsilon = 0.0;
  double q_mass_lower = 1.0;  ///< lower bound on Q(R_0)

  void validate() const;
  double eps_q() const { return epsilon * q_mass_lower; }
};

struct AlphaLambda {
  double alpha = 0.0;
  double Lambda = 0.0;
  double log_alpha = 0.0;  ///< log(alpha) without cancellation when alpha is close to 1
};

struct DerivedConstants {
  double alpha = 0.0;
  double Lambda = 0.0;
  double r = 0.0;
  double gamma = 0.0;
  /// log(gamma). gamma itself rounds to 1 in double when eps_q is tiny, so
  /// downstream formulas use this field.
  double log_gamma = 0.0;
  double log_alpha = 0.0;
};

/// Bounds on the probability of leaving the large set R_0.
struct TailSequence {
  double pi_exit_bound = 0.0;  ///< bound on pi(R_0^c)
  /// Bound on sum_{i<=k} P^i(nu, R_0^c). An empty function means identically 0.
  std::function<double(std::int64_t)> cumulative_exit_bound;

  double cumulative(std::int64_t k) const;
  double total(std::int64_t k) const { return static_cast<double>(k) * pi_exit_bound + cumulative(k); }

  static TailSequence zero() { return {}; }
};

/// alpha^{-1} = (1 + 2b + lambda d)/(1 + d) and Lambda = 1 + 2(lambda d + b).
AlphaLambda derive_alpha_lambda(const DriftParameters& p);

struct OptimalR {
  double r = 0.0;
  double gamma = 0.0;
  double log_gamma = 0.0;
};

/// The r that equates (1 - eps_q)^r with alpha^{-1} (alpha Lambda)^r.
OptimalR optimal_r(double alpha, double Lambda, double eps_q);
OptimalR optimal_r(const AlphaLambda& al, double eps_q);

/// Full set of derived constants. With `r_override` the caller's r is used and
/// gamma is the larger of the two geometric rates.
DerivedConstants derive_constants(const DriftParameters& p, const MinorizationCertificate& m,
                                  std::optional<double> r_override = std::nullopt);

/// The individual terms of the bound at step k.
struct BoundTerms {
  double coupling = 0.0;  ///< (1 - eps_q)^{rk}
  double drift = 0.0;     ///< [(alpha Lambda)^{rk} W - alpha^{rk}] / (alpha^k - alpha^{rk})
  double tail = 0.0;      ///< k pi(R_0^c) + sum_{i<=k} P^i(nu, R_0^c)
  double total = 0.0;
};

/// Evaluates the bound term by term in log space using long double
/// accumulation. Returns the raw value; clamping is a reporting concern.
BoundTerms evaluate_bound_terms(const DriftParameters& p, const MinorizationCertificate& m, const DerivedConstants& dc,
                                const TailSequence& t, std::int64_t k);

double evaluate_bound(const DriftParameters& p, const MinorizationCertificate& m, const DerivedConstants& dc,
                      const TailSequence& t, std::int64_t k);

/// The bound with R_0 equal to the whole space: q_mass = 1 and no tail terms.
double classic_bound(const DriftParameters& p, double epsilon, std::int64_t k);

/// Values are integer valued but kept as doubles: for tiny eps_q they exceed
/// the range of 64-bit integers.
struct MixingCertificate {
  double K_bar = 0.0;
  double N_c = 0.0;
};

/// K_bar = ceil[(log C1 - log(c/3)) / log(1/gamma)] (at least 1) and
/// N_c = ceil max{N, (K_bar 3 C3 / c)^2, (K_bar + 1)^2 3 C2 / c}.
MixingCertificate mixing_time_certificate(double C1, double C2, double C3, double gamma, double c, double N = 1.0);

/// Same as above, parameterised by log(gamma) so that gamma within an ulp of 1
/// still yields a finite certificate.
MixingCertificate mixing_time_certificate_log(double C1, double C2, double C3, double log_gamma, double c,
                                              double N = 1.0);

}  // namespace lsdrift::bound

#endif
