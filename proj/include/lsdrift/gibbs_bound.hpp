#ifndef LSDRIFT_GIBBS_BOUND_HPP
#define LSDRIFT_GIBBS_BOUND_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "lsdrift/bound_core.hpp"
#include "lsdrift/hier_model.hpp"
#include "lsdrift/minorization.hpp"

/**
 * \file
 * \brief End-to-end convergence certificate for the hierarchical Normal Gibbs
 * sampler started at the default initial state.
 */

namespace lsdrift::model {

struct BoundConstants {
  double T = 0.0;
  double center = 0.0;
  double lambda_T = 0.0;
  double b_drift = 0.0;
  double d = 0.0;
  double epsilon = 0.0;
  double q_mass = 0.0;         ///< the larger of the two lower bounds below
  double q_mass_remark = 0.0;  ///< 1 - exit/epsilon with a Markov bound on the exit probability
  double q_mass_direct = 0.0;  ///< from the A'-step exit probability inside the epsilon integral
  double exit_prob_upper = 0.0;
  double alpha = 0.0;
  double Lambda = 0.0;
  double r = 0.0;
  double gamma = 0.0;
  double log_gamma = 0.0;
  double C1 = 0.0;  ///< 2 + b/(1 - lambda_T)
  double C2 = 0.0;  ///< coefficient of k(1+k)/n
  double C3 = 0.0;  ///< coefficient of k/sqrt(n)
  double C4 = 0.0;  ///< coefficient of f(x0) k/n for other starting states
  double initial_drift = 0.0;
};

struct BoundCurvePoint {
  std::int64_t k = 0;
  double term1 = 0.0;  ///< (1 - eps Q)^{rk}
  double term2 = 0.0;  ///< drift term
  double tail = 0.0;   ///< k pi(R_T^c) + sum_i P^i(x0, R_T^c)
  double total = 0.0;
  double clamped_total = 0.0;
};

struct AssemblyOptions {
  double mixing_c = 0.25;      ///< c in K_c
  double base_N = 2.0;         ///< the N supplied to the mixing-time certificate
  std::optional<double> r;     ///< overrides the balancing r
  numerics::QuadratureSpec quadrature{};
};

struct GibbsBoundReport {
  BoundConstants constants;
  bound::DriftParameters drift;
  bound::MinorizationCertificate minorization;
  bound::DerivedConstants derived;
  minorization::EpsilonBreakdown epsilon_detail;
  DriftOffset drift_detail;
  std::vector<BoundCurvePoint> curve;
  double K_bar = 0.0;
  double N_c = 0.0;
  std::size_t n = 0;

  bound::TailSequence tails() const;
};

/// d = 2.5 b / (1 - lambda_T).
double default_small_set_level(double b, double lambda_T);

/// Computes every constant and the bound curve for k = 1..k_max. When `d` is
/// empty the default level is used.
GibbsBoundReport assemble_gibbs_bound(const Dataset& ds, const ModelConfig& cfg, const LargeSetSpec& spec,
                                      std::optional<double> d, std::int64_t k_max,
                                      const AssemblyOptions& options = {});

/// Bound for a chain started at x0 in the large set of the report:
/// [C1 + f(x0)] gamma^k + C2 k(1+k)/n + C3 k/sqrt(n) + C4 f(x0) k/n.
double extended_bound_general_start(const ChainState& x0, const Dataset& ds, const ModelConfig& cfg, std::int64_t k,
                                    const GibbsBoundReport& report);

/// The same expression for given f(x0) without a state.
double extended_bound_from_drift(double f0, std::int64_t k, std::size_t n, const BoundConstants& c);

}  // namespace lsdrift::model

#endif
