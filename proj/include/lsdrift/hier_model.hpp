#ifndef LSDRIFT_HIER_MODEL_HPP
#define LSDRIFT_HIER_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lsdrift/bound_core.hpp"
#include "lsdrift/numerics.hpp"

/**
 * \file
 * \brief Hierarchical Normal model Y_i ~ N(theta_i, V), theta_i ~ N(mu, A),
 * flat prior on mu, A ~ IG(a, b): data, Gibbs kernel, drift function and the
 * constants of the convergence bound.
 */

namespace lsdrift::model {

struct Dataset {
  std::vector<double> y;
  std::size_t n = 0;
  double y_bar = 0.0;
  double delta = 0.0;  ///< sum of squared deviations from y_bar

  /// delta / (n - 1)
  double spread() const { return delta / static_cast<double>(n - 1); }
};

/// Computes y_bar and delta with compensated summation. Throws if n < 2 or a
/// value is not finite.
Dataset sufficient_stats(std::vector<double> y);

/// Builds a dataset directly from its sufficient statistics. The kernel and all
/// constants depend on the data only through (n, y_bar, delta); `y` is left empty.
Dataset dataset_from_stats(std::size_t n, double y_bar, double delta);

struct ModelConfig {
  double V = 1.0;
  double prior_shape_a = 2.0;
  double prior_scale_b = 1.0;
  double delta_margin = 1.0;

  void validate() const;
};

/// True iff delta/(n-1) >= V + delta_margin.
bool check_data_assumption(const Dataset& ds, const ModelConfig& cfg);

/// delta/(n-1) - V, the A-coordinate at which the drift function vanishes.
double drift_center(const Dataset& ds, const ModelConfig& cfg);

/// One state of the Gibbs chain.
///
/// A full state carries the theta vector. A summary state leaves `theta`
/// empty and carries only (theta_bar, S): the kernel depends on the state only
/// through (theta_bar, A), and the summary kernel reproduces the exact law of
/// (mu, theta_bar, S, A) after each step.
struct ChainState {
  double mu = 0.0;
  double A = 1.0;
  std::vector<double> theta;
  double theta_bar = 0.0;
  double S = 0.0;

  bool is_full() const { return !theta.empty(); }
  /// Recomputes theta_bar and S from theta.
  void refresh();
  /// Drops theta, keeping the cached summaries.
  ChainState summary() const;
};

ChainState make_summary_state(double mu, double A, double theta_bar, double S);

/// theta_i = y_bar for all i, A = delta/(n-1) - V when positive (otherwise
/// delta/(n-1)), mu = 0.
ChainState initial_state(const Dataset& ds, const ModelConfig& cfg);

/// f = n (theta_bar - y_bar)^2 + n (center - A)^2.
double drift_value(double theta_bar, double A, const Dataset& ds, const ModelConfig& cfg);
double drift_value(const ChainState& x, const Dataset& ds, const ModelConfig& cfg);

/// ((V^2 + 2VA) / (V + A)^2)^2.
double lambda_factor(double A, double V);

struct LargeSetSpec {
  double T = 0.0;
  double center = 0.0;

  void validate() const;
  double upper() const { return 2.0 * center - T; }
  bool contains(double A) const {
    const double gap = center - A;
    const double edge = center - T;
    return gap * gap <= edge * edge;
  }
};

/// T = min(delta_margin, center/2).
LargeSetSpec default_large_set(const Dataset& ds, const ModelConfig& cfg);
LargeSetSpec large_set_with_threshold(const Dataset& ds, const ModelConfig& cfg, double T);

double lambda_T(const LargeSetSpec& spec, double V);

bool in_large_set(const ChainState& x, const LargeSetSpec& spec);

/// One systematic-scan Gibbs sweep: mu, then theta, then A. Full states are
/// updated coordinate by coordinate; summary states through the exact law of
/// (theta_bar, S).
ChainState gibbs_step(const ChainState& x, const Dataset& ds, const ModelConfig& cfg, numerics::RngStream& stream);
void gibbs_step_inplace(ChainState& x, const Dataset& ds, const ModelConfig& cfg, numerics::RngStream& stream);

struct SMoments {
  double mean = 0.0;
  double variance = 0.0;
  double second_moment = 0.0;
};

/// Moments of S' = sum (theta'_i - theta_bar')^2 / (n-1) given A.
SMoments conditional_S_moments(double A, const Dataset& ds, const ModelConfig& cfg);

/// Exact one-step E[f(X1) | X0] for a state with the given (theta_bar, A).
double expected_drift(double theta_bar, double A, const Dataset& ds, const ModelConfig& cfg);

/// The A-part alone: E[n (center - A')^2 | A].
double expected_drift_A_part(double A, const Dataset& ds, const ModelConfig& cfg);

struct DriftOffset {
  double b = 0.0;            ///< inflated supremum
  double raw_supremum = 0.0;
  double argmax_A = 0.0;
  double max_theta_gap = 0.0;  ///< largest theta_bar-coefficient gap seen on the guard grid (must be <= 0)
};

inline constexpr double kDriftSafetyFactor = 1.01;

/// b = 1.01 * sup over R_T of [expected_drift - lambda_factor(A) f]. The
/// supremum over theta_bar is attained at y_bar because the theta_bar
/// coefficient gap is non-positive; this is checked on a grid.
DriftOffset drift_offset(const Dataset& ds, const ModelConfig& cfg, const LargeSetSpec& spec);
double drift_offset_b(const Dataset& ds, const ModelConfig& cfg, const LargeSetSpec& spec);

struct TailCoefficients {
  double C2 = 0.0;  ///< coefficient of k(1+k)/n
  double C3 = 0.0;  ///< coefficient of k/sqrt(n)
  double pi_exit = 0.0;
};

TailCoefficients tail_coefficients(const Dataset& ds, const ModelConfig& cfg, const LargeSetSpec& spec, double b);

/// (k/sqrt n) sqrt(b) (2V/delta + 1)/|center - T| + (k(1+k)/(2n)) b/(center - T)^2.
double tail_probability_bound(std::int64_t k, const Dataset& ds, const ModelConfig& cfg, const LargeSetSpec& spec,
                              double b);

/// Posterior mean of 1/A, by half-line quadrature of the marginal posterior of A.
double expected_inv_A(const Dataset& ds, const ModelConfig& cfg, const numerics::QuadratureSpec& q = {});

}  // namespace lsdrift::model

#endif
