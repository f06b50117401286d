#ifndef LSDRIFT_MINORIZATION_HPP
#define LSDRIFT_MINORIZATION_HPP

#include <array>
#include <cstdint>

#include "lsdrift/hier_model.hpp"
#include "lsdrift/numerics.hpp"

/**
 * \file
 * \brief Minorization volume of the Gibbs kernel over the small set and an
 * independent Monte Carlo overlap oracle.
 */

namespace lsdrift::minorization {

/// Box enclosing the small set {f <= d}: |theta_bar - y_bar| <= sqrt(d/n) and
/// |A - center| <= sqrt(d/n).
struct SmallSetBox {
  double theta_bar_halfwidth = 0.0;
  double A_halfwidth = 0.0;
  double A_center = 0.0;
  double theta_bar_center = 0.0;

  void validate() const;
  double A_lo() const { return A_center - A_halfwidth; }
  double A_hi() const { return A_center + A_halfwidth; }

  static SmallSetBox from_level(const model::Dataset& ds, const model::ModelConfig& cfg, double d);
};

struct EpsilonBreakdown {
  double epsilon = 0.0;   ///< product of the two factors after subtracting quadrature error
  double s_factor = 0.0;  ///< integral over S of the infimum density
  double s_factor_error = 0.0;
  double mu_factor = 0.0;  ///< integral over mu of g(mu) times the infimum mu density
  double mu_factor_error = 0.0;
  double truncation_mass = 0.0;  ///< bound on the mass omitted by truncating the mu range (only lowers epsilon)
  /// The S density is the scaled chi-square with the cross term between the
  /// data and the noise dropped; the overlap oracle guards this step.
  bool cross_term_dropped = true;
  /// Upper bound on eps Q(R_T^c)/eps computed from the A'-step probability of
  /// leaving R_T; only filled when a large set is supplied.
  double q_exit_fraction = 1.0;
};

/// Lower bound on the minorization volume over the box.
EpsilonBreakdown epsilon_breakdown(const SmallSetBox& box, const model::Dataset& ds, const model::ModelConfig& cfg,
                                   const numerics::QuadratureSpec& q = {},
                                   const model::LargeSetSpec* large_set = nullptr);

double epsilon_lower_bound(const SmallSetBox& box, const model::Dataset& ds, const model::ModelConfig& cfg,
                           const numerics::QuadratureSpec& q = {});

/// max(0, 1 - exit_prob_upper / epsilon).
double q_mass_lower_bound(double epsilon, double exit_prob_upper);

/// Smallest Markov bound E[(center - A')^2 | A]/(center - T)^2 over A in the
/// box, capped at 1. Any state of the small set gives a valid bound on
/// eps Q(R_T^c), so the smallest is used.
double exit_probability_upper(const SmallSetBox& box, const model::Dataset& ds, const model::ModelConfig& cfg,
                              const model::LargeSetSpec& spec);

/// A corner state of the box in (theta_bar, A) coordinates.
struct KernelSource {
  double theta_bar = 0.0;
  double A = 1.0;
};

/// The four corners followed by the center.
std::array<KernelSource, 5> box_corners(const SmallSetBox& box);

/// One-step kernel draw in the sufficient coordinates (mu', theta_bar', C', Q)
/// with C' = sum (theta'_i - theta_bar')(Y_i - y_bar) and Q = (n-1) S' - C'^2/delta.
/// The A' factor is common to every source and cancels from density ratios.
struct KernelPoint {
  double mu = 0.0;
  double theta_bar = 0.0;
  double C = 0.0;
  double Q = 0.0;
};

KernelPoint draw_kernel_point(const KernelSource& x, const model::Dataset& ds, const model::ModelConfig& cfg,
                              numerics::RngStream& stream);

double log_kernel_density(const KernelSource& x, const KernelPoint& y, const model::Dataset& ds,
                          const model::ModelConfig& cfg);

enum class OverlapProposal {
  direct,  ///< draw from p_j, average min(1, p_j'/p_j)
  bridge,  ///< draw from the normalised geometric mean of p_j and p_j', average min(p_j, p_j')/q
};

struct OverlapEstimate {
  double overlap = 0.0;
  double se = 0.0;
  std::size_t first = 0;
  std::size_t second = 0;
};

OverlapEstimate pair_overlap(const KernelSource& a, const KernelSource& b, const model::Dataset& ds,
                             const model::ModelConfig& cfg, numerics::RngStream& stream, std::size_t n_samples,
                             OverlapProposal proposal = OverlapProposal::direct);

/// Smallest pairwise overlap among the box corners and center.
OverlapEstimate overlap_oracle_mc(const SmallSetBox& box, const model::Dataset& ds, const model::ModelConfig& cfg,
                                  numerics::RngStream& stream, std::size_t n_samples,
                                  OverlapProposal proposal = OverlapProposal::direct);

struct EpsilonReport {
  double epsilon_quadrature = 0.0;
  double epsilon_mc_overlap = 0.0;
  double mc_standard_error = 0.0;
  bool cross_term_dropped = true;

  bool lower_bound_holds() const { return epsilon_quadrature <= epsilon_mc_overlap + 3.0 * mc_standard_error; }
};

}  // namespace lsdrift::minorization

#endif
