#ifndef LSDRIFT_SIMULATION_HPP
#define LSDRIFT_SIMULATION_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "lsdrift/hier_model.hpp"
#include "lsdrift/numerics.hpp"

/**
 * \file
 * \brief Chain ensembles, restricted and trace chains, binned total variation
 * estimates, exit frequencies and return-time statistics.
 */

namespace lsdrift::sim {

struct SimulationPlan {
  std::size_t n_chains = 1;
  std::size_t n_steps = 1;
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  std::size_t record_stride = 1;
  unsigned threads = 0;     ///< 0 uses every hardware thread
  bool full_kernel = false;  ///< update the whole theta vector instead of (theta_bar, S)
  std::size_t max_records = 50'000'000;

  void validate() const;
};

struct TraceRecord {
  std::int64_t step = 0;
  double theta_bar = 0.0;
  double A = 0.0;
  double f = 0.0;
  bool in_large_set = false;
};

struct EnsembleSummary {
  std::size_t n_chains = 0;
  /// traces[c] holds the records of chain c, at steps 0, stride, 2 stride, ...
  /// up to n_steps (step 0 is the starting state).
  std::vector<std::vector<TraceRecord>> traces;
};

/// Runs independent chains from x0; chain c uses RngStream(seed, c). Steps
/// before burn_in are not recorded.
EnsembleSummary run_ensemble(const SimulationPlan& plan, const model::Dataset& ds, const model::ModelConfig& cfg,
                             const model::ChainState& x0, const model::LargeSetSpec& spec);

/// Advances n_chains chains in lock step and hands the whole cross-section to
/// `observe(step, states)` after each step (and once for step 0). Results do
/// not depend on the thread count.
void run_lockstep(const SimulationPlan& plan, const model::Dataset& ds, const model::ModelConfig& cfg,
                  const model::ChainState& x0,
                  const std::function<void(std::size_t, const std::vector<model::ChainState>&)>& observe);

/// Same draw order as gibbs_step; an A' outside the large set is rejected and
/// the previous A kept.
model::ChainState restricted_kernel_step(const model::ChainState& x, const model::Dataset& ds,
                                         const model::ModelConfig& cfg, const model::LargeSetSpec& spec,
                                         numerics::RngStream& stream);
void restricted_kernel_step_inplace(model::ChainState& x, const model::Dataset& ds, const model::ModelConfig& cfg,
                                    const model::LargeSetSpec& spec, numerics::RngStream& stream);

/// Keeps the records inside the large set and renumbers their steps 0, 1, ...
std::vector<TraceRecord> trace_chain_transform(const std::vector<TraceRecord>& records,
                                               const model::LargeSetSpec& spec);

struct Point2 {
  double theta_bar = 0.0;
  double A = 0.0;
};

/// Collects `n_samples` states of a single chain, keeping every `thin`-th
/// state after `burn_in` steps. With `spec`, only states inside the large set
/// count (the trace chain); with `restricted`, the restricted kernel is used.
enum class ChainKind { plain, trace, restricted };
std::vector<Point2> collect_chain(const model::Dataset& ds, const model::ModelConfig& cfg, const model::ChainState& x0,
                                  const model::LargeSetSpec& spec, ChainKind kind, std::size_t n_samples,
                                  std::size_t thin, std::size_t burn_in, numerics::RngStream& stream);

/// Equal-mass bins: quantile bins in A, then quantile bins in theta_bar inside
/// each A bin.
struct BinGrid {
  std::vector<double> a_edges;                  ///< interior edges in A
  std::vector<std::vector<double>> tb_edges;    ///< interior edges in theta_bar per A bin

  std::size_t size() const;
  std::size_t locate(const Point2& p) const;
  static BinGrid fit(std::vector<Point2> sample, std::size_t a_bins, std::size_t tb_bins);
};

struct TvEstimate {
  double tv = 0.0;
  double se = 0.0;
};

/// Half L1 distance between the binned empirical measures, with a
/// delta-method standard error that treats both samples as independent draws.
TvEstimate tv_lower_bound_estimate(const std::vector<Point2>& a, const std::vector<Point2>& b, const BinGrid& grid);

/// Fits the grid on the pooled sample.
TvEstimate tv_lower_bound_estimate(const std::vector<Point2>& a, const std::vector<Point2>& b, std::size_t a_bins = 64,
                                   std::size_t tb_bins = 64);

/// Counts per bin for repeated comparisons against one reference histogram.
std::vector<double> bin_counts(const std::vector<Point2>& sample, const BinGrid& grid);
TvEstimate tv_from_counts(const std::vector<double>& a, double n_a, const std::vector<double>& b, double n_b);

struct ExitFrequencies {
  std::vector<double> p_hat;  ///< p_hat[i-1] estimates P^i(x0, R^c), i = 1..n_steps
  std::vector<double> se;
  /// cumulative[k-1] = sum_{i<=k} p_hat[i-1], with its standard error from the
  /// per-chain exit counts.
  std::vector<double> cumulative;
  std::vector<double> cumulative_se;
};

ExitFrequencies exit_probability_estimate(const SimulationPlan& plan, const model::Dataset& ds,
                                          const model::ModelConfig& cfg, const model::LargeSetSpec& spec,
                                          const model::ChainState& x0);

struct HittingStats {
  std::vector<std::vector<std::int64_t>> gaps;  ///< per pair: r_1 = t_1 + 1, r_i = t_i - t_{i-1}
  std::vector<std::int64_t> hits_before_k_total;  ///< summed over pairs, N_k for k = 0..n_steps
  std::size_t pairs = 0;
  std::size_t n_steps = 0;

  /// Empirical Pr(N_k < j).
  double prob_fewer_hits(std::int64_t k, std::int64_t j) const;
  /// Fraction of pairs whose j-th hit was not observed.
  double censored_fraction(std::int64_t j) const;
  /// (E alpha^{r_1+...+r_j} - alpha^j)/(alpha^k - alpha^j); a censored pair enters
  /// with its smallest possible sum n_steps + 2.
  double markov_bound(double alpha, std::int64_t k, std::int64_t j) const;
  /// Standard error of prob_fewer_hits.
  double prob_se(std::int64_t k, std::int64_t j) const;
};

struct SmallSet {
  double d = 0.0;
  bool contains(double f) const { return f <= d; }
};

/// Independent pairs of restricted chains: X starts at x0, Y at x0 after
/// `y_burn_in` restricted steps (an approximate draw from pi restricted to the
/// large set). Records joint visits to R x R for steps 0..n_steps.
HittingStats hitting_time_stats(const SimulationPlan& plan, std::size_t y_burn_in, const SmallSet& small,
                                const model::Dataset& ds, const model::ModelConfig& cfg,
                                const model::LargeSetSpec& spec, const model::ChainState& x0);

/// Mean and batch-means standard error of g over a single chain.
struct ChainMean {
  double mean = 0.0;
  double se = 0.0;
};
ChainMean chain_functional_mean(const model::Dataset& ds, const model::ModelConfig& cfg, model::ChainState x0,
                                const std::function<double(const model::ChainState&)>& g, std::size_t n_steps,
                                std::size_t burn_in, numerics::RngStream& stream, std::size_t batches = 100);

}  // namespace lsdrift::sim

#endif
