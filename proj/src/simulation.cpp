#include "lsdrift/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsdrift/error.hpp"
#include "lsdrift/parallel.hpp"

namespace lsdrift::sim {

namespace {

constexpr const char* kModule = "simulation";

model::ChainState start_state(const SimulationPlan& plan, const model::ChainState& x0) {
  if (plan.full_kernel) {
    if (!x0.is_full()) throw invalid_argument(kModule, "the full kernel needs a starting state with a theta vector");
    return x0;
  }
  return x0.summary();
}

TraceRecord make_record(std::int64_t step, const model::ChainState& x, const model::Dataset& ds,
                        const model::ModelConfig& cfg, const model::LargeSetSpec& spec) {
  return {step, x.theta_bar, x.A, model::drift_value(x, ds, cfg), spec.contains(x.A)};
}

}  // namespace

void SimulationPlan::validate() const {
  if (n_chains < 1) throw invalid_argument(kModule, "n_chains must be >= 1");
  if (n_steps < 1) throw invalid_argument(kModule, "n_steps must be >= 1");
  if (record_stride < 1) throw invalid_argument(kModule, "record_stride must be >= 1");
  if (!(burn_in < n_steps)) throw invalid_argument(kModule, "burn_in must be < n_steps");
}

EnsembleSummary run_ensemble(const SimulationPlan& plan, const model::Dataset& ds, const model::ModelConfig& cfg,
                             const model::ChainState& x0, const model::LargeSetSpec& spec) {
  plan.validate();
  const std::size_t per_chain = (plan.n_steps - plan.burn_in) / plan.record_stride + 1;
  if (per_chain > plan.max_records / plan.n_chains) {
    throw invalid_argument(kModule, "requested trace exceeds max_records");
  }
  const model::ChainState start = start_state(plan, x0);

  EnsembleSummary out;
  out.n_chains = plan.n_chains;
  out.traces.resize(plan.n_chains);
  parallel_for(plan.n_chains, plan.threads, [&](std::size_t c) {
    numerics::RngStream stream(plan.seed, c);
    model::ChainState x = start;
    std::vector<TraceRecord>& trace = out.traces[c];
    trace.reserve(per_chain);
    if (plan.burn_in == 0) trace.push_back(make_record(0, x, ds, cfg, spec));
    for (std::size_t step = 1; step <= plan.n_steps; ++step) {
      model::gibbs_step_inplace(x, ds, cfg, stream);
      if (step >= plan.burn_in && (step - plan.burn_in) % plan.record_stride == 0) {
        trace.push_back(make_record(static_cast<std::int64_t>(step), x, ds, cfg, spec));
      }
    }
  });
  return out;
}

void run_lockstep(const SimulationPlan& plan, const model::Dataset& ds, const model::ModelConfig& cfg,
                  const model::ChainState& x0,
                  const std::function<void(std::size_t, const std::vector<model::ChainState>&)>& observe) {
  plan.validate();
  std::vector<model::ChainState> states(plan.n_chains, start_state(plan, x0));
  std::vector<numerics::RngStream> streams;
  streams.reserve(plan.n_chains);
  for (std::size_t c = 0; c < plan.n_chains; ++c) streams.emplace_back(plan.seed, c);
  observe(0, states);
  for (std::size_t step = 1; step <= plan.n_steps; ++step) {
    parallel_for(plan.n_chains, plan.threads,
                 [&](std::size_t c) { model::gibbs_step_inplace(states[c], ds, cfg, streams[c]); });
    observe(step, states);
  }
}

void restricted_kernel_step_inplace(model::ChainState& x, const model::Dataset& ds, const model::ModelConfig& cfg,
                                    const model::LargeSetSpec& spec, numerics::RngStream& stream) {
  if (!spec.contains(x.A)) throw invalid_argument(kModule, "restricted kernel called outside the large set");
  // Only the A-update can leave the large set, so the mu and theta updates
  // are never rejected.
  const double previous_A = x.A;
  model::gibbs_step_inplace(x, ds, cfg, stream);
  if (!spec.contains(x.A)) x.A = previous_A;
}

model::ChainState restricted_kernel_step(const model::ChainState& x, const model::Dataset& ds,
                                         const model::ModelConfig& cfg, const model::LargeSetSpec& spec,
                                         numerics::RngStream& stream) {
  model::ChainState next = x;
  restricted_kernel_step_inplace(next, ds, cfg, spec, stream);
  return next;
}

std::vector<TraceRecord> trace_chain_transform(const std::vector<TraceRecord>& records,
                                               const model::LargeSetSpec& spec) {
  std::vector<TraceRecord> out;
  for (const TraceRecord& r : records) {
    if (spec.contains(r.A)) {
      TraceRecord copy = r;
      copy.step = static_cast<std::int64_t>(out.size());
      copy.in_large_set = true;
      out.push_back(copy);
    }
  }
  if (out.empty()) throw numerical_error(kModule, "chain never visits the large set");
  return out;
}

std::vector<Point2> collect_chain(const model::Dataset& ds, const model::ModelConfig& cfg, const model::ChainState& x0,
                                  const model::LargeSetSpec& spec, ChainKind kind, std::size_t n_samples,
                                  std::size_t thin, std::size_t burn_in, numerics::RngStream& stream) {
  if (thin < 1) throw invalid_argument(kModule, "thin must be >= 1");
  model::ChainState x = x0.is_full() ? x0 : x0.summary();
  std::vector<Point2> out;
  out.reserve(n_samples);
  for (std::size_t i = 0; i < burn_in; ++i) {
    if (kind == ChainKind::restricted) {
      restricted_kernel_step_inplace(x, ds, cfg, spec, stream);
    } else {
      model::gibbs_step_inplace(x, ds, cfg, stream);
    }
  }
  std::size_t counted = 0;
  std::size_t guard = 0;
  const std::size_t guard_limit = 1000 * thin * std::max<std::size_t>(n_samples, 1) + 1000000;
  while (out.size() < n_samples) {
    if (kind == ChainKind::restricted) {
      restricted_kernel_step_inplace(x, ds, cfg, spec, stream);
    } else {
      model::gibbs_step_inplace(x, ds, cfg, stream);
    }
    if (++guard > guard_limit) throw numerical_error(kModule, "chain rarely visits the large set");
    if (kind == ChainKind::trace && !spec.contains(x.A)) continue;
    if (counted++ % thin == 0) out.push_back({x.theta_bar, x.A});
  }
  return out;
}

std::size_t BinGrid::size() const { return (a_edges.size() + 1) * (tb_edges.empty() ? 1 : tb_edges.front().size() + 1); }

std::size_t BinGrid::locate(const Point2& p) const {
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(a_edges.begin(), a_edges.end(), p.A) - a_edges.begin());
  const std::vector<double>& inner = tb_edges[i];
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(inner.begin(), inner.end(), p.theta_bar) - inner.begin());
  return i * (inner.size() + 1) + j;
}

BinGrid BinGrid::fit(std::vector<Point2> sample, std::size_t a_bins, std::size_t tb_bins) {
  if (sample.empty()) throw invalid_argument(kModule, "cannot fit bins to an empty sample");
  if (a_bins < 1 || tb_bins < 1) throw invalid_argument(kModule, "bin counts must be >= 1");
  std::sort(sample.begin(), sample.end(), [](const Point2& x, const Point2& y) { return x.A < y.A; });
  const std::size_t N = sample.size();
  BinGrid grid;
  std::vector<std::size_t> cuts{0};
  for (std::size_t i = 1; i < a_bins; ++i) {
    const std::size_t idx = i * N / a_bins;
    grid.a_edges.push_back(sample[idx].A);
    cuts.push_back(idx);
  }
  cuts.push_back(N);
  grid.tb_edges.resize(a_bins);
  std::vector<double> values;
  for (std::size_t i = 0; i < a_bins; ++i) {
    values.clear();
    for (std::size_t s = cuts[i]; s < cuts[i + 1]; ++s) values.push_back(sample[s].theta_bar);
    std::sort(values.begin(), values.end());
    for (std::size_t j = 1; j < tb_bins; ++j) {
      grid.tb_edges[i].push_back(values.empty() ? 0.0 : values[std::min(values.size() - 1, j * values.size() / tb_bins)]);
    }
  }
  return grid;
}

std::vector<double> bin_counts(const std::vector<Point2>& sample, const BinGrid& grid) {
  std::vector<double> counts(grid.size(), 0.0);
  for (const Point2& p : sample) counts[grid.locate(p)] += 1.0;
  return counts;
}

TvEstimate tv_from_counts(const std::vector<double>& a, double n_a, const std::vector<double>& b, double n_b) {
  if (!(n_a > 0.0) || !(n_b > 0.0)) throw invalid_argument(kModule, "empty sample set");
  if (a.size() != b.size()) throw invalid_argument(kModule, "histograms have different sizes");
  double l1 = 0.0, sp = 0.0, sq = 0.0, s2p = 0.0, s2q = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = a[i] / n_a, q = b[i] / n_b;
    const double diff = p - q;
    l1 += std::abs(diff);
    const double s = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    sp += s * p;
    sq += s * q;
    s2p += s * s * p;
    s2q += s * s * q;
  }
  TvEstimate out;
  out.tv = std::min(1.0, 0.5 * l1);
  const double var = 0.25 * (std::max(0.0, s2p - sp * sp) / n_a + std::max(0.0, s2q - sq * sq) / n_b);
  out.se = std::sqrt(var);
  return out;
}

TvEstimate tv_lower_bound_estimate(const std::vector<Point2>& a, const std::vector<Point2>& b, const BinGrid& grid) {
  if (a.empty() || b.empty()) throw invalid_argument(kModule, "empty sample set");
  return tv_from_counts(bin_counts(a, grid), static_cast<double>(a.size()), bin_counts(b, grid),
                        static_cast<double>(b.size()));
}

TvEstimate tv_lower_bound_estimate(const std::vector<Point2>& a, const std::vector<Point2>& b, std::size_t a_bins,
                                   std::size_t tb_bins) {
  if (a.empty() || b.empty()) throw invalid_argument(kModule, "empty sample set");
  std::vector<Point2> pooled;
  pooled.reserve(a.size() + b.size());
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  return tv_lower_bound_estimate(a, b, BinGrid::fit(std::move(pooled), a_bins, tb_bins));
}

ExitFrequencies exit_probability_estimate(const SimulationPlan& plan, const model::Dataset& ds,
                                          const model::ModelConfig& cfg, const model::LargeSetSpec& spec,
                                          const model::ChainState& x0) {
  ExitFrequencies out;
  std::vector<double> per_chain(plan.n_chains, 0.0);
  const double N = static_cast<double>(plan.n_chains);
  run_lockstep(plan, ds, cfg, x0, [&](std::size_t step, const std::vector<model::ChainState>& states) {
    if (step == 0) return;
    double exits = 0.0;
    for (std::size_t c = 0; c < states.size(); ++c) {
      if (!spec.contains(states[c].A)) {
        exits += 1.0;
        per_chain[c] += 1.0;
      }
    }
    const double p = exits / N;
    out.p_hat.push_back(p);
    out.se.push_back(std::sqrt(p * (1.0 - p) / N));
    double sum = 0.0, sum_sq = 0.0;
    for (double v : per_chain) {
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / N;
    const double var = N > 1.0 ? std::max(0.0, (sum_sq - N * mean * mean) / (N - 1.0)) : 0.0;
    out.cumulative.push_back(mean);
    out.cumulative_se.push_back(std::sqrt(var / N));
  });
  return out;
}

double HittingStats::prob_fewer_hits(std::int64_t k, std::int64_t j) const {
  if (pairs == 0) throw invalid_argument(kModule, "no hitting data");
  if (k > static_cast<std::int64_t>(n_steps) + 1) throw invalid_argument(kModule, "k beyond the simulated horizon");
  std::size_t count = 0;
  for (const auto& g : gaps) {
    // N_k < j  <=>  t_j >= k, with t_j = r_1 + ... + r_j - 1; an unobserved
    // t_j exceeds n_steps >= k - 1.
    if (static_cast<std::int64_t>(g.size()) < j) {
      ++count;
      continue;
    }
    const std::int64_t t_j = std::accumulate(g.begin(), g.begin() + j, std::int64_t{0}) - 1;
    if (t_j >= k) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(pairs);
}

double HittingStats::prob_se(std::int64_t k, std::int64_t j) const {
  const double p = prob_fewer_hits(k, j);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(pairs));
}

double HittingStats::censored_fraction(std::int64_t j) const {
  if (pairs == 0) return 0.0;
  std::size_t censored = 0;
  for (const auto& g : gaps) {
    if (static_cast<std::int64_t>(g.size()) < j) ++censored;
  }
  return static_cast<double>(censored) / static_cast<double>(pairs);
}

double HittingStats::markov_bound(double alpha, std::int64_t k, std::int64_t j) const {
  if (!(alpha > 1.0)) throw invalid_argument(kModule, "alpha must exceed 1");
  if (!(k > j)) throw invalid_argument(kModule, "the return-time bound needs k > j");
  long double sum = 0.0L;
  std::size_t used = 0;
  const long double log_alpha = std::log(static_cast<long double>(alpha));
  // A censored pair has r_1 + ... + r_j >= n_steps + 2; using that value
  // understates the expectation, so the bound stays on the tight side.
  const auto censored_total = static_cast<std::int64_t>(n_steps) + 2;
  for (const auto& g : gaps) {
    const std::int64_t total = static_cast<std::int64_t>(g.size()) < j
                                   ? censored_total
                                   : std::accumulate(g.begin(), g.begin() + j, std::int64_t{0});
    sum += std::exp(log_alpha * static_cast<long double>(total));
    ++used;
  }
  if (used == 0) throw numerical_error(kModule, "no hitting data");
  const long double mean = sum / static_cast<long double>(used);
  const long double aj = std::exp(log_alpha * static_cast<long double>(j));
  const long double ak = std::exp(log_alpha * static_cast<long double>(k));
  return static_cast<double>((mean - aj) / (ak - aj));
}

HittingStats hitting_time_stats(const SimulationPlan& plan, std::size_t y_burn_in, const SmallSet& small,
                                const model::Dataset& ds, const model::ModelConfig& cfg,
                                const model::LargeSetSpec& spec, const model::ChainState& x0) {
  plan.validate();
  if (!spec.contains(x0.A)) throw invalid_argument(kModule, "x0 must lie in the large set");
  const model::ChainState start = start_state(plan, x0);
  HittingStats out;
  out.pairs = plan.n_chains;
  out.n_steps = plan.n_steps;
  out.gaps.resize(plan.n_chains);
  std::vector<std::vector<std::int64_t>> hits_per_pair(plan.n_chains);

  parallel_for(plan.n_chains, plan.threads, [&](std::size_t p) {
    numerics::RngStream sx(plan.seed, 2 * p), sy(plan.seed, 2 * p + 1);
    model::ChainState x = start, y = start;
    for (std::size_t i = 0; i < y_burn_in; ++i) restricted_kernel_step_inplace(y, ds, cfg, spec, sy);
    std::vector<std::int64_t>& gaps = out.gaps[p];
    std::int64_t last = -1;
    for (std::size_t m = 0; m <= plan.n_steps; ++m) {
      if (small.contains(model::drift_value(x, ds, cfg)) && small.contains(model::drift_value(y, ds, cfg))) {
        const std::int64_t t = static_cast<std::int64_t>(m);
        gaps.push_back(t - last);  // first gap is t_1 + 1
        last = t;
      }
      if (m == plan.n_steps) break;
      restricted_kernel_step_inplace(x, ds, cfg, spec, sx);
      restricted_kernel_step_inplace(y, ds, cfg, spec, sy);
    }
  });

  out.hits_before_k_total.assign(plan.n_steps + 2, 0);
  for (const auto& g : out.gaps) {
    std::int64_t t = -1;
    for (std::int64_t r : g) {
      t += r;
      // A hit at time t counts towards every N_k with k > t.
      ++out.hits_before_k_total[static_cast<std::size_t>(t) + 1];
    }
  }
  std::partial_sum(out.hits_before_k_total.begin(), out.hits_before_k_total.end(), out.hits_before_k_total.begin());
  return out;
}

ChainMean chain_functional_mean(const model::Dataset& ds, const model::ModelConfig& cfg, model::ChainState x0,
                                const std::function<double(const model::ChainState&)>& g, std::size_t n_steps,
                                std::size_t burn_in, numerics::RngStream& stream, std::size_t batches) {
  if (batches < 2 || n_steps < batches) throw invalid_argument(kModule, "need at least 2 batches and n_steps >= batches");
  for (std::size_t i = 0; i < burn_in; ++i) model::gibbs_step_inplace(x0, ds, cfg, stream);
  const std::size_t per_batch = n_steps / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < per_batch; ++i) {
      model::gibbs_step_inplace(x0, ds, cfg, stream);
      s += g(x0);
    }
    means[b] = s / static_cast<double>(per_batch);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  ChainMean out;
  out.mean = mean;
  out.se = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  return out;
}

}  // namespace lsdrift::sim
