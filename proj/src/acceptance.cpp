#include "lsdrift/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "lsdrift/bound_core.hpp"
#include "lsdrift/error.hpp"
#include "lsdrift/experiments.hpp"
#include "lsdrift/gibbs_bound.hpp"
#include "lsdrift/hier_model.hpp"
#include "lsdrift/minorization.hpp"
#include "lsdrift/parallel.hpp"
#include "lsdrift/simulation.hpp"

namespace lsdrift::acceptance {

namespace {

using experiments::SynthesisSpec;
using model::Dataset;
using model::ModelConfig;

constexpr const char* kModule = "acceptance";

// Stream index blocks: criterion i draws from indices starting at i << 40.
std::uint64_t stream_block(int criterion, std::uint64_t i) { return (static_cast<std::uint64_t>(criterion) << 40) + i; }

std::size_t pick(Scale s, std::size_t full, std::size_t quick) { return s == Scale::full ? full : quick; }

Check le(std::string label, double measured, double threshold) {
  return {std::move(label), measured, threshold, "<=", measured <= threshold};
}
Check lt(std::string label, double measured, double threshold) {
  return {std::move(label), measured, threshold, "<", measured < threshold};
}
Check gt(std::string label, double measured, double threshold) {
  return {std::move(label), measured, threshold, ">", measured > threshold};
}

Dataset fixed_center_data(std::size_t n, double center, const ModelConfig& cfg, std::uint64_t seed) {
  return experiments::synthesize_dataset(SynthesisSpec{n, center, true}, cfg, seed, experiments::streams::kSynthesis + n);
}

CriterionResult started(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

struct Welford {
  double n = 0.0, mean = 0.0, m2 = 0.0;
  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double se() const { return std::sqrt(m2 / (n - 1.0) / n); }
};

}  // namespace

Scale parse_scale(const std::string& s) {
  if (s == "full") return Scale::full;
  if (s == "quick") return Scale::quick;
  throw invalid_argument(kModule, "validation_scale must be 'full' or 'quick'");
}

const char* scale_name(Scale s) { return s == Scale::full ? "full" : "quick"; }

const Check& CriterionResult::headline() const {
  if (checks.empty()) throw invalid_argument(kModule, "criterion has no checks");
  for (const auto& c : checks) {
    if (!c.pass) return c;
  }
  return checks.front();
}

CriterionResult criterion_exact_moments(const SuiteOptions& o) {
  CriterionResult r = started(1, "exact_moment_oracle");
  const ModelConfig cfg;
  const std::size_t n = 100;
  const Dataset ds = fixed_center_data(n, 2.0, cfg, o.seed);
  const std::size_t states = 50;
  const std::size_t samples = pick(o.scale, 1'000'000, 20'000);

  numerics::RngStream picker(o.seed, stream_block(1, 0));
  std::vector<std::pair<double, double>> points(states);
  for (auto& p : points) {
    p.first = ds.y_bar + (picker.uniform() - 0.5);
    p.second = 0.5 + 4.5 * picker.uniform();
  }
  std::vector<double> z(states);
  parallel_for(states, o.threads, [&](std::size_t i) {
    model::ChainState start;
    start.mu = ds.y_bar;
    start.A = points[i].second;
    start.theta.assign(n, points[i].first);
    start.refresh();
    numerics::RngStream stream(o.seed, stream_block(1, i + 1));
    Welford w;
    model::ChainState x = start;
    for (std::size_t s = 0; s < samples; ++s) {
      x = start;
      model::gibbs_step_inplace(x, ds, cfg, stream);
      w.add(model::drift_value(x, ds, cfg));
    }
    const double exact = model::expected_drift(points[i].first, points[i].second, ds, cfg);
    z[i] = std::abs(w.mean - exact) / w.se();
  });
  const double worst = *std::max_element(z.begin(), z.end());
  r.checks.push_back(le("max |MC - exact| / SE over 50 states", worst, 3.0));
  r.detail = std::to_string(samples) + " full-kernel one-step samples per state, n=100, center=2";
  return r;
}

CriterionResult criterion_drift_inequality(const SuiteOptions& o) {
  CriterionResult r = started(2, "drift_inequality");
  const ModelConfig cfg;
  const Dataset ds = fixed_center_data(100, 2.0, cfg, o.seed);
  const model::LargeSetSpec spec = model::default_large_set(ds, cfg);
  const double b = model::drift_offset_b(ds, cfg, spec);
  numerics::RngStream stream(o.seed, stream_block(2, 0));
  const std::size_t states = 10'000;
  std::size_t violations = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < states; ++i) {
    const double tb = ds.y_bar + 10.0 * (stream.uniform() - 0.5);
    const double A = spec.T + (spec.upper() - spec.T) * stream.uniform();
    const double lhs = model::expected_drift(tb, A, ds, cfg);
    const double rhs = model::lambda_factor(A, cfg.V) * model::drift_value(tb, A, ds, cfg) + b;
    worst_margin = std::max(worst_margin, lhs - rhs);
    if (lhs > rhs) ++violations;
  }
  r.checks.push_back(le("violations over 10^4 states in R_T", static_cast<double>(violations), 0.0));
  r.detail = "b = " + fmt(b) + ", largest lhs - rhs = " + fmt(worst_margin);
  return r;
}

CriterionResult criterion_constant_flatness(const SuiteOptions& o) {
  CriterionResult r = started(3, "constant_flatness");
  experiments::ExperimentConfig config;
  config.synthesis = SynthesisSpec{};
  config.seed = o.seed;
  config.threads = o.threads;
  config.n_list = {100, 400, 1600, 6400};
  const auto rows = experiments::sweep_rows(config);
  double b_lo = INFINITY, b_hi = 0, e_lo = INFINITY, e_hi = 0, k_lo = INFINITY, k_hi = 0;
  std::size_t failed = 0;
  for (const auto& row : rows) {
    if (!row.ok) {
      ++failed;
      r.detail += "n=" + std::to_string(row.n) + " " + row.status + "; ";
      continue;
    }
    b_lo = std::min(b_lo, row.constants.b_drift);
    b_hi = std::max(b_hi, row.constants.b_drift);
    e_lo = std::min(e_lo, row.constants.epsilon);
    e_hi = std::max(e_hi, row.constants.epsilon);
    k_lo = std::min(k_lo, row.K_bar);
    k_hi = std::max(k_hi, row.K_bar);
    r.detail += "n=" + std::to_string(row.n) + ": b=" + fmt(row.constants.b_drift) + " eps=" + fmt(row.constants.epsilon) +
                " K_bar=" + fmt(row.K_bar) + "; ";
  }
  r.checks.push_back(le("failed rows", static_cast<double>(failed), 0.0));
  r.checks.push_back(lt("b max/min", b_hi / b_lo, 2.0));
  r.checks.push_back(gt("epsilon min/max", e_lo / e_hi, 0.5));
  r.checks.push_back(lt("K_bar max/min", k_hi / k_lo, 2.0));
  return r;
}

CriterionResult criterion_bound_validity(const SuiteOptions& o) {
  CriterionResult r = started(4, "bound_validity");
  const ModelConfig cfg;
  const std::int64_t k_max = 200;
  const std::size_t chains = pick(o.scale, 100'000, 10'000);
  const std::size_t ref_steps = pick(o.scale, 10'000'000, 1'000'000);
  double worst = -INFINITY;
  for (std::size_t n : {std::size_t{100}, std::size_t{400}}) {
    const Dataset ds = fixed_center_data(n, 2.0, cfg, o.seed);
    const model::LargeSetSpec spec = model::default_large_set(ds, cfg);
    const model::ChainState x0 = model::initial_state(ds, cfg);
    const auto report = model::assemble_gibbs_bound(ds, cfg, spec, std::nullopt, k_max);

    numerics::RngStream ref_stream(o.seed, stream_block(4, n));
    const auto reference =
        sim::collect_chain(ds, cfg, x0, spec, sim::ChainKind::plain, ref_steps, 1, ref_steps / 10, ref_stream);
    const sim::BinGrid grid = sim::BinGrid::fit(reference, 64, 64);
    const auto ref_counts = sim::bin_counts(reference, grid);
    const std::size_t half = reference.size() / 2;
    const auto split = sim::tv_lower_bound_estimate(
        std::vector<sim::Point2>(reference.begin(), reference.begin() + static_cast<std::ptrdiff_t>(half)),
        std::vector<sim::Point2>(reference.begin() + static_cast<std::ptrdiff_t>(half), reference.end()), grid);

    sim::SimulationPlan plan;
    plan.n_chains = chains;
    plan.n_steps = static_cast<std::size_t>(k_max);
    plan.seed = o.seed + n;
    plan.threads = o.threads;
    std::vector<sim::Point2> cross(chains);
    double worst_n = -INFINITY;
    double tv1 = 0.0, tv200 = 0.0;
    sim::run_lockstep(plan, ds, cfg, x0, [&](std::size_t k, const std::vector<model::ChainState>& states) {
      if (k == 0) return;
      for (std::size_t c = 0; c < states.size(); ++c) cross[c] = {states[c].theta_bar, states[c].A};
      const auto tv = sim::tv_from_counts(sim::bin_counts(cross, grid), static_cast<double>(chains), ref_counts,
                                          static_cast<double>(reference.size()));
      const double bound = report.curve[k - 1].clamped_total;
      worst_n = std::max(worst_n, tv.tv - 3.0 * tv.se - bound);
      if (k == 1) tv1 = tv.tv;
      if (k == static_cast<std::size_t>(k_max)) tv200 = tv.tv;
    });
    worst = std::max(worst, worst_n);
    r.detail += "n=" + std::to_string(n) + ": TV(1)=" + fmt(tv1) + " TV(200)=" + fmt(tv200) +
                " bound(200)=" + fmt(report.curve.back().total) + " reference split-half TV=" + fmt(split.tv) + "; ";
  }
  r.checks.push_back(le("max_k (TV - 3 SE - clamped bound)", worst, 0.0));
  return r;
}

CriterionResult criterion_tail_bound(const SuiteOptions& o) {
  CriterionResult r = started(5, "tail_bound");
  const ModelConfig cfg;
  const Dataset ds = fixed_center_data(100, 2.0, cfg, o.seed);
  const model::LargeSetSpec spec = model::default_large_set(ds, cfg);
  const double b = model::drift_offset_b(ds, cfg, spec);
  const model::ChainState x0 = model::initial_state(ds, cfg);

  sim::SimulationPlan plan;
  plan.n_chains = 100'000;
  plan.n_steps = 10;
  plan.seed = o.seed + 5;
  plan.threads = o.threads;
  const auto exits = sim::exit_probability_estimate(plan, ds, cfg, spec, x0);

  numerics::RngStream stream(o.seed, stream_block(5, 0));
  const auto pi_exit = sim::chain_functional_mean(
      ds, cfg, x0, [&](const model::ChainState& x) { return spec.contains(x.A) ? 0.0 : 1.0; },
      pick(o.scale, 10'000'000, 1'000'000), 10'000, stream);

  double worst = -INFINITY;
  for (std::int64_t k = 1; k <= 10; ++k) {
    const double kk = static_cast<double>(k);
    const double emp = kk * pi_exit.mean + exits.cumulative[k - 1];
    const double se = std::hypot(kk * pi_exit.se, exits.cumulative_se[k - 1]);
    const double formula = model::tail_probability_bound(k, ds, cfg, spec, b);
    worst = std::max(worst, emp - formula - 3.0 * se);
    if (k == 10) r.detail = "k=10: empirical " + fmt(emp) + ", formula " + fmt(formula);
  }
  r.checks.push_back(le("max_k (empirical - formula - 3 SE)", worst, 0.0));
  r.detail += ", pi(R_T^c) ~ " + fmt(pi_exit.mean);
  return r;
}

CriterionResult criterion_posterior_functional(const SuiteOptions& o) {
  CriterionResult r = started(6, "posterior_functional");
  const ModelConfig cfg;
  double worst_ratio = 0.0;
  for (std::size_t n : {std::size_t{100}, std::size_t{400}, std::size_t{1600}, std::size_t{6400}}) {
    const Dataset ds = fixed_center_data(n, 2.0, cfg, o.seed);
    const double h = model::expected_inv_A(ds, cfg);
    worst_ratio = std::max(worst_ratio, h * cfg.delta_margin / 2.0);
    r.detail += "h_" + std::to_string(n) + "=" + fmt(h) + "; ";
  }
  r.checks.push_back(le("max_n h_n delta / 2", worst_ratio, 1.0));

  // With center 1 and V = 1 the default margin delta = 1 is tight; 0.5 keeps it strict.
  ModelConfig loose;
  loose.delta_margin = 0.5;
  const Dataset ds1 = fixed_center_data(400, 1.0, loose, o.seed);
  const double c1 = model::drift_center(ds1, loose);
  const double h400 = model::expected_inv_A(ds1, loose);
  r.checks.push_back(lt("|h_400 - 1/c| c (center 1)", std::abs(h400 - 1.0 / c1) * c1, 0.15));

  const Dataset ds50 = fixed_center_data(50, 2.0, cfg, o.seed);
  const double h50 = model::expected_inv_A(ds50, cfg);
  numerics::RngStream stream(o.seed, stream_block(6, 0));
  const auto mc = sim::chain_functional_mean(
      ds50, cfg, model::initial_state(ds50, cfg), [](const model::ChainState& x) { return 1.0 / x.A; },
      pick(o.scale, 1'000'000, 200'000), 1'000, stream);
  r.checks.push_back(le("|quadrature - MC| / SE at n=50", std::abs(h50 - mc.mean) / mc.se, 3.0));
  r.detail += "h_400(c=1)=" + fmt(h400) + ", n=50: quadrature " + fmt(h50) + " MC " + fmt(mc.mean) + " +- " + fmt(mc.se);
  return r;
}

CriterionResult criterion_large_set_chains(const SuiteOptions& o) {
  CriterionResult r = started(7, "large_set_constructions");
  const ModelConfig cfg;
  const Dataset ds = fixed_center_data(20, 2.0, cfg, o.seed);
  const model::LargeSetSpec spec = model::default_large_set(ds, cfg);
  const model::ChainState x0 = model::initial_state(ds, cfg);
  const std::size_t samples = pick(o.scale, 1'000'000, 200'000);
  const std::size_t thin = 5;
  constexpr std::size_t kBins = 16;

  numerics::RngStream s_ref(o.seed, stream_block(7, 0)), s_tr(o.seed, stream_block(7, 1)),
      s_rs(o.seed, stream_block(7, 2));
  const auto plain = sim::collect_chain(ds, cfg, x0, spec, sim::ChainKind::plain, 10 * samples, 1, 10'000, s_ref);
  std::vector<sim::Point2> reference;
  reference.reserve(plain.size());
  for (const auto& p : plain) {
    if (spec.contains(p.A)) reference.push_back(p);
  }
  const auto trace = sim::collect_chain(ds, cfg, x0, spec, sim::ChainKind::trace, samples, thin, 10'000, s_tr);
  const auto restricted = sim::collect_chain(ds, cfg, x0, spec, sim::ChainKind::restricted, samples, thin, 10'000, s_rs);
  const auto grid = sim::BinGrid::fit(reference, kBins, kBins);
  const auto tv_trace = sim::tv_lower_bound_estimate(trace, reference, grid);
  const auto tv_restricted = sim::tv_lower_bound_estimate(restricted, reference, grid);
  r.checks.push_back(lt("TV(trace chain, restricted reference)", tv_trace.tv, 0.05));
  r.checks.push_back(lt("TV(restricted chain, restricted reference)", tv_restricted.tv, 0.05));

  sim::SimulationPlan plan;
  plan.n_chains = pick(o.scale, 20'000, 2'000);
  plan.n_steps = 100;
  plan.seed = o.seed + 7;
  plan.threads = o.threads;
  const sim::SmallSet small{4.0};
  const auto hits = sim::hitting_time_stats(plan, 200, small, ds, cfg, spec, x0);
  double worst = -INFINITY;
  for (double alpha : {1.02, 1.05, 1.1}) {
    for (std::int64_t j = 1; j <= 5; ++j) {
      for (std::int64_t k : {5, 10, 20, 50}) {
        if (k <= j) continue;
        const double p = hits.prob_fewer_hits(k, j);
        worst = std::max(worst, p - hits.markov_bound(alpha, k, j) - 3.0 * hits.prob_se(k, j));
      }
    }
  }
  r.checks.push_back(le("max (Pr(N_k<j) - return-time bound - 3 SE)", worst, 0.0));
  r.detail = "n=20, " + std::to_string(kBins) + "x" + std::to_string(kBins) + " bins, " + std::to_string(reference.size()) +
             " reference states; small set f <= 4, " + std::to_string(plan.n_chains) + " pairs, Pr(N_50<5)=" +
             fmt(hits.prob_fewer_hits(50, 5)) + ", censored fraction at j=5: " + fmt(hits.censored_fraction(5));
  return r;
}

CriterionResult criterion_algebraic_identities(const SuiteOptions& o) {
  CriterionResult r = started(8, "algebraic_identities");
  numerics::RngStream stream(o.seed, stream_block(8, 0));
  double worst_rel = 0.0;
  std::size_t mismatches = 0;
  std::size_t tested = 0;
  while (tested < 100) {
    bound::DriftParameters p;
    p.lambda = 0.05 + 0.9 * stream.uniform();
    p.b_drift = 0.1 + 10.0 * stream.uniform();
    p.d_small = 2.0 * p.b_drift / (1.0 - p.lambda) * (1.05 + 4.0 * stream.uniform());
    p.initial_drift_expectation = 20.0 * stream.uniform();
    const double eps = 0.01 + 0.98 * stream.uniform();
    const double q = 0.05 + 0.95 * stream.uniform();
    const bound::MinorizationCertificate m{eps, q};
    bound::DerivedConstants dc;
    try {
      dc = bound::derive_constants(p, m);
    } catch (const Error&) {
      continue;
    }
    const long double lhs = std::exp(static_cast<long double>(dc.r) * std::log1p(-static_cast<long double>(eps * q)));
    const long double rhs = std::exp(static_cast<long double>(dc.r) * std::log(static_cast<long double>(dc.alpha) * dc.Lambda) -
                                     std::log(static_cast<long double>(dc.alpha)));
    worst_rel = std::max(worst_rel, static_cast<double>(std::abs(lhs - rhs) / lhs));
    worst_rel = std::max(worst_rel, std::abs(dc.gamma - static_cast<double>(lhs)) / static_cast<double>(lhs));

    const std::int64_t k = 1 + static_cast<std::int64_t>(stream.uniform() * 500.0);
    const bound::MinorizationCertificate whole{eps, 1.0};
    const double direct = bound::evaluate_bound(p, whole, bound::derive_constants(p, whole), bound::TailSequence::zero(), k);
    if (direct != bound::classic_bound(p, eps, k)) ++mismatches;
    ++tested;
  }
  r.checks.push_back(le("max relative gap in gamma identity", worst_rel, 1e-12));
  r.checks.push_back(le("classic/evaluate mismatches over 100 sets", static_cast<double>(mismatches), 0.0));
  return r;
}

CriterionResult criterion_minorization_honesty(const SuiteOptions& o) {
  CriterionResult r = started(9, "minorization_honesty");
  const ModelConfig cfg;
  struct Case {
    std::size_t n;
    std::optional<double> d;
    minorization::OverlapProposal proposal;
  };
  const std::vector<Case> cases{{20, 0.5, minorization::OverlapProposal::direct},
                                {100, 1.0, minorization::OverlapProposal::direct},
                                {400, 4.0, minorization::OverlapProposal::direct},
                                {100, std::nullopt, minorization::OverlapProposal::bridge},
                                {400, std::nullopt, minorization::OverlapProposal::bridge}};
  const std::size_t samples = pick(o.scale, 200'000, 20'000);
  double worst = -INFINITY;
  double smallest_eps = INFINITY;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& c = cases[i];
    const Dataset ds = fixed_center_data(c.n, 2.0, cfg, o.seed);
    const model::LargeSetSpec spec = model::default_large_set(ds, cfg);
    double d = 0.0;
    if (c.d) {
      d = *c.d;
    } else {
      d = model::default_small_set_level(model::drift_offset_b(ds, cfg, spec), model::lambda_T(spec, cfg.V));
    }
    const auto box = minorization::SmallSetBox::from_level(ds, cfg, d);
    const double eps = minorization::epsilon_lower_bound(box, ds, cfg);
    numerics::RngStream stream(o.seed, stream_block(9, i));
    const auto mc = minorization::overlap_oracle_mc(box, ds, cfg, stream, samples, c.proposal);
    worst = std::max(worst, (eps - mc.overlap - 3.0 * mc.se) / std::max(mc.overlap, 1e-300));
    smallest_eps = std::min(smallest_eps, eps);
    r.detail += "n=" + std::to_string(c.n) + " d=" + fmt(d) + ": eps=" + fmt(eps) + " overlap=" + fmt(mc.overlap) + "+-" +
                fmt(mc.se) + "; ";
  }
  r.checks.push_back(le("max (eps - overlap - 3 SE)/overlap", worst, 0.0));
  r.checks.push_back(gt("min epsilon", smallest_eps, 0.0));
  return r;
}

CriterionResult criterion_reproducibility(const SuiteOptions& o) {
  CriterionResult r = started(10, "reproducibility");
  experiments::ExperimentConfig base;
  base.synthesis = SynthesisSpec{};
  base.seed = o.seed;
  base.k_max = 200;
  base.n_list = o.scale == Scale::full ? std::vector<std::size_t>{100, 400, 1600, 6400} : std::vector<std::size_t>{100, 400};
  std::vector<std::string> curve, sweep;
  const std::vector<std::pair<std::string, unsigned>> runs{{"run_a", 1}, {"run_b", 1}, {"run_8", 8}};
  for (const auto& [name, threads] : runs) {
    experiments::ExperimentConfig c = base;
    c.threads = threads;
    c.out_dir = (o.work_dir / "reproducibility" / name).string();
    curve.push_back(experiments::sha256_file(experiments::cmd_bound_curve(c)));
    sweep.push_back(experiments::sha256_file(experiments::cmd_sweep_n(c)));
  }
  auto distinct = [](const std::vector<std::string>& v) {
    return static_cast<double>(std::count_if(v.begin() + 1, v.end(), [&](const std::string& s) { return s != v[0]; }));
  };
  r.checks.push_back(le("bound-curve digests differing from the first run", distinct(curve), 0.0));
  r.checks.push_back(le("sweep-n digests differing from the first run", distinct(sweep), 0.0));
  r.detail = "bound-curve sha256 " + curve[0].substr(0, 16) + ", sweep-n sha256 " + sweep[0].substr(0, 16);
  return r;
}

std::vector<CriterionResult> run_suite(const SuiteOptions& o, const std::vector<int>& only) {
  using Fn = CriterionResult (*)(const SuiteOptions&);
  const std::vector<std::pair<Fn, const char*>> all{
      {criterion_exact_moments, "exact_moment_oracle"},
      {criterion_drift_inequality, "drift_inequality"},
      {criterion_constant_flatness, "constant_flatness"},
      {criterion_bound_validity, "bound_validity"},
      {criterion_tail_bound, "tail_bound"},
      {criterion_posterior_functional, "posterior_functional"},
      {criterion_large_set_chains, "large_set_constructions"},
      {criterion_algebraic_identities, "algebraic_identities"},
      {criterion_minorization_honesty, "minorization_honesty"},
      {criterion_reproducibility, "reproducibility"}};
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = all[i].first(o);
      res.pass = std::all_of(res.checks.begin(), res.checks.end(), [](const Check& c) { return c.pass; });
    } catch (const std::exception& e) {
      res = started(id, all[i].second);
      res.checks.push_back({"completed without error", 0.0, 1.0, "==", false});
      res.detail = std::string("error: ") + e.what();
      res.pass = false;
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(res));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::string line = std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name + ":";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const Check& c = r.checks[i];
    line += (i == 0 ? " " : "; ") + c.label + " = " + fmt(c.measured) + " (need " + c.relation + " " + fmt(c.threshold) +
            (c.pass ? ")" : ", FAILED)");
  }
  char t[32];
  std::snprintf(t, sizeof t, " [%.1f s]", r.seconds);
  return line + t;
}

nlohmann::json to_json(const std::vector<CriterionResult>& results, const SuiteOptions& o) {
  nlohmann::json entries = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"label", c.label}, {"measured", c.measured}, {"threshold", c.threshold},
                        {"relation", c.relation}, {"pass", c.pass}});
    }
    const Check& h = r.headline();
    entries.push_back({{"id", r.id},
                       {"name", r.name},
                       {"measured", h.measured},
                       {"threshold", h.threshold},
                       {"pass", r.pass},
                       {"checks", checks},
                       {"detail", r.detail},
                       {"seconds", r.seconds}});
  }
  return {{"scale", scale_name(o.scale)}, {"seed", o.seed}, {"all_pass", all}, {"criteria", entries}};
}

}  // namespace lsdrift::acceptance
