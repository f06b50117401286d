#include "lsdrift/gibbs_bound.hpp"

#include <algorithm>
#include <cmath>

#include "lsdrift/error.hpp"

namespace lsdrift::model {

namespace {
constexpr const char* kModule = "hier_model";
}

bound::TailSequence GibbsBoundReport::tails() const {
  bound::TailSequence t;
  t.pi_exit_bound = constants.C3 / std::sqrt(static_cast<double>(n));
  const double c2 = constants.C2;
  const double nn = static_cast<double>(n);
  t.cumulative_exit_bound = [c2, nn](std::int64_t k) {
    const double kk = static_cast<double>(k);
    return c2 * kk * (1.0 + kk) / nn;
  };
  return t;
}

double default_small_set_level(double b, double lambda_T) { return 2.5 * b / (1.0 - lambda_T); }

GibbsBoundReport assemble_gibbs_bound(const Dataset& ds, const ModelConfig& cfg, const LargeSetSpec& spec,
                                      std::optional<double> d, std::int64_t k_max, const AssemblyOptions& options) {
  cfg.validate();
  spec.validate();
  if (!check_data_assumption(ds, cfg)) throw invalid_argument(kModule, "data assumption delta/(n-1) >= V + delta fails");
  if (k_max < 1) throw invalid_argument(kModule, "k_max must be >= 1");

  GibbsBoundReport report;
  report.n = ds.n;
  BoundConstants& c = report.constants;
  c.T = spec.T;
  c.center = spec.center;
  c.lambda_T = lambda_T(spec, cfg.V);

  report.drift_detail = drift_offset(ds, cfg, spec);
  c.b_drift = report.drift_detail.b;
  c.d = d ? *d : default_small_set_level(c.b_drift, c.lambda_T);

  const ChainState x0 = initial_state(ds, cfg);
  c.initial_drift = drift_value(x0, ds, cfg);

  report.drift = bound::DriftParameters{c.lambda_T, c.b_drift, c.d, c.initial_drift};
  report.drift.validate();

  const auto box = minorization::SmallSetBox::from_level(ds, cfg, c.d);
  report.epsilon_detail = minorization::epsilon_breakdown(box, ds, cfg, options.quadrature, &spec);
  c.epsilon = report.epsilon_detail.epsilon;
  c.exit_prob_upper = minorization::exit_probability_upper(box, ds, cfg, spec);
  c.q_mass_remark = minorization::q_mass_lower_bound(c.epsilon, c.exit_prob_upper);
  c.q_mass_direct = std::max(0.0, 1.0 - report.epsilon_detail.q_exit_fraction);
  c.q_mass = std::max(c.q_mass_remark, c.q_mass_direct);

  report.minorization = bound::MinorizationCertificate{c.epsilon, c.q_mass};
  report.derived = bound::derive_constants(report.drift, report.minorization, options.r);
  c.alpha = report.derived.alpha;
  c.Lambda = report.derived.Lambda;
  c.r = report.derived.r;
  c.gamma = report.derived.gamma;
  c.log_gamma = report.derived.log_gamma;

  const TailCoefficients tc = tail_coefficients(ds, cfg, spec, c.b_drift);
  c.C1 = 2.0 + c.b_drift / (1.0 - c.lambda_T);
  c.C2 = tc.C2;
  c.C3 = tc.C3;
  // Markov inequality with E f(x_i) <= f(x0) + i b keeps a k f(x0)/(n (center-T)^2) term.
  const double edge = spec.center - spec.T;
  c.C4 = 1.0 / (edge * edge);

  const bound::TailSequence tails = report.tails();
  report.curve.reserve(static_cast<std::size_t>(k_max));
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const bound::BoundTerms t = bound::evaluate_bound_terms(report.drift, report.minorization, report.derived, tails, k);
    report.curve.push_back({k, t.coupling, t.drift, t.tail, t.total, std::clamp(t.total, 0.0, 1.0)});
  }

  const bound::MixingCertificate mc =
      bound::mixing_time_certificate_log(c.C1, c.C2, c.C3, c.log_gamma, options.mixing_c, options.base_N);
  report.K_bar = mc.K_bar;
  report.N_c = mc.N_c;
  return report;
}

double extended_bound_from_drift(double f0, std::int64_t k, std::size_t n, const BoundConstants& c) {
  if (!(f0 >= 0.0)) throw invalid_argument(kModule, "f(x0) must be >= 0");
  if (k < 0) throw invalid_argument(kModule, "k must be >= 0");
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  return (c.C1 + f0) * std::exp(kk * c.log_gamma) + c.C2 * kk * (1.0 + kk) / nn + c.C3 * kk / std::sqrt(nn) +
         c.C4 * f0 * kk / nn;
}

double extended_bound_general_start(const ChainState& x0, const Dataset& ds, const ModelConfig& cfg, std::int64_t k,
                                    const GibbsBoundReport& report) {
  const LargeSetSpec spec{report.constants.T, report.constants.center};
  if (!in_large_set(x0, spec)) throw invalid_argument(kModule, "no bound available outside the large set");
  return extended_bound_from_drift(drift_value(x0, ds, cfg), k, ds.n, report.constants);
}

}  // namespace lsdrift::model
