#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lsdrift/error.hpp"
#include "lsdrift/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kValidation = 3 };

struct Overrides {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::int64_t k_max = 0;
  unsigned threads = 0;
  std::string scale;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

lsdrift::experiments::ExperimentConfig resolve(const Overrides& o) {
  using lsdrift::experiments::ExperimentConfig;
  ExperimentConfig c;
  if (!o.config.empty()) {
    c = ExperimentConfig::load(o.config);
  } else {
    c.synthesis = lsdrift::experiments::SynthesisSpec{};
  }
  if (!o.out.empty()) c.out_dir = o.out;
  if (*o.seed_opt) c.seed = o.seed;
  if (*o.k_opt) c.k_max = o.k_max;
  if (*o.threads_opt) c.threads = o.threads;
  if (!o.scale.empty()) c.validation_scale = o.scale;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  namespace ex = lsdrift::experiments;
  CLI::App app{"Drift-and-minorization convergence bounds for the hierarchical Normal Gibbs sampler"};
  app.require_subcommand(1);
  Overrides o;
  o.seed_opt = app.add_option("--seed", o.seed, "master seed (overrides the config)");
  o.k_opt = app.add_option("--k-max", o.k_max, "largest k in the bound curve");
  o.threads_opt = app.add_option("--threads", o.threads, "worker threads (0 = all cores)");
  app.add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory");
  // Subcommands inherit this, so global options may follow the subcommand name.
  app.fallthrough();
  auto* synth = app.add_subcommand("synth-data", "draw a dataset from the model and write one Y per line");
  auto* curve = app.add_subcommand("bound-curve", "write the bound terms for k = 1..k_max");
  auto* sweep = app.add_subcommand("sweep-n", "recompute every constant for each n at a fixed center");
  auto* simulate = app.add_subcommand("simulate", "run an ensemble and compare its TV lower bound to the bound");
  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  validate->add_option("--scale", o.scale, "full or quick");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    const ex::ExperimentConfig config = resolve(o);
    if (*synth) {
      const auto res = ex::cmd_synth_data(config);
      std::printf("wrote %s (n=%zu, delta/(n-1)=%.6g)\n", res.data_file.c_str(), res.dataset.n, res.dataset.spread());
    } else if (*curve) {
      std::printf("wrote %s\n", ex::cmd_bound_curve(config).c_str());
    } else if (*sweep) {
      std::printf("wrote %s\n", ex::cmd_sweep_n(config).c_str());
    } else if (*simulate) {
      const auto res = ex::cmd_simulate(config);
      std::printf("wrote %s and %s\n", res.ensemble_csv.c_str(), res.tv_csv.c_str());
    } else if (*validate) {
      const bool ok = ex::cmd_validate(config);
      std::printf("wrote %s/validation.json: %s\n", config.out_dir.c_str(), ok ? "all criteria pass" : "some criteria fail");
      return ok ? kOk : kValidation;
    }
    return kOk;
  } catch (const lsdrift::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == lsdrift::ErrorKind::numerical ? kNumerical : kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }
}
