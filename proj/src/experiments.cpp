#include "lsdrift/experiments.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lsdrift/acceptance.hpp"
#include "lsdrift/error.hpp"
#include "lsdrift/parallel.hpp"

namespace lsdrift::experiments {

namespace {

constexpr const char* kModule = "cli_experiments";

using nlohmann::json;

Error config_error(const std::string& msg) { return invalid_argument(kModule, msg); }

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw config_error("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string("field '") + key + "' in " + where + " has the wrong type");
  }
}

std::size_t read_count(const json& j, const char* key, std::size_t fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
    throw config_error(std::string("field '") + key + "' in " + where + " must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
  return out;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void write_manifest(const ExperimentConfig& config, const std::string& command, double seconds,
                    std::vector<std::filesystem::path> files) {
  RunManifest m;
  m.config = config.to_json();
  m.command = command;
  m.version = kVersion;
  m.seed = config.seed;
  m.wall_clock_seconds = seconds;
  m.files = std::move(files);
  m.write(std::filesystem::path(config.out_dir) / (command + ".manifest.json"));
}

model::AssemblyOptions assembly_options(const ExperimentConfig& config) {
  model::AssemblyOptions o;
  o.mixing_c = config.mixing_c;
  return o;
}

}  // namespace

void ExperimentConfig::validate() const {
  model.validate();
  if (data_file.has_value() == synthesis.has_value()) {
    throw config_error("exactly one data source (data.file or data.synthesize) is required");
  }
  if (synthesis) {
    if (synthesis->n < 2) throw config_error("synthesis n must be >= 2");
    if (!(synthesis->center > 0.0) || !std::isfinite(synthesis->center)) {
      throw config_error("synthesis center must be > 0");
    }
    if (T && !(*T < synthesis->center)) throw config_error("large-set T must be < center");
  }
  if (T && !(*T > 0.0)) throw config_error("large-set T must be > 0");
  if (d && !(*d > 0.0)) throw config_error("small-set d must be > 0");
  if (k_max < 1) throw config_error("k_max must be >= 1");
  if (!(mixing_c > 0.0 && mixing_c < 1.0)) throw config_error("mixing_c must lie in (0, 1)");
  if (n_list.empty()) throw config_error("n_list must not be empty");
  for (std::size_t n : n_list) {
    if (n < 3) throw config_error("every n in n_list must be >= 3");
  }
  if (n_chains < 1) throw config_error("simulation n_chains must be >= 1");
  if (n_steps < 1) throw config_error("simulation n_steps must be >= 1");
  if (record_stride < 1) throw config_error("simulation record_stride must be >= 1");
  if (!(burn_in < n_steps)) throw config_error("simulation burn_in must be < n_steps");
  if (reference_steps < 1000) throw config_error("simulation reference_steps must be >= 1000");
  if (tv_a_bins < 1 || tv_theta_bins < 1) throw config_error("tv bins must be >= 1");
  (void)acceptance::parse_scale(validation_scale);
  if (out_dir.empty()) throw config_error("out_dir must not be empty");
}

json ExperimentConfig::to_json() const {
  json j;
  j["model"] = {{"V", model.V}, {"a", model.prior_shape_a}, {"b_prior", model.prior_scale_b}, {"delta", model.delta_margin}};
  if (data_file) {
    j["data"] = {{"file", *data_file}};
  } else if (synthesis) {
    j["data"] = {{"synthesize", {{"n", synthesis->n}, {"center", synthesis->center}, {"exact_spread", synthesis->exact_spread}}}};
  }
  if (T) j["large_set"] = {{"T", *T}};
  if (d) j["small_set"] = {{"d", *d}};
  j["k_max"] = k_max;
  j["mixing_c"] = mixing_c;
  j["n_list"] = n_list;
  j["simulation"] = {{"n_chains", n_chains},
                     {"n_steps", n_steps},
                     {"burn_in", burn_in},
                     {"record_stride", record_stride},
                     {"csv_chains", csv_chains},
                     {"reference_steps", reference_steps},
                     {"reference_burn_in", reference_burn_in},
                     {"tv_bins", {tv_a_bins, tv_theta_bins}}};
  j["validation_scale"] = validation_scale;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["threads"] = threads;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw config_error("config must be a JSON object");
  reject_unknown(j,
                 {"model", "data", "large_set", "small_set", "k_max", "mixing_c", "n_list", "simulation",
                  "validation_scale", "out_dir", "seed", "threads"},
                 "config");
  ExperimentConfig c;
  if (auto it = j.find("model"); it != j.end()) {
    reject_unknown(*it, {"V", "a", "b_prior", "delta"}, "model");
    read_field(*it, "V", c.model.V, "model");
    read_field(*it, "a", c.model.prior_shape_a, "model");
    read_field(*it, "b_prior", c.model.prior_scale_b, "model");
    read_field(*it, "delta", c.model.delta_margin, "model");
  }
  if (auto it = j.find("data"); it != j.end()) {
    reject_unknown(*it, {"file", "synthesize"}, "data");
    if (auto f = it->find("file"); f != it->end()) {
      if (!f->is_string()) throw config_error("data.file must be a string");
      c.data_file = f->get<std::string>();
    }
    if (auto s = it->find("synthesize"); s != it->end()) {
      reject_unknown(*s, {"n", "center", "exact_spread"}, "data.synthesize");
      SynthesisSpec spec;
      spec.n = read_count(*s, "n", spec.n, "data.synthesize");
      read_field(*s, "center", spec.center, "data.synthesize");
      read_field(*s, "exact_spread", spec.exact_spread, "data.synthesize");
      c.synthesis = spec;
    }
  } else {
    c.synthesis = SynthesisSpec{};
  }
  if (auto it = j.find("large_set"); it != j.end()) {
    reject_unknown(*it, {"T"}, "large_set");
    if (it->contains("T")) c.T = (*it)["T"].get<double>();
  }
  if (auto it = j.find("small_set"); it != j.end()) {
    reject_unknown(*it, {"d"}, "small_set");
    if (it->contains("d")) c.d = (*it)["d"].get<double>();
  }
  read_field(j, "k_max", c.k_max, "config");
  read_field(j, "mixing_c", c.mixing_c, "config");
  read_field(j, "n_list", c.n_list, "config");
  if (auto it = j.find("simulation"); it != j.end()) {
    const std::string w = "simulation";
    reject_unknown(*it,
                   {"n_chains", "n_steps", "burn_in", "record_stride", "csv_chains", "reference_steps",
                    "reference_burn_in", "tv_bins"},
                   w);
    c.n_chains = read_count(*it, "n_chains", c.n_chains, w);
    c.n_steps = read_count(*it, "n_steps", c.n_steps, w);
    c.burn_in = read_count(*it, "burn_in", c.burn_in, w);
    c.record_stride = read_count(*it, "record_stride", c.record_stride, w);
    c.csv_chains = read_count(*it, "csv_chains", c.csv_chains, w);
    c.reference_steps = read_count(*it, "reference_steps", c.reference_steps, w);
    c.reference_burn_in = read_count(*it, "reference_burn_in", c.reference_burn_in, w);
    if (auto b = it->find("tv_bins"); b != it->end()) {
      if (!b->is_array() || b->size() != 2) throw config_error("simulation.tv_bins must be [a_bins, theta_bins]");
      c.tv_a_bins = (*b)[0].get<std::size_t>();
      c.tv_theta_bins = (*b)[1].get<std::size_t>();
    }
  }
  read_field(j, "validation_scale", c.validation_scale, "config");
  read_field(j, "out_dir", c.out_dir, "config");
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
      throw config_error("seed must be a non-negative integer");
    }
    c.seed = it->get<std::uint64_t>();
  }
  read_field(j, "threads", c.threads, "config");
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  const std::string text = read_file_bytes(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error("config " + path.string() + " is not valid JSON: " + e.what());
  }
  ExperimentConfig c = from_json(j);
  // A relative data file is resolved against the config's directory.
  if (c.data_file && std::filesystem::path(*c.data_file).is_relative()) {
    c.data_file = (path.parent_path() / *c.data_file).string();
  }
  return c;
}

std::vector<double> read_observations(const std::filesystem::path& path) {
  const std::string text = read_file_bytes(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<double> y;
  if (first != std::string::npos && text[first] == '[') {
    try {
      const json j = json::parse(text);
      for (const auto& v : j) {
        if (!v.is_number()) throw config_error("data array in " + path.string() + " holds a non-number");
        y.push_back(v.get<double>());
      }
    } catch (const json::exception& e) {
      throw config_error("data file " + path.string() + " is not a valid JSON array: " + e.what());
    }
  } else {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      const auto e = line.find_last_not_of(" \t\r");
      const std::string cell = line.substr(b, e - b + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size()) {
        throw config_error("data file " + path.string() + " line " + std::to_string(lineno) + " is not a number");
      }
      y.push_back(v);
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw config_error("data file " + path.string() + " holds a non-finite value");
  }
  if (y.size() < 2) throw config_error("data file " + path.string() + " needs at least 2 observations");
  return y;
}

model::Dataset synthesize_dataset(const SynthesisSpec& spec, const model::ModelConfig& cfg, std::uint64_t seed,
                                  std::uint64_t stream_index) {
  cfg.validate();
  if (spec.n < 2) throw config_error("synthesis n must be >= 2");
  if (!(spec.center > 0.0)) throw config_error("synthesis center must be > 0");
  numerics::RngStream stream(seed, stream_index);
  constexpr int kMaxResamples = 100;
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    std::vector<double> y(spec.n);
    for (double& v : y) {
      const double theta = numerics::draw_normal(stream, 0.0, spec.center);
      v = numerics::draw_normal(stream, theta, cfg.V);
    }
    if (spec.exact_spread) {
      const model::Dataset raw = model::sufficient_stats(y);
      if (!(raw.delta > 0.0)) continue;
      const double scale = std::sqrt((cfg.V + spec.center) * static_cast<double>(spec.n - 1) / raw.delta);
      for (double& v : y) v = raw.y_bar + (v - raw.y_bar) * scale;
    }
    model::Dataset ds = model::sufficient_stats(std::move(y));
    if (model::check_data_assumption(ds, cfg)) return ds;
  }
  throw config_error("data assumption delta/(n-1) >= V + delta unsatisfied after " + std::to_string(kMaxResamples) +
                     " resamples");
}

model::Dataset resolve_dataset(const ExperimentConfig& config) {
  if (config.data_file) return model::sufficient_stats(read_observations(*config.data_file));
  return synthesize_dataset(*config.synthesis, config.model, config.seed, streams::kSynthesis);
}

model::LargeSetSpec resolve_large_set(const model::Dataset& ds, const ExperimentConfig& config) {
  if (!model::check_data_assumption(ds, config.model)) {
    throw config_error("data assumption delta/(n-1) >= V + delta fails for the configured data");
  }
  if (config.T) {
    const double c = model::drift_center(ds, config.model);
    if (!(*config.T < c)) throw config_error("large-set T must be < center");
    return model::large_set_with_threshold(ds, config.model, *config.T);
  }
  return model::default_large_set(ds, config.model);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot write " + path.string());
  out << content;
  if (!out) throw config_error("failed writing " + path.string());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw numerical_error(kModule, "SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file_bytes(path)); }

json RunManifest::to_json() const {
  json files_json = json::array();
  for (const auto& f : files) {
    files_json.push_back({{"path", f.filename().string()},
                          {"sha256", sha256_file(f)},
                          {"bytes", std::filesystem::file_size(f)}});
  }
  return {{"command", command}, {"version", version},          {"seed", seed},
          {"config", config},   {"wall_clock_seconds", wall_clock_seconds}, {"files", files_json}};
}

void RunManifest::write(const std::filesystem::path& path) const { write_text_file(path, to_json().dump(2) + "\n"); }

bool verify_manifest(const std::filesystem::path& manifest_path) {
  const json m = json::parse(read_file_bytes(manifest_path));
  const auto dir = manifest_path.parent_path();
  for (const auto& f : m.at("files")) {
    const auto p = dir / f.at("path").get<std::string>();
    if (!std::filesystem::exists(p)) return false;
    if (sha256_file(p) != f.at("sha256").get<std::string>()) return false;
  }
  return true;
}

std::string bound_curve_csv(const model::GibbsBoundReport& report) {
  std::string out = std::string(kBoundCurveHeader) + "\n";
  for (const auto& p : report.curve) {
    out += csv_row({std::to_string(p.k), format_double(p.term1), format_double(p.term2), format_double(p.tail),
                    format_double(p.total), format_double(p.clamped_total)});
  }
  return out;
}

json report_json(const model::GibbsBoundReport& r) {
  const auto& c = r.constants;
  const auto& e = r.epsilon_detail;
  return {{"n", r.n},
          {"T", c.T},
          {"center", c.center},
          {"lambda_T", c.lambda_T},
          {"b", c.b_drift},
          {"b_raw_supremum", r.drift_detail.raw_supremum},
          {"b_argmax_A", r.drift_detail.argmax_A},
          {"d", c.d},
          {"epsilon", c.epsilon},
          {"epsilon_s_factor", e.s_factor},
          {"epsilon_s_factor_error", e.s_factor_error},
          {"epsilon_mu_factor", e.mu_factor},
          {"epsilon_mu_factor_error", e.mu_factor_error},
          {"q_mass", c.q_mass},
          {"q_mass_remark", c.q_mass_remark},
          {"q_mass_direct", c.q_mass_direct},
          {"exit_prob_upper", c.exit_prob_upper},
          {"alpha", c.alpha},
          {"Lambda", c.Lambda},
          {"r", c.r},
          {"gamma", c.gamma},
          {"log_gamma", c.log_gamma},
          {"C1", c.C1},
          {"C2", c.C2},
          {"C3", c.C3},
          {"C4", c.C4},
          {"initial_drift", c.initial_drift},
          {"K_bar", r.K_bar},
          {"N_c", r.N_c}};
}

std::vector<SweepRow> sweep_rows(const ExperimentConfig& config) {
  config.validate();
  const double center = config.synthesis ? config.synthesis->center : SynthesisSpec{}.center;
  std::vector<SweepRow> rows(config.n_list.size());
  // Each n has its own synthesis stream, so rows do not depend on the worker count.
  parallel_for(rows.size(), config.threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.n = config.n_list[i];
    try {
      const SynthesisSpec spec{row.n, center, true};
      const model::Dataset ds = synthesize_dataset(spec, config.model, config.seed, streams::kSynthesis + row.n);
      const model::LargeSetSpec ls = config.T ? model::large_set_with_threshold(ds, config.model, *config.T)
                                              : model::default_large_set(ds, config.model);
      const model::GibbsBoundReport rep =
          model::assemble_gibbs_bound(ds, config.model, ls, config.d, 1, assembly_options(config));
      row.constants = rep.constants;
      row.K_bar = rep.K_bar;
      row.N_c = rep.N_c;
      row.ok = true;
      row.status = "ok";
    } catch (const std::exception& e) {
      row.ok = false;
      std::string msg = e.what();
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
      }
      row.status = "failed: " + msg;
    }
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) {
    if (!r.ok) {
      out += std::to_string(r.n) + ",,,,,,,,,," + r.status + "\n";
      continue;
    }
    const auto& c = r.constants;
    out += csv_row({std::to_string(r.n), format_double(c.lambda_T), format_double(c.b_drift), format_double(c.d),
                    format_double(c.epsilon), format_double(c.q_mass), format_double(c.gamma), format_double(r.K_bar),
                    format_double(r.N_c), format_double(c.log_gamma), r.status});
  }
  return out;
}

SynthResult cmd_synth_data(const ExperimentConfig& config) {
  const Timer timer;
  config.validate();
  if (!config.synthesis) throw config_error("synth-data needs data.synthesize in the config");
  SynthResult res;
  res.dataset = synthesize_dataset(*config.synthesis, config.model, config.seed, streams::kSynthesis);
  std::string text;
  for (double v : res.dataset.y) text += format_double(v) + "\n";
  res.data_file = std::filesystem::path(config.out_dir) / "data.txt";
  write_text_file(res.data_file, text);
  write_manifest(config, "synth-data", timer.seconds(), {res.data_file});
  return res;
}

std::filesystem::path cmd_bound_curve(const ExperimentConfig& config) {
  const Timer timer;
  config.validate();
  const model::Dataset ds = resolve_dataset(config);
  const model::LargeSetSpec ls = resolve_large_set(ds, config);
  const model::GibbsBoundReport rep =
      model::assemble_gibbs_bound(ds, config.model, ls, config.d, config.k_max, assembly_options(config));
  const std::string csv = bound_curve_csv(rep);
  const std::string report = report_json(rep).dump(2) + "\n";

  const std::filesystem::path dir(config.out_dir);
  const auto csv_path = dir / "bound_curve.csv";
  const auto report_path = dir / "bound_report.json";
  write_text_file(csv_path, csv);
  write_text_file(report_path, report);
  write_manifest(config, "bound-curve", timer.seconds(), {csv_path, report_path});
  return csv_path;
}

std::filesystem::path cmd_sweep_n(const ExperimentConfig& config) {
  const Timer timer;
  const std::string csv = sweep_csv(sweep_rows(config));
  const auto path = std::filesystem::path(config.out_dir) / "sweep_n.csv";
  write_text_file(path, csv);
  write_manifest(config, "sweep-n", timer.seconds(), {path});
  return path;
}

SimulateResult cmd_simulate(const ExperimentConfig& config) {
  const Timer timer;
  config.validate();
  const model::Dataset ds = resolve_dataset(config);
  const model::LargeSetSpec ls = resolve_large_set(ds, config);
  const model::ChainState x0 = model::initial_state(ds, config.model);
  const auto k_max = static_cast<std::int64_t>(config.n_steps);
  const model::GibbsBoundReport rep =
      model::assemble_gibbs_bound(ds, config.model, ls, config.d, k_max, assembly_options(config));

  numerics::RngStream ref_stream(config.seed, streams::kReference);
  const std::vector<sim::Point2> reference =
      sim::collect_chain(ds, config.model, x0, ls, sim::ChainKind::plain, config.reference_steps, 1,
                         config.reference_burn_in, ref_stream);
  const sim::BinGrid grid = sim::BinGrid::fit(reference, config.tv_a_bins, config.tv_theta_bins);
  const std::vector<double> ref_counts = sim::bin_counts(reference, grid);
  const double n_ref = static_cast<double>(reference.size());

  sim::SimulationPlan plan;
  plan.n_chains = config.n_chains;
  plan.n_steps = config.n_steps;
  plan.seed = config.seed;
  plan.threads = config.threads;

  SimulateResult res;
  res.tv.resize(config.n_steps + 1);
  const std::size_t csv_chains = std::min(config.csv_chains, config.n_chains);
  std::string ensemble = std::string(kEnsembleHeader) + "\n";
  std::vector<sim::Point2> cross(config.n_chains);
  sim::run_lockstep(plan, ds, config.model, x0, [&](std::size_t step, const std::vector<model::ChainState>& states) {
    for (std::size_t c = 0; c < states.size(); ++c) cross[c] = {states[c].theta_bar, states[c].A};
    res.tv[step] = sim::tv_from_counts(sim::bin_counts(cross, grid), static_cast<double>(cross.size()), ref_counts, n_ref);
    if (step < config.burn_in || (step - config.burn_in) % config.record_stride != 0) return;
    for (std::size_t c = 0; c < csv_chains; ++c) {
      const auto& x = states[c];
      ensemble += csv_row({std::to_string(c), std::to_string(step), format_double(x.theta_bar), format_double(x.A),
                           format_double(model::drift_value(x, ds, config.model)), ls.contains(x.A) ? "1" : "0"});
    }
  });

  std::string tv = std::string(kTvHeader) + "\n";
  res.clamped_bound.resize(config.n_steps + 1);
  for (std::size_t k = 0; k <= config.n_steps; ++k) {
    // Total variation never exceeds 1, which is the bound reported at k = 0.
    const double bound = k == 0 ? 1.0 : rep.curve[k - 1].total;
    const double clamped = k == 0 ? 1.0 : rep.curve[k - 1].clamped_total;
    res.clamped_bound[k] = clamped;
    tv += csv_row({std::to_string(k), format_double(res.tv[k].tv), format_double(res.tv[k].se), format_double(bound),
                   format_double(clamped)});
  }

  const std::filesystem::path dir(config.out_dir);
  res.ensemble_csv = dir / "ensemble.csv";
  res.tv_csv = dir / "tv_vs_k.csv";
  write_text_file(res.ensemble_csv, ensemble);
  write_text_file(res.tv_csv, tv);
  write_manifest(config, "simulate", timer.seconds(), {res.ensemble_csv, res.tv_csv});
  return res;
}

bool cmd_validate(const ExperimentConfig& config) {
  const Timer timer;
  config.validate();
  // The configured data must be usable before any criterion runs.
  const model::Dataset ds = resolve_dataset(config);
  (void)resolve_large_set(ds, config);

  acceptance::SuiteOptions o;
  o.scale = acceptance::parse_scale(config.validation_scale);
  o.seed = config.seed;
  o.threads = config.threads;
  o.work_dir = std::filesystem::path(config.out_dir) / "validate_work";
  const auto results = acceptance::run_suite(o);
  const auto path = std::filesystem::path(config.out_dir) / "validation.json";
  write_text_file(path, acceptance::to_json(results, o).dump(2) + "\n");
  write_manifest(config, "validate", timer.seconds(), {path});
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  return all;
}

}  // namespace lsdrift::experiments
