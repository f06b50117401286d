#ifndef LSDRIFT_EXPERIMENTS_HPP
#define LSDRIFT_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsdrift/gibbs_bound.hpp"
#include "lsdrift/hier_model.hpp"
#include "lsdrift/simulation.hpp"

/**
 * \file
 * \brief Experiment configuration, data ingestion and synthesis, CSV and
 * manifest output, and the command implementations behind the CLI.
 */

namespace lsdrift::experiments {

/// Fixed stream indices under the master seed. Ensemble chain c uses stream c.
namespace streams {
inline constexpr std::uint64_t kBase = std::uint64_t{1} << 63;
inline constexpr std::uint64_t kSynthesis = kBase;       ///< data synthesis (sweep: kBase + n)
inline constexpr std::uint64_t kReference = kBase - 1;   ///< long reference chain
inline constexpr std::uint64_t kOracle = kBase - 2;      ///< Monte Carlo oracles
}  // namespace streams

struct SynthesisSpec {
  std::size_t n = 100;
  double center = 2.0;
  /// Rescale the draws about their mean so that delta/(n-1) = V + center exactly.
  bool exact_spread = false;
};

struct ExperimentConfig {
  model::ModelConfig model;
  std::optional<std::string> data_file;
  std::optional<SynthesisSpec> synthesis;
  std::optional<double> T;
  std::optional<double> d;
  std::int64_t k_max = 200;
  double mixing_c = 0.25;
  std::vector<std::size_t> n_list{100, 400, 1600, 6400};

  std::size_t n_chains = 1000;
  std::size_t n_steps = 200;
  std::size_t burn_in = 0;
  std::size_t record_stride = 1;
  std::size_t csv_chains = 100;  ///< chains written to the ensemble CSV
  std::size_t reference_steps = 1'000'000;
  std::size_t reference_burn_in = 100'000;
  std::size_t tv_a_bins = 64;
  std::size_t tv_theta_bins = 64;

  std::string validation_scale = "full";
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  unsigned threads = 0;

  /// Throws naming the violated invariant.
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
};

/// Reads one value per line, or a JSON array when the first non-blank
/// character is '['. Blank lines and lines starting with '#' are skipped.
std::vector<double> read_observations(const std::filesystem::path& path);

/// Draws theta_i ~ N(0, center) and Y_i ~ N(theta_i, V), redrawing up to 100
/// times until the data assumption holds.
model::Dataset synthesize_dataset(const SynthesisSpec& spec, const model::ModelConfig& cfg, std::uint64_t seed,
                                  std::uint64_t stream_index);

/// The dataset named by the configuration.
model::Dataset resolve_dataset(const ExperimentConfig& config);

/// T from the configuration or the default rule.
model::LargeSetSpec resolve_large_set(const model::Dataset& ds, const ExperimentConfig& config);

std::string format_double(double x);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  nlohmann::json config;
  std::string command;
  std::string version;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;
  std::vector<std::filesystem::path> files;

  /// Serialises with a SHA-256 digest and size per file.
  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
};

/// Returns true iff every digest in the manifest matches the file on disk.
bool verify_manifest(const std::filesystem::path& manifest_path);

inline constexpr const char* kVersion = "1.0.0";

inline constexpr const char* kBoundCurveHeader = "k,term1,term2,tail,total,clamped_total";
inline constexpr const char* kSweepHeader = "n,lambda_T,b,d,epsilon,q_mass,gamma,K_bar,N_c,log_gamma,status";
inline constexpr const char* kEnsembleHeader = "chain,step,theta_bar,A,f,in_large_set";
inline constexpr const char* kTvHeader = "k,tv_empirical,tv_se,bound,clamped_bound";

std::string bound_curve_csv(const model::GibbsBoundReport& report);
nlohmann::json report_json(const model::GibbsBoundReport& report);

struct SweepRow {
  std::size_t n = 0;
  bool ok = false;
  std::string status;
  model::BoundConstants constants;
  double K_bar = 0.0;
  double N_c = 0.0;
};

std::vector<SweepRow> sweep_rows(const ExperimentConfig& config);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct SynthResult {
  std::filesystem::path data_file;
  model::Dataset dataset;
};

SynthResult cmd_synth_data(const ExperimentConfig& config);
std::filesystem::path cmd_bound_curve(const ExperimentConfig& config);
std::filesystem::path cmd_sweep_n(const ExperimentConfig& config);

struct SimulateResult {
  std::filesystem::path ensemble_csv;
  std::filesystem::path tv_csv;
  std::vector<sim::TvEstimate> tv;
  std::vector<double> clamped_bound;
};
SimulateResult cmd_simulate(const ExperimentConfig& config);

/// Runs the acceptance suite and writes validation.json. Returns true iff
/// every criterion passed.
bool cmd_validate(const ExperimentConfig& config);

}  // namespace lsdrift::experiments

#endif
