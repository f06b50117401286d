#ifndef LSDRIFT_ACCEPTANCE_HPP
#define LSDRIFT_ACCEPTANCE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

/**
 * \file
 * \brief The acceptance suite shared by the acceptance test binary and the
 * validate command. Tolerances and sample sizes are fixed here.
 */

namespace lsdrift::acceptance {

/// `full` uses the prescribed sample sizes; `quick` shrinks every Monte Carlo
/// budget for smoke runs and keeps the same thresholds.
enum class Scale { quick, full };

Scale parse_scale(const std::string& s);
const char* scale_name(Scale s);

struct Check {
  std::string label;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  ///< "<", "<=", ">", "==" ...
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<Check> checks;
  std::string detail;
  double seconds = 0.0;

  /// The first failing check, or the first check when all pass.
  const Check& headline() const;
};

struct SuiteOptions {
  Scale scale = Scale::full;
  std::uint64_t seed = 20240601;
  unsigned threads = 0;
  std::filesystem::path work_dir = "acceptance_work";
};

CriterionResult criterion_exact_moments(const SuiteOptions& o);         // 1
CriterionResult criterion_drift_inequality(const SuiteOptions& o);      // 2
CriterionResult criterion_constant_flatness(const SuiteOptions& o);     // 3
CriterionResult criterion_bound_validity(const SuiteOptions& o);        // 4
CriterionResult criterion_tail_bound(const SuiteOptions& o);            // 5
CriterionResult criterion_posterior_functional(const SuiteOptions& o);  // 6
CriterionResult criterion_large_set_chains(const SuiteOptions& o);      // 7
CriterionResult criterion_algebraic_identities(const SuiteOptions& o);  // 8
CriterionResult criterion_minorization_honesty(const SuiteOptions& o);  // 9
CriterionResult criterion_reproducibility(const SuiteOptions& o);       // 10

/// Runs the listed criteria (all when empty) in order. A criterion that throws
/// is reported as failed with the message in `detail`.
std::vector<CriterionResult> run_suite(const SuiteOptions& o, const std::vector<int>& only = {});

std::string format_line(const CriterionResult& r);
nlohmann::json to_json(const std::vector<CriterionResult>& results, const SuiteOptions& o);

}  // namespace lsdrift::acceptance

#endif
