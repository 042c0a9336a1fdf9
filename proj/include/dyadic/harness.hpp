#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadic/bmo.hpp"
#include "dyadic/lattice.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

// ---------------------------------------------------------------------------
// Experiment configuration. A config plus its seed determines every emitted
// byte: weights, sequences, sample functions and row order are all derived
// through deterministic seed splitting.

struct WeightFamilySpec {
  std::string label;
  WeightRecipe recipe;
  int count = 10;
  double a2_cap = 16.0;  // candidates above the cap are resampled
};

struct ExperimentConfig {
  int schema = 1;
  std::string suite;
  std::vector<int> depths{4, 4};
  std::uint64_t seed = 20210401;
  int samples = 50;            // sequences / instances per weight
  int sequence_support = 16;   // coefficient support size
  double p = 2.0;
  double q = 1.0;
  double r = 2.0;
  int block_count = 3;         // partial paraproduct blocks
  int complexity_in = 1;
  int complexity_out = 1;
  std::vector<WeightFamilySpec> weights;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// The committed corpus every calibrated suite runs on.
ExperimentConfig standard_config(const std::string& suite);

/// Suites accepted by run_experiment / calibrate.
const std::vector<std::string>& experiment_suites();
/// Suites accepted by run_verify.
const std::vector<std::string>& verify_suites();

// ---------------------------------------------------------------------------
// Results.

struct FixtureEntry {
  double hi = 0.0;
  std::optional<double> lo;  // present for two-sided equivalences
};

struct ExperimentResult {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json summary;
  std::map<std::string, FixtureEntry> fixture_entries;

  std::string csv() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Calibration fixtures: recorded sup (and inf) ratios standing in for the
// suppressed constants of the estimates under test. Fresh runs must stay
// within `multiplier` of the stored values.

struct CalibrationFixture {
  int schema = 1;
  double multiplier = 2.0;
  std::map<std::string, std::map<std::string, FixtureEntry>> suites;

  nlohmann::json to_json() const;
  static CalibrationFixture from_json(const nlohmann::json& j);
  static CalibrationFixture load(const std::string& path);
  /// Refuses to overwrite an existing file unless `force`.
  void save(const std::string& path, bool force) const;
};

// ---------------------------------------------------------------------------
// Verification.

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyCheck> checks;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  nlohmann::json to_json() const;
};

/// Runs one verification suite. Calibrated suites need the fixture; exact
/// suites ignore it. The seed reseeds the sampled corpora.
VerifyReport run_verify(const std::string& suite, const CalibrationFixture* fixture,
                        std::uint64_t seed);

// Deterministic double formatting used for CSV and JSON number fields.
std::string format_double(double v);

// Deterministic sampling helpers shared by the harness and the acceptance
// suite. Values are uniform in [-1, 1].
GridFunction sample_function(const GridSpec& spec, std::uint64_t seed);
CoefSequence sample_coef_sequence(const GridSpec& spec, std::uint64_t seed, int support);

}  // namespace dyadic
