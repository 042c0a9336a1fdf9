// Command line front end: verification suites, sampled experiments and
// calibration fixture maintenance.
//
//   dyadic verify <suite> [--fixture f.json] [--seed N] [--json]
//   dyadic experiment <config.json> -o out.csv [--summary s.json]
//   dyadic calibrate <config.json|--standard> -o fixture.json [--force]
//
// Exit codes: 0 pass, 1 assertion failure, 2 configuration error.
// DYADIC_THREADS caps the OpenMP thread count.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyadic/harness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

void apply_thread_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("DYADIC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

int run_verify_cmd(const std::string& suite, const std::string& fixture_path, std::uint64_t seed,
                   bool as_json) {
  std::optional<dyadic::CalibrationFixture> fixture;
  if (!fixture_path.empty()) {
    try {
      fixture = dyadic::CalibrationFixture::load(fixture_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  dyadic::VerifyReport report;
  try {
    report = dyadic::run_verify(suite, fixture ? &*fixture : nullptr, seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (as_json) {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    for (const auto& c : report.checks)
      std::cout << (c.pass ? "PASS " : "FAIL ") << report.suite << ": " << c.name
                << (c.detail.empty() ? "" : "  [" + c.detail + "]") << "\n";
    std::cout << (report.pass() ? "OK" : "FAILED") << " (" << report.checks.size() << " checks)\n";
  }
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();

  CLI::App app{"dyadic product-space verification harness"};
  app.require_subcommand(1);

  // verify
  std::string verify_suite;
  std::string verify_fixture = "fixtures/calibration.json";
  std::uint64_t verify_seed = 1;
  bool verify_json = false;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", verify_suite, "one of the named suites")->required();
  verify->add_option("--fixture", verify_fixture, "calibration fixture path");
  verify->add_option("--seed", verify_seed, "reseed the sampled corpora");
  verify->add_flag("--json", verify_json, "emit a JSON report");

  // experiment
  std::string exp_config;
  std::string exp_out = "experiment.csv";
  std::string exp_summary;
  auto* experiment = app.add_subcommand("experiment", "run a sampled experiment from a config");
  experiment->add_option("config", exp_config, "JSON config file")->required();
  experiment->add_option("-o,--output", exp_out, "CSV output path");
  experiment->add_option("--summary", exp_summary, "summary JSON path");

  // calibrate
  std::string cal_config;
  bool cal_standard = false;
  std::string cal_out = "fixtures/calibration.json";
  bool cal_force = false;
  auto* calibrate = app.add_subcommand("calibrate", "record calibration fixtures");
  calibrate->add_option("config", cal_config, "JSON config file (suite ignored; all suites run)");
  calibrate->add_flag("--standard", cal_standard, "use the built-in standard corpus");
  calibrate->add_option("-o,--output", cal_out, "fixture output path");
  calibrate->add_flag("--force", cal_force, "overwrite an existing fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return run_verify_cmd(verify_suite, verify_fixture, verify_seed, verify_json);

    if (experiment->parsed()) {
      std::ifstream in(exp_config);
      if (!in) {
        std::cerr << "error: cannot open config " << exp_config << "\n";
        return 2;
      }
      nlohmann::json j;
      try {
        in >> j;
      } catch (const std::exception& e) {
        std::cerr << "error: config parse: " << e.what() << "\n";
        return 2;
      }
      dyadic::ExperimentConfig config;
      try {
        config = dyadic::ExperimentConfig::from_json(j);
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
      const auto result = dyadic::run_experiment(config);
      std::ofstream out(exp_out);
      if (!out) {
        std::cerr << "error: cannot write " << exp_out << "\n";
        return 2;
      }
      out << result.csv();
      if (!exp_summary.empty()) {
        std::ofstream sum(exp_summary);
        sum << result.summary.dump(2) << "\n";
      }
      std::cout << "wrote " << result.rows.size() << " rows to " << exp_out << "\n";
      return 0;
    }

    if (calibrate->parsed()) {
      dyadic::CalibrationFixture fixture;
      std::vector<dyadic::ExperimentConfig> configs;
      if (cal_standard || cal_config.empty()) {
        for (const auto& suite : dyadic::experiment_suites()) {
          if (suite == "omega-families") continue;  // report-only
          configs.push_back(dyadic::standard_config(suite));
        }
      } else {
        std::ifstream in(cal_config);
        if (!in) {
          std::cerr << "error: cannot open config " << cal_config << "\n";
          return 2;
        }
        nlohmann::json j;
        in >> j;
        configs.push_back(dyadic::ExperimentConfig::from_json(j));
      }
      for (const auto& config : configs) {
        std::cerr << "calibrating " << config.suite << "...\n";
        const auto result = dyadic::run_experiment(config);
        for (const auto& [key, entry] : result.fixture_entries)
          fixture.suites[config.suite][key] = entry;
      }
      fixture.save(cal_out, cal_force);
      std::cout << "wrote fixture " << cal_out << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
