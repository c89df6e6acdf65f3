#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavityfock/dynamics.hpp"
#include "cavityfock/filters.hpp"
#include "cavityfock/fockspace.hpp"
#include "cavityfock/trapping.hpp"

// Experiment configuration and execution behind the command-line tool.
namespace cavityfock::cli {

enum class ExperimentKind { filter_dump, ensemble, trajectories, brute_force, binomial, trap_schedule, validate_oracle };
enum class OutputFormat { csv, json };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view text);

// Invalid configuration; `path` names the offending field, e.g. "filter.eta".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct InitialConfig {
  InitialFieldSpec spec{Vacuum{}};
  std::optional<std::size_t> nmax;  // default_nmax(spec) when absent
};

enum class FilterType { resonant, adiabatic, dk, numeric };

struct FilterConfig {
  FilterType type = FilterType::resonant;
  double eta = 1.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double kappa = 0.5;
  std::size_t nmax = 30;  // table size for filter dumps
  double window = 20.0;   // numeric only
  double tol = 1e-10;     // numeric only
};

enum class ScheduleType { fixed, incrementing, custom, file };

struct ScheduleConfig {
  ScheduleType type = ScheduleType::fixed;
  std::size_t n_prime = 10;
  std::size_t q = 1;        // fixed
  std::size_t q_start = 1;  // incrementing
  std::vector<double> etas; // custom
  std::string path;         // file: JSON array of eta
};

struct ValidateConfig {
  std::vector<double> lambdas{0.0, 0.5, 1.0, 2.0};
  std::vector<double> etas{0.3, 1.0, 2.0};
  std::size_t nmax = 30;
  std::vector<double> resonant_etas{0.3, 1.0, 2.5};
  std::size_t resonant_nmax = 50;
  double tolerance = 1e-6;
  double window = 20.0;
  double tol = 1e-10;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ensemble;
  InitialConfig initial;
  FilterConfig filter;
  AtomCase atom_case = AtomCase::a;
  std::size_t atoms = 10;
  std::uint64_t seed = 0;
  std::size_t trajectories = 1000;
  double kappa = 0.5;  // binomial
  std::vector<ScheduleConfig> schedules{ScheduleConfig{}};
  std::vector<double> noise_sigmas{0.0};
  std::size_t realizations = 200;
  std::size_t target_n = 10;
  double threshold = 0.99;
  ValidateConfig validate;
  OutputFormat format = OutputFormat::csv;
};

// Strict JSON parsing: unknown fields, wrong types and out-of-range values
// raise ConfigError naming the field. Missing fields take their defaults.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Fully resolved configuration, every field present.
nlohmann::json to_json(const ExperimentConfig& config);

// Named presets "fig1" (resonant trapping ensemble) and "fig2"
// (fixed vs incrementing schedules, with and without velocity noise).
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

struct OutputFile {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunReport {
  int exit_code = 0;
  std::vector<OutputFile> outputs;
  nlohmann::json summary;
  std::vector<std::string> warnings;
};

// Executes the experiment, writes its outputs and manifest.json into
// out_dir (created if needed). Deterministic for a fixed config and seed.
RunReport run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

std::string sha256_hex(std::string_view bytes);

}  // namespace cavityfock::cli
