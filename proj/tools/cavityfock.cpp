// Command-line front end: `cavityfock <subcommand> [--config PATH] [--seed N]
// [--out PATH] [--format csv|json]`.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cavityfock/experiment.hpp"

namespace cli = cavityfock::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  bool print_config = false;
};

void add_common_flags(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  sub->add_option("--seed", flags.seed, "random seed (overrides the config)");
  sub->add_option("--out", flags.out, "output directory (default: $CAVITYFOCK_OUT_DIR or .)");
  sub->add_option("--format", flags.format, "tabular output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--print-config", flags.print_config, "print the resolved configuration and exit");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cli::ConfigError("", fmt::format("cannot read config file '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::filesystem::path output_dir(const CommonFlags& flags) {
  if (!flags.out.empty()) return flags.out;
  if (const char* env = std::getenv("CAVITYFOCK_OUT_DIR"); env && *env) return env;
  return ".";
}

cli::ExperimentConfig resolve(cli::ExperimentKind kind, const std::optional<std::string>& preset_name,
                              const CommonFlags& flags) {
  cli::ExperimentConfig config;
  if (preset_name) {
    config = cli::preset(*preset_name);
  } else if (!flags.config_path.empty()) {
    config = cli::parse_config(read_file(flags.config_path));
    if (config.kind != kind)
      throw cli::ConfigError("kind", fmt::format("config kind '{}' does not match subcommand '{}'",
                                                 cli::to_string(config.kind), cli::to_string(kind)));
  } else {
    config.kind = kind;
  }
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.format.empty()) config.format = flags.format == "json" ? cli::OutputFormat::json : cli::OutputFormat::csv;
  // Overrides go through the same validation as file input.
  return cli::config_from_json(cli::to_json(config));
}

int execute(const cli::ExperimentConfig& config, const CommonFlags& flags) {
  if (flags.print_config) {
    std::cout << cli::to_json(config).dump(2) << '\n';
    return 0;
  }
  const auto dir = output_dir(flags);
  const cli::RunReport report = cli::run(config, dir);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : report.outputs) std::cout << (dir / f.name).string() << "  " << f.sha256 << '\n';
  std::cout << (dir / "manifest.json").string() << '\n';
  std::cout << report.summary.dump() << '\n';
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity field photon statistics under sequences of passing atoms"};
  app.require_subcommand(1);

  const std::pair<const char*, cli::ExperimentKind> commands[] = {
      {"filter", cli::ExperimentKind::filter_dump},
      {"ensemble", cli::ExperimentKind::ensemble},
      {"trajectories", cli::ExperimentKind::trajectories},
      {"brute-force", cli::ExperimentKind::brute_force},
      {"binomial", cli::ExperimentKind::binomial},
      {"trap-schedule", cli::ExperimentKind::trap_schedule},
      {"validate", cli::ExperimentKind::validate_oracle},
  };
  const char* descriptions[] = {
      "tabulate a filter function",
      "nonselective ensemble evolution",
      "sample recorded outcome trajectories",
      "ensemble by enumerating every outcome sequence",
      "closed-form binomial photon distribution",
      "trapping-state schedules with optional velocity noise",
      "compare analytic filters against direct integration",
  };

  CommonFlags flags;
  std::optional<cli::ExperimentKind> chosen;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, descriptions[i]);
    add_common_flags(sub, flags);
    sub->callback([&chosen, kind = commands[i].second] { chosen = kind; });
  }

  std::string preset_name;
  CLI::App* preset_cmd = app.add_subcommand("preset", "run a named preset (fig1, fig2)");
  preset_cmd->add_option("name", preset_name, "preset name")->required();
  add_common_flags(preset_cmd, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    cli::ExperimentConfig config;
    if (preset_cmd->parsed()) {
      if (!flags.config_path.empty()) throw cli::ConfigError("", "preset does not take --config");
      config = resolve(cli::ExperimentKind::ensemble, preset_name, flags);
    } else {
      config = resolve(*chosen, std::nullopt, flags);
    }
    return execute(config, flags);
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
