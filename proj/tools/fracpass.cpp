#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "fracpass/commands.hpp"
#include "fracpass/config.hpp"
#include "fracpass/version.hpp"

namespace {

/// --threads wins; otherwise FRACPASS_THREADS; otherwise 1.
int resolve_threads(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  const char* env = std::getenv("FRACPASS_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || v < 1)
    throw fracpass::ConfigError(std::string("FRACPASS_THREADS: expected a positive integer, got '") +
                                env + "'");
  return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracpass: nonlocal critical-growth solver and estimate verifier"};
  app.set_version_flag("--version", std::string(fracpass::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format = "json";
  int threads = 0;  // 0: fall back to FRACPASS_THREADS, then 1

  for (const std::string& name : fracpass::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory for reports and fields")->required();
    sub->add_option("--format", format, "report format: json or csv (json is always written)")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", threads, "worker threads for the all-pairs seminorm route")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    const fracpass::RunConfig config = fracpass::parse_config(config_path);
    return fracpass::run_command(command, config, out_dir, format, resolve_threads(threads));
  } catch (const fracpass::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fracpass::NumericsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
