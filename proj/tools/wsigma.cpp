// wsigma: batch driver for the weighted sigma_r library.
//
// Exit codes: 0 all checks passed, 1 a check failed (or a numerical step
// gave up), 2 bad command line or configuration.

#include "cli/commands.hpp"
#include "cli/config.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace wsigma;
using namespace wsigma::cli;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

int thread_count_from(const std::optional<int>& flag) {
  if (flag) {
    if (*flag < 1) throw ConfigError("--threads must be at least 1");
    return *flag;
  }
  if (const char* env = std::getenv("WSIGMA_THREADS"); env && *env) {
    const std::string s(env);
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1)
      throw ConfigError("WSIGMA_THREADS='" + s + "': expected a positive integer");
    return v;
  }
  return 1;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    cfg = RunConfig::from_ini(in, path);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("--set expects section.key=value, got '" + o + "'");
    cfg.set(o.substr(0, dot), o.substr(dot + 1, eq - dot - 1), o.substr(eq + 1));
  }
  return cfg;
}

void print_defaults() {
  std::string section;
  for (const auto& k : config_schema()) {
    if (k.section != section) {
      std::cout << (section.empty() ? "" : "\n") << "[" << k.section << "]\n";
      section = k.section;
    }
    std::cout << "# " << k.doc << "\n" << k.key << " = " << k.default_value << "\n";
  }
}

void summarize(const std::string& command, const CommandResult& res) {
  for (const auto& c : res.report["checks"]) {
    std::cerr << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>();
    if (c.contains("value"))
      std::cerr << "  " << format_double(c["value"].get<double>()) << " <= " << format_double(c["tolerance"].get<double>());
    if (c.contains("detail")) std::cerr << "  (" << c["detail"].get<std::string>() << ")";
    std::cerr << "\n";
  }
  std::cerr << command << ": " << (res.passed() ? "all checks passed" : std::to_string(res.failures.size()) + " check(s) failed")
            << "\n";
}

void emit(const std::string& command, const CommandResult& res, const std::string& out_dir, bool json, bool csv) {
  namespace fs = std::filesystem;
  const std::string text = res.report.dump(2) + "\n";
  if (out_dir.empty()) {
    if (json) std::cout << text;
    else if (csv && !res.tables.empty()) std::cout << res.tables.front().second.str();
    return;
  }
  const fs::path dir(out_dir);
  if (json) write_atomic(dir / (command + ".json"), text);
  if (csv)
    for (const auto& [name, table] : res.tables) write_atomic(dir / (command + "_" + name + ".csv"), table.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wsigma: weighted sigma_r curvature checks"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool want_json = false, want_csv = false;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "directory for report files (default: JSON on stdout)");
  app.add_option("--seed", seed, "seed for randomized identity sweeps");
  app.add_option("--threads", threads, "worker threads (default: WSIGMA_THREADS or 1)");
  app.add_flag("--json", want_json, "write the JSON report");
  app.add_flag("--csv", want_csv, "write the CSV tables");
  app.add_option("--set", overrides, "override a config value: section.key=value (repeatable)");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"identities", "randomized algebraic identity suites"},
      {"analyze", "tabulate integrals of sigma_r, weighted sigma_r, trace T_r and F for a fixture"},
      {"variation", "analytic first variation against finite differences"},
      {"minimality", "Euler-Lagrange residuals, structural identities and the sphere-form adjudication"},
      {"flow", "radial sphere flow or radial-graph normal flow"},
      {"defaults", "print every configuration key with its default"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (command == "defaults") {
    print_defaults();
    return 0;
  }

  try {
    const RunConfig cfg = load_config(config_path, overrides);
    set_thread_count(thread_count_from(threads));
    if (out_dir.empty()) out_dir = cfg.str("output.dir");
    bool json = want_json, csv = want_csv;
    if (!json && !csv) {
      const std::string fmt = cfg.choice("output.format", {"json", "csv", "both"});
      json = fmt != "csv";
      csv = fmt != "json";
    }
    const std::uint64_t run_seed = seed ? *seed : cfg.seed("run.seed");

    CommandResult res;
    if (command == "identities") res = cmd_identities(cfg, run_seed);
    else if (command == "analyze") res = cmd_analyze(cfg);
    else if (command == "variation") res = cmd_variation(cfg);
    else if (command == "minimality") res = cmd_minimality(cfg);
    else res = cmd_flow(cfg);

    summarize(command, res);
    emit(command, res, out_dir, json, csv);
    return res.passed() ? 0 : kExitFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ExpressionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
