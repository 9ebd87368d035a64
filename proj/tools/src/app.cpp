#include "removal/cli/app.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "removal/cli/commands.hpp"
#include "removal/chain.hpp"
#include "removal/independent.hpp"
#include "removal/random.hpp"

#ifndef REMOVAL_VERSION
#define REMOVAL_VERSION "unknown"
#endif

namespace removal::cli {

namespace {

const CommandEntry* find_command(const std::string& name) {
  for (const auto& c : commands()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

RunResult run(const RunOptions& options) {
  RunResult result;
  Report& rep = result.report;
  const Config& cfg = options.config;
  Context ctx{cfg, rep, kDefaultSeed, CaptureMode::kPractical, 0, 0, options.out_dir, {}, nullptr};

  auto fail = [&](int code, const std::string& kind, const std::string& what) {
    result.exit_code = code;
    result.message = kind + ": " + what;
    rep.section("");
    rep.add("status", kind);
    rep.add("error", what);
  };

  try {
    const std::string name = options.command.empty() ? cfg.string("command", "") : options.command;
    if (name.empty()) throw ConfigError("no command given (positional argument or config field 'command')");
    const CommandEntry* cmd = find_command(name);
    if (!cmd) throw ConfigError("unknown command '" + name + "'");

    ctx.seed = cfg.count("seed", kDefaultSeed);
    const std::string mode = cfg.string("mode", "practical");
    if (mode == "practical") ctx.mode = CaptureMode::kPractical;
    else if (mode == "faithful") ctx.mode = CaptureMode::kFaithful;
    else throw ConfigError(cfg.origin() + ": field 'mode': expected practical or faithful, got '" + mode + "'");
    ctx.cap_points = cfg.count("cap_points", ProductSpace::kDefaultPointCap);
    ctx.cap_mwis = cfg.count("cap_mwis", kDefaultMwisCap);
    if (options.out_dir) std::filesystem::create_directories(*options.out_dir);

    rep.add("tool", std::string("removal ") + REMOVAL_VERSION);
    rep.add("command", name);
    rep.add("rng", std::string(Rng::kName));
    rep.add("seed", ctx.seed);
    rep.add("config", nlohmann::ordered_json::parse(cfg.root().dump()));

    result.exit_code = cmd->run(ctx);
    rep.section("");
    if (result.exit_code == kExitOk) {
      rep.add("status", "ok");
    } else {
      const std::string kind = result.exit_code == kExitSoftFailure ? "soft-failure" : "invariant-failure";
      result.message = ctx.message.empty() ? kind : kind + ": " + ctx.message;
      rep.add("status", kind);
      if (!ctx.message.empty()) rep.add("error", ctx.message);
    }
  } catch (const ConfigError& e) {
    fail(kExitConfig, "config-error", e.what());
  } catch (const CapExceeded& e) {
    fail(kExitSoftFailure, "cap-exceeded", e.what());
  } catch (const InvariantViolation& e) {
    fail(kExitInvariant, "invariant-failure", e.what());
  } catch (const NumericalError& e) {
    fail(kExitInvariant, "numerical-failure", e.what());
  } catch (const DomainError& e) {
    fail(kExitConfig, "config-error", e.what());
  } catch (const DimensionError& e) {
    fail(kExitConfig, "config-error", e.what());
  } catch (const std::exception& e) {
    fail(kExitInvariant, "internal-error", e.what());
  }
  return result;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Desk-scale removal lemma experiments on product Markov chains"};
  app.set_version_flag("--version", std::string("removal ") + REMOVAL_VERSION);

  std::string command;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string mode;
  std::size_t cap_points = 0;
  std::size_t cap_mwis = 0;
  std::vector<std::string> sets;

  std::vector<std::string> names;
  std::string listing = "Commands:\n";
  for (const auto& c : commands()) {
    names.push_back(c.name);
    listing += "  " + c.name + std::string(c.name.size() < 22 ? 22 - c.name.size() : 1, ' ') + c.help + "\n";
  }
  app.footer(listing);
  app.add_option("command", command, "Command to run (or config field 'command')")->check(CLI::IsMember(names));
  auto* config_opt = app.add_option("--config", config_path, "JSON parameter file")->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out_dir, "Directory for report.txt, report.json and side files");
  auto* seed_opt = app.add_option("--seed", seed, "Seed of the single random generator");
  auto* mode_opt =
      app.add_option("--mode", mode, "Capture mode")->check(CLI::IsMember({"practical", "faithful"}));
  auto* points_opt = app.add_option("--cap-points", cap_points, "Largest |V|^n table")->check(CLI::PositiveNumber);
  auto* mwis_opt = app.add_option("--cap-mwis", cap_mwis, "Largest MWIS instance")->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "Override a config field: key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunOptions options;
  options.command = command;
  try {
    if (*config_opt) options.config = Config::from_file(config_path);
    for (const auto& s : sets) options.config.set(s);
    if (*seed_opt) options.config.set("seed", seed);
    if (*mode_opt) options.config.set("mode", mode);
    if (*points_opt) options.config.set("cap_points", cap_points);
    if (*mwis_opt) options.config.set("cap_mwis", cap_mwis);
  } catch (const ConfigError& e) {
    err << "config-error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (*out_opt) options.out_dir = out_dir;

  const auto t0 = std::chrono::steady_clock::now();
  RunResult r = run(options);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.report.set_timing(seconds);

  out << r.report.text();
  if (options.out_dir) {
    try {
      const std::filesystem::path dir(*options.out_dir);
      std::filesystem::create_directories(dir);
      write_text(dir / "report.txt", r.report.text());
      write_text(dir / "report.json", r.report.json());
      write_text(dir / "timing.json", "{\"seconds\": " + format_real(seconds) + "}\n");
    } catch (const std::exception& e) {
      err << "config-error: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  if (!r.message.empty()) err << r.message << "\n";
  err << "timing: " << format_real(seconds) << " s\n";
  return r.exit_code;
}

}  // namespace removal::cli
