#include "qdos/doscli/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdos/common/errors.hpp"
#include "qdos/common/parallel.hpp"
#include "qdos/doscli/config.hpp"
#include "qdos/doscli/outputs.hpp"
#include "qdos/doscli/pipeline.hpp"

namespace qdos::doscli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string positional;
  std::string out;
  std::string stage;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned workers = 0;
  bool validate_only = false;
};

std::string out_root() {
  const char* env = std::getenv("DOSCLI_OUT_ROOT");
  return env && *env ? env : "doscli_out";
}

std::string output_dir(const Options& o, const ExperimentConfig& cfg) {
  if (!o.out.empty()) return o.out;
  if (!cfg.output_dir.empty()) {
    const fs::path p(cfg.output_dir);
    return p.is_absolute() ? p.string() : (fs::path(out_root()) / p).string();
  }
  const std::string stem = !cfg.name.empty() ? cfg.name : fs::path(o.config).stem().string();
  return (fs::path(out_root()) / stem).string();
}

ExperimentConfig load(Options& o) {
  if (o.config.empty()) o.config = o.positional;
  if (o.config.empty()) throw ValidationError("no config given (use --config or a positional path)");
  ExperimentConfig cfg = load_config(o.config);
  if (o.seed_set) cfg.seed = o.seed;
  return cfg;
}

int compute(const std::string& command, Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load(o);
  const std::string hash = cfg.hash();
  if (o.validate_only) {
    out << json{{"status", "ok"}, {"command", command}, {"validate_only", true}, {"config_hash", hash}}.dump() << "\n";
    return kExitOk;
  }
  std::vector<Stage> stages;
  if (command == "run") {
    if (o.stage.empty() || o.stage == "all") {
      stages = default_stages(cfg);
    } else {
      stages.push_back(parse_stage(o.stage));
    }
  } else {
    stages.push_back(parse_stage(command));
  }
  const std::string dir = output_dir(o, cfg);
  const unsigned workers = o.workers == 0 ? default_workers() : o.workers;

  std::vector<StageOutput> results;
  const InputReader disk = disk_reader(dir);
  // stages of this invocation read their upstream files from memory
  const InputReader reader = [&](const std::string& name) {
    for (const auto& r : results)
      for (const auto& a : r.artifacts)
        if (a.name == name) return a.content;
    return disk(name);
  };
  for (Stage s : stages) {
    const auto t0 = std::chrono::steady_clock::now();
    StageContext ctx{cfg, hash, workers, reader};
    Artifacts a = run_stage(s, ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back({{stage_name(s), wall, workers}, std::move(a)});
  }
  commit_outputs(dir, hash, cfg.seed, results);

  json files = json::array();
  for (const auto& r : results)
    for (const auto& a : r.artifacts) files.push_back(a.name);
  out << json{{"status", "ok"}, {"command", command}, {"config_hash", hash}, {"out", dir}, {"files", files}}.dump()
      << "\n";
  return kExitOk;
}

int validate(Options& o, std::ostream& out, std::ostream& err) {
  std::optional<std::string> expected;
  std::string dir = o.out;
  if (!o.config.empty() || !o.positional.empty()) {
    const ExperimentConfig cfg = load(o);
    expected = cfg.hash();
    if (dir.empty()) dir = output_dir(o, cfg);
  }
  if (dir.empty()) throw ValidationError("validate needs --out or a config");
  const DriftReport r = validate_outputs(dir, expected);
  const json j{{"status", r.ok() ? "ok" : "drift"},
               {"command", "validate"},
               {"out", dir},
               {"config_hash", r.config_hash},
               {"files_checked", r.n_files},
               {"problems", r.problems}};
  (r.ok() ? out : err) << j.dump() << "\n";
  return r.ok() ? kExitOk : kExitDrift;
}

void report(std::ostream& err, const std::string& command, const char* kind, const std::string& message) {
  err << json{{"status", "error"}, {"command", command}, {"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Density-of-states experiment pipeline", "doscli"};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"run", "run the configured pipeline"},
      {"spectrum", "dump the exact eigenvalues"},
      {"fdos", "estimate the FDOS signal"},
      {"reconstruct", "windowed DOS from stored FDOS signals"},
      {"thermo", "thermodynamic curves from stored DOS estimates"},
      {"noise-sweep", "depolarizing error-rate sweep of the window error"},
      {"vardyn", "variational recompilation and its FDOS"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config_path", o.positional, "config file");
    sub->add_option("--config", o.config, "config file");
    sub->add_option("--seed", o.seed, "master seed (overrides the config)")->each([&](const std::string&) {
      o.seed_set = true;
    });
    sub->add_option("--workers", o.workers, "worker threads (default: all cores)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_flag("--validate-only", o.validate_only, "validate the config and exit");
    if (name == "run") sub->add_option("--stage", o.stage, "run a single stage");
  }
  CLI::App* val = app.add_subcommand("validate", "check outputs against their manifest");
  val->add_option("config_path", o.positional, "config file");
  val->add_option("--config", o.config, "config file");
  val->add_option("--out", o.out, "output directory");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report(err, "", "UsageError", e.what());
    return kExitInvalid;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "validate") return validate(o, out, err);
    return compute(command, o, out);
  } catch (const ValidationError& e) {
    report(err, command, "ValidationError", e.what());
    return kExitInvalid;
  } catch (const SpecError& e) {
    report(err, command, "SpecError", e.what());
    return kExitInvalid;
  } catch (const DomainError& e) {
    report(err, command, "DomainError", e.what());
    return kExitInvalid;
  } catch (const DimensionError& e) {
    report(err, command, "DimensionError", e.what());
    return kExitInvalid;
  } catch (const FormatError& e) {
    report(err, command, "FormatError", e.what());
    return kExitFormat;
  } catch (const std::exception& e) {
    report(err, command, "Error", e.what());
    return kExitFailure;
  }
}

}  // namespace qdos::doscli
