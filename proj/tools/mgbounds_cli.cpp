#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "mgbounds/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::string seed;
  std::string dense_cap;
  std::string threads;
  bool dump_split = false;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--format", o.format, "csv, structured or both")
      ->check(CLI::IsMember({"csv", "structured", "both"}));
  sub->add_option("--seed", o.seed, "base RNG seed")->check(CLI::NonNegativeNumber);
  sub->add_option("--dense-cap", o.dense_cap, "largest dimension for dense analysis")
      ->check(CLI::PositiveNumber);
  sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--dump-split", o.dump_split, "write the C/F split of every prolongation");
  sub->add_option("--set", o.sets, "override a config field, e.g. multigrid.gamma=2");
}

std::vector<std::string> overrides(const Options& o) {
  std::vector<std::string> out = o.sets;
  if (!o.out.empty()) out.push_back("output.dir=\"" + o.out + "\"");
  if (!o.format.empty()) out.push_back("output.format=\"" + o.format + "\"");
  if (!o.seed.empty()) out.push_back("seed=" + o.seed);
  if (!o.dense_cap.empty()) out.push_back("dense_cap=" + o.dense_cap);
  if (!o.threads.empty()) out.push_back("threads=" + o.threads);
  if (o.dump_split) out.push_back("output.dump_split=true");
  return out;
}

int report(const std::vector<mgb::ReportRow>& rows, const mgb::ExperimentConfig& cfg,
           const std::string& stem) {
  const auto files = mgb::emit(rows, cfg.output.format, cfg.output.dir,
                               cfg.output.stem.empty() ? stem : cfg.output.stem);
  int failed = 0;
  for (const auto& r : rows) {
    if (r.passed()) continue;
    ++failed;
    std::cerr << "FAILED " << r.instance;
    if (!r.error.empty()) std::cerr << ": " << r.error;
    for (const auto& c : r.failed_checks()) std::cerr << " [" << c << "]";
    std::cerr << "\n";
  }
  std::cout << rows.size() << " rows, " << failed << " failed\n";
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-grid and multigrid convergence bounds"};
  app.require_subcommand(1);
  Options opts;
  struct Command {
    const char* name;
    const char* help;
    std::vector<mgb::ReportRow> (*run)(const mgb::ExperimentConfig&);
  };
  const std::vector<Command> commands{
      {"twogrid", "bounds for every problem x smoother x coarse instance", mgb::run_twogrid},
      {"multigrid", "per-level factors and multigrid bounds", mgb::run_multigrid},
      {"sweep", "alpha sweep plus randomized two-grid instances", mgb::run_sweep},
      {"selftest", "fixed battery of checks", mgb::run_selftest},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, opts);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const auto ov = overrides(opts);
      const auto cfg = opts.config.empty() ? mgb::parse_config("", ov)
                                           : mgb::load_config(opts.config, ov);
      return report(commands[i].run(cfg), cfg, commands[i].name);
    }
  } catch (const mgb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
