#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgbounds/multigrid.hpp"

namespace mgb {

struct ProblemConfig {
  ProblemKind kind = ProblemKind::poisson1d;
  /// {n} for poisson1d and random_spd, {nx, ny} for poisson2d.
  std::vector<Index> sizes{31};
  double cond = 100.0;  ///< random_spd only
  std::uint64_t seed = 0;
};

struct TransferConfig {
  Coarsening method = Coarsening::geometric;
  double strong_threshold = 0.25;
};

struct CoarseConfig {
  CoarseMode mode = CoarseMode::exact;
  double alpha = 1.0;
  double magnitude = 0.0;
};

struct MultigridConfig {
  int levels = 3;
  int gamma = 1;
  A0Spec a0;
};

struct SweepConfig {
  /// B_c = alpha A_c for each alpha, on every problem and smoother.
  std::vector<double> alphas{0.5, 0.8, 1.0, 1.25, 2.0, 1e8};
  /// Additional randomized instances.
  int random_instances = 0;
};

/// Which optional columns to compute.
struct AnalysisConfig {
  bool notay = true;
  bool fs = true;
  bool improved_fs = true;
  bool kappa = true;
  bool lemma31 = true;
};

enum class OutputFormat { csv, structured, both };

OutputFormat output_format_from_string(const std::string& s);

struct OutputConfig {
  std::string dir = ".";
  std::string stem;  ///< defaults to the subcommand name
  OutputFormat format = OutputFormat::csv;
  bool dump_split = false;
};

struct ExperimentConfig {
  std::vector<ProblemConfig> problems{ProblemConfig{}};
  std::vector<SmootherSpec> smoothers{SmootherSpec{}};
  TransferConfig transfer;
  std::vector<CoarseConfig> coarse{CoarseConfig{}};
  MultigridConfig multigrid;
  SweepConfig sweep;
  AnalysisConfig analysis;
  OutputConfig output;
  std::uint64_t seed = 0;
  Index dense_cap = kDefaultDenseCap;
  int threads = 1;
};

/// Parses a JSON document. `problem`, `smoother` and `coarse` take an object
/// or an array of objects; instances are their cartesian product. Each
/// override has the form "a.b.c=value" with value parsed as JSON, falling
/// back to a plain string. Throws ConfigError naming the offending field
/// (or line for syntax errors).
ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides = {});

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

ModelProblem make_problem(const ProblemConfig& p);

}  // namespace mgb
