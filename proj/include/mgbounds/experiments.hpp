#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgbounds/bounds.hpp"
#include "mgbounds/config.hpp"
#include "mgbounds/report.hpp"

namespace mgb {

struct TwoGridInstance {
  std::string id;
  TwoGridSetup setup;
  CoarsePerturbation coarse;
  double param = 0.0;
};

/// Deterministic random two-grid instance: a Poisson or random SPD problem
/// with geometric P, Gauss-Seidel or weighted Jacobi, and B_c from `mode`
/// (scale: alpha in [0.5, 2]; spd_noise / sparsify: magnitude in [0.05, 0.5]).
TwoGridInstance random_twogrid_instance(std::uint64_t seed, CoarseMode mode,
                                        Index dense_cap = kDefaultDenseCap);

std::string describe(const ProblemConfig& p);
std::string describe(const SmootherSpec& s);

Prolongation make_transfer(const ModelProblem& p, const TransferConfig& t);

/// One row with every two-grid bound and its checks. Library errors are
/// caught and stored in the row.
ReportRow evaluate_twogrid(const TwoGridInstance& inst, const AnalysisConfig& analysis = {});

/// One row per level plus an aggregate row.
std::vector<ReportRow> evaluate_multigrid(const std::string& id, const Hierarchy& h);

std::vector<ReportRow> run_twogrid(const ExperimentConfig& cfg);
std::vector<ReportRow> run_multigrid(const ExperimentConfig& cfg);
std::vector<ReportRow> run_sweep(const ExperimentConfig& cfg);
/// Fixed battery independent of the problem lists in cfg.
std::vector<ReportRow> run_selftest(const ExperimentConfig& cfg);

}  // namespace mgb
