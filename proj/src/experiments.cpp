#include "mgbounds/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/SparseCholesky>

namespace mgb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Runs fn(i) for i in [0, n) on a pool; output order is the index order.
template <typename Fn>
std::vector<ReportRow> parallel_rows(std::size_t n, int threads, Fn fn) {
  std::vector<std::vector<ReportRow>> out(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
  };
  const auto count = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<ReportRow> rows;
  for (auto& v : out)
    for (auto& r : v) rows.push_back(std::move(r));
  return rows;
}

ReportRow error_row(const std::string& id, const std::exception& e) {
  ReportRow r;
  r.instance = id;
  r.case_id = "error";
  r.measured = 0.0;
  r.error = e.what();
  return r;
}

Cell optional_cell(const std::optional<double>& v, const char* missing = "inapplicable") {
  if (v) return *v;
  return std::string(missing);
}

std::string describe(const CoarseConfig& c) {
  switch (c.mode) {
    case CoarseMode::exact:
      return "exact";
    case CoarseMode::scale:
    case CoarseMode::identity_scale:
      return to_string(c.mode) + "(" + fmt(c.alpha) + ")";
    case CoarseMode::spd_noise:
    case CoarseMode::sparsify:
      return to_string(c.mode) + "(" + fmt(c.magnitude) + ")";
  }
  return "unknown";
}

std::string split_path(const ExperimentConfig& cfg, const std::string& stem, std::size_t i,
                       int level = -1) {
  std::string name = stem + "_" + std::to_string(i);
  if (level >= 0) name += "_level" + std::to_string(level);
  return (std::filesystem::path(cfg.output.dir) / (name + "_split.txt")).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir + ": " + ec.message());
}

}  // namespace

std::string describe(const ProblemConfig& p) {
  std::string s = to_string(p.kind) + "(";
  for (std::size_t i = 0; i < p.sizes.size(); ++i) s += (i ? "x" : "") + std::to_string(p.sizes[i]);
  if (p.kind == ProblemKind::random_spd) s += ";cond=" + fmt(p.cond) + ";seed=" + std::to_string(p.seed);
  return s + ")";
}

std::string describe(const SmootherSpec& s) {
  if (s.kind == SmootherKind::jacobi) return "jacobi(" + fmt(s.omega) + ")";
  return to_string(s.kind);
}

Prolongation make_transfer(const ModelProblem& p, const TransferConfig& t) {
  if (t.method == Coarsening::amg) {
    auto P = amg_direct_interp(p.matrix, t.strong_threshold);
    if (P.degenerate) throw PreconditionError("AMG coarsening produced no F-points");
    return P;
  }
  if (p.kind == ProblemKind::poisson2d) return geometric_interp_2d(p.grid_shape.at(0), p.grid_shape.at(1));
  return geometric_interp_1d(p.size());
}

TwoGridInstance random_twogrid_instance(std::uint64_t seed, CoarseMode mode, Index dense_cap) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(mode));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 4);

  ModelProblem problem;
  std::string label;
  switch (pick(rng)) {
    case 0:
      problem = poisson_1d(7);
      break;
    case 1:
      problem = poisson_1d(15);
      break;
    case 2:
      problem = poisson_1d(31);
      break;
    case 3:
      problem = poisson_2d(7, 7);
      break;
    default: {
      const Index n = 2 * std::uniform_int_distribution<Index>(4, 31)(rng) + 1;
      const double cond = std::pow(10.0, 1.0 + 2.0 * unit(rng));
      problem = random_spd(n, cond, rng());
      break;
    }
  }
  Prolongation P = problem.kind == ProblemKind::poisson2d
                       ? geometric_interp_2d(problem.grid_shape[0], problem.grid_shape[1])
                       : geometric_interp_1d(problem.size());

  SmootherPair smoother;
  if (unit(rng) < 0.5) {
    smoother = gauss_seidel(problem.matrix);
  } else {
    smoother = jacobi(problem.matrix, 0.3 + 0.7 * unit(rng));
    if (!smoother.a_convergent) smoother = gauss_seidel(problem.matrix);
  }

  CoarsePerturbation coarse;
  coarse.mode = mode;
  coarse.seed = rng();
  double param = 0.0;
  if (mode == CoarseMode::scale || mode == CoarseMode::identity_scale) {
    coarse.alpha = 0.5 + 1.5 * unit(rng);
    param = coarse.alpha;
  } else {
    coarse.magnitude = 0.05 + 0.45 * unit(rng);
    param = coarse.magnitude;
  }

  const Matrix A_c = galerkin(problem.matrix, P.P).dense();
  Matrix B_c = perturb_coarse(A_c, coarse);
  TwoGridInstance inst;
  inst.id = "random(" + to_string(mode) + ";seed=" + std::to_string(seed) + ")";
  inst.setup = make_setup(problem.matrix, std::move(smoother), std::move(P), std::move(B_c), dense_cap);
  inst.coarse = coarse;
  inst.param = param;
  return inst;
}

ReportRow evaluate_twogrid(const TwoGridInstance& inst, const AnalysisConfig& analysis) {
  const auto t0 = Clock::now();
  try {
    const auto& s = inst.setup;
    const auto ops = assemble(s);
    const auto q = compute_quantities(s, ops);
    BoundReport b = theorem32_bounds(q);
    b.measured = conv_factor(ops.E_ITG, s.A.dense(), s.dense_cap);

    ReportRow r;
    r.instance = inst.id;
    r.case_id = b.exact ? "exact" : to_string(b.case_id);
    r.measured = b.measured;
    r.param = inst.param;
    r.set("lower", b.lower);
    r.set("upper", b.upper);
    if (analysis.notay) r.set("notay", b.notay_upper);
    const ThetaBounds fs = fs_bounds(q);
    const ThetaBounds ifs = improved_fs_bounds(q);
    if (analysis.fs) r.set("fs", optional_cell(fs.factor));
    if (analysis.improved_fs) r.set("improved_fs", optional_cell(ifs.factor));
    double kappa = 0.0;
    if (analysis.kappa) {
      kappa = measured_kappa(ops, s.A.dense(), s.dense_cap);
      r.set("kappa", kappa);
      if (analysis.fs) r.set("fs_kappa", optional_cell(fs.cond));
      if (analysis.improved_fs) r.set("improved_fs_kappa", optional_cell(ifs.cond));
    }
    r.set("r1", q.r1);
    r.set("r2", q.r2);
    r.set("theta", q.theta);
    r.set("K_TG", q.K_TG);
    r.set("lambda_min_MA", q.lam_min_MA);
    r.set("lambda_max_MA", q.lam_max_MA);
    r.set("lambda_min_plus_MAPi", q.lam_min_plus_MAPi);
    r.set("n", double(s.size()));
    r.set("n_c", double(s.coarse_size()));

    r.check("sandwich", b.sandwich_holds(1e-9));
    if (analysis.notay) r.check("upper_le_notay", b.upper <= b.notay_upper + 1e-12);
    if (b.exact) {
      r.check("exact_collapse", std::abs(b.lower - b.measured) <= 1e-9 &&
                                    std::abs(b.upper - b.measured) <= 1e-9);
    }
    if (fs.factor && analysis.fs && analysis.improved_fs) {
      r.check("improved_le_fs",
              *ifs.factor <= *fs.factor + 1e-12 && *ifs.cond <= *fs.cond + 1e-12);
      if (analysis.kappa) r.check("kappa_le_improved", kappa <= *ifs.cond + 1e-9);
    }
    if (analysis.lemma31 && s.size() <= 200) {
      const auto direct = lemma31_identities(s.A.dense(), s.smoother.M_tilde, ops.Pi_A, s.dense_cap);
      const auto formula = lemma31_formula_values(q);
      r.check("lemma31", std::abs(direct.min_complement - formula.min_complement) <= 1e-9 &&
                             std::abs(direct.max_complement - formula.max_complement) <= 1e-9 &&
                             std::abs(direct.min_range - formula.min_range) <= 1e-9 &&
                             std::abs(direct.max_range - formula.max_range) <= 1e-9);
    }
    r.seconds = seconds_since(t0);
    return r;
  } catch (const std::exception& e) {
    auto r = error_row(inst.id, e);
    r.param = inst.param;
    r.seconds = seconds_since(t0);
    return r;
  }
}

std::vector<ReportRow> evaluate_multigrid(const std::string& id, const Hierarchy& h) {
  const auto t0 = Clock::now();
  const int L = h.L();
  std::vector<ReportRow> rows;

  if (h.level(L).size() > h.dense_cap) {
    ReportRow r;
    r.instance = id + "/level" + std::to_string(L);
    r.case_id = "estimate";
    r.measured = estimate_sigma_img(h, L);
    r.param = L;
    r.set("n", double(h.level(L).size()));
    r.set("note", std::string("power-iteration estimate; dense analysis skipped above the dense cap"));
    r.seconds = seconds_since(t0);
    rows.push_back(std::move(r));
    return rows;
  }

  const auto E = assemble_e_img_all(h, L);
  const auto q = level_quantities(h, E);
  const auto t42 = theorem42_bound(q);
  const bool exact_a0 = q.a0_lambda_min >= 1.0 - 1e-12;

  for (int k = 1; k <= L; ++k) {
    ReportRow r;
    r.instance = id + "/level" + std::to_string(k);
    r.case_id = "level";
    r.measured = q.sigma_img[k];
    r.param = k;
    r.set("lower", q.sigma_tg[k]);
    const auto t44 = theorem44_bound(q, k);
    r.set("upper", optional_cell(t44));
    r.set("n", double(h.level(k).size()));
    r.set("sigma_tg", q.sigma_tg[k]);
    r.set("K_tg", q.K_tg[k]);
    r.set("eps_k", q.eps_k[k]);
    r.set("x_gamma", q.nontrivial ? Cell(t42.x_gamma) : Cell(std::string("inapplicable")));

    r.check("sigma_img_ge_sigma_tg", q.sigma_img[k] >= q.sigma_tg[k] - 1e-9);
    if (k >= 2) {
      const double rec = q.sigma_tg[k] + std::pow(q.sigma_img[k - 1], h.gamma) *
                                             (1.0 - q.sigma_tg[k] - q.eps_k[k]);
      r.check("upper_recursion", q.sigma_img[k] <= rec + 1e-9);
    }
    if (t42.applicable) r.check("theorem42", q.sigma_img[k] <= t42.x_gamma + 1e-9);
    if (t44) r.check("theorem44", q.sigma_img[k] <= *t44 + 1e-9);

    // Procedure against matrix on random vectors.
    const Index n = h.level(k).size();
    std::mt19937_64 rng(static_cast<std::uint64_t>(k));
    std::normal_distribution<double> gauss;
    const Eigen::SimplicialLDLT<SparseMatrix> solver(h.level(k).A.sparse());
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Vector e(n), f(n);
      for (Index i = 0; i < n; ++i) e(i) = gauss(rng);
      for (Index i = 0; i < n; ++i) f(i) = gauss(rng);
      const Vector u = solver.solve(f);
      const Vector out = mg_cycle(h, k, f, u + e);
      const Vector expect = E[k] * e;
      worst = std::max(worst, (out - u - expect).norm() / std::max(expect.norm(), e.norm()));
    }
    r.set("cycle_rel_err", worst);
    r.check("cycle_matches_matrix", worst <= 1e-10);

    const Matrix Bc = implied_coarse(h, k, E);
    const auto& lv = h.level(k);
    const auto setup = make_setup(lv.A, *lv.smoother, *lv.P, Bc, h.dense_cap);
    const auto ops = assemble(setup);
    const double gap = max_abs(ops.E_ITG - E[k]);
    r.set("implied_coarse_gap", gap);
    r.check("implied_coarse", gap <= 1e-9);
    rows.push_back(std::move(r));
  }

  ReportRow a;
  a.instance = id + "/aggregate";
  a.case_id = "aggregate";
  a.measured = q.sigma_img[L];
  a.param = L;
  a.set("n", double(h.level(L).size()));
  a.set("gamma", double(h.gamma));
  a.set("sigma_L", q.sigma_L);
  a.set("eps_L", q.eps_L);
  a.set("delta_L", q.delta_L);
  a.set("a0_lambda_min", q.a0_lambda_min);
  if (q.nontrivial) {
    a.set("lower", q.sigma_tg[L]);
    const auto t44 = theorem44_bound(q, L);
    a.set("upper", optional_cell(t44));
    a.set("x_gamma", t42.x_gamma);
    a.set("theorem42_applicable", std::string(t42.applicable ? "yes" : "no"));
    const auto c43 = corollary43_bounds(q.sigma_L, q.eps_L);
    a.set("cor43_v", c43.v_bound);
    a.set("cor43_w", c43.w_bound);
    const auto c46 = corollary46_bounds(q.sigma_L, q.eps_L, q.delta_L, h.gamma, L);
    a.set("cor46", optional_cell(c46.general));
    a.set("new_v", c46.v_special);
    a.set("new_w", c46.w_special);
    if (h.gamma == 2) {
      const auto ex = existing_w_bound(q.sigma_L);
      a.set("existing", ex ? Cell(*ex) : Cell(std::string("Fail")));
    } else {
      a.set("existing", std::string("N/A"));
    }
    if (exact_a0 && (h.gamma == 1 || h.gamma == 2)) {
      const double nb = h.gamma == 1 ? c46.v_special : c46.w_special;
      a.check("measured_le_new", q.sigma_img[L] <= nb + 1e-9 && nb < 1.0);
    }
    if (t42.applicable) a.check("theorem42", t42.holds);
  } else {
    a.set("x_gamma", std::string("inapplicable"));
    a.set("note", std::string("trivial case: sigma_L >= 1 - eps_L"));
  }
  a.seconds = seconds_since(t0);
  rows.push_back(std::move(a));
  return rows;
}

std::vector<ReportRow> run_twogrid(const ExperimentConfig& cfg) {
  struct Job {
    std::size_t p, s, c;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < cfg.problems.size(); ++p)
    for (std::size_t s = 0; s < cfg.smoothers.size(); ++s)
      for (std::size_t c = 0; c < cfg.coarse.size(); ++c) jobs.push_back({p, s, c});
  if (cfg.output.dump_split) ensure_dir(cfg.output.dir);
  const std::string stem = cfg.output.stem.empty() ? "twogrid" : cfg.output.stem;

  return parallel_rows(jobs.size(), cfg.threads, [&](std::size_t i) {
    const Job& j = jobs[i];
    const auto& pc = cfg.problems[j.p];
    const auto& cc = cfg.coarse[j.c];
    const std::string id = describe(pc) + "/" + describe(cfg.smoothers[j.s]) + "/" + describe(cc);
    TwoGridInstance inst;
    try {
      const auto problem = make_problem(pc);
      auto P = make_transfer(problem, cfg.transfer);
      if (cfg.output.dump_split) write_split(split_path(cfg, stem, i), P);
      auto smoother = make_smoother(problem.matrix, cfg.smoothers[j.s]);
      const Matrix A_c = galerkin(problem.matrix, P.P).dense();
      CoarsePerturbation pert{cc.mode, cc.alpha, cc.magnitude, cfg.seed + i};
      Matrix B_c = perturb_coarse(A_c, pert);
      inst.id = id;
      inst.coarse = pert;
      inst.param = cc.mode == CoarseMode::spd_noise || cc.mode == CoarseMode::sparsify ? cc.magnitude
                                                                                       : cc.alpha;
      inst.setup = make_setup(problem.matrix, std::move(smoother), std::move(P), std::move(B_c),
                              cfg.dense_cap);
    } catch (const std::exception& e) {
      return std::vector<ReportRow>{error_row(id, e)};
    }
    return std::vector<ReportRow>{evaluate_twogrid(inst, cfg.analysis)};
  });
}

std::vector<ReportRow> run_multigrid(const ExperimentConfig& cfg) {
  struct Job {
    std::size_t p, s;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < cfg.problems.size(); ++p)
    for (std::size_t s = 0; s < cfg.smoothers.size(); ++s) jobs.push_back({p, s});
  if (cfg.output.dump_split) ensure_dir(cfg.output.dir);
  const std::string stem = cfg.output.stem.empty() ? "multigrid" : cfg.output.stem;
  const auto& mg = cfg.multigrid;

  return parallel_rows(jobs.size(), cfg.threads, [&](std::size_t i) {
    const Job& j = jobs[i];
    const std::string id = describe(cfg.problems[j.p]) + "/" + describe(cfg.smoothers[j.s]) +
                           "/L=" + std::to_string(mg.levels) + ";gamma=" + std::to_string(mg.gamma);
    try {
      const auto problem = make_problem(cfg.problems[j.p]);
      const auto h = build_hierarchy(problem, cfg.smoothers[j.s], cfg.transfer.method, mg.levels,
                                     mg.gamma, mg.a0, cfg.transfer.strong_threshold, cfg.dense_cap);
      if (cfg.output.dump_split) {
        for (int k = 1; k <= h.L(); ++k) write_split(split_path(cfg, stem, i, k), *h.level(k).P);
      }
      auto rows = evaluate_multigrid(id, h);
      for (const auto& w : h.warnings) rows.back().set("warning", w);
      return rows;
    } catch (const std::exception& e) {
      return std::vector<ReportRow>{error_row(id, e)};
    }
  });
}

std::vector<ReportRow> run_sweep(const ExperimentConfig& cfg) {
  struct Job {
    std::size_t p, s, a;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < cfg.problems.size(); ++p)
    for (std::size_t s = 0; s < cfg.smoothers.size(); ++s)
      for (std::size_t a = 0; a < cfg.sweep.alphas.size(); ++a) jobs.push_back({p, s, a});
  const std::size_t fixed = jobs.size();
  const std::size_t total = fixed + static_cast<std::size_t>(cfg.sweep.random_instances);
  static const CoarseMode kModes[] = {CoarseMode::scale, CoarseMode::spd_noise, CoarseMode::sparsify};

  return parallel_rows(total, cfg.threads, [&](std::size_t i) {
    if (i >= fixed) {
      const std::size_t r = i - fixed;
      const std::string id = "random" + std::to_string(r);
      try {
        auto inst = random_twogrid_instance(cfg.seed + r, kModes[r % 3], cfg.dense_cap);
        return std::vector<ReportRow>{evaluate_twogrid(inst, cfg.analysis)};
      } catch (const std::exception& e) {
        return std::vector<ReportRow>{error_row(id, e)};
      }
    }
    const Job& j = jobs[i];
    const double alpha = cfg.sweep.alphas[j.a];
    const std::string id = describe(cfg.problems[j.p]) + "/" + describe(cfg.smoothers[j.s]) +
                           "/alpha=" + fmt(alpha);
    try {
      const auto problem = make_problem(cfg.problems[j.p]);
      auto P = make_transfer(problem, cfg.transfer);
      auto smoother = make_smoother(problem.matrix, cfg.smoothers[j.s]);
      const Matrix A_c = galerkin(problem.matrix, P.P).dense();
      CoarsePerturbation pert{CoarseMode::scale, alpha, 0.0, cfg.seed};
      TwoGridInstance inst;
      inst.id = id;
      inst.coarse = pert;
      inst.param = alpha;
      inst.setup = make_setup(problem.matrix, std::move(smoother), std::move(P),
                              perturb_coarse(A_c, pert), cfg.dense_cap);
      return std::vector<ReportRow>{evaluate_twogrid(inst, cfg.analysis)};
    } catch (const std::exception& e) {
      return std::vector<ReportRow>{error_row(id, e)};
    }
  });
}

std::vector<ReportRow> run_selftest(const ExperimentConfig& cfg) {
  ExperimentConfig sweep;
  sweep.threads = cfg.threads;
  sweep.seed = cfg.seed;
  sweep.problems = {ProblemConfig{ProblemKind::poisson1d, {31}, 100.0, 0}};
  sweep.smoothers = {SmootherSpec{SmootherKind::gauss_seidel, 1.0}};
  sweep.sweep.random_instances = 30;
  auto rows = run_sweep(sweep);

  ExperimentConfig mg;
  mg.threads = cfg.threads;
  mg.problems = {ProblemConfig{ProblemKind::poisson2d, {15, 15}, 100.0, 0}};
  mg.smoothers = {SmootherSpec{SmootherKind::gauss_seidel, 1.0},
                  SmootherSpec{SmootherKind::jacobi, 0.5}};
  mg.multigrid.levels = 3;
  for (int gamma : {1, 2}) {
    mg.multigrid.gamma = gamma;
    auto more = run_multigrid(mg);
    rows.insert(rows.end(), more.begin(), more.end());
  }
  return rows;
}

}  // namespace mgb
