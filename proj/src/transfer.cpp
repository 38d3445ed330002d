#include "mgbounds/transfer.hpp"

#include <algorithm>
#include <fstream>
#include <random>

namespace mgb {

std::string to_string(InterpMethod method) {
  switch (method) {
    case InterpMethod::geometric1d:
      return "geometric1d";
    case InterpMethod::geometric2d:
      return "geometric2d";
    case InterpMethod::amg_direct:
      return "amg_direct";
    case InterpMethod::custom:
      return "custom";
  }
  return "unknown";
}

std::string to_string(CoarseMode mode) {
  switch (mode) {
    case CoarseMode::exact:
      return "exact";
    case CoarseMode::scale:
      return "scale";
    case CoarseMode::spd_noise:
      return "spd_noise";
    case CoarseMode::sparsify:
      return "sparsify";
    case CoarseMode::identity_scale:
      return "identity_scale";
  }
  return "unknown";
}

CoarseMode coarse_mode_from_string(const std::string& s) {
  for (auto m : {CoarseMode::exact, CoarseMode::scale, CoarseMode::spd_noise,
                 CoarseMode::sparsify, CoarseMode::identity_scale}) {
    if (to_string(m) == s) return m;
  }
  throw PreconditionError("unknown coarse mode '" + s + "'");
}

namespace {

std::vector<Eigen::Triplet<double>> hat_triplets_1d(Index n) {
  std::vector<Eigen::Triplet<double>> t;
  const Index nc = (n - 1) / 2;
  for (Index j = 0; j < nc; ++j) {
    const Index c = 2 * j + 1;
    t.emplace_back(c - 1, j, 0.5);
    t.emplace_back(c, j, 1.0);
    t.emplace_back(c + 1, j, 0.5);
  }
  return t;
}

void require_odd(Index n, const char* what) {
  if (n < 3 || n % 2 == 0) {
    throw PreconditionError(std::string(what) + ": grid size " + std::to_string(n) +
                            " must be odd and >= 3 (use 2^k - 1 points)");
  }
}

}  // namespace

Prolongation geometric_interp_1d(Index n) {
  require_odd(n, "geometric_interp_1d");
  const Index nc = (n - 1) / 2;
  const auto t = hat_triplets_1d(n);
  SparseMatrix P(n, nc);
  P.setFromTriplets(t.begin(), t.end());
  Prolongation out;
  out.P = Operator(std::move(P));
  out.method = InterpMethod::geometric1d;
  out.coarse_marker.assign(n, 0);
  for (Index j = 0; j < nc; ++j) out.coarse_marker[2 * j + 1] = 1;
  out.coarse_grid = {nc};
  return out;
}

Prolongation geometric_interp_2d(Index nx, Index ny) {
  require_odd(nx, "geometric_interp_2d");
  require_odd(ny, "geometric_interp_2d");
  const Index ncx = (nx - 1) / 2;
  const Index ncy = (ny - 1) / 2;
  const auto tx = hat_triplets_1d(nx);
  const auto ty = hat_triplets_1d(ny);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(tx.size() * ty.size());
  for (const auto& a : ty) {
    for (const auto& b : tx) {
      t.emplace_back(a.row() * nx + b.row(), a.col() * ncx + b.col(),
                     a.value() * b.value());
    }
  }
  SparseMatrix P(nx * ny, ncx * ncy);
  P.setFromTriplets(t.begin(), t.end());
  Prolongation out;
  out.P = Operator(std::move(P));
  out.method = InterpMethod::geometric2d;
  out.coarse_marker.assign(nx * ny, 0);
  for (Index jy = 0; jy < ncy; ++jy)
    for (Index jx = 0; jx < ncx; ++jx)
      out.coarse_marker[(2 * jy + 1) * nx + (2 * jx + 1)] = 1;
  out.coarse_grid = {ncx, ncy};
  return out;
}

Prolongation amg_direct_interp(const Operator& A, double strong_threshold) {
  if (!A.square()) throw DimensionError("amg_direct_interp: A must be square");
  if (!(strong_threshold > 0.0 && strong_threshold <= 1.0)) {
    throw PreconditionError("amg_direct_interp: strong threshold must lie in (0, 1]");
  }
  const Index n = A.rows();
  // Row-major copy for row access.
  const Eigen::SparseMatrix<double, Eigen::RowMajor> R = A.sparse();

  // strong[i]: points i strongly depends on; influences[j]: points that
  // strongly depend on j.
  std::vector<std::vector<Index>> strong(n), influences(n);
  for (Index i = 0; i < n; ++i) {
    double max_neg = 0.0;
    for (decltype(R)::InnerIterator it(R, i); it; ++it)
      if (it.col() != i) max_neg = std::max(max_neg, -it.value());
    if (max_neg <= 0.0) continue;
    for (decltype(R)::InnerIterator it(R, i); it; ++it) {
      if (it.col() != i && -it.value() >= strong_threshold * max_neg) {
        strong[i].push_back(it.col());
        influences[it.col()].push_back(i);
      }
    }
  }

  enum : int { undecided = -1, fine = 0, coarse = 1 };
  std::vector<int> status(n, undecided);
  std::vector<Index> measure(n);
  for (Index i = 0; i < n; ++i) measure[i] = Index(influences[i].size());

  Index remaining = n;
  while (remaining > 0) {
    Index pick = -1;
    for (Index i = 0; i < n; ++i) {
      if (status[i] == undecided && (pick < 0 || measure[i] > measure[pick])) pick = i;
    }
    status[pick] = coarse;
    --remaining;
    for (Index j : influences[pick]) {
      if (status[j] != undecided) continue;
      status[j] = fine;
      --remaining;
      for (Index k : strong[j])
        if (status[k] == undecided) ++measure[k];
    }
    for (Index k : strong[pick])
      if (status[k] == undecided) --measure[k];
  }

  // F-points without a strong C-neighbour are promoted.
  for (Index i = 0; i < n; ++i) {
    if (status[i] != fine) continue;
    const bool has_c = std::any_of(strong[i].begin(), strong[i].end(),
                                   [&](Index j) { return status[j] == coarse; });
    if (!has_c) status[i] = coarse;
  }

  std::vector<Index> coarse_index(n, -1);
  Index nc = 0;
  for (Index i = 0; i < n; ++i)
    if (status[i] == coarse) coarse_index[i] = nc++;
  if (nc == 0) throw PreconditionError("amg_direct_interp: empty coarse set");

  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i < n; ++i) {
    if (status[i] == coarse) {
      t.emplace_back(i, coarse_index[i], 1.0);
      continue;
    }
    double diag = 0.0;
    double neg_all = 0.0;
    for (decltype(R)::InnerIterator it(R, i); it; ++it) {
      if (it.col() == i) {
        diag += it.value();
      } else if (it.value() > 0.0) {
        diag += it.value();
      } else {
        neg_all += it.value();
      }
    }
    double neg_c = 0.0;
    for (Index j : strong[i])
      if (status[j] == coarse) neg_c += std::min(A.dense()(i, j), 0.0);
    const double scale = neg_all / neg_c;
    for (Index j : strong[i]) {
      if (status[j] != coarse) continue;
      t.emplace_back(i, coarse_index[j], -(A.dense()(i, j) / diag) * scale);
    }
  }
  SparseMatrix P(n, nc);
  P.setFromTriplets(t.begin(), t.end());

  Prolongation out;
  out.P = Operator(std::move(P));
  out.method = InterpMethod::amg_direct;
  out.coarse_marker.resize(n);
  for (Index i = 0; i < n; ++i) out.coarse_marker[i] = status[i] == coarse ? 1 : 0;
  out.coarse_grid = {nc};
  out.degenerate = nc == n;
  return out;
}

Prolongation make_prolongation(const Operator& P) {
  Prolongation out;
  out.P = P;
  out.method = InterpMethod::custom;
  out.coarse_grid = {P.cols()};
  out.degenerate = P.cols() >= P.rows();
  return out;
}

Operator galerkin(const Operator& A, const Operator& P) {
  if (!A.square() || A.cols() != P.rows()) {
    throw DimensionError("galerkin: dimensions of A and P do not conform");
  }
  SparseMatrix Ac = SparseMatrix(P.sparse().transpose()) * (A.sparse() * P.sparse());
  Ac.prune(0.0);
  Operator out(std::move(Ac));
  cholesky(out.dense(), "galerkin (P rank deficient?)");
  return out;
}

std::pair<double, double> singular_value_range(const Operator& P) {
  const Matrix G = P.dense().transpose() * P.dense();
  const auto spec = sym_eig(sym(G));
  return {std::sqrt(std::max(spec.min(), 0.0)), std::sqrt(spec.max())};
}

Matrix perturb_coarse(const Matrix& A_c, const CoarsePerturbation& spec) {
  const Index n = A_c.rows();
  cholesky(A_c, "perturb_coarse(A_c)");
  Matrix B;
  switch (spec.mode) {
    case CoarseMode::exact:
      B = A_c;
      break;
    case CoarseMode::scale:
      if (!(spec.alpha > 0.0)) throw PreconditionError("perturb_coarse: alpha must be > 0");
      B = spec.alpha * A_c;
      break;
    case CoarseMode::identity_scale:
      if (!(spec.alpha > 0.0)) throw PreconditionError("perturb_coarse: alpha must be > 0");
      B = spec.alpha * identity(n);
      break;
    case CoarseMode::spd_noise: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(double(n)));
      Matrix W(n, n);
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) W(i, j) = gauss(rng);
      B = A_c + spec.magnitude * max_abs(A_c) * (W.transpose() * W);
      break;
    }
    case CoarseMode::sparsify: {
      const double cut = spec.magnitude * max_abs(A_c);
      B = A_c;
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
          if (i != j && std::abs(B(i, j)) < cut) B(i, j) = 0.0;
      const auto eb = sym_eig(B);
      const double lam_max_ac = sym_eig(A_c).max();
      if (!(eb.min() > 1e-12 * eb.max())) {
        B += (std::abs(eb.min()) + 0.01 * lam_max_ac) * identity(n);
      }
      break;
    }
  }
  B = sym(B);
  cholesky(B, "perturb_coarse(B_c)");
  return B;
}

void write_split(std::ostream& os, const Prolongation& P) {
  for (int m : P.coarse_marker) os << m << '\n';
}

void write_split(const std::string& path, const Prolongation& P) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_split(os, P);
}

}  // namespace mgb
