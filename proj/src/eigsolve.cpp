#include "hrsos/eigsolve.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <new>
#include <random>
#include <utility>

#include <Eigen/SparseCholesky>

namespace hrsos {

std::string to_string(SolverPath p) {
  switch (p) {
    case SolverPath::Auto: return "auto";
    case SolverPath::Dense: return "dense";
    case SolverPath::Sparse: return "sparse";
    case SolverPath::Lobpcg: return "lobpcg";
  }
  return "auto";
}

SolverPath solver_path_from_string(const std::string& s) {
  if (s == "auto") return SolverPath::Auto;
  if (s == "dense") return SolverPath::Dense;
  if (s == "sparse") return SolverPath::Sparse;
  if (s == "lobpcg") return SolverPath::Lobpcg;
  throw Error("unknown solver mode '" + s + "' (expected dense, sparse, lobpcg or auto)");
}

Eigen::VectorXd matvec(const SparseSymMatrix& a, const Eigen::VectorXd& v) {
  if (v.size() != a.dim())
    throw Error("matvec: vector length " + std::to_string(v.size()) + " != matrix dimension " + std::to_string(a.dim()));
  return a.upper().selfadjointView<Eigen::Upper>() * v;
}

namespace {

void check_problem(const PencilProblem& prob) {
  if (!prob.a) throw Error("pencil: missing A");
  if (prob.b && prob.b->dim() != prob.a->dim()) throw Error("pencil: A and B differ in dimension");
  if (prob.b && !(prob.b->basis() == prob.a->basis())) throw Error("pencil: A and B live on different bases");
  if (!(prob.tol > 0)) throw Error("pencil: tolerance must be positive");
  if (prob.a->dim() == 0) throw Error("pencil: empty matrices");
}

double a_norm_or_one(double f) { return f > 0 ? f : 1.0; }

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

// Fills lambda, residual and error bound from a fresh evaluation of the pencil at psi.
void finalize(EigResult& r, const PencilOperators& ops, Eigen::VectorXd psi) {
  Eigen::VectorXd bpsi = ops.apply_b(psi);
  const double bn = std::sqrt(psi.dot(bpsi));
  psi /= bn;
  bpsi /= bn;
  const Eigen::VectorXd apsi = ops.apply_a(psi);
  r.lambda_min = psi.dot(apsi) / psi.dot(bpsi);
  const Eigen::VectorXd res = apsi - r.lambda_min * bpsi;
  r.residual = res.norm() / (a_norm_or_one(ops.a_norm) * psi.norm());
  if (ops.solve_b) r.error_bound = std::sqrt(std::max(0.0, res.dot(ops.solve_b(res))));
  r.eigenvector = std::move(psi);
}

// Solves (T - sigma I) x = b for symmetric tridiagonal T with partial pivoting;
// exact zero pivots are replaced by `tiny`.
Eigen::VectorXd tridiagonal_solve(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double sigma,
                                  Eigen::VectorXd b, double tiny) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd d = diag.array() - sigma, dl = off, du = off, du2 = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 2, 0));
  auto nonzero = [tiny](double v) { return v == 0.0 ? tiny : v; };
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      d[i] = nonzero(d[i]);
      const double f = dl[i] / d[i];
      d[i + 1] -= f * du[i];
      b[i + 1] -= f * b[i];
    } else {
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      const double t = d[i + 1];
      d[i + 1] = du[i] - f * t;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
      du[i] = t;
      std::swap(b[i], b[i + 1]);
      b[i + 1] -= f * b[i];
    }
  }
  d[n - 1] = nonzero(d[n - 1]);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double v = b[i];
    if (i + 1 < n) v -= du[i] * x[i + 1];
    if (i + 2 < n) v -= du2[i] * x[i + 2];
    x[i] = v / d[i];
  }
  return x;
}

// Lowest eigenvector of a dense symmetric matrix: eigenvalues of the tridiagonal
// form, then inverse iteration on it (much cheaper than the full eigenvector set).
Eigen::VectorXd lowest_eigenvector(const Eigen::MatrixXd& c) {
  const Eigen::Index n = c.rows();
  if (n == 1) return Eigen::VectorXd::Ones(1);
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(c);
  const Eigen::VectorXd diag = tri.diagonal();
  const Eigen::VectorXd off = tri.subDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("dense eigensolver failed");
  const double lambda = es.eigenvalues()(0);
  const double scale = std::max({diag.cwiseAbs().maxCoeff(), off.cwiseAbs().maxCoeff(), 1e-300});
  std::mt19937_64 rng(n);
  Eigen::VectorXd y = random_vector(n, rng).normalized();
  for (int it = 0; it < 3; ++it) y = tridiagonal_solve(diag, off, lambda, y, 1e-15 * scale).normalized();
  return tri.matrixQ() * y;
}

using CholBase = Eigen::SimplicialLLT<SparseSymMatrix::Storage, Eigen::Lower, Eigen::AMDOrdering<int>>;

// Sparse LLT that can report its symbolic cost before the numeric phase.
class Chol : public CholBase {
 public:
  // Predicted nonzeros of L and flops of the numeric factorization.
  std::pair<double, double> predicted_cost() const {
    double nnz = 0, flops = 0;
    for (Eigen::Index j = 0; j < m_nonZerosPerCol.size(); ++j) {
      const double c = m_nonZerosPerCol[j];
      nnz += c + 1;
      flops += c * c;
    }
    return {nnz, flops};
  }
};

// Runs the symbolic phase on `pattern`; false when the factor would be too large to be worth it.
bool analyze_within_budget(Chol& chol, const SparseSymMatrix::Storage& pattern, const SolverOptions& opts) {
  try {
    chol.analyzePattern(pattern);
  } catch (const std::bad_alloc&) {
    return false;
  }
  const auto [nnz, flops] = chol.predicted_cost();
  return nnz <= opts.factor_nnz_budget && flops <= opts.factor_flop_budget;
}

PencilOperators operators_from(const PencilProblem& prob, bool factorize, const SolverOptions& opts = {}) {
  PencilOperators ops;
  const SparseSymMatrix& a = *prob.a;
  ops.dim = a.dim();
  ops.a_norm = a.frobenius_norm();
  ops.apply_a = [&a](const Eigen::VectorXd& v) { return matvec(a, v); };
  ops.diag_a = a.upper().diagonal();
  if (prob.b) {
    const SparseSymMatrix& b = *prob.b;
    ops.apply_b = [&b](const Eigen::VectorXd& v) { return matvec(b, v); };
    ops.diag_b = b.upper().diagonal();
    if (factorize) {
      const SparseSymMatrix::Storage bfull = b.full();
      auto chol = std::make_shared<Chol>();
      if (analyze_within_budget(*chol, bfull, opts)) {
        chol->factorize(bfull);
        if (chol->info() != Eigen::Success)
          throw Error("malformed pencil: sparse Cholesky of B failed (B is not positive definite)");
        ops.solve_b = [chol](const Eigen::VectorXd& v) -> Eigen::VectorXd { return chol->solve(v); };
      }
    }
  } else {
    ops.apply_b = [](const Eigen::VectorXd& v) { return v; };
    ops.diag_b = Eigen::VectorXd::Ones(ops.dim);
    ops.solve_b = [](const Eigen::VectorXd& v) { return v; };
  }
  return ops;
}

}  // namespace

EigResult min_gen_eig_dense(const PencilProblem& prob) {
  check_problem(prob);
  const Eigen::MatrixXd a = prob.a->to_dense();
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd b;
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd x;
  PencilOperators ops;
  if (prob.b) {
    b = prob.b->to_dense();
    llt.compute(b);
    if (llt.info() != Eigen::Success) throw Error("malformed pencil: Cholesky of B failed (B is not positive definite)");
    const Eigen::MatrixXd la = llt.matrixL().solve(a);
    Eigen::MatrixXd c = llt.matrixL().solve(la.transpose());
    c = 0.5 * (c + c.transpose()).eval();
    x = llt.matrixU().solve(lowest_eigenvector(c));
    ops.apply_b = [&b](const Eigen::VectorXd& v) -> Eigen::VectorXd { return b * v; };
    ops.solve_b = [&llt](const Eigen::VectorXd& v) -> Eigen::VectorXd { return llt.solve(v); };
  } else {
    x = lowest_eigenvector(0.5 * (a + a.transpose()));
    ops.apply_b = [](const Eigen::VectorXd& v) { return v; };
    ops.solve_b = [](const Eigen::VectorXd& v) { return v; };
  }
  ops.dim = n;
  ops.a_norm = a.norm();
  ops.apply_a = [&a](const Eigen::VectorXd& v) -> Eigen::VectorXd { return a * v; };
  EigResult r;
  r.path = SolverPath::Dense;
  r.iterations = 1;
  finalize(r, ops, x);
  r.converged = true;
  return r;
}

EigResult min_gen_eig_lanczos(const PencilOperators& ops, const PencilProblem& prob, const SolverOptions& opts) {
  if (!ops.solve_b) throw Error("Lanczos path needs a solver for B");
  const Eigen::Index n = ops.dim;
  const Eigen::Index m = std::max<Eigen::Index>(2, std::min<Eigen::Index>(opts.krylov_dim, n));
  const Eigen::Index keep = std::clamp<Eigen::Index>(opts.keep, 1, m - 1);
  const double anorm = a_norm_or_one(ops.a_norm);
  std::mt19937_64 rng(opts.seed);

  Eigen::MatrixXd V(n, m), W(n, m), U(n, m);  // basis, B*basis, A*basis
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);

  // B-orthonormalizes w against the first j columns, twice; returns ||w||_B before normalization.
  auto orthonormalize = [&](Eigen::VectorXd& w, Eigen::VectorXd& bw, Eigen::Index j) {
    for (int pass = 0; pass < 2; ++pass) {
      bw = ops.apply_b(w);
      if (j > 0) w -= V.leftCols(j) * (V.leftCols(j).transpose() * bw);
    }
    bw = ops.apply_b(w);
    const double beta = std::sqrt(std::max(0.0, w.dot(bw)));
    if (beta > 0) {
      w /= beta;
      bw /= beta;
    }
    return beta;
  };

  Eigen::VectorXd w = opts.warm_start && opts.warm_start->size() == n ? *opts.warm_start : random_vector(n, rng);
  Eigen::VectorXd bw;
  if (orthonormalize(w, bw, 0) == 0) {
    w = random_vector(n, rng);
    orthonormalize(w, bw, 0);
  }
  V.col(0) = w;
  W.col(0) = bw;

  EigResult best;
  best.path = SolverPath::Sparse;
  best.residual = std::numeric_limits<double>::infinity();
  double theta_prev = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  Eigen::Index j = 0;  // index of the newest basis column
  int iters = 0;
  for (;;) {
    U.col(j) = ops.apply_a(V.col(j));
    ++iters;
    const Eigen::VectorXd hcol = V.leftCols(j + 1).transpose() * U.col(j);
    H.col(j).head(j + 1) = hcol;
    H.row(j).head(j + 1) = hcol.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(j + 1, j + 1));
    const double theta = es.eigenvalues()[0];
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    const Eigen::VectorXd psi = V.leftCols(j + 1) * y;
    const Eigen::VectorXd r = U.leftCols(j + 1) * y - theta * (W.leftCols(j + 1) * y);
    const double res = r.norm() / (anorm * psi.norm());
    if (res < best.residual) {
      best.lambda_min = theta;
      best.residual = res;
      best.eigenvector = psi;
      best.iterations = iters;
    }
    stagnant = std::abs(theta - theta_prev) < prob.tol * std::max(1.0, std::abs(theta)) ? stagnant + 1 : 0;
    theta_prev = theta;
    const bool exhausted = j + 1 == n;
    if ((res <= prob.tol && stagnant >= 3) || exhausted) {
      EigResult out;
      out.path = SolverPath::Sparse;
      out.iterations = iters;
      finalize(out, ops, psi);
      if (out.residual <= prob.tol || exhausted) {
        out.converged = out.residual <= prob.tol;
        if (!out.converged)
          throw ConvergenceError("Lanczos: residual " + std::to_string(out.residual) + " above tolerance", out);
        return out;
      }
      stagnant = 0;
    }
    if (iters >= prob.max_iter)
      throw ConvergenceError("Lanczos did not converge in " + std::to_string(iters) + " iterations (residual " +
                                 std::to_string(best.residual) + ")",
                             best);

    w = ops.solve_b(U.col(j));
    const double before = std::sqrt(std::max(0.0, w.dot(U.col(j))));  // ||w||_B since B w = A v_j
    double beta = orthonormalize(w, bw, j + 1);
    if (!(beta > 1e-10 * before)) {
      // invariant subspace found; continue with a fresh direction
      w = random_vector(n, rng);
      beta = orthonormalize(w, bw, j + 1);
      if (!(beta > 0)) throw ConvergenceError("Lanczos breakdown", best);
    }
    if (j + 1 == m) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(H);
      const Eigen::MatrixXd Y = full.eigenvectors().leftCols(keep);
      V.leftCols(keep) = (V * Y).eval();
      W.leftCols(keep) = (W * Y).eval();
      U.leftCols(keep) = (U * Y).eval();
      H.setZero();
      H.diagonal().head(keep) = full.eigenvalues().head(keep);
      // the restart block is already B-orthogonal to w up to rounding; clean once more
      orthonormalize(w, bw, keep);
      j = keep;
    } else {
      ++j;
    }
    V.col(j) = w;
    W.col(j) = bw;
  }
}

EigResult min_gen_eig_lobpcg(const PencilOperators& ops, const PencilProblem& prob, const SolverOptions& opts) {
  const Eigen::Index n = ops.dim;
  const Eigen::Index bs = std::max<Eigen::Index>(1, std::min<Eigen::Index>(prob.block_size, n / 3));
  const double anorm = a_norm_or_one(ops.a_norm);
  std::mt19937_64 rng(opts.seed);

  auto apply_cols = [](const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::MatrixXd& s) {
    Eigen::MatrixXd out(s.rows(), s.cols());
    for (Eigen::Index c = 0; c < s.cols(); ++c) out.col(c) = f(s.col(c));
    return out;
  };

  Eigen::MatrixXd X(n, bs);
  for (Eigen::Index c = 0; c < bs; ++c) X.col(c) = random_vector(n, rng);
  if (opts.warm_start && opts.warm_start->size() == n) X.col(0) = *opts.warm_start;
  Eigen::MatrixXd P, Wp;
  EigResult best;
  best.path = SolverPath::Lobpcg;
  best.residual = std::numeric_limits<double>::infinity();
  double theta_prev = std::numeric_limits<double>::infinity();
  int stagnant = 0;

  for (int it = 1; it <= prob.max_iter; ++it) {
    const Eigen::Index cols = X.cols() + Wp.cols() + P.cols();
    Eigen::MatrixXd S(n, cols);
    S << X, Wp, P;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double nc = S.col(c).norm();
      if (nc > 0) S.col(c) /= nc;
    }
    const Eigen::MatrixXd AS = apply_cols(ops.apply_a, S), BS = apply_cols(ops.apply_b, S);
    Eigen::MatrixXd G = S.transpose() * BS, Hs = S.transpose() * AS;
    G = 0.5 * (G + G.transpose()).eval();
    Hs = 0.5 * (Hs + Hs.transpose()).eval();
    // drop near-dependent directions (soft restart)
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(G);
    const double gmax = ge.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < cols; ++i)
      if (ge.eigenvalues()[i] > 1e-12 * gmax) kept.push_back(i);
    if (static_cast<Eigen::Index>(kept.size()) < bs) throw ConvergenceError("LOBPCG: search space collapsed", best);
    Eigen::MatrixXd Z(cols, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i)
      Z.col(static_cast<Eigen::Index>(i)) =
          ge.eigenvectors().col(kept[i]) / std::sqrt(ge.eigenvalues()[kept[i]]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> he(Z.transpose() * Hs * Z);
    const Eigen::MatrixXd Cc = Z * he.eigenvectors().leftCols(bs);
    const Eigen::VectorXd theta = he.eigenvalues().head(bs);
    X = S * Cc;
    const Eigen::MatrixXd AX = AS * Cc, BX = BS * Cc;
    if (cols > bs) P = S.rightCols(cols - bs) * Cc.bottomRows(cols - bs);
    const Eigen::MatrixXd R = AX - BX * theta.asDiagonal();
    const double res = R.col(0).norm() / (anorm * X.col(0).norm());
    if (res < best.residual) {
      best.lambda_min = theta[0];
      best.residual = res;
      best.eigenvector = X.col(0);
      best.iterations = it;
    }
    stagnant = std::abs(theta[0] - theta_prev) < prob.tol * std::max(1.0, std::abs(theta[0])) ? stagnant + 1 : 0;
    theta_prev = theta[0];
    if (res <= prob.tol && stagnant >= 3) {
      EigResult out;
      out.path = SolverPath::Lobpcg;
      out.iterations = it;
      finalize(out, ops, X.col(0));
      out.converged = out.residual <= prob.tol;
      if (out.converged) return out;
      stagnant = 0;
    }
    // Jacobi preconditioner on the pencil shifted below the current estimate
    const double shift = theta[0] - std::max(1.0, std::abs(theta[0]));
    Eigen::VectorXd tdiag = ops.diag_a - shift * ops.diag_b;
    for (Eigen::Index i = 0; i < n; ++i) tdiag[i] = 1.0 / std::max(tdiag[i], 1e-12 * std::abs(ops.diag_b[i]) + 1e-300);
    Wp = tdiag.asDiagonal() * R;
  }
  throw ConvergenceError("LOBPCG did not converge in " + std::to_string(prob.max_iter) + " iterations (residual " +
                             std::to_string(best.residual) + ")",
                         best);
}

namespace {

// Thrown when the shifted factorization would not fit the budget.
class FactorBudgetError : public Error {
 public:
  using Error::Error;
};

// Lanczos on (A - sigma B)^{-1} B with sigma below lambda_min, found by probing
// Cholesky factorizations: A - sigma B is positive definite exactly when sigma < lambda_min.
EigResult shift_invert(const PencilProblem& prob, const PencilOperators& ops, const SolverOptions& opts) {
  PencilProblem probe = prob;
  probe.max_iter = static_cast<int>(std::min<Eigen::Index>(40, ops.dim));
  double theta = 0;
  Eigen::VectorXd start;
  try {
    const EigResult r = min_gen_eig_lanczos(ops, probe, opts);
    if (r.converged) return r;
    theta = r.lambda_min;
    start = r.eigenvector;
  } catch (const ConvergenceError& e) {
    theta = e.best().lambda_min;
    start = e.best().eigenvector;
  }

  const SparseSymMatrix::Storage afull = prob.a->full();
  const SparseSymMatrix::Storage bfull =
      prob.b ? prob.b->full() : SparseSymMatrix::Storage(Eigen::MatrixXd::Identity(ops.dim, ops.dim).sparseView());
  auto chol = std::make_shared<Chol>();
  if (!analyze_within_budget(*chol, afull + bfull, opts)) throw FactorBudgetError("shift-invert: factor too large");
  double margin = 0.05 * std::max(std::abs(theta), 1e-3);
  double sigma = 0;
  bool ok = false;
  SparseSymMatrix::Storage shifted;
  for (int attempt = 0; attempt < 40 && !ok; ++attempt, margin *= 4) {
    sigma = theta - margin;
    shifted = afull - sigma * bfull;
    chol->factorize(shifted);
    ok = chol->info() == Eigen::Success;
  }
  if (!ok) throw Error("shift-invert: no shift below the spectrum found");

  // smallest eigenvalue of (-B, A - sigma B) is -1/(lambda_min - sigma)
  PencilOperators inv;
  inv.dim = ops.dim;
  inv.apply_a = [&ops](const Eigen::VectorXd& v) -> Eigen::VectorXd { return -ops.apply_b(v); };
  inv.apply_b = [&shifted](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return shifted.selfadjointView<Eigen::Lower>() * v;
  };
  inv.solve_b = [chol](const Eigen::VectorXd& v) -> Eigen::VectorXd { return chol->solve(v); };
  inv.a_norm = prob.b ? prob.b->frobenius_norm() : std::sqrt(static_cast<double>(ops.dim));
  PencilProblem inner = prob;
  inner.tol = prob.tol * 1e-2;
  SolverOptions io = opts;
  io.warm_start = start;
  const EigResult r = min_gen_eig_lanczos(inv, inner, io);

  EigResult out;
  out.path = SolverPath::Sparse;
  out.iterations = probe.max_iter + r.iterations;
  finalize(out, ops, r.eigenvector);
  out.converged = out.residual <= prob.tol;
  if (!out.converged)
    throw ConvergenceError("shift-invert: residual " + std::to_string(out.residual) + " above tolerance", out);
  return out;
}

}  // namespace

EigResult min_gen_eig_sparse(const PencilProblem& prob, const SolverOptions& opts) {
  check_problem(prob);
  const bool factorize = prob.a->dim() <= opts.cholesky_ceiling;
  const PencilOperators ops = operators_from(prob, factorize, opts);
  if (!factorize || !ops.solve_b) return min_gen_eig_lobpcg(ops, prob, opts);
  try {
    return shift_invert(prob, ops, opts);
  } catch (const FactorBudgetError&) {
    if (prob.b) return min_gen_eig_lobpcg(ops, prob, opts);
  } catch (const std::bad_alloc&) {
    if (prob.b) return min_gen_eig_lobpcg(ops, prob, opts);
  } catch (const Error&) {
  }
  try {
    return min_gen_eig_lanczos(ops, prob, opts);
  } catch (const ConvergenceError& e) {
    SolverOptions retry = opts;
    if (e.best().eigenvector.size() == prob.a->dim()) retry.warm_start = e.best().eigenvector;
    return min_gen_eig_lobpcg(ops, prob, retry);
  }
}

EigResult min_gen_eig(const PencilProblem& prob, const SolverOptions& opts) {
  check_problem(prob);
  switch (opts.path) {
    case SolverPath::Dense: return min_gen_eig_dense(prob);
    case SolverPath::Sparse: return min_gen_eig_sparse(prob, opts);
    case SolverPath::Lobpcg: {
      check_problem(prob);
      return min_gen_eig_lobpcg(operators_from(prob, false), prob, opts);
    }
    case SolverPath::Auto: break;
  }
  if (prob.a->dim() <= opts.dense_ceiling) return min_gen_eig_dense(prob);
  return min_gen_eig_sparse(prob, opts);
}

}  // namespace hrsos
