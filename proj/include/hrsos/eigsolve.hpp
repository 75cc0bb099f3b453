#pragma once

// Smallest eigenpair of a symmetric-definite pencil A psi = lambda B psi.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hrsos/gram.hpp"

namespace hrsos {

enum class SolverPath { Auto, Dense, Sparse, Lobpcg };

std::string to_string(SolverPath p);
SolverPath solver_path_from_string(const std::string& s);

struct PencilProblem {
  const SparseSymMatrix* a = nullptr;
  const SparseSymMatrix* b = nullptr;  // nullptr: identity
  double tol = 1e-8;                   // relative residual target
  int max_iter = 20000;                // operator applications
  int block_size = 4;                  // LOBPCG block width
};

struct SolverOptions {
  SolverPath path = SolverPath::Auto;
  Eigen::Index dense_ceiling = 4000;
  // Beyond this dimension the sparse path skips the Cholesky factorization of B.
  Eigen::Index cholesky_ceiling = 600000;
  // Sparse factorizations predicted above either limit are skipped in favour of iteration.
  double factor_nnz_budget = 3e7;
  double factor_flop_budget = 5e9;
  std::uint64_t seed = 20240601;
  std::optional<Eigen::VectorXd> warm_start;
  int krylov_dim = 48;
  int keep = 16;
};

struct EigResult {
  double lambda_min = 0;
  Eigen::VectorXd eigenvector;
  double residual = 0;     // ||A psi - lambda B psi|| / (||A||_F ||psi||)
  double error_bound = 0;  // ||r||_{B^-1} / ||psi||_B
  int iterations = 0;
  SolverPath path = SolverPath::Dense;
  bool converged = false;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, EigResult best) : Error(what), best_(std::move(best)) {}
  const EigResult& best() const { return best_; }

 private:
  EigResult best_;
};

// Operators for the matrix-free entry point.
struct PencilOperators {
  Eigen::Index dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_a;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_b;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> solve_b;  // may be empty (LOBPCG only)
  Eigen::VectorXd diag_a;
  Eigen::VectorXd diag_b;
  double a_norm = 1;  // ||A||_F
};

Eigen::VectorXd matvec(const SparseSymMatrix& a, const Eigen::VectorXd& v);

EigResult min_gen_eig_dense(const PencilProblem& prob);
EigResult min_gen_eig_sparse(const PencilProblem& prob, const SolverOptions& opts = {});
EigResult min_gen_eig_lanczos(const PencilOperators& ops, const PencilProblem& prob, const SolverOptions& opts);
EigResult min_gen_eig_lobpcg(const PencilOperators& ops, const PencilProblem& prob, const SolverOptions& opts);

// Dispatches on opts.path (Auto: dense up to dense_ceiling).
EigResult min_gen_eig(const PencilProblem& prob, const SolverOptions& opts = {});

}  // namespace hrsos
