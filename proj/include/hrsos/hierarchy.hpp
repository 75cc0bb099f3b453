#pragma once

// Level-by-level drivers: sphere minimization (lower bounds eta_k), products
// of spheres, and tensor spectral norms (upper bounds mu_k).

#include <optional>
#include <string>
#include <vector>

#include "hrsos/eigsolve.hpp"
#include "hrsos/gram.hpp"
#include "hrsos/polyform.hpp"

namespace hrsos {

enum class Direction { Lower, Upper };

struct LevelRecord {
  int k = 0;
  int offset = 0;  // k - max_i d_i
  double bound = 0;
  double lambda = 0;  // raw pencil eigenvalue
  double wall_seconds = 0;
  Eigen::Index dim = 0;
  Eigen::Index nnz = 0;
  int iterations = 0;
  double residual = 0;
  SolverPath path = SolverPath::Dense;
  std::optional<double> gap_bound;
  std::string error;  // set when the level failed

  bool ok() const { return error.empty(); }
};

struct HierarchyResult {
  std::string descriptor;
  Direction direction = Direction::Lower;
  std::vector<LevelRecord> levels;
  double scale = 1.0;    // factor folded into every bound
  bool lifted = false;   // odd-degree lift applied
  std::optional<double> norm_P_inf;
  std::optional<double> kappa;

  bool all_ok() const;
};

class MonotonicityError : public Error {
 public:
  MonotonicityError(const std::string& what, HierarchyResult r) : Error(what), result_(std::move(r)) {}
  const HierarchyResult& result() const { return result_; }

 private:
  HierarchyResult result_;
};

struct HierarchyOptions {
  SolverOptions solver;
  double tol = 1e-10;
  int max_iter = 20000;
  int block_size = 4;
  AssemblyOptions assembly;
  int level_threads = 1;
  bool gap_annotations = true;
  double monotonicity_slack = 1e-9;
  // Point(s) on the sphere(s) whose symmetric powers seed the iterative solver.
  std::optional<std::vector<std::vector<double>>> warm_point;
};

struct GapBoundInputs {
  double norm_P_inf = 0;
  double kappa = 1;
  std::vector<int> ns;  // variables per factor
  std::vector<int> ds;  // half degree per factor
  int k = 0;
};

// ||P|| (1 + kappa) 4 |d| (max n_j - 1) / (delta (k + 1)), delta = prod delta(d_i).
double apriori_gap(const GapBoundInputs& in);
// 2^{m/2+3} m (max n_j - 1) / (k + 1), for a tensor of unit Frobenius norm.
double spectral_gap_bound(int m, int max_n, int k);

// {d, d+1, d+2, d+4, ...} up to d + max_offset.
std::vector<int> default_levels(int d, int max_offset);

HierarchyResult hrsos_bound(const HomogeneousForm& p, const std::vector<int>& levels,
                            const HierarchyOptions& opts = {});
HierarchyResult mhrsos_bound(const MultiForm& p, const std::vector<int>& levels, const HierarchyOptions& opts = {});
HierarchyResult spectral_norm_bound(const DenseTensor& t, const std::vector<int>& levels,
                                    const HierarchyOptions& opts = {});

// Largest |eigenvalue| of a symmetric matrix (dense up to 4000, Lanczos beyond).
double spectral_radius(const SparseSymMatrix& a, const HierarchyOptions& opts = {});

}  // namespace hrsos
