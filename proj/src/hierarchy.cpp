#include "hrsos/hierarchy.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

namespace hrsos {

bool HierarchyResult::all_ok() const {
  return std::all_of(levels.begin(), levels.end(), [](const LevelRecord& l) { return l.ok(); });
}

double apriori_gap(const GapBoundInputs& in) {
  if (in.ns.empty() || in.ns.size() != in.ds.size()) throw Error("apriori_gap: factor lists differ in length");
  int dsum = 0, max_n = 0;
  double delta_prod = 1;
  for (std::size_t i = 0; i < in.ns.size(); ++i) {
    dsum += in.ds[i];
    max_n = std::max(max_n, in.ns[i]);
    delta_prod *= to_double(delta(in.ds[i]));
  }
  return in.norm_P_inf * (1.0 + in.kappa) * 4.0 * dsum * (max_n - 1) / (delta_prod * (in.k + 1));
}

double spectral_gap_bound(int m, int max_n, int k) {
  return std::pow(2.0, m / 2.0 + 3.0) * m * (max_n - 1) / (k + 1);
}

std::vector<int> default_levels(int d, int max_offset) {
  std::vector<int> out{d};
  for (int step = 1; step <= max_offset; step *= 2) out.push_back(d + step);
  return out;
}

double spectral_radius(const SparseSymMatrix& a, const HierarchyOptions& opts) {
  if (a.nnz() == 0) return 0.0;
  if (a.dim() <= 4000) {
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a.to_dense(), Eigen::EigenvaluesOnly).eigenvalues();
    return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
  }
  PencilProblem prob{&a, nullptr, opts.tol, opts.max_iter, opts.block_size};
  const double lo = min_gen_eig_sparse(prob, opts.solver).lambda_min;
  const SparseSymMatrix neg(a.basis(), SparseSymMatrix::Storage(-a.upper()));
  prob.a = &neg;
  const double hi = -min_gen_eig_sparse(prob, opts.solver).lambda_min;
  return std::max(std::abs(lo), std::abs(hi));
}

namespace {

using Clock = std::chrono::steady_clock;

struct Plan {
  MultiForm form;        // even in every factor
  std::vector<int> ds;   // half degrees
  double scale = 1.0;    // bound = scale * sign * lambda
  double sign = 1.0;     // -1 with upper-direction output
  bool identity_b = false;
  int min_level = 0;
};

void check_levels(const std::vector<int>& levels, int min_level) {
  if (levels.empty()) throw Error("no levels requested");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < min_level)
      throw Error("level k=" + std::to_string(levels[i]) + " is below the minimum level " + std::to_string(min_level));
    if (i > 0 && levels[i] <= levels[i - 1]) throw Error("levels must be strictly increasing");
  }
}

LevelRecord solve_level(const Plan& plan, int k, const HierarchyOptions& opts) {
  LevelRecord rec;
  rec.k = k;
  rec.offset = k - *std::max_element(plan.ds.begin(), plan.ds.end());
  const auto start = Clock::now();
  try {
    std::vector<int> ns;
    for (const auto& f : plan.form.factors()) ns.push_back(f.n);
    if (plan.form.is_zero()) {
      rec.dim = static_cast<Eigen::Index>(product_basis(ns, k).dim());
      rec.lambda = 0;
    } else {
      const SparseSymMatrix a = build_multi_Pk(plan.form, k, opts.assembly);
      std::optional<SparseSymMatrix> b;
      if (!plan.identity_b) b = build_multi_Nk(ns, plan.ds, k, opts.assembly);
      rec.dim = a.dim();
      rec.nnz = a.nnz();
      PencilProblem prob{&a, b ? &*b : nullptr, opts.tol, opts.max_iter, opts.block_size};
      SolverOptions so = opts.solver;
      if (opts.warm_point && opts.warm_point->size() == ns.size()) {
        bool fits = true;
        for (std::size_t i = 0; i < ns.size(); ++i) fits = fits && static_cast<int>((*opts.warm_point)[i].size()) == ns[i];
        if (fits) so.warm_start = embed(a.basis(), *opts.warm_point);
      }
      const EigResult r = min_gen_eig(prob, so);
      rec.lambda = r.lambda_min;
      rec.iterations = r.iterations;
      rec.residual = r.residual;
      rec.path = r.path;
    }
    rec.bound = plan.scale * plan.sign * rec.lambda;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rec;
}

void run_levels(const Plan& plan, const std::vector<int>& levels, const HierarchyOptions& opts, HierarchyResult& out) {
  out.levels.assign(levels.size(), LevelRecord{});
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, opts.level_threads)), 1,
                                                      levels.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < levels.size(); ++i) out.levels[i] = solve_level(plan, levels[i], opts);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < levels.size(); i = next++) out.levels[i] = solve_level(plan, levels[i], opts);
      });
    for (auto& t : pool) t.join();
  }

  const double slack = opts.monotonicity_slack * std::max(1.0, plan.scale);
  const LevelRecord* prev = nullptr;
  for (const auto& rec : out.levels) {
    if (!rec.ok()) continue;
    if (prev) {
      const bool bad = out.direction == Direction::Lower ? rec.bound < prev->bound - slack
                                                         : rec.bound > prev->bound + slack;
      if (bad) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "monotonicity violated between k=" << prev->k << " (" << prev->bound << ") and k=" << rec.k << " ("
            << rec.bound << "); tighten the solver tolerance";
        throw MonotonicityError(msg.str(), out);
      }
    }
    prev = &rec;
  }
}

// Applies the odd-degree lift to every odd factor.
MultiForm lift_odd_factors(const MultiForm& p, double& scale, bool& lifted) {
  MultiForm cur = p;
  for (int j = 0; j < cur.num_factors(); ++j) {
    if (cur.factors()[static_cast<std::size_t>(j)].degree % 2 == 0) continue;
    auto l = odd_lift(cur, j);
    cur = std::move(l.lifted);
    scale *= l.scale;
    lifted = true;
  }
  return cur;
}

void annotate_gaps(const Plan& plan, const HierarchyOptions& opts, HierarchyResult& out) {
  if (!opts.gap_annotations || plan.form.is_zero()) return;
  try {
    std::vector<int> ns;
    double kappa = 1;
    for (std::size_t i = 0; i < plan.ds.size(); ++i) {
      ns.push_back(plan.form.factors()[i].n);
      kappa *= kappa_N(ns.back(), plan.ds[i]).computed;
    }
    const SparseSymMatrix m = build_multi_M(plan.form, opts.assembly);
    const double norm = spectral_radius(m, opts);
    out.norm_P_inf = norm * plan.scale;
    out.kappa = kappa;
    for (auto& rec : out.levels)
      rec.gap_bound = plan.scale * apriori_gap({norm, kappa, ns, plan.ds, rec.k});
  } catch (const Error&) {
    // sizes beyond the dense kappa guard: no annotation
  }
}

std::string describe(const MultiForm& p) {
  std::ostringstream os;
  os << "multiform[";
  for (std::size_t i = 0; i < p.factors().size(); ++i)
    os << (i ? "," : "") << "n" << p.factors()[i].n << ":D" << p.factors()[i].degree;
  os << "] terms=" << p.terms().size();
  return os.str();
}

}  // namespace

HierarchyResult mhrsos_bound(const MultiForm& p, const std::vector<int>& levels, const HierarchyOptions& opts) {
  if (p.num_factors() == 0) throw Error("mhrsos_bound: form has no factors");
  HierarchyResult out;
  out.descriptor = describe(p);
  out.direction = Direction::Lower;
  Plan plan;
  plan.form = lift_odd_factors(p, plan.scale, out.lifted);
  for (const auto& f : plan.form.factors()) plan.ds.push_back(f.degree / 2);
  for (int d : plan.ds)
    if (d < 1) throw Error("mhrsos_bound: every factor needs positive degree");
  out.scale = plan.scale;
  plan.min_level = *std::max_element(plan.ds.begin(), plan.ds.end());
  check_levels(levels, plan.min_level);
  HierarchyOptions local = opts;
  if (out.lifted) local.warm_point.reset();
  run_levels(plan, levels, local, out);
  annotate_gaps(plan, local, out);
  return out;
}

HierarchyResult hrsos_bound(const HomogeneousForm& p, const std::vector<int>& levels, const HierarchyOptions& opts) {
  if (p.degree() < 1) throw Error("hrsos_bound: form must have positive degree");
  HierarchyResult r = mhrsos_bound(MultiForm(p), levels, opts);
  std::ostringstream os;
  os << "form n=" << p.num_vars() << " D=" << p.degree() << " terms=" << p.terms().size();
  r.descriptor = os.str();
  return r;
}

HierarchyResult spectral_norm_bound(const DenseTensor& t, const std::vector<int>& levels,
                                    const HierarchyOptions& opts) {
  const SpectralLift lift = build_spectral_norm_form(t, true);
  HierarchyResult out;
  out.direction = Direction::Upper;
  const int m = t.order();
  std::ostringstream os;
  os << "tensor dims=";
  for (std::size_t i = 0; i < t.dims.size(); ++i) os << (i ? "x" : "") << t.dims[i];
  out.descriptor = os.str();

  Plan plan;
  plan.form = lift.form;
  plan.ds.assign(static_cast<std::size_t>(m), 1);
  plan.identity_b = true;  // N^(1) = identity on every factor
  plan.sign = -1.0;
  plan.scale = std::pow(2.0, m) * lift.scale;
  plan.min_level = 1;
  out.scale = lift.scale;
  check_levels(levels, 1);
  HierarchyOptions local = opts;
  local.warm_point.reset();
  run_levels(plan, levels, local, out);
  if (opts.gap_annotations) {
    const int max_n = *std::max_element(t.dims.begin(), t.dims.end());
    for (auto& rec : out.levels) rec.gap_bound = lift.scale * spectral_gap_bound(m, max_n, rec.k);
  }
  return out;
}

}  // namespace hrsos
