#include "hrsos/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include <Eigen/Dense>

namespace hrsos {

namespace {

using Point = std::vector<std::vector<double>>;

void normalize(std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  if (s == 0) {
    v.assign(v.size(), 0.0);
    v[0] = 1.0;
    return;
  }
  for (double& x : v) x /= s;
}

// Riemannian gradient on the product of spheres.
Point tangent_gradient(const MultiForm& p, const Point& x) {
  Point g = p.gradient(x);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double dot = 0;
    for (std::size_t j = 0; j < g[i].size(); ++j) dot += g[i][j] * x[i][j];
    for (std::size_t j = 0; j < g[i].size(); ++j) g[i][j] -= dot * x[i][j];
  }
  return g;
}

double sqnorm(const Point& g) {
  double s = 0;
  for (const auto& v : g)
    for (double x : v) s += x * x;
  return s;
}

Point retract(const Point& x, const Point& g, double t) {
  Point y = x;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < y[i].size(); ++j) y[i][j] -= t * g[i][j];
    normalize(y[i]);
  }
  return y;
}

struct Local {
  double value;
  Point x;
  double grad;
};

// Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking.
Local descend(const MultiForm& p, Point x, const GradientOptions& opts) {
  double f = p.evaluate(x);
  Point g = tangent_gradient(p, x);
  double t = 1.0 / std::max(1.0, p.coefficient_l1());
  for (int step = 0; step < opts.max_steps; ++step) {
    const double gg = sqnorm(g);
    if (std::sqrt(gg) <= opts.grad_tol) break;
    double tt = t;
    Point y;
    double fy = 0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      y = retract(x, g, tt);
      fy = p.evaluate(y);
      if (fy <= f - 1e-4 * tt * gg) {
        accepted = true;
        break;
      }
      tt *= 0.5;
    }
    if (!accepted) break;
    Point gy = tangent_gradient(p, y);
    double ss = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < x[i].size(); ++j) {
        const double s = y[i][j] - x[i][j], d = gy[i][j] - g[i][j];
        ss += s * s;
        sy += s * d;
      }
    t = sy > 0 ? std::clamp(ss / sy, 1e-12, 1e6) : std::min(2.0 * tt, 1e6);
    x = std::move(y);
    f = fy;
    g = std::move(gy);
  }
  return {f, std::move(x), std::sqrt(sqnorm(g))};
}

double radical_inverse(std::uint64_t i, int base) {
  double r = 0, f = 1.0 / base;
  while (i > 0) {
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return r;
}

int nth_prime(int k) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                               59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
  return primes[k % 32];
}

// Even restarts: Halton points of the cube pushed to the spheres; odd restarts: seeded Gaussians.
Point start_point(const MultiForm& p, int r, std::uint64_t seed) {
  Point x;
  int coord = 0;
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(r));
  std::normal_distribution<double> g;
  for (const auto& f : p.factors()) {
    std::vector<double> v(static_cast<std::size_t>(f.n));
    for (auto& c : v) {
      c = (r % 2 == 0) ? 2.0 * radical_inverse(static_cast<std::uint64_t>(r / 2 + 1), nth_prime(coord)) - 1.0 : g(rng);
      ++coord;
    }
    normalize(v);
    x.push_back(std::move(v));
  }
  return x;
}

}  // namespace

OracleResult upper_bound_sphere(const MultiForm& p, const GradientOptions& opts) {
  OracleResult out;
  out.method = "gradient";
  out.restarts = std::max(1, opts.restarts);
  if (p.num_factors() == 0) throw Error("upper_bound_sphere: form has no factors");
  std::vector<Local> results(static_cast<std::size_t>(out.restarts));
  auto work = [&](int r) { results[static_cast<std::size_t>(r)] = descend(p, start_point(p, r, opts.seed), opts); };
  const int workers = std::clamp(opts.threads, 1, out.restarts);
  if (workers == 1) {
    for (int r = 0; r < out.restarts; ++r) work(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int r = next++; r < out.restarts; r = next++) work(r);
      });
    for (auto& t : pool) t.join();
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].value < results[best].value) best = i;
  out.value = results[best].value;
  out.points = results[best].x;
  out.stationarity = results[best].grad;
  return out;
}

OracleResult upper_bound_sphere(const HomogeneousForm& p, const GradientOptions& opts) {
  return upper_bound_sphere(MultiForm(p), opts);
}

OracleResult grid_min_sphere(const HomogeneousForm& p, long resolution) {
  const int n = p.num_vars();
  if (n > 3) throw Error("grid_min_sphere: only n <= 3 is supported");
  OracleResult out;
  out.method = "grid";
  out.value = std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<double> x) {
    const double v = p.evaluate(x);
    if (v < out.value) {
      out.value = v;
      out.points = {std::move(x)};
    }
  };
  const double pi = std::numbers::pi;
  double spacing = 0;
  if (n == 1) {
    consider({1.0});
    consider({-1.0});
  } else if (n == 2) {
    const long steps = std::max(4L, resolution);
    spacing = 2 * pi / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
      const double a = spacing * static_cast<double>(i);
      consider({std::cos(a), std::sin(a)});
    }
  } else {
    const long nt = std::max(2L, static_cast<long>(std::sqrt(static_cast<double>(resolution) / 2.0)));
    const long np = 2 * nt;
    spacing = pi / static_cast<double>(nt);
    for (long i = 0; i <= nt; ++i) {
      const double th = spacing * static_cast<double>(i);
      for (long j = 0; j < np; ++j) {
        const double ph = spacing * static_cast<double>(j);
        consider({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
      }
    }
  }
  out.restarts = 0;
  out.error_estimate = spacing * p.degree() * p.coefficient_l1();
  if (!std::isfinite(out.value)) out.value = 0;
  return out;
}

OracleResult spectral_norm_matrix(const DenseTensor& t) {
  if (t.order() != 2) throw Error("spectral_norm_matrix: order-2 tensor required");
  Eigen::MatrixXd a(t.dims[0], t.dims[1]);
  for (int i = 0; i < t.dims[0]; ++i)
    for (int j = 0; j < t.dims[1]; ++j) a(i, j) = t.data[static_cast<std::size_t>(i * t.dims[1] + j)];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  OracleResult out;
  out.method = "svd";
  out.value = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  const Eigen::VectorXd u = svd.matrixU().col(0), v = svd.matrixV().col(0);
  out.points = {std::vector<double>(u.data(), u.data() + u.size()), std::vector<double>(v.data(), v.data() + v.size())};
  return out;
}

OracleResult spectral_norm_lower(const DenseTensor& t, const GradientOptions& opts) {
  OracleResult r = upper_bound_sphere(multilinear_form(t), opts);
  r.value = -r.value;
  return r;
}

}  // namespace hrsos
