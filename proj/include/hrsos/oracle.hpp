#pragma once

// Reference values independent of the hierarchy: local minimization on
// spheres (upper bounds on the minimum), grid scans, and matrix SVD norms.

#include <cstdint>
#include <string>
#include <vector>

#include "hrsos/polyform.hpp"

namespace hrsos {

struct OracleResult {
  double value = 0;
  std::vector<std::vector<double>> points;  // one unit vector per factor
  std::string method;                       // gradient | grid | svd
  int restarts = 0;
  double stationarity = 0;  // Riemannian gradient norm at the returned point
  double error_estimate = 0;  // grid: spacing times a Lipschitz estimate
};

struct GradientOptions {
  int restarts = 64;
  std::uint64_t seed = 7;
  int max_steps = 5000;
  double grad_tol = 1e-10;
  int threads = 1;
};

OracleResult upper_bound_sphere(const MultiForm& p, const GradientOptions& opts = {});
OracleResult upper_bound_sphere(const HomogeneousForm& p, const GradientOptions& opts = {});

// Spherical-coordinate scan with about `resolution` points; n <= 3.
OracleResult grid_min_sphere(const HomogeneousForm& p, long resolution);

// Largest singular value of an order-2 tensor.
OracleResult spectral_norm_matrix(const DenseTensor& t);

// Lower bound on ||T||_sigma: the best value of |<T, v_1 x ... x v_m>| found by local search.
OracleResult spectral_norm_lower(const DenseTensor& t, const GradientOptions& opts = {});

}  // namespace hrsos
