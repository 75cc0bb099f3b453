#pragma once

// Real homogeneous and multi-homogeneous forms in the monomial convention
// p(x) = sum_gamma c_gamma x^gamma.  Coefficients are held exactly; a double
// copy is cached for evaluation and matrix assembly.

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hrsos/combinat.hpp"

namespace hrsos {

class HomogeneousForm {
 public:
  using TermMap = std::map<MultiIndex, BigRational, CanonicalLess>;

  HomogeneousForm() = default;
  // Every key must have length n and degree `degree`; zero coefficients are dropped.
  HomogeneousForm(int n, int degree, TermMap terms);
  static HomogeneousForm from_doubles(int n, int degree,
                                      const std::vector<std::pair<MultiIndex, double>>& terms);

  int num_vars() const { return n_; }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  const std::vector<std::pair<MultiIndex, double>>& float_terms() const { return float_terms_; }

  double evaluate(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;
  // l1 norm of the coefficient vector; a crude Lipschitz scale.
  double coefficient_l1() const;

  std::string to_string(std::span<const std::string> vars) const;

 private:
  int n_ = 1;
  int degree_ = 0;
  TermMap terms_;
  std::vector<std::pair<MultiIndex, double>> float_terms_;
};

// ||x||^{2d} on R^n.
HomogeneousForm norm_power(int n, int d);

// C_gamma = c_gamma / C(2d, gamma).
struct NormalizedCoeffs {
  int n = 1;
  int degree = 0;  // 2d
  HomogeneousForm::TermMap coeffs;
};

NormalizedCoeffs normalize_coeffs(const HomogeneousForm& p);
HomogeneousForm denormalize(const NormalizedCoeffs& c);

struct FactorShape {
  int n = 1;
  int degree = 0;
  friend bool operator==(const FactorShape&, const FactorShape&) = default;
};

struct KeyLess {
  bool operator()(const std::vector<MultiIndex>& a, const std::vector<MultiIndex>& b) const;
};

// Form on V_1 x ... x V_m, homogeneous of degree D_i in the i-th group.
class MultiForm {
 public:
  using Key = std::vector<MultiIndex>;
  using TermMap = std::map<Key, BigRational, KeyLess>;

  MultiForm() = default;
  MultiForm(std::vector<FactorShape> factors, TermMap terms);
  explicit MultiForm(const HomogeneousForm& p);

  int num_factors() const { return static_cast<int>(factors_.size()); }
  const std::vector<FactorShape>& factors() const { return factors_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  const std::vector<std::pair<Key, double>>& float_terms() const { return float_terms_; }

  double evaluate(std::span<const std::vector<double>> points) const;
  // Euclidean gradient with respect to every factor's variables.
  std::vector<std::vector<double>> gradient(std::span<const std::vector<double>> points) const;
  double coefficient_l1() const;

  // Frobenius norm of the associated partially symmetric tensor.
  double tensor_norm() const;

  // Back to a single form; requires one factor.
  HomogeneousForm as_homogeneous() const;

 private:
  std::vector<FactorShape> factors_;
  TermMap terms_;
  std::vector<std::pair<Key, double>> float_terms_;
};

// prod_i ||x_i||^{2 d_i}.
MultiForm multi_norm_power(std::span<const FactorShape> shapes_half_degree);

// c_key / prod_i C(D_i, gamma_i), the multi analogue of NormalizedCoeffs.
std::vector<std::pair<MultiForm::Key, BigRational>> normalized_multi_coeffs(const MultiForm& p);

template <class Form>
struct OddLift {
  Form lifted;
  double scale = 1.0;  // p_min = scale * lifted_min
};

// (D+1)^{(D+1)/2} / D^{D/2}
double odd_lift_scale(int degree);

// Multiplies p by a fresh coordinate appended to factor j.
OddLift<MultiForm> odd_lift(const MultiForm& p, int factor);
OddLift<HomogeneousForm> odd_lift(const HomogeneousForm& p);

// Dense order-m tensor, row-major (last index fastest).
struct DenseTensor {
  std::vector<int> dims;
  std::vector<double> data;

  int order() const { return static_cast<int>(dims.size()); }
  std::size_t size() const;
  double at(std::span<const int> index) const;
  double frobenius_norm() const;
};

struct SpectralLift {
  MultiForm form;        // multidegree (2,...,2) on R^{n_j + 1}
  double input_norm = 0; // ||T||_2 of the tensor as given
  double scale = 1.0;    // form was built from T / scale
};

// r(v_1..v_m) = <T, v_1' x ... x v_m'> * t_1 ... t_m with v_j = (v_j', t_j).
SpectralLift build_spectral_norm_form(const DenseTensor& t, bool normalize);

// <T, v_1 x ... x v_m> as a multilinear form (multidegree (1,...,1)).
MultiForm multilinear_form(const DenseTensor& t);

}  // namespace hrsos
