#pragma once

// Multi-index bookkeeping for symmetric-tensor bases and the exact
// combinatorial coefficients that appear in the Gram-operator formulas.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace hrsos {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exponent vector alpha in Z_{>=0}^n together with its degree |alpha|.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);
  MultiIndex(std::initializer_list<int> exponents)
      : MultiIndex(std::vector<int>(exponents)) {}

  int size() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
  std::span<const int> exponents() const { return exps_; }

  MultiIndex operator+(const MultiIndex& other) const;
  // Componentwise difference; throws if any component would be negative.
  MultiIndex operator-(const MultiIndex& other) const;
  bool dominates(const MultiIndex& other) const;  // this >= other componentwise

  // Appends one coordinate with the given exponent.
  MultiIndex extended(int exponent) const;

  std::string to_string() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.exps_ == b.exps_;
  }

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

// Canonical order: by degree, then graded reverse-lexicographic with the
// largest monomial first, e.g. (2,0,0) < (1,1,0) < (0,2,0) < (1,0,1) < ...
bool canonical_less(std::span<const int> a, std::span<const int> b);

struct CanonicalLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return canonical_less(a.exponents(), b.exponents());
  }
};

// C(n, k) in 64 bits; throws on overflow. Used for basis sizes and ranks.
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k);

// Number of multi-indices of length n and degree d: C(n+d-1, d).
std::uint64_t basis_size(int n, int d);

std::vector<MultiIndex> enumerate_basis(int n, int d);

// Position of exps within enumerate_basis(n, |exps|).
std::uint64_t rank(std::span<const int> exps);
inline std::uint64_t rank(const MultiIndex& mi) { return rank(mi.exponents()); }
MultiIndex unrank(int n, int d, std::uint64_t r);

BigInt binomial(int n, int k);
BigInt factorial(int n);
// d! / (alpha_1! ... alpha_n!); requires |alpha| = d.
BigInt multinomial(int d, const MultiIndex& alpha);
double log_multinomial(int d, const MultiIndex& alpha);
double log_binomial(int n, int k);

// 2^d / C(2d, d).
BigRational delta(int d);

// sum_j C(d,j)^2 C(2d,2j)^{-1} t^j (1-t)^{d-j}, evaluated exactly.
BigRational delta_curve_exact(int d, const BigRational& t);
double delta_curve(int d, double t);

struct IdentitySides {
  BigInt lhs;
  BigInt rhs;
  bool holds() const { return lhs == rhs; }
};

// lhs = sum_j C(2j,j) C(j,k) C(2d-2j,d-j) C(d-j,s-k)
// rhs = 4^{d-s} C(2k,k) C(2s-2k,s-k) C(d,s)
IdentitySides claim4_check(int d, int s, int k);

// lhs = sum_{alpha+beta=gamma, |alpha|=|beta|=d} C(d,alpha) C(d,beta)
// rhs = C(2d, gamma); requires |gamma| = 2d.
IdentitySides vandermonde_aggregate(const MultiIndex& gamma);

BigRational to_rational(double x);
double to_double(const BigRational& q);

}  // namespace hrsos
