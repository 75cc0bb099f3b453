#pragma once

// Reference constructions used only by the tests. They go through the full
// tensor power (R^n)^{(x)k} and never touch the closed-form entry formulas.

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hrsos/combinat.hpp"
#include "hrsos/polyform.hpp"

namespace oracle {

using hrsos::BigInt;
using hrsos::BigRational;

inline std::vector<int> word_type(long w, int n, int len) {
  std::vector<int> t(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < len; ++i) {
    ++t[static_cast<std::size_t>(w % n)];
    w /= n;
  }
  return t;
}

inline long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Pascal-triangle binomial.
inline BigInt pascal(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::vector<BigInt> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<BigInt> next(static_cast<std::size_t>(i) + 1, 1);
    for (int j = 1; j < i; ++j) next[static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j) - 1] + row[static_cast<std::size_t>(j)];
    row = std::move(next);
  }
  return row[static_cast<std::size_t>(k)];
}

// Counts words of length d with the given letter counts.
inline long count_words(const std::vector<int>& type) {
  int d = 0;
  for (int t : type) d += t;
  const int n = static_cast<int>(type.size());
  long c = 0;
  for (long w = 0; w < ipow(n, d); ++w)
    if (word_type(w, n, d) == type) ++c;
  return c;
}

// Index of each exponent vector in the library's basis order.
inline std::map<std::vector<int>, int> index_map(int n, int k) {
  std::map<std::vector<int>, int> m;
  int i = 0;
  for (const auto& mi : hrsos::enumerate_basis(n, k))
    m[std::vector<int>(mi.exponents().begin(), mi.exponents().end())] = i++;
  return m;
}

// Projection onto S^k of (M (x) 1^{k-d}), M being the fully symmetric tensor of p
// reshaped into an n^d x n^d matrix, written in the orthonormal symmetric basis.
inline Eigen::MatrixXd tensor_Pk(const hrsos::HomogeneousForm& p, int k) {
  const int n = p.num_vars(), D = p.degree(), d = D / 2;
  std::map<std::vector<int>, double> coef;
  for (const auto& [mi, c] : p.terms())
    coef[std::vector<int>(mi.exponents().begin(), mi.exponents().end())] = hrsos::to_double(c);
  auto sym_entry = [&](long word) {  // T[w] = c_type / (number of words of that type)
    const auto t = word_type(word, n, D);
    const auto it = coef.find(t);
    return it == coef.end() ? 0.0 : it->second / static_cast<double>(count_words(t));
  };
  const long nd = ipow(n, d), ns = ipow(n, k - d);
  // cache T over all n^{2d} words
  std::vector<double> tensor(static_cast<std::size_t>(nd * nd));
  for (long w = 0; w < nd * nd; ++w) tensor[static_cast<std::size_t>(w)] = sym_entry(w);

  const auto idx = index_map(n, k);
  const auto dim = static_cast<Eigen::Index>(idx.size());
  std::vector<int> type_of(static_cast<std::size_t>(nd * ns));
  for (long w = 0; w < nd * ns; ++w) type_of[static_cast<std::size_t>(w)] = idx.at(word_type(w, n, k));
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(dim);
  for (int t : type_of) counts[t] += 1;

  // word w = u + nd * a with u the first d letters (low digits) and a the rest
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (long a = 0; a < ns; ++a)
    for (long u = 0; u < nd; ++u)
      for (long v = 0; v < nd; ++v) {
        const double m = tensor[static_cast<std::size_t>(u + nd * v)];
        if (m == 0.0) continue;
        out(type_of[static_cast<std::size_t>(u + nd * a)], type_of[static_cast<std::size_t>(v + nd * a)]) += m;
      }
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) out(i, j) /= std::sqrt(counts[i] * counts[j]);
  return out;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Random form with small integer coefficients on every monomial of degree D.
inline hrsos::HomogeneousForm random_form(int n, int D, std::mt19937_64& rng, int span = 5) {
  std::uniform_int_distribution<int> c(-span, span);
  hrsos::HomogeneousForm::TermMap terms;
  for (const auto& mi : hrsos::enumerate_basis(n, D)) {
    const int v = c(rng);
    if (v != 0) terms.emplace(mi, BigRational(v));
  }
  return hrsos::HomogeneousForm(n, D, std::move(terms));
}

inline std::vector<double> random_point(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = g(rng);
  return x;
}

inline std::vector<double> random_unit(int n, std::mt19937_64& rng) {
  auto x = random_point(n, rng);
  double s = 0;
  for (double v : x) s += v * v;
  for (double& v : x) v /= std::sqrt(s);
  return x;
}

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
  return a;
}

// x^T A x written as a form.
inline hrsos::HomogeneousForm quadratic_form(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::pair<hrsos::MultiIndex, double>> terms;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<int> e(static_cast<std::size_t>(n), 0);
      ++e[static_cast<std::size_t>(i)];
      ++e[static_cast<std::size_t>(j)];
      terms.emplace_back(hrsos::MultiIndex(e), i == j ? a(i, i) : 2 * a(i, j));
    }
  return hrsos::HomogeneousForm::from_doubles(n, 2, terms);
}

inline hrsos::HomogeneousForm motzkin() {
  using hrsos::MultiIndex;
  hrsos::HomogeneousForm::TermMap t;
  t.emplace(MultiIndex{4, 2, 0}, 1);
  t.emplace(MultiIndex{2, 4, 0}, 1);
  t.emplace(MultiIndex{2, 2, 2}, -3);
  t.emplace(MultiIndex{0, 0, 6}, 1);
  return hrsos::HomogeneousForm(3, 6, std::move(t));
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace oracle
