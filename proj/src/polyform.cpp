#include "hrsos/polyform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hrsos {

namespace {

// powers[i][e] = x_i^e for e <= max_degree
std::vector<std::vector<double>> power_table(std::span<const double> x, int max_degree) {
  std::vector<std::vector<double>> pw(x.size(), std::vector<double>(static_cast<std::size_t>(max_degree) + 1, 1.0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int e = 1; e <= max_degree; ++e) pw[i][static_cast<std::size_t>(e)] = pw[i][static_cast<std::size_t>(e) - 1] * x[i];
  return pw;
}

double monomial(const MultiIndex& g, const std::vector<std::vector<double>>& pw) {
  double v = 1.0;
  for (int i = 0; i < g.size(); ++i) v *= pw[static_cast<std::size_t>(i)][static_cast<std::size_t>(g[i])];
  return v;
}

// d/dx_i of x^g, written into out (accumulated with weight c).
void add_monomial_gradient(const MultiIndex& g, double c, const std::vector<std::vector<double>>& pw,
                           std::span<double> out) {
  for (int i = 0; i < g.size(); ++i) {
    if (g[i] == 0) continue;
    double v = c * g[i];
    for (int j = 0; j < g.size(); ++j) {
      const int e = (j == i) ? g[j] - 1 : g[j];
      v *= pw[static_cast<std::size_t>(j)][static_cast<std::size_t>(e)];
    }
    out[static_cast<std::size_t>(i)] += v;
  }
}

}  // namespace

HomogeneousForm::HomogeneousForm(int n, int degree, TermMap terms) : n_(n), degree_(degree) {
  if (n < 1) throw Error("HomogeneousForm: need at least one variable");
  if (degree < 0) throw Error("HomogeneousForm: negative degree");
  for (auto& [mi, c] : terms) {
    if (mi.size() != n) throw Error("HomogeneousForm: exponent length " + std::to_string(mi.size()) +
                                    " does not match n = " + std::to_string(n));
    if (mi.degree() != degree)
      throw Error("HomogeneousForm: monomial " + mi.to_string() + " has degree " +
                  std::to_string(mi.degree()) + ", expected " + std::to_string(degree));
    if (c != 0) {
      float_terms_.emplace_back(mi, to_double(c));
      terms_.emplace(mi, std::move(c));
    }
  }
}

HomogeneousForm HomogeneousForm::from_doubles(int n, int degree,
                                              const std::vector<std::pair<MultiIndex, double>>& terms) {
  TermMap map;
  for (const auto& [mi, c] : terms) map[mi] += to_rational(c);
  return HomogeneousForm(n, degree, std::move(map));
}

double HomogeneousForm::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw Error("evaluate: dimension mismatch");
  if (terms_.empty()) return 0.0;
  const auto pw = power_table(x, degree_);
  double s = 0.0;
  for (const auto& [mi, c] : float_terms_) s += c * monomial(mi, pw);
  return s;
}

std::vector<double> HomogeneousForm::gradient(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw Error("gradient: dimension mismatch");
  std::vector<double> g(x.size(), 0.0);
  if (terms_.empty()) return g;
  const auto pw = power_table(x, degree_);
  for (const auto& [mi, c] : float_terms_) add_monomial_gradient(mi, c, pw, g);
  return g;
}

double HomogeneousForm::coefficient_l1() const {
  double s = 0.0;
  for (const auto& [mi, c] : float_terms_) s += std::abs(c);
  return s;
}

std::string HomogeneousForm::to_string(std::span<const std::string> vars) const {
  if (static_cast<int>(vars.size()) != n_) throw Error("to_string: variable count mismatch");
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mi, c] : terms_) {
    BigRational mag = c;
    const bool negative = c < 0;
    if (negative) mag = -mag;
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    bool need_star = false;
    if (mag != 1 || mi.degree() == 0) {
      os << mag.str();
      need_star = true;
    }
    for (int i = 0; i < mi.size(); ++i) {
      if (mi[i] == 0) continue;
      if (need_star) os << '*';
      os << vars[static_cast<std::size_t>(i)];
      if (mi[i] > 1) os << '^' << mi[i];
      need_star = true;
    }
  }
  return os.str();
}

HomogeneousForm norm_power(int n, int d) {
  HomogeneousForm::TermMap terms;
  for (const auto& half : enumerate_basis(n, d)) {
    std::vector<int> doubled(half.exponents().begin(), half.exponents().end());
    for (auto& e : doubled) e *= 2;
    terms.emplace(MultiIndex(std::move(doubled)), BigRational(multinomial(d, half)));
  }
  return HomogeneousForm(n, 2 * d, std::move(terms));
}

NormalizedCoeffs normalize_coeffs(const HomogeneousForm& p) {
  if (p.degree() % 2 != 0)
    throw Error("normalize_coeffs: odd degree " + std::to_string(p.degree()) + " (lift first)");
  NormalizedCoeffs out{p.num_vars(), p.degree(), {}};
  for (const auto& [mi, c] : p.terms())
    out.coeffs.emplace(mi, c / BigRational(multinomial(p.degree(), mi)));
  return out;
}

HomogeneousForm denormalize(const NormalizedCoeffs& c) {
  HomogeneousForm::TermMap terms;
  for (const auto& [mi, v] : c.coeffs) terms.emplace(mi, v * BigRational(multinomial(c.degree, mi)));
  return HomogeneousForm(c.n, c.degree, std::move(terms));
}

bool KeyLess::operator()(const std::vector<MultiIndex>& a, const std::vector<MultiIndex>& b) const {
  const std::size_t m = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (canonical_less(a[i].exponents(), b[i].exponents())) return true;
    if (canonical_less(b[i].exponents(), a[i].exponents())) return false;
  }
  return a.size() < b.size();
}

MultiForm::MultiForm(std::vector<FactorShape> factors, TermMap terms) : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error("MultiForm: need at least one factor");
  for (const auto& f : factors_)
    if (f.n < 1 || f.degree < 0) throw Error("MultiForm: invalid factor shape");
  for (auto& [key, c] : terms) {
    if (key.size() != factors_.size()) throw Error("MultiForm: key has wrong number of factors");
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i].size() != factors_[i].n || key[i].degree() != factors_[i].degree)
        throw Error("MultiForm: factor " + std::to_string(i) + " monomial " + key[i].to_string() +
                    " does not match shape (n=" + std::to_string(factors_[i].n) +
                    ", D=" + std::to_string(factors_[i].degree) + ")");
    }
    if (c != 0) {
      float_terms_.emplace_back(key, to_double(c));
      terms_.emplace(key, std::move(c));
    }
  }
}

MultiForm::MultiForm(const HomogeneousForm& p)
    : MultiForm({FactorShape{p.num_vars(), p.degree()}}, [&] {
        TermMap t;
        for (const auto& [mi, c] : p.terms()) t.emplace(Key{mi}, c);
        return t;
      }()) {}

double MultiForm::evaluate(std::span<const std::vector<double>> points) const {
  if (points.size() != factors_.size()) throw Error("evaluate: wrong number of factor points");
  std::vector<std::vector<std::vector<double>>> pw;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (static_cast<int>(points[i].size()) != factors_[i].n) throw Error("evaluate: dimension mismatch");
    pw.push_back(power_table(points[i], factors_[i].degree));
  }
  double s = 0.0;
  for (const auto& [key, c] : float_terms_) {
    double v = c;
    for (std::size_t i = 0; i < key.size(); ++i) v *= monomial(key[i], pw[i]);
    s += v;
  }
  return s;
}

std::vector<std::vector<double>> MultiForm::gradient(std::span<const std::vector<double>> points) const {
  if (points.size() != factors_.size()) throw Error("gradient: wrong number of factor points");
  std::vector<std::vector<std::vector<double>>> pw;
  std::vector<std::vector<double>> grad;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (static_cast<int>(points[i].size()) != factors_[i].n) throw Error("gradient: dimension mismatch");
    pw.push_back(power_table(points[i], factors_[i].degree));
    grad.emplace_back(points[i].size(), 0.0);
  }
  const std::size_t m = factors_.size();
  std::vector<double> vals(m);
  for (const auto& [key, c] : float_terms_) {
    for (std::size_t i = 0; i < m; ++i) vals[i] = monomial(key[i], pw[i]);
    for (std::size_t i = 0; i < m; ++i) {
      double others = c;
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) others *= vals[j];
      add_monomial_gradient(key[i], others, pw[i], grad[i]);
    }
  }
  return grad;
}

double MultiForm::coefficient_l1() const {
  double s = 0.0;
  for (const auto& [key, c] : float_terms_) s += std::abs(c);
  return s;
}

double MultiForm::tensor_norm() const {
  double s = 0.0;
  for (const auto& [key, c] : terms_) {
    BigInt copies = 1;
    for (std::size_t i = 0; i < key.size(); ++i) copies *= multinomial(factors_[i].degree, key[i]);
    s += to_double(c * c / BigRational(copies));
  }
  return std::sqrt(s);
}

HomogeneousForm MultiForm::as_homogeneous() const {
  if (factors_.size() != 1) throw Error("as_homogeneous: form has several factors");
  HomogeneousForm::TermMap t;
  for (const auto& [key, c] : terms_) t.emplace(key[0], c);
  return HomogeneousForm(factors_[0].n, factors_[0].degree, std::move(t));
}

MultiForm multi_norm_power(std::span<const FactorShape> shapes_half_degree) {
  std::vector<FactorShape> shapes;
  std::vector<HomogeneousForm> parts;
  for (const auto& s : shapes_half_degree) {
    shapes.push_back({s.n, 2 * s.degree});
    parts.push_back(norm_power(s.n, s.degree));
  }
  MultiForm::TermMap terms{{MultiForm::Key{}, BigRational(1)}};
  for (const auto& part : parts) {
    MultiForm::TermMap next;
    for (const auto& [key, c] : terms)
      for (const auto& [mi, v] : part.terms()) {
        auto k2 = key;
        k2.push_back(mi);
        next.emplace(std::move(k2), c * v);
      }
    terms = std::move(next);
  }
  return MultiForm(std::move(shapes), std::move(terms));
}

std::vector<std::pair<MultiForm::Key, BigRational>> normalized_multi_coeffs(const MultiForm& p) {
  std::vector<std::pair<MultiForm::Key, BigRational>> out;
  for (const auto& [key, c] : p.terms()) {
    BigInt copies = 1;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (p.factors()[i].degree % 2 != 0) throw Error("normalized_multi_coeffs: odd factor degree");
      copies *= multinomial(p.factors()[i].degree, key[i]);
    }
    out.emplace_back(key, c / BigRational(copies));
  }
  return out;
}

double odd_lift_scale(int degree) {
  const double dd = degree;
  return std::pow(dd + 1.0, (dd + 1.0) / 2.0) / std::pow(dd, dd / 2.0);
}

OddLift<MultiForm> odd_lift(const MultiForm& p, int factor) {
  if (factor < 0 || factor >= p.num_factors()) throw Error("odd_lift: factor index out of range");
  const auto fj = static_cast<std::size_t>(factor);
  const int dj = p.factors()[fj].degree;
  if (dj % 2 == 0) throw Error("odd_lift: factor degree " + std::to_string(dj) + " is already even");
  auto shapes = p.factors();
  shapes[fj] = {shapes[fj].n + 1, dj + 1};
  MultiForm::TermMap terms;
  for (const auto& [key, c] : p.terms()) {
    auto k2 = key;
    k2[fj] = key[fj].extended(1);
    terms.emplace(std::move(k2), c);
  }
  return {MultiForm(std::move(shapes), std::move(terms)), odd_lift_scale(dj)};
}

OddLift<HomogeneousForm> odd_lift(const HomogeneousForm& p) {
  auto lifted = odd_lift(MultiForm(p), 0);
  return {lifted.lifted.as_homogeneous(), lifted.scale};
}

std::size_t DenseTensor::size() const {
  std::size_t s = 1;
  for (int d : dims) s *= static_cast<std::size_t>(d);
  return s;
}

double DenseTensor::at(std::span<const int> index) const {
  if (index.size() != dims.size()) throw Error("DenseTensor: index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) flat = flat * static_cast<std::size_t>(dims[i]) + static_cast<std::size_t>(index[i]);
  return data[flat];
}

double DenseTensor::frobenius_norm() const {
  double s = 0.0;
  for (double v : data) s += v * v;
  return std::sqrt(s);
}

namespace {

void check_tensor(const DenseTensor& t) {
  if (t.dims.empty()) throw Error("tensor: order must be at least 1");
  for (int d : t.dims)
    if (d < 1) throw Error("tensor: every dimension must be positive");
  if (t.data.size() != t.size())
    throw Error("tensor: " + std::to_string(t.data.size()) + " entries for dimensions of total size " +
                std::to_string(t.size()));
}

std::vector<int> unflatten(const DenseTensor& t, std::size_t flat) {
  std::vector<int> idx(t.dims.size());
  for (std::size_t i = t.dims.size(); i-- > 0;) {
    idx[i] = static_cast<int>(flat % static_cast<std::size_t>(t.dims[i]));
    flat /= static_cast<std::size_t>(t.dims[i]);
  }
  return idx;
}

}  // namespace

SpectralLift build_spectral_norm_form(const DenseTensor& t, bool normalize) {
  check_tensor(t);
  SpectralLift out;
  out.input_norm = t.frobenius_norm();
  if (normalize) {
    if (out.input_norm == 0.0) throw Error("spectral norm: zero tensor");
    out.scale = out.input_norm;
  }
  std::vector<FactorShape> shapes;
  for (int d : t.dims) shapes.push_back({d + 1, 2});
  MultiForm::TermMap terms;
  for (std::size_t flat = 0; flat < t.data.size(); ++flat) {
    if (t.data[flat] == 0.0) continue;
    const auto idx = unflatten(t, flat);
    MultiForm::Key key;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      std::vector<int> e(static_cast<std::size_t>(t.dims[j]) + 1, 0);
      e[static_cast<std::size_t>(idx[j])] = 1;
      e.back() = 1;
      key.emplace_back(std::move(e));
    }
    terms.emplace(std::move(key), to_rational(t.data[flat] / out.scale));
  }
  out.form = MultiForm(std::move(shapes), std::move(terms));
  return out;
}

MultiForm multilinear_form(const DenseTensor& t) {
  check_tensor(t);
  std::vector<FactorShape> shapes;
  for (int d : t.dims) shapes.push_back({d, 1});
  MultiForm::TermMap terms;
  for (std::size_t flat = 0; flat < t.data.size(); ++flat) {
    if (t.data[flat] == 0.0) continue;
    const auto idx = unflatten(t, flat);
    MultiForm::Key key;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      std::vector<int> e(static_cast<std::size_t>(t.dims[j]), 0);
      e[static_cast<std::size_t>(idx[j])] = 1;
      key.emplace_back(std::move(e));
    }
    terms.emplace(std::move(key), to_rational(t.data[flat]));
  }
  return MultiForm(std::move(shapes), std::move(terms));
}

}  // namespace hrsos
