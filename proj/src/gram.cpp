#include "hrsos/gram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace hrsos {

std::uint64_t BasisTag::dim() const {
  std::uint64_t total = 1;
  for (const auto& f : factors) {
    const std::uint64_t s = basis_size(f.n, f.degree);
    if (s != 0 && total > std::numeric_limits<std::uint64_t>::max() / s) throw Error("basis dimension overflows");
    total *= s;
  }
  return total;
}

BasisTag single_basis(int n, int k) { return BasisTag{{FactorShape{n, k}}}; }

BasisTag product_basis(std::span<const int> ns, int k) {
  BasisTag tag;
  for (int n : ns) tag.factors.push_back({n, k});
  return tag;
}

namespace {

Eigen::Index checked_dim(const BasisTag& tag) {
  const std::uint64_t d = tag.dim();
  if (d > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
    throw Error("matrix dimension " + std::to_string(d) + " exceeds the sparse index range");
  return static_cast<Eigen::Index>(d);
}

}  // namespace

SparseSymMatrix::SparseSymMatrix(BasisTag tag, Storage upper) : tag_(std::move(tag)), upper_(std::move(upper)) {
  const Eigen::Index n = checked_dim(tag_);
  if (upper_.rows() != n || upper_.cols() != n) throw Error("SparseSymMatrix: storage size does not match basis");
  for (Eigen::Index c = 0; c < upper_.outerSize(); ++c)
    for (Storage::InnerIterator it(upper_, c); it; ++it)
      if (it.row() > it.col()) throw Error("SparseSymMatrix: entry below the diagonal");
  upper_.makeCompressed();
}

SparseSymMatrix SparseSymMatrix::from_triplets(BasisTag tag, const std::vector<Eigen::Triplet<double>>& triplets) {
  const Eigen::Index n = checked_dim(tag);
  std::vector<Eigen::Triplet<double>> up;
  up.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (t.row() < 0 || t.col() < 0 || t.row() >= n || t.col() >= n) throw Error("triplet index out of range");
    if (t.row() <= t.col()) up.push_back(t);
    else up.emplace_back(t.col(), t.row(), t.value());
  }
  Storage s(n, n);
  s.setFromTriplets(up.begin(), up.end());
  return SparseSymMatrix(std::move(tag), std::move(s));
}

SparseSymMatrix SparseSymMatrix::from_dense(BasisTag tag, const Eigen::MatrixXd& dense) {
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index j = 0; j < dense.cols(); ++j)
    for (Eigen::Index i = 0; i <= j && i < dense.rows(); ++i)
      if (dense(i, j) != 0.0) t.emplace_back(static_cast<int>(i), static_cast<int>(j), dense(i, j));
  if (dense.rows() != dense.cols() || static_cast<std::uint64_t>(dense.rows()) != tag.dim())
    throw Error("from_dense: size does not match basis");
  return from_triplets(std::move(tag), t);
}

SparseSymMatrix SparseSymMatrix::identity(BasisTag tag) {
  const Eigen::Index n = checked_dim(tag);
  Storage s(n, n);
  s.setIdentity();
  return SparseSymMatrix(std::move(tag), std::move(s));
}

double SparseSymMatrix::coeff(Eigen::Index i, Eigen::Index j) const {
  if (i > j) std::swap(i, j);
  return upper_.coeff(i, j);
}

SparseSymMatrix::Storage SparseSymMatrix::full() const {
  Storage f = upper_.selfadjointView<Eigen::Upper>();
  f.makeCompressed();
  return f;
}

Eigen::MatrixXd SparseSymMatrix::to_dense() const { return Eigen::MatrixXd(full()); }

double SparseSymMatrix::frobenius_norm() const {
  double s = 0;
  for (Eigen::Index c = 0; c < upper_.outerSize(); ++c)
    for (Storage::InnerIterator it(upper_, c); it; ++it) s += (it.row() == it.col() ? 1.0 : 2.0) * it.value() * it.value();
  return std::sqrt(s);
}

double SparseSymMatrix::trace() const { return upper_.diagonal().sum(); }

// ---------------------------------------------------------------------------
// assembly

namespace {

// Table of C(i + r, i) for the rank formula.
class Ranker {
 public:
  Ranker(int n, int kmax) : n_(n), stride_(static_cast<std::size_t>(kmax) + 1) {
    table_.assign(static_cast<std::size_t>(n) * stride_, std::numeric_limits<std::uint64_t>::max());
    for (int i = 0; i < n; ++i)
      for (int r = 0; r <= kmax; ++r) {
        try {
          table_[static_cast<std::size_t>(i) * stride_ + static_cast<std::size_t>(r)] =
              binomial_u64(static_cast<std::uint64_t>(i + r), static_cast<std::uint64_t>(i));
        } catch (const Error&) {
          break;  // larger r overflow too; never reached for representable bases
        }
      }
  }

  std::uint64_t operator()(const int* e, int degree) const {
    std::uint64_t r = 0;
    int rem = degree;
    for (int i = n_ - 1; i >= 1; --i) {
      r += at(i, rem) - at(i, rem - e[i]);
      rem -= e[i];
    }
    return r;
  }

 private:
  std::uint64_t at(int i, int r) const {
    return table_[static_cast<std::size_t>(i) * stride_ + static_cast<std::size_t>(r)];
  }
  int n_;
  std::size_t stride_;
  std::vector<std::uint64_t> table_;
};

struct Pair {
  std::vector<int> alpha;
  std::vector<int> beta;
  double coef;  // C(d,alpha) C(d,beta)
};

void split_pairs(const MultiIndex& g, int d, std::vector<int>& alpha, int pos, int left, std::vector<Pair>& out) {
  const int n = g.size();
  if (pos == n - 1) {
    if (left > g[pos]) return;
    alpha[static_cast<std::size_t>(pos)] = left;
    std::vector<int> beta(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) beta[static_cast<std::size_t>(i)] = g[i] - alpha[static_cast<std::size_t>(i)];
    const double c = multinomial(d, MultiIndex(alpha)).convert_to<double>() *
                     multinomial(d, MultiIndex(beta)).convert_to<double>();
    out.push_back({alpha, std::move(beta), c});
    return;
  }
  for (int a = std::min(left, g[pos]); a >= 0; --a) {
    alpha[static_cast<std::size_t>(pos)] = a;
    split_pairs(g, d, alpha, pos + 1, left - a, out);
  }
}

std::vector<Pair> pairs_of(const MultiIndex& g, int d) {
  std::vector<Pair> out;
  std::vector<int> alpha(static_cast<std::size_t>(g.size()), 0);
  split_pairs(g, d, alpha, 0, d, out);
  return out;
}

struct FactorKernel {
  int n = 1;
  int d = 0;  // half degree
  int s = 0;  // k - d
  int k = 0;
  std::vector<int> gammas;  // flattened enumerate_basis(n, s)
  std::size_t count = 0;
  double log_den = 0;  // sum_{t=1}^d log(s+t)
  Ranker ranker;

  FactorKernel(int n_, int d_, int k_) : n(n_), d(d_), s(k_ - d_), k(k_), ranker(n_, k_) {
    for (const auto& g : enumerate_basis(n, s))
      for (int e : g.exponents()) gammas.push_back(e);
    count = gammas.size() / static_cast<std::size_t>(n);
    for (int t = 1; t <= d; ++t) log_den += std::log(static_cast<double>(s + t));
  }
};

struct Emit {
  std::uint64_t row;
  std::uint64_t col;
  double w;
};

// (rank(alpha+gamma), rank(beta+gamma), C(s,gamma)/sqrt(C(k,mu)C(k,nu))) over all gamma.
void factor_emits(const FactorKernel& f, const Pair& pr, const std::vector<double>& logs, std::vector<Emit>& out) {
  out.clear();
  out.reserve(f.count);
  std::vector<int> mu(static_cast<std::size_t>(f.n)), nu(static_cast<std::size_t>(f.n));
  for (std::size_t gi = 0; gi < f.count; ++gi) {
    const int* g = &f.gammas[gi * static_cast<std::size_t>(f.n)];
    double lw = 0;
    for (int j = 0; j < f.n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      for (int t = 1; t <= pr.alpha[ju]; ++t) lw += logs[static_cast<std::size_t>(g[j] + t)];
      for (int t = 1; t <= pr.beta[ju]; ++t) lw += logs[static_cast<std::size_t>(g[j] + t)];
      mu[ju] = pr.alpha[ju] + g[j];
      nu[ju] = pr.beta[ju] + g[j];
    }
    const double w = std::exp(0.5 * lw - f.log_den);
    out.push_back({f.ranker(mu.data(), f.k), f.ranker(nu.data(), f.k), w});
  }
}

struct WorkItem {
  std::size_t term;
  std::vector<std::size_t> pair_idx;  // one per factor
};

SparseSymMatrix assemble(const MultiForm& p, const std::vector<int>& ks, const AssemblyOptions& opts) {
  const auto& shapes = p.factors();
  const std::size_t m = shapes.size();
  if (ks.size() != m) throw Error("Gram assembly: one level per factor required");
  std::vector<int> ds;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& f = shapes[i];
    const int k = ks[i];
    if (f.degree % 2 != 0)
      throw Error("Gram assembly needs even degree in every factor (got " + std::to_string(f.degree) +
                  "); apply the odd-degree lift first");
    ds.push_back(f.degree / 2);
    if (k < f.degree / 2) throw Error("level k=" + std::to_string(k) + " is below the half degree " +
                                      std::to_string(f.degree / 2));
  }
  BasisTag tag;
  for (std::size_t i = 0; i < m; ++i) tag.factors.push_back({shapes[i].n, ks[i]});
  checked_dim(tag);

  std::vector<FactorKernel> kernels;
  for (std::size_t i = 0; i < m; ++i) kernels.emplace_back(shapes[i].n, ds[i], ks[i]);

  int top = 0;
  for (std::size_t i = 0; i < m; ++i) top = std::max(top, ks[i] + ds[i]);
  std::vector<double> logs(static_cast<std::size_t>(top) + 2, 0.0);
  for (std::size_t t = 1; t < logs.size(); ++t) logs[t] = std::log(static_cast<double>(t));

  const auto coeffs = normalized_multi_coeffs(p);
  std::vector<double> cvals;
  std::vector<std::vector<std::vector<Pair>>> pairs;  // [term][factor]
  std::vector<WorkItem> items;
  for (std::size_t t = 0; t < coeffs.size(); ++t) {
    cvals.push_back(to_double(coeffs[t].second));
    std::vector<std::vector<Pair>> per;
    for (std::size_t i = 0; i < m; ++i) per.push_back(pairs_of(coeffs[t].first[i], ds[i]));
    std::vector<std::size_t> idx(m, 0);
    bool empty = false;
    for (const auto& v : per) empty = empty || v.empty();
    pairs.push_back(std::move(per));
    if (empty) continue;
    for (;;) {
      items.push_back({t, idx});
      std::size_t i = m;
      while (i > 0 && ++idx[i - 1] == pairs[t][i - 1].size()) idx[--i] = 0;
      if (i == 0) break;
    }
  }

  std::vector<std::uint64_t> dims(m);
  for (std::size_t i = 0; i < m; ++i) dims[i] = basis_size(shapes[i].n, ks[i]);

  auto run = [&](std::size_t begin, std::size_t end, std::vector<Eigen::Triplet<double>>& buf) {
    std::vector<std::vector<Emit>> em(m);
    std::vector<std::size_t> sel(m);
    for (std::size_t it = begin; it < end; ++it) {
      const auto& item = items[it];
      double coef = cvals[item.term];
      for (std::size_t i = 0; i < m; ++i) {
        const Pair& pr = pairs[item.term][i][item.pair_idx[i]];
        coef *= pr.coef;
        factor_emits(kernels[i], pr, logs, em[i]);
      }
      if (coef == 0.0) continue;
      std::fill(sel.begin(), sel.end(), 0);
      for (;;) {
        std::uint64_t row = 0, col = 0;
        double w = coef;
        for (std::size_t i = 0; i < m; ++i) {
          const Emit& e = em[i][sel[i]];
          row = row * dims[i] + e.row;
          col = col * dims[i] + e.col;
          w *= e.w;
        }
        if (row <= col) buf.emplace_back(static_cast<int>(row), static_cast<int>(col), w);
        std::size_t i = m;
        while (i > 0 && ++sel[i - 1] == em[i - 1].size()) sel[--i] = 0;
        if (i == 0) break;
      }
    }
  };

  const std::size_t nthreads =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(1, opts.threads)), items.size()));
  std::vector<std::vector<Eigen::Triplet<double>>> buffers(nthreads);
  if (nthreads == 1) {
    run(0, items.size(), buffers[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (items.size() + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
      const std::size_t b = std::min(items.size(), t * chunk), e = std::min(items.size(), (t + 1) * chunk);
      pool.emplace_back(run, b, e, std::ref(buffers[t]));
    }
    for (auto& th : pool) th.join();
  }
  std::size_t total = 0;
  for (const auto& b : buffers) total += b.size();
  std::vector<Eigen::Triplet<double>> all;
  all.reserve(total);
  for (auto& b : buffers) {
    all.insert(all.end(), b.begin(), b.end());
    std::vector<Eigen::Triplet<double>>().swap(b);
  }
  const auto n = static_cast<Eigen::Index>(tag.dim());
  SparseSymMatrix::Storage s(n, n);
  s.setFromTriplets(all.begin(), all.end());
  return SparseSymMatrix(std::move(tag), std::move(s));
}

}  // namespace

SparseSymMatrix build_M(const HomogeneousForm& p, const AssemblyOptions& opts) {
  if (p.degree() % 2 != 0) throw Error("build_M: odd degree " + std::to_string(p.degree()));
  return build_Pk(p, p.degree() / 2, opts);
}

SparseSymMatrix build_Pk(const HomogeneousForm& p, int k, const AssemblyOptions& opts) {
  if (p.degree() % 2 != 0) throw Error("build_Pk: odd degree " + std::to_string(p.degree()));
  if (k < p.degree() / 2) throw Error("build_Pk: k=" + std::to_string(k) + " < d=" + std::to_string(p.degree() / 2));
  return assemble(MultiForm(p), {k}, opts);
}

SparseSymMatrix build_Nk(int n, int d, int k, const AssemblyOptions& opts) {
  if (d < 1 || n < 1) throw Error("build_Nk: need n >= 1 and d >= 1");
  if (k < d) throw Error("build_Nk: k=" + std::to_string(k) + " < d=" + std::to_string(d));
  return build_Pk(norm_power(n, d), k, opts);
}

SparseSymMatrix build_multi_Pk(const MultiForm& p, int k, const AssemblyOptions& opts) {
  if (p.num_factors() == 0) throw Error("build_multi_Pk: no factors");
  return assemble(p, std::vector<int>(static_cast<std::size_t>(p.num_factors()), k), opts);
}

SparseSymMatrix build_multi_Pk(const MultiForm& p, const std::vector<int>& ks, const AssemblyOptions& opts) {
  if (p.num_factors() == 0) throw Error("build_multi_Pk: no factors");
  return assemble(p, ks, opts);
}

SparseSymMatrix build_multi_M(const MultiForm& p, const AssemblyOptions& opts) {
  std::vector<int> ds;
  for (const auto& f : p.factors()) {
    if (f.degree % 2 != 0) throw Error("build_multi_M: odd factor degree " + std::to_string(f.degree));
    ds.push_back(f.degree / 2);
  }
  return build_multi_Pk(p, ds, opts);
}

SparseSymMatrix build_multi_Nk(std::span<const int> ns, std::span<const int> ds, int k, const AssemblyOptions& opts) {
  if (ns.size() != ds.size() || ns.empty()) throw Error("build_multi_Nk: factor lists differ in length");
  std::vector<FactorShape> shapes;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ds[i] < 1) throw Error("build_multi_Nk: half degrees must be positive");
    shapes.push_back({ns[i], ds[i]});
  }
  return assemble(multi_norm_power(shapes), std::vector<int>(ns.size(), k), opts);
}

// ---------------------------------------------------------------------------
// exact mode

BigRational RationalGram::trace() const {
  BigRational t = 0;
  for (const auto& [rc, v] : numer)
    if (rc.first == rc.second) t += v / BigRational(weight[rc.first]);
  return t;
}

Eigen::MatrixXd RationalGram::to_dense() const {
  const auto n = static_cast<Eigen::Index>(weight.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [rc, v] : numer) {
    const BigRational w = BigRational(weight[rc.first]) * BigRational(weight[rc.second]);
    const double x = to_double(v) / std::sqrt(to_double(w));
    const auto r = static_cast<Eigen::Index>(rc.first), c = static_cast<Eigen::Index>(rc.second);
    a(r, c) = x;
    a(c, r) = x;
  }
  return a;
}

RationalGram build_Pk_exact(const HomogeneousForm& p, int k) {
  if (p.degree() % 2 != 0) throw Error("build_Pk_exact: odd degree");
  const int d = p.degree() / 2;
  if (k < d) throw Error("build_Pk_exact: k < d");
  if (k - d > 10) throw Error("build_Pk_exact: exact mode is limited to k - d <= 10");
  const int n = p.num_vars();
  RationalGram out;
  out.tag = single_basis(n, k);
  for (const auto& mu : enumerate_basis(n, k)) out.weight.push_back(multinomial(k, mu));
  const auto gammas = enumerate_basis(n, k - d);
  for (const auto& [g, c] : normalize_coeffs(p).coeffs) {
    for (const auto& pr : pairs_of(g, d)) {
      const MultiIndex a(pr.alpha), b(pr.beta);
      const BigRational base = c * BigRational(multinomial(d, a) * multinomial(d, b));
      for (const auto& gm : gammas) {
        const std::uint64_t r = rank(a + gm), col = rank(b + gm);
        if (r > col) continue;
        out.numer[{r, col}] += base * BigRational(multinomial(k - d, gm));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// embeddings and evaluation

Eigen::VectorXd embed(int k, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n < 1) throw Error("embed: empty point");
  const auto basis = enumerate_basis(n, k);
  Eigen::VectorXd out(static_cast<Eigen::Index>(basis.size()));
  std::vector<double> logx(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) logx[j] = x[j] == 0.0 ? 0.0 : std::log(std::abs(x[j]));
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const auto& mu = basis[r];
    double lv = 0.5 * log_multinomial(k, mu);
    int neg = 0;
    bool zero = false;
    for (int j = 0; j < n; ++j) {
      if (mu[j] == 0) continue;
      if (x[static_cast<std::size_t>(j)] == 0.0) { zero = true; break; }
      lv += mu[j] * logx[static_cast<std::size_t>(j)];
      if (x[static_cast<std::size_t>(j)] < 0) neg += mu[j];
    }
    out[static_cast<Eigen::Index>(r)] = zero ? 0.0 : ((neg % 2) ? -std::exp(lv) : std::exp(lv));
  }
  return out;
}

Eigen::VectorXd embed(const BasisTag& tag, std::span<const std::vector<double>> points) {
  if (points.size() != tag.factors.size()) throw Error("embed: number of points does not match the basis");
  Eigen::VectorXd acc = Eigen::VectorXd::Ones(1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (static_cast<int>(points[i].size()) != tag.factors[i].n) throw Error("embed: point dimension mismatch");
    const Eigen::VectorXd v = embed(tag.factors[i].degree, points[i]);
    Eigen::VectorXd next(acc.size() * v.size());
    for (Eigen::Index a = 0; a < acc.size(); ++a) next.segment(a * v.size(), v.size()) = acc[a] * v;
    acc = std::move(next);
  }
  return acc;
}

Eigen::VectorXcd embed_complex(int k, std::span<const std::complex<double>> z) {
  const int n = static_cast<int>(z.size());
  if (n < 1) throw Error("embed_complex: empty point");
  const auto basis = enumerate_basis(n, k);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t r = 0; r < basis.size(); ++r) {
    std::complex<double> v = std::sqrt(std::exp(log_multinomial(k, basis[r])));
    for (int j = 0; j < n; ++j)
      for (int e = 0; e < basis[r][j]; ++e) v *= z[static_cast<std::size_t>(j)];
    out[static_cast<Eigen::Index>(r)] = v;
  }
  return out;
}

namespace {

const FactorShape& single_factor(const SparseSymMatrix& a, std::size_t n, const char* who) {
  if (a.basis().factors.size() != 1) throw Error(std::string(who) + ": matrix is not on a single symmetric power");
  const auto& f = a.basis().factors[0];
  if (static_cast<std::size_t>(f.n) != n)
    throw Error(std::string(who) + ": point has " + std::to_string(n) + " coordinates, matrix expects " +
                std::to_string(f.n));
  return f;
}

template <class Vec>
double quadratic_upper(const SparseSymMatrix& a, const Vec& psi) {
  double v = 0;
  const auto& u = a.upper();
  for (Eigen::Index c = 0; c < u.outerSize(); ++c)
    for (SparseSymMatrix::Storage::InnerIterator it(u, c); it; ++it) {
      const auto r = it.row();
      if (r == c) v += it.value() * std::norm(std::complex<double>(psi[r]));
      else v += 2.0 * it.value() * std::real(std::conj(std::complex<double>(psi[r])) * std::complex<double>(psi[c]));
    }
  return v;
}

}  // namespace

double hermitian_value(const SparseSymMatrix& a, std::span<const std::complex<double>> z) {
  const auto& f = single_factor(a, z.size(), "hermitian_value");
  return quadratic_upper(a, embed_complex(f.degree, z));
}

double hermitian_value(const SparseSymMatrix& a, std::span<const double> x) {
  const auto& f = single_factor(a, x.size(), "hermitian_value");
  return quadratic_upper(a, embed(f.degree, x));
}

double gram_value(const SparseSymMatrix& a, std::span<const std::vector<double>> points) {
  const Eigen::VectorXd psi = embed(a.basis(), points);
  return psi.dot(a.upper().selfadjointView<Eigen::Upper>() * psi);
}

bool check_partial_transpose(const SparseSymMatrix& a, double tol) {
  if (a.basis().factors.size() != 1) throw Error("check_partial_transpose: single-factor matrix required");
  const int n = a.basis().factors[0].n, d = a.basis().factors[0].degree;
  if (d < 1) return true;
  std::uint64_t words = 1;
  for (int i = 0; i < d; ++i) {
    words *= static_cast<std::uint64_t>(n);
    if (words > 4096) throw Error("check_partial_transpose: n^d exceeds 4096");
  }
  const Eigen::MatrixXd dense = a.to_dense();
  const auto nw = static_cast<std::size_t>(words);
  std::vector<Eigen::Index> type(nw);
  std::vector<double> scale(nw);
  std::vector<int> counts(static_cast<std::size_t>(n));
  for (std::size_t w = 0; w < nw; ++w) {
    std::fill(counts.begin(), counts.end(), 0);
    std::size_t rest = w;
    for (int i = 0; i < d; ++i) {
      ++counts[rest % static_cast<std::size_t>(n)];
      rest /= static_cast<std::size_t>(n);
    }
    const MultiIndex mi(counts);
    type[w] = static_cast<Eigen::Index>(rank(mi));
    scale[w] = 1.0 / std::sqrt(multinomial(d, mi).convert_to<double>());
  }
  auto full = [&](std::size_t w, std::size_t v) { return dense(type[w], type[v]) * scale[w] * scale[v]; };
  const double bound = tol * std::max(1.0, dense.cwiseAbs().maxCoeff());
  const std::size_t tail = nw / static_cast<std::size_t>(n);  // words are (first letter) * tail + rest
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j)
      for (std::size_t u = 0; u < tail; ++u)
        for (std::size_t v = 0; v < tail; ++v)
          if (std::abs(full(i * tail + u, j * tail + v) - full(j * tail + u, i * tail + v)) > bound) return false;
  return true;
}

double kappa_conjectured(int n, int d) {
  // C(x, j) = prod_{t=1}^{j} (x - j + t) / t, equal to the Gamma-function ratio.
  const double x = n / 2.0 + d - 1;
  const int j = d / 2;
  double c = 1;
  for (int t = 1; t <= j; ++t) c *= (x - j + t) / t;
  return c;
}

KappaResult kappa_N(int n, int d) {
  if (basis_size(n, d) > 5000) throw Error("kappa_N: basis too large for a dense eigendecomposition");
  const Eigen::MatrixXd nd = build_Nk(n, d, d).to_dense();
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(nd, Eigen::EigenvaluesOnly).eigenvalues();
  return {ev.maxCoeff() / ev.minCoeff(), kappa_conjectured(n, d)};
}

// ---------------------------------------------------------------------------
// coordinate text format

void write_coo(std::ostream& os, const SparseSymMatrix& a) {
  os << "% hrsos-coo";
  for (const auto& f : a.basis().factors) os << ' ' << f.n << ':' << f.degree;
  os << " dim " << a.dim() << " nnz " << a.nnz() << '\n';
  char buf[64];
  const auto& u = a.upper();
  for (Eigen::Index c = 0; c < u.outerSize(); ++c)
    for (SparseSymMatrix::Storage::InnerIterator it(u, c); it; ++it) {
      const auto res = std::to_chars(buf, buf + sizeof buf, it.value());
      os << it.row() + 1 << ' ' << c + 1 << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf))
         << '\n';
    }
}

SparseSymMatrix read_coo(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("% hrsos-coo", 0) != 0) throw Error("read_coo: missing header line");
  std::istringstream hs(line.substr(11));
  BasisTag tag;
  std::string tok;
  while (hs >> tok && tok != "dim") {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw Error("read_coo: malformed basis entry '" + tok + "'");
    tag.factors.push_back({std::stoi(tok.substr(0, colon)), std::stoi(tok.substr(colon + 1))});
  }
  if (tag.factors.empty()) throw Error("read_coo: header names no basis");
  std::vector<Eigen::Triplet<double>> t;
  long long r = 0, c = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    std::string val;
    if (!(ls >> r >> c >> val)) throw Error("read_coo: malformed line '" + line + "'");
    double v = 0;
    const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
    if (res.ec != std::errc{}) throw Error("read_coo: bad value '" + val + "'");
    t.emplace_back(static_cast<int>(r - 1), static_cast<int>(c - 1), v);
  }
  return SparseSymMatrix::from_triplets(std::move(tag), t);
}

}  // namespace hrsos
