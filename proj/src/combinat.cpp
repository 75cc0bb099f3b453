#include "hrsos/combinat.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hrsos {

MultiIndex::MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
  for (int e : exps_) {
    if (e < 0) throw Error("MultiIndex: negative exponent");
    degree_ += e;
  }
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.size() != size()) throw Error("MultiIndex: length mismatch");
  std::vector<int> out(exps_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += other.exps_[i];
  return MultiIndex(std::move(out));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (other.size() != size()) throw Error("MultiIndex: length mismatch");
  std::vector<int> out(exps_);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] -= other.exps_[i];
    if (out[i] < 0) throw Error("MultiIndex: difference has a negative entry");
  }
  return MultiIndex(std::move(out));
}

bool MultiIndex::dominates(const MultiIndex& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < exps_.size(); ++i)
    if (exps_[i] < other.exps_[i]) return false;
  return true;
}

MultiIndex MultiIndex::extended(int exponent) const {
  std::vector<int> out(exps_);
  out.push_back(exponent);
  return MultiIndex(std::move(out));
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < exps_.size(); ++i) os << (i ? "," : "") << exps_[i];
  os << ')';
  return os.str();
}

bool canonical_less(std::span<const int> a, std::span<const int> b) {
  const int da = std::accumulate(a.begin(), a.end(), 0);
  const int db = std::accumulate(b.begin(), b.end(), 0);
  if (da != db) return da < db;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    r = r * (n - i) / (i + 1);
    if (r > std::numeric_limits<std::uint64_t>::max())
      throw Error("binomial_u64: overflow");
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t basis_size(int n, int d) {
  if (n < 1 || d < 0) throw Error("basis_size: need n >= 1 and d >= 0");
  return binomial_u64(static_cast<std::uint64_t>(n + d - 1), static_cast<std::uint64_t>(d));
}

namespace {

// Recursion mirrors the order: last coordinate ascending, remaining
// coordinates in canonical order for the leftover degree.
void enumerate_into(int vars, int d, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (vars == 1) {
    cur[0] = d;
    out.emplace_back(cur);
    return;
  }
  for (int last = 0; last <= d; ++last) {
    cur[static_cast<std::size_t>(vars - 1)] = last;
    enumerate_into(vars - 1, d - last, cur, out);
  }
  cur[static_cast<std::size_t>(vars - 1)] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_basis(int n, int d) {
  std::vector<MultiIndex> out;
  out.reserve(basis_size(n, d));
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  enumerate_into(n, d, cur, out);
  return out;
}

std::uint64_t rank(std::span<const int> exps) {
  const int n = static_cast<int>(exps.size());
  int rem = 0;
  for (int e : exps) rem += e;
  std::uint64_t r = 0;
  for (int i = n - 1; i >= 1; --i) {
    const int a = exps[static_cast<std::size_t>(i)];
    if (a > 0) {
      const auto ui = static_cast<std::uint64_t>(i);
      r += binomial_u64(ui + rem, ui) - binomial_u64(ui + rem - a, ui);
    }
    rem -= a;
  }
  return r;
}

MultiIndex unrank(int n, int d, std::uint64_t r) {
  if (r >= basis_size(n, d)) throw Error("unrank: rank out of range");
  std::vector<int> exps(static_cast<std::size_t>(n), 0);
  int rem = d;
  for (int i = n - 1; i >= 1; --i) {
    int a = 0;
    for (;;) {
      const std::uint64_t block =
          binomial_u64(static_cast<std::uint64_t>(i - 1 + rem - a), static_cast<std::uint64_t>(i - 1));
      if (r < block) break;
      r -= block;
      ++a;
    }
    exps[static_cast<std::size_t>(i)] = a;
    rem -= a;
  }
  exps[0] = rem;
  return MultiIndex(std::move(exps));
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 0; i < k; ++i) {
    r *= (n - i);
    r /= (i + 1);
  }
  return r;
}

BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt multinomial(int d, const MultiIndex& alpha) {
  if (alpha.degree() != d) throw Error("multinomial: degree mismatch");
  // Product of binomials avoids the full factorial.
  BigInt r = 1;
  int partial = 0;
  for (int e : alpha.exponents()) {
    partial += e;
    r *= binomial(partial, e);
  }
  return r;
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_multinomial(int d, const MultiIndex& alpha) {
  if (alpha.degree() != d) throw Error("log_multinomial: degree mismatch");
  double s = std::lgamma(d + 1.0);
  for (int e : alpha.exponents()) s -= std::lgamma(e + 1.0);
  return s;
}

BigRational delta(int d) {
  if (d < 1) throw Error("delta: need d >= 1");
  return BigRational(BigInt(1) << d, binomial(2 * d, d));
}

namespace {

BigRational rational_pow(const BigRational& b, int e) {
  BigRational r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

BigRational delta_curve_exact(int d, const BigRational& t) {
  if (d < 1) throw Error("delta_curve: need d >= 1");
  if (t < 0 || t > 1) throw Error("delta_curve: t must lie in [0, 1]");
  const BigRational s = 1 - t;
  BigRational total = 0;
  for (int j = 0; j <= d; ++j) {
    const BigInt c = binomial(d, j);
    BigRational term(c * c, binomial(2 * d, 2 * j));
    term *= rational_pow(t, j);
    term *= rational_pow(s, d - j);
    total += term;
  }
  return total;
}

double delta_curve(int d, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error("delta_curve: t must lie in [0, 1]");
  return to_double(delta_curve_exact(d, to_rational(t)));
}

IdentitySides claim4_check(int d, int s, int k) {
  if (k < 0 || s < k || d < 0) throw Error("claim4_check: need 0 <= k <= s and d >= 0");
  IdentitySides out;
  for (int j = 0; j <= d; ++j) {
    out.lhs += binomial(2 * j, j) * binomial(j, k) * binomial(2 * d - 2 * j, d - j) *
               binomial(d - j, s - k);
  }
  if (s <= d) {
    out.rhs = (BigInt(1) << (2 * (d - s))) * binomial(2 * k, k) *
              binomial(2 * s - 2 * k, s - k) * binomial(d, s);
  }
  return out;
}

namespace {

void split_into(const MultiIndex& gamma, int d, std::size_t pos, std::vector<int>& cur,
                int used, BigInt& acc) {
  const std::size_t n = static_cast<std::size_t>(gamma.size());
  if (pos == n) {
    if (used != d) return;
    MultiIndex alpha(cur);
    MultiIndex beta = gamma - alpha;
    acc += multinomial(d, alpha) * multinomial(d, beta);
    return;
  }
  for (int a = 0; a <= gamma[static_cast<int>(pos)] && used + a <= d; ++a) {
    cur[pos] = a;
    split_into(gamma, d, pos + 1, cur, used + a, acc);
  }
  cur[pos] = 0;
}

}  // namespace

IdentitySides vandermonde_aggregate(const MultiIndex& gamma) {
  if (gamma.degree() % 2 != 0) throw Error("vandermonde_aggregate: odd degree");
  const int d = gamma.degree() / 2;
  IdentitySides out;
  std::vector<int> cur(static_cast<std::size_t>(gamma.size()), 0);
  split_into(gamma, d, 0, cur, 0, out.lhs);
  out.rhs = multinomial(2 * d, gamma);
  return out;
}

BigRational to_rational(double x) {
  if (!std::isfinite(x)) throw Error("to_rational: non-finite value");
  if (x == 0.0) return 0;
  int e = 0;
  const double m = std::frexp(x, &e);  // x = m * 2^e, 0.5 <= |m| < 1
  const auto mant = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  BigRational q{BigInt(mant)};
  if (e >= 0) {
    q *= BigRational(BigInt(1) << e);
  } else {
    q /= BigRational(BigInt(1) << (-e));
  }
  return q;
}

double to_double(const BigRational& q) { return q.convert_to<double>(); }

}  // namespace hrsos
