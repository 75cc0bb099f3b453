#include "hrsos/parser.hpp"

#include <cctype>
#include <map>
#include <numeric>
#include <unordered_map>

namespace hrsos {

namespace {

constexpr int kMaxExponent = 10000;

// Expanded polynomial. Cancelled monomials stay in the map with a zero
// coefficient so that the degree of an identically zero form is recoverable.
using Poly = std::map<std::vector<int>, BigRational>;

Poly constant(std::size_t n, const BigRational& c) { return Poly{{std::vector<int>(n, 0), c}}; }

void add_into(Poly& acc, const Poly& other, int sign) {
  for (const auto& [m, c] : other) {
    auto& slot = acc[m];
    if (sign > 0) slot += c; else slot -= c;
  }
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      std::vector<int> m(ma);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
      out[m] += ca * cb;
    }
  return out;
}

Poly power(const Poly& base, int e, std::size_t n) {
  Poly result = constant(n, 1);
  Poly b = base;
  while (e > 0) {
    if (e & 1) result = multiply(result, b);
    e >>= 1;
    if (e) b = multiply(b, b);
  }
  return result;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars) : text_(text), n_(vars.size()) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].empty()) throw Error("empty variable name");
      if (!index_.emplace(vars[i], i).second) throw Error("duplicate variable name '" + vars[i] + "'");
    }
  }

  Poly parse() {
    skip_ws();
    if (at_end()) fail("empty expression");
    Poly p = expr();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected character '") + peek() + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t pos) const {
    throw ParseError(msg, static_cast<int>(pos) + 1);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Poly expr() {
    Poly acc = term();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') return acc;
      ++pos_;
      add_into(acc, term(), c == '+' ? 1 : -1);
    }
  }

  Poly term() {
    Poly acc = factor();
    for (;;) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        acc = multiply(acc, factor());
      } else if (peek() == '/') {
        fail("division is only allowed inside a rational literal such as 3/4");
      } else {
        return acc;
      }
    }
  }

  Poly factor() {
    skip_ws();
    if (peek() == '-' || peek() == '+') {
      const char c = peek();
      ++pos_;
      Poly p = factor();
      if (c == '-')
        for (auto& [m, v] : p) v = -v;
      return p;
    }
    Poly base = primary();
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      const std::size_t start = pos_;
      if (peek() == '-') fail("negative exponents are not allowed");
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a nonnegative integer exponent");
      long long e = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        e = e * 10 + (peek() - '0');
        if (e > kMaxExponent) fail_at("exponent too large", start);
        ++pos_;
      }
      if (peek() == '.' || peek() == 'e' || peek() == 'E') fail_at("fractional exponents are not allowed", start);
      return power(base, static_cast<int>(e), n_);
    }
    return base;
  }

  Poly primary() {
    skip_ws();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Poly p = expr();
      skip_ws();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return constant(n_, number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      const auto it = index_.find(name);
      if (it == index_.end()) fail_at("unknown variable '" + name + "'", start);
      std::vector<int> m(n_, 0);
      m[it->second] = 1;
      return Poly{{m, BigRational(1)}};
    }
    if (at_end()) fail("unexpected end of expression");
    fail(std::string("unexpected character '") + c + "'");
  }

  BigRational number() {
    const std::size_t start = pos_;
    BigInt mant = 0;
    int scale = 0;
    bool digits = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      mant = mant * 10 + (peek() - '0');
      digits = true;
      ++pos_;
    }
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        mant = mant * 10 + (peek() - '0');
        --scale;
        digits = true;
        ++pos_;
      }
    }
    if (!digits) fail_at("malformed number", start);
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail_at("malformed exponent in number", start);
      int e = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        e = e * 10 + (peek() - '0');
        if (e > 4000) fail_at("number exponent too large", start);
        ++pos_;
      }
      scale += sign * e;
    }
    BigRational value(mant);
    const BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(scale)));
    if (scale > 0) value *= BigRational(ten_pow);
    if (scale < 0) value /= BigRational(ten_pow);

    // Rational literal p/q: the denominator must be an integer literal.
    std::size_t save = pos_;
    skip_ws();
    if (peek() == '/') {
      ++pos_;
      skip_ws();
      const std::size_t dstart = pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        fail("division is only allowed inside a rational literal such as 3/4");
      BigInt den = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        den = den * 10 + (peek() - '0');
        ++pos_;
      }
      if (peek() == '.' || peek() == 'e' || peek() == 'E')
        fail_at("rational literal denominator must be an integer", dstart);
      if (den == 0) fail_at("division by zero", dstart);
      value /= BigRational(den);
    } else {
      pos_ = save;
    }
    return value;
  }

  std::string_view text_;
  std::size_t n_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t pos_ = 0;
};

int degree_of(const std::vector<int>& m, std::size_t begin, std::size_t end) {
  return std::accumulate(m.begin() + static_cast<std::ptrdiff_t>(begin),
                         m.begin() + static_cast<std::ptrdiff_t>(end), 0);
}

// Degree shared by the nonzero terms over the variable range; the maximum
// structural degree if everything cancelled.
int common_degree(const Poly& p, std::size_t begin, std::size_t end, const std::string& what) {
  int deg = -1;
  int structural = 0;
  for (const auto& [m, c] : p) {
    const int d = degree_of(m, begin, end);
    structural = std::max(structural, d);
    if (c == 0) continue;
    if (deg < 0) {
      deg = d;
    } else if (d != deg) {
      throw ParseError("expression is not homogeneous" + what + ": found degrees " + std::to_string(deg) +
                           " and " + std::to_string(d),
                       1);
    }
  }
  return deg < 0 ? structural : deg;
}

}  // namespace

HomogeneousForm parse_form(std::string_view text, std::span<const std::string> vars) {
  if (vars.empty()) throw Error("parse_form: no variables given");
  std::vector<std::string> names(vars.begin(), vars.end());
  const Poly p = Parser(text, names).parse();
  const int degree = common_degree(p, 0, names.size(), "");
  HomogeneousForm::TermMap terms;
  for (const auto& [m, c] : p)
    if (c != 0) terms.emplace(MultiIndex(m), c);
  return HomogeneousForm(static_cast<int>(names.size()), degree, std::move(terms));
}

MultiForm parse_multi_form(std::string_view text, std::span<const std::vector<std::string>> groups) {
  if (groups.empty()) throw Error("parse_multi_form: no variable groups given");
  std::vector<std::string> names;
  std::vector<std::size_t> offsets{0};
  for (const auto& g : groups) {
    if (g.empty()) throw Error("parse_multi_form: empty variable group");
    names.insert(names.end(), g.begin(), g.end());
    offsets.push_back(names.size());
  }
  const Poly p = Parser(text, names).parse();
  std::vector<FactorShape> shapes;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const int deg = common_degree(p, offsets[i], offsets[i + 1], " in variable group " + std::to_string(i + 1));
    shapes.push_back({static_cast<int>(groups[i].size()), deg});
  }
  MultiForm::TermMap terms;
  for (const auto& [m, c] : p) {
    if (c == 0) continue;
    MultiForm::Key key;
    for (std::size_t i = 0; i < groups.size(); ++i)
      key.emplace_back(std::vector<int>(m.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
                                        m.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1])));
    terms.emplace(std::move(key), c);
  }
  return MultiForm(std::move(shapes), std::move(terms));
}

std::vector<std::string> split_variable_list(std::string_view list) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : list) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  for (const auto& v : out)
    if (v.empty()) throw Error("empty name in variable list '" + std::string(list) + "'");
  return out;
}

}  // namespace hrsos
