#include "doctest.h"

#include "hrsos/parser.hpp"
#include "oracles.hpp"

using namespace hrsos;

namespace {

const std::vector<std::string> xyz{"x1", "x2", "x3"};

int error_column(const std::string& text, const std::vector<std::string>& vars = xyz) {
  try {
    parse_form(text, vars);
  } catch (const ParseError& e) {
    return e.column();
  }
  return -1;
}

}  // namespace

TEST_CASE("Motzkin parses to the expected terms") {
  const auto p = parse_form("x1^2*x2^2*(x1^2+x2^2-3*x3^2)+x3^6", xyz);
  CHECK(p.degree() == 6);
  CHECK(p.terms() == oracle::motzkin().terms());
}

TEST_CASE("literals") {
  const std::vector<std::string> v{"x", "y"};
  auto p = parse_form("3/4*x^2 - 0.25*y^2 + 1e-1*x*y", v);
  CHECK(p.terms().at(MultiIndex{2, 0}) == BigRational(3, 4));
  CHECK(p.terms().at(MultiIndex{0, 2}) == BigRational(-1, 4));
  CHECK(p.terms().at(MultiIndex{1, 1}) == BigRational(1, 10));
  p = parse_form("-(x - y)^2", v);
  CHECK(p.terms().at(MultiIndex{1, 1}) == 2);
  CHECK(p.terms().at(MultiIndex{2, 0}) == -1);
  p = parse_form("(x+y)^3 - (x+y)*(x+y)^2", v);
  CHECK(p.is_zero());
  CHECK(p.degree() == 3);
  CHECK(parse_form("x^0*y", v).degree() == 1);
}

TEST_CASE("errors carry the column") {
  CHECK(error_column("x1^2 + * x2") == 8);
  CHECK(error_column("x1 + x4") == 6);
  CHECK(error_column("x1^-2") == 4);
  CHECK(error_column("x1^1.5") == 4);
  CHECK(error_column("x1/x2") == 3);
  CHECK(error_column("(x1 + x2") == 9);
  CHECK(error_column("x1^2 + x2") == 1);  // not homogeneous
  CHECK(error_column("") == 1);
  CHECK(error_column("x1 x2") == 4);
  CHECK_THROWS_AS(parse_form("x1", std::vector<std::string>{"x1", "x1"}), Error);
  try {
    parse_form("x1 + $", xyz);
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("column 6") != std::string::npos);
  }
}

TEST_CASE("multi-homogeneous parsing") {
  const std::vector<std::vector<std::string>> groups{{"x1", "x2"}, {"y1", "y2"}};
  const auto p = parse_multi_form("(x1*y1 + x2*y2)^2", groups);
  CHECK(p.num_factors() == 2);
  CHECK(p.factors()[0] == FactorShape{2, 2});
  CHECK(p.factors()[1] == FactorShape{2, 2});
  CHECK(p.terms().size() == 3);
  CHECK_THROWS_AS(parse_multi_form("x1*y1 + x1^2*y2", groups), ParseError);
}

TEST_CASE("variable lists") {
  CHECK(split_variable_list("x1, x2,x3") == xyz);
  CHECK_THROWS_AS(split_variable_list("x1,,x2"), Error);
}
