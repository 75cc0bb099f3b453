#pragma once

// Text front end for forms: +, -, *, ^ (nonnegative integer powers),
// parentheses, decimal literals and rational literals such as 3/4.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hrsos/polyform.hpp"

namespace hrsos {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int column)
      : Error(what + " (column " + std::to_string(column) + ")"), column_(column) {}
  int column() const { return column_; }  // 1-based

 private:
  int column_;
};

HomogeneousForm parse_form(std::string_view text, std::span<const std::string> vars);

// One variable group per factor; the expression must be homogeneous in each group.
MultiForm parse_multi_form(std::string_view text, std::span<const std::vector<std::string>> groups);

// "x1,x2,x3" -> {"x1","x2","x3"}
std::vector<std::string> split_variable_list(std::string_view list);

}  // namespace hrsos
