#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "geodev/types.hpp"

namespace geodev {

/// Compiled scalar expression in variables x1..xn.
///
/// Grammar: numbers, x1..xn, parentheses, binary + - * / ^ (right
/// associative), unary minus, and the functions sin, cos, exp.
/// Parse failures raise Error{ConfigParse}.
class Expression {
 public:
  struct Node;

  static Expression parse(std::string_view text, int num_vars);

  double operator()(const Vec& x) const;

  const std::string& source() const noexcept { return source_; }
  int num_vars() const noexcept { return num_vars_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
  int num_vars_ = 0;
};

}  // namespace geodev
