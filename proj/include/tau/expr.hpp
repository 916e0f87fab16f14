#pragma once

#include <map>
#include <memory>
#include <string>

namespace tau {

/// Real expression in one variable x. Grammar:
///   expr  := term (('+' | '-') term)*
///   term  := unary (('*' | '/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' unary)?
///   atom  := number | 'x' | name | fn '(' expr ')' | '(' expr ')'
/// fn is exp or ln; names come from the constant table. ^ is right associative.
class Expr {
 public:
  using Constants = std::map<std::string, double>;

  /// Throws ConfigError with the offending position on bad input.
  static Expr parse(const std::string& text, const Constants& constants = {});

  double operator()(double x) const;
  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace tau
