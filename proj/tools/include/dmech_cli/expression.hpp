#pragma once

#include <dmech/types.hpp>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmech::cli {

using dmech::Vec;

/// Parse failure carrying the 1-based column where it was detected.
class ExpressionError : public std::runtime_error {
 public:
  ExpressionError(int column, const std::string& message)
      : std::runtime_error("col " + std::to_string(column) + ": " + message), column(column) {}
  int column;
};

/// A compiled arithmetic expression over a pair of slot vectors.
///
/// Grammar: +, -, *, / with the usual precedence, right-associative ^,
/// parentheses, decimal literals, the constants `pi` and `e`, and the
/// variables `q0_<i>` / `q1_<i>` indexing the two slots. No function calls.
class Expression {
 public:
  struct Node;

  Expression() = default;

  double eval(const Vec& q0, const Vec& q1) const;

  /// Highest variable index referenced per slot; -1 when the slot is unused.
  int max_q0_index() const { return max_q0_; }
  int max_q1_index() const { return max_q1_; }

  const std::string& text() const { return text_; }
  bool empty() const { return !root_; }

 private:
  friend Expression parse_expression(const std::string& text);
  friend std::vector<Expression> parse_expression_list(const std::string& text);

  std::shared_ptr<const Node> root_;
  std::string text_;
  int max_q0_ = -1;
  int max_q1_ = -1;
};

/// Compile one expression; throws ExpressionError on malformed input.
Expression parse_expression(const std::string& text);

/// Compile a comma-separated list of expressions. Commas cannot occur inside
/// the grammar, so the split is unambiguous.
std::vector<Expression> parse_expression_list(const std::string& text);

}  // namespace dmech::cli
