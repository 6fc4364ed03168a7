#include "dmech_cli/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace dmech::cli {

struct Expression::Node {
  enum class Kind { Number, Variable, Negate, Binary };
  Kind kind = Kind::Number;
  double value = 0.0;  // Number
  int slot = 0;        // Variable: 0 -> q0, 1 -> q1
  int index = 0;       // Variable
  char op = 0;         // Binary: + - * / ^
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

struct Token {
  enum class Kind { Number, Ident, Sym, End };
  Kind kind = Kind::End;
  int column = 1;
  double number = 0.0;
  std::string ident;
  char sym = 0;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::Number: return "number";
    case Token::Kind::Ident: return "identifier '" + t.ident + "'";
    case Token::Kind::Sym: return std::string("'") + t.sym + "'";
    case Token::Kind::End: return "end of expression";
  }
  return "token";
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  const char* data = text.data();
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    const int col = static_cast<int>(i) + 1;
    if (std::isdigit(c) || c == '.') {
      Token t;
      t.kind = Token::Kind::Number;
      t.column = col;
      auto [p, ec] = std::from_chars(data + i, data + n, t.number);
      if (ec != std::errc() || p == data + i) throw ExpressionError(col, "malformed number");
      i = static_cast<std::size_t>(p - data);
      out.push_back(std::move(t));
    } else if (std::isalpha(c) || c == '_') {
      std::size_t j = i + 1;
      while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      Token t;
      t.kind = Token::Kind::Ident;
      t.column = col;
      t.ident = text.substr(i, j - i);
      i = j;
      out.push_back(std::move(t));
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' || c == '(' || c == ')' ||
               c == ',') {
      Token t;
      t.kind = Token::Kind::Sym;
      t.column = col;
      t.sym = static_cast<char>(c);
      ++i;
      out.push_back(std::move(t));
    } else {
      throw ExpressionError(col, std::string("unexpected character '") + static_cast<char>(c) +
                                     "'");
    }
  }
  Token end;
  end.kind = Token::Kind::End;
  end.column = static_cast<int>(n) + 1;
  out.push_back(std::move(end));
  return out;
}

NodePtr number_node(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

  NodePtr expr() {
    NodePtr n = term();
    while (at('+') || at('-')) {
      const char op = take().sym;
      n = binary(op, n, term());
    }
    return n;
  }

  const Token& peek() const { return toks_[pos_]; }

  bool at(char sym) const {
    return peek().kind == Token::Kind::Sym && peek().sym == sym;
  }

  const Token& take() { return toks_[pos_++]; }

 private:
  NodePtr term() {
    NodePtr n = unary();
    while (at('*') || at('/')) {
      const char op = take().sym;
      n = binary(op, n, unary());
    }
    return n;
  }

  // Signs bind looser than ^, so -2^2 reads as -(2^2).
  NodePtr unary() {
    if (at('+')) {
      take();
      return unary();
    }
    if (at('-')) {
      take();
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Negate;
      n->lhs = unary();
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (at('^')) {
      take();
      return binary('^', base, unary());  // right-associative exponent
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      take();
      return number_node(t.number);
    }
    if (t.kind == Token::Kind::Ident) {
      take();
      return ident_node(t);
    }
    if (at('(')) {
      take();
      NodePtr n = expr();
      if (!at(')')) throw ExpressionError(peek().column, "expected ')'");
      take();
      return n;
    }
    throw ExpressionError(t.column, describe(t) + " where a value was expected");
  }

  NodePtr ident_node(const Token& t) {
    if (t.ident == "pi") return number_node(std::numbers::pi);
    if (t.ident == "e") return number_node(std::numbers::e);
    if (t.ident.size() > 3 && (t.ident.rfind("q0_", 0) == 0 || t.ident.rfind("q1_", 0) == 0)) {
      const std::string digits = t.ident.substr(3);
      int index = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
      if (ec == std::errc() && p == digits.data() + digits.size()) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Variable;
        n->slot = (t.ident[1] == '1') ? 1 : 0;
        n->index = index;
        return n;
      }
    }
    throw ExpressionError(t.column, "unknown identifier '" + t.ident + "'");
  }

  NodePtr binary(char op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

void collect_max_indices(const Node& n, int& m0, int& m1) {
  switch (n.kind) {
    case Node::Kind::Number: return;
    case Node::Kind::Variable:
      (n.slot == 0 ? m0 : m1) = std::max(n.slot == 0 ? m0 : m1, n.index);
      return;
    case Node::Kind::Negate:
      collect_max_indices(*n.lhs, m0, m1);
      return;
    case Node::Kind::Binary:
      collect_max_indices(*n.lhs, m0, m1);
      collect_max_indices(*n.rhs, m0, m1);
      return;
  }
}

double eval_node(const Node& n, const Vec& q0, const Vec& q1) {
  switch (n.kind) {
    case Node::Kind::Number: return n.value;
    case Node::Kind::Variable: {
      const Vec& q = (n.slot == 0) ? q0 : q1;
      if (n.index >= q.size())
        throw dmech::DimensionError("expression references q" + std::to_string(n.slot) + "_" +
                                    std::to_string(n.index) + " but the point has dimension " +
                                    std::to_string(q.size()));
      return q[n.index];
    }
    case Node::Kind::Negate: return -eval_node(*n.lhs, q0, q1);
    case Node::Kind::Binary: {
      const double l = eval_node(*n.lhs, q0, q1);
      const double r = eval_node(*n.rhs, q0, q1);
      switch (n.op) {
        case '+': return l + r;
        case '-': return l - r;
        case '*': return l * r;
        case '/': return l / r;
        case '^': return std::pow(l, r);
      }
      break;
    }
  }
  throw std::logic_error("expression: corrupt node");
}

}  // namespace

double Expression::eval(const Vec& q0, const Vec& q1) const {
  if (!root_) throw std::logic_error("expression: eval on an empty expression");
  return eval_node(*root_, q0, q1);
}

Expression parse_expression(const std::string& text) {
  const std::vector<Token> toks = lex(text);
  Parser p(toks);
  if (p.peek().kind == Token::Kind::End)
    throw ExpressionError(p.peek().column, "empty expression");
  NodePtr root = p.expr();
  if (p.peek().kind != Token::Kind::End)
    throw ExpressionError(p.peek().column, "unexpected " + describe(p.peek()));
  Expression e;
  e.root_ = std::move(root);
  e.text_ = text;
  collect_max_indices(*e.root_, e.max_q0_, e.max_q1_);
  return e;
}

std::vector<Expression> parse_expression_list(const std::string& text) {
  const std::vector<Token> toks = lex(text);
  Parser p(toks);
  std::vector<Expression> out;
  if (p.peek().kind == Token::Kind::End)
    throw ExpressionError(p.peek().column, "empty expression list");
  while (true) {
    Expression e;
    e.root_ = p.expr();
    e.text_ = text;
    collect_max_indices(*e.root_, e.max_q0_, e.max_q1_);
    out.push_back(std::move(e));
    if (p.at(',')) {
      p.take();
      continue;
    }
    if (p.peek().kind == Token::Kind::End) break;
    throw ExpressionError(p.peek().column, "unexpected " + describe(p.peek()));
  }
  return out;
}

}  // namespace dmech::cli
