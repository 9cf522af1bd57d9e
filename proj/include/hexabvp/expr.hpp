#pragma once

// Scalar expressions in the variables t and u.
//
// Grammar, lowest precedence first:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 't' | 'u' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//
// so `^` binds tighter than unary minus and is right-associative
// (-t^2 == -(t^2), 2^3^2 == 2^(3^2)).

#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hexabvp {

enum class TokenKind { Number, Identifier, Operator, Paren, Comma };

struct Token {
  TokenKind kind;
  std::string lexeme;
  std::size_t position;  // byte offset into the source
};

/// Raised for malformed input; position is the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Raised when evaluation leaves the real domain (log of non-positive, 1/0, ...).
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::size_t position);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

std::vector<Token> tokenize(std::string_view source);

enum class NodeKind { Constant, Variable, Negate, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Tan, Atan, Exp, Log, Sqrt, Abs };
enum class Variable { T, U };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;                 // Constant
  Variable variable = Variable::T;    // Variable
  BinaryOp op = BinaryOp::Add;        // Binary
  Function function = Function::Sin;  // Call
  NodePtr lhs;                        // Negate, Binary, Call operand
  NodePtr rhs;                        // Binary
  std::size_t position = 0;

  std::size_t arity() const noexcept;
};

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  static Expr constant(double v, std::size_t position = 0);
  static Expr variable(Variable v, std::size_t position = 0);
  static Expr negate(const Expr& operand, std::size_t position = 0);
  static Expr binary(BinaryOp op, const Expr& lhs, const Expr& rhs, std::size_t position = 0);
  static Expr call(Function f, const Expr& arg, std::size_t position = 0);

  const Node& root() const { return *root_; }
  bool empty() const noexcept { return !root_; }

  double evaluate(double t, double u) const;

 private:
  NodePtr root_;
};

Expr parse(std::string_view source);

inline double evaluate(const Expr& e, double t, double u) { return e.evaluate(t, u); }

/// Variable names ("t", "u") appearing anywhere in the tree.
std::set<std::string> free_vars(const Expr& e);

/// Fully parenthesized text that parses back to a structurally identical tree.
std::string to_string(const Expr& e);

/// Structural equality (constants compared bitwise).
bool structurally_equal(const Expr& a, const Expr& b);

std::string_view function_name(Function f);

}  // namespace hexabvp
