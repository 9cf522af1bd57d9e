#include "hexabvp/expr.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <optional>

namespace hexabvp {

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error("syntax error at position " + std::to_string(position) + ": " + what),
      position_(position) {}

DomainError::DomainError(const std::string& what, std::size_t position)
    : std::runtime_error("domain error at position " + std::to_string(position) + ": " + what),
      position_(position) {}

namespace {

constexpr std::array<std::pair<std::string_view, Function>, 8> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"tan", Function::Tan},
    {"atan", Function::Atan},
    {"exp", Function::Exp},
    {"log", Function::Log},
    {"sqrt", Function::Sqrt},
    {"abs", Function::Abs},
}};

std::optional<Function> lookup_function(std::string_view name) {
  for (const auto& [n, f] : kFunctions)
    if (n == name) return f;
  return std::nullopt;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Parser {
 public:
  explicit Parser(std::string_view source) : source_(source), tokens_(tokenize(source)) {}

  Expr parse_all() {
    if (tokens_.empty()) throw ParseError("empty expression", 0);
    Expr e = parse_expr();
    if (pos_ < tokens_.size()) {
      const Token& tok = tokens_[pos_];
      throw ParseError("unexpected '" + tok.lexeme + "'", tok.position);
    }
    return e;
  }

 private:
  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < tokens_.size() ? &tokens_[pos_ + ahead] : nullptr;
  }

  bool peek_is(std::string_view lexeme, std::size_t ahead = 0) const {
    const Token* tok = peek(ahead);
    return tok && (tok->kind == TokenKind::Operator || tok->kind == TokenKind::Paren ||
                   tok->kind == TokenKind::Comma) &&
           tok->lexeme == lexeme;
  }

  std::size_t end_position() const { return source_.size(); }

  [[noreturn]] void fail_here(const std::string& what) const {
    if (const Token* tok = peek()) throw ParseError(what + ", found '" + tok->lexeme + "'", tok->position);
    throw ParseError(what + " at end of input", end_position());
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (peek_is("+") || peek_is("-")) {
      const Token& op = tokens_[pos_++];
      Expr rhs = parse_term();
      lhs = Expr::binary(op.lexeme == "+" ? BinaryOp::Add : BinaryOp::Sub, lhs, rhs, op.position);
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (peek_is("*") || peek_is("/")) {
      const Token& op = tokens_[pos_++];
      Expr rhs = parse_unary();
      lhs = Expr::binary(op.lexeme == "*" ? BinaryOp::Mul : BinaryOp::Div, lhs, rhs, op.position);
    }
    return lhs;
  }

  Expr parse_unary() {
    if (peek_is("-")) {
      const Token& minus = tokens_[pos_++];
      // A minus directly on a literal folds into a negative constant, unless
      // the literal is a power base: -2^2 is -(2^2).
      const Token* next = peek();
      if (next && next->kind == TokenKind::Number && !peek_is("^", 1)) {
        ++pos_;
        return Expr::constant(-parse_number(*next), minus.position);
      }
      return Expr::negate(parse_unary(), minus.position);
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (peek_is("^")) {
      const Token& op = tokens_[pos_++];
      Expr exponent = parse_unary();
      return Expr::binary(BinaryOp::Pow, base, exponent, op.position);
    }
    return base;
  }

  Expr parse_primary() {
    const Token* tok = peek();
    if (!tok) fail_here("expected operand");
    switch (tok->kind) {
      case TokenKind::Number:
        ++pos_;
        return Expr::constant(parse_number(*tok), tok->position);
      case TokenKind::Identifier:
        return parse_identifier();
      case TokenKind::Paren:
        if (tok->lexeme == "(") {
          ++pos_;
          Expr inner = parse_expr();
          if (!peek_is(")")) fail_here("expected ')'");
          ++pos_;
          return inner;
        }
        break;
      default:
        break;
    }
    fail_here("expected operand");
  }

  Expr parse_identifier() {
    const Token& tok = tokens_[pos_++];
    if (tok.lexeme == "t") return Expr::variable(Variable::T, tok.position);
    if (tok.lexeme == "u") return Expr::variable(Variable::U, tok.position);
    if (tok.lexeme == "pi") return Expr::constant(std::numbers::pi, tok.position);
    if (tok.lexeme == "e") return Expr::constant(std::numbers::e, tok.position);
    auto fn = lookup_function(tok.lexeme);
    if (!fn) throw ParseError("unknown identifier '" + tok.lexeme + "'", tok.position);
    if (!peek_is("(")) fail_here("expected '(' after " + tok.lexeme);
    ++pos_;
    Expr arg = parse_expr();
    if (!peek_is(")")) fail_here("expected ')'");
    ++pos_;
    return Expr::call(*fn, arg, tok.position);
  }

  static double parse_number(const Token& tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.lexeme.c_str(), &end);
    if (end != tok.lexeme.c_str() + tok.lexeme.size() || !std::isfinite(v))
      throw ParseError("malformed number '" + tok.lexeme + "'", tok.position);
    return v;
  }

  std::string_view source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

double check_finite(double v, const Node& n, const char* what) {
  if (!std::isfinite(v)) throw DomainError(what, n.position);
  return v;
}

double eval_node(const Node& n, double t, double u) {
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value;
    case NodeKind::Variable:
      return n.variable == Variable::T ? t : u;
    case NodeKind::Negate:
      return -eval_node(*n.lhs, t, u);
    case NodeKind::Binary: {
      const double a = eval_node(*n.lhs, t, u);
      const double b = eval_node(*n.rhs, t, u);
      switch (n.op) {
        case BinaryOp::Add: return check_finite(a + b, n, "overflow in '+'");
        case BinaryOp::Sub: return check_finite(a - b, n, "overflow in '-'");
        case BinaryOp::Mul: return check_finite(a * b, n, "overflow in '*'");
        case BinaryOp::Div:
          if (b == 0.0) throw DomainError("division by zero", n.position);
          return check_finite(a / b, n, "overflow in '/'");
        case BinaryOp::Pow:
          return check_finite(std::pow(a, b), n, "power outside the real domain");
      }
      break;
    }
    case NodeKind::Call: {
      const double x = eval_node(*n.lhs, t, u);
      switch (n.function) {
        case Function::Sin: return std::sin(x);
        case Function::Cos: return std::cos(x);
        case Function::Tan: return check_finite(std::tan(x), n, "tan overflow");
        case Function::Atan: return std::atan(x);
        case Function::Exp: return check_finite(std::exp(x), n, "exp overflow");
        case Function::Log:
          if (!(x > 0.0)) throw DomainError("log of non-positive argument", n.position);
          return std::log(x);
        case Function::Sqrt:
          if (x < 0.0) throw DomainError("sqrt of negative argument", n.position);
          return std::sqrt(x);
        case Function::Abs: return std::fabs(x);
      }
      break;
    }
  }
  throw std::logic_error("corrupt expression node");
}

void collect_vars(const Node& n, std::set<std::string>& out) {
  if (n.kind == NodeKind::Variable) out.insert(n.variable == Variable::T ? "t" : "u");
  if (n.lhs) collect_vars(*n.lhs, out);
  if (n.rhs) collect_vars(*n.rhs, out);
}

std::string format_constant(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", std::fabs(v));
  return std::signbit(v) ? "(-" + std::string(buf) + ")" : std::string(buf);
}

char op_char(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Constant:
      out += format_constant(n.value);
      return;
    case NodeKind::Variable:
      out += n.variable == Variable::T ? 't' : 'u';
      return;
    case NodeKind::Negate:
      out += "(-(";
      print_node(*n.lhs, out);
      out += "))";
      return;
    case NodeKind::Binary:
      out += '(';
      print_node(*n.lhs, out);
      out += ' ';
      out += op_char(n.op);
      out += ' ';
      print_node(*n.rhs, out);
      out += ')';
      return;
    case NodeKind::Call:
      out += function_name(n.function);
      out += '(';
      print_node(*n.lhs, out);
      out += ')';
      return;
  }
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Constant:
      return std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(b.value);
    case NodeKind::Variable:
      return a.variable == b.variable;
    case NodeKind::Negate:
      return nodes_equal(*a.lhs, *b.lhs);
    case NodeKind::Binary:
      return a.op == b.op && nodes_equal(*a.lhs, *b.lhs) && nodes_equal(*a.rhs, *b.rhs);
    case NodeKind::Call:
      return a.function == b.function && nodes_equal(*a.lhs, *b.lhs);
  }
  return false;
}

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < source.size()) {
    const char c = source[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < source.size() && is_digit(source[i + 1]))) {
      while (i < source.size() && (is_digit(source[i]) || source[i] == '.')) ++i;
      // exponent only when a digit follows, so "2e" stays number * e
      if (i < source.size() && (source[i] == 'e' || source[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < source.size() && (source[j] == '+' || source[j] == '-')) ++j;
        if (j < source.size() && is_digit(source[j])) {
          i = j;
          while (i < source.size() && is_digit(source[i])) ++i;
        }
      }
      tokens.push_back({TokenKind::Number, std::string(source.substr(start, i - start)), start});
    } else if (is_ident_start(c)) {
      while (i < source.size() && is_ident_char(source[i])) ++i;
      tokens.push_back({TokenKind::Identifier, std::string(source.substr(start, i - start)), start});
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      tokens.push_back({TokenKind::Operator, std::string(1, c), start});
      ++i;
    } else if (c == '(' || c == ')') {
      tokens.push_back({TokenKind::Paren, std::string(1, c), start});
      ++i;
    } else if (c == ',') {
      tokens.push_back({TokenKind::Comma, ",", start});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }
  return tokens;
}

std::size_t Node::arity() const noexcept {
  switch (kind) {
    case NodeKind::Constant:
    case NodeKind::Variable: return 0;
    case NodeKind::Negate:
    case NodeKind::Call: return 1;
    case NodeKind::Binary: return 2;
  }
  return 0;
}

Expr Expr::constant(double v, std::size_t position) {
  if (!std::isfinite(v)) throw std::invalid_argument("expression constants must be finite");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = v;
  n->position = position;
  return Expr(std::move(n));
}

Expr Expr::variable(Variable v, std::size_t position) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->variable = v;
  n->position = position;
  return Expr(std::move(n));
}

Expr Expr::negate(const Expr& operand, std::size_t position) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Negate;
  n->lhs = operand.root_;
  n->position = position;
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, const Expr& lhs, const Expr& rhs, std::size_t position) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Binary;
  n->op = op;
  n->lhs = lhs.root_;
  n->rhs = rhs.root_;
  n->position = position;
  return Expr(std::move(n));
}

Expr Expr::call(Function f, const Expr& arg, std::size_t position) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Call;
  n->function = f;
  n->lhs = arg.root_;
  n->position = position;
  return Expr(std::move(n));
}

double Expr::evaluate(double t, double u) const {
  if (!root_) throw std::logic_error("evaluating an empty expression");
  return eval_node(*root_, t, u);
}

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  if (!e.empty()) collect_vars(e.root(), out);
  return out;
}

std::string to_string(const Expr& e) {
  std::string out;
  if (!e.empty()) print_node(e.root(), out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return nodes_equal(a.root(), b.root());
}

std::string_view function_name(Function f) {
  for (const auto& [n, fn] : kFunctions)
    if (fn == f) return n;
  return "?";
}

}  // namespace hexabvp
