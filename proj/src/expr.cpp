#include "lk/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "lk/error.hpp"

namespace lk {
namespace {

int node_max_var(const ExprNode& n) {
  int m = n.op == Op::Var ? n.var : -1;
  if (n.lhs) m = std::max(m, node_max_var(*n.lhs));
  if (n.rhs) m = std::max(m, node_max_var(*n.rhs));
  return m;
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (a.op != b.op) return false;
  if (a.op == Op::Number && a.number != b.number) return false;
  if (a.op == Op::Var && a.var != b.var) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !nodes_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !nodes_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

struct FunctionName {
  std::string_view name;
  Op op;
};
constexpr FunctionName kFunctions[] = {{"sin", Op::Sin}, {"cos", Op::Cos},   {"tan", Op::Tan},
                                       {"exp", Op::Exp}, {"log", Op::Log},   {"sqrt", Op::Sqrt}};

std::string_view function_name(Op op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return f.name;
  return "?";
}

bool is_function(Op op) {
  return op == Op::Sin || op == Op::Cos || op == Op::Tan || op == Op::Exp || op == Op::Log ||
         op == Op::Sqrt;
}

// Recursive-descent parser over the raw bytes.
class Parser {
 public:
  Parser(std::string_view text, int dim) : s_(text), dim_(dim) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
    Expr e = additive();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
                                s_[pos_] == '\r'))
      ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr additive() {
    Expr e = multiplicative();
    for (;;) {
      if (accept('+'))
        e = Expr::binary(Op::Add, e, multiplicative());
      else if (accept('-'))
        e = Expr::binary(Op::Sub, e, multiplicative());
      else
        return e;
    }
  }

  Expr multiplicative() {
    Expr e = unary();
    for (;;) {
      if (accept('*'))
        e = Expr::binary(Op::Mul, e, unary());
      else if (accept('/'))
        e = Expr::binary(Op::Div, e, unary());
      else
        return e;
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::unary(Op::Neg, unary());
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::binary(Op::Pow, base, unary());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = additive();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t d0 = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return pos_ - d0;
    };
    std::size_t nd = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) throw ParseError("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < s_.size() && (s_[look] == '+' || s_[look] == '-')) ++look;
      if (look < s_.size() && std::isdigit(static_cast<unsigned char>(s_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) throw ParseError("malformed number", start);
    return Expr::num(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string_view id = s_.substr(start, pos_ - start);
    if (id == "pi") return Expr::pi();
    if (id.size() > 1 && id[0] == 'x' &&
        std::all_of(id.begin() + 1, id.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int index = 0;
      const auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), index);
      if (ec != std::errc() || index >= dim_)
        throw ParseError("variable index out of range: " + std::string(id) + " (dim " +
                             std::to_string(dim_) + ")",
                         start);
      return Expr::var(index);
    }
    for (const auto& f : kFunctions) {
      if (id == f.name) {
        if (!accept('(')) throw ParseError("expected '(' after " + std::string(id), pos_);
        Expr arg = additive();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return Expr::unary(f.op, arg);
      }
    }
    throw ParseError("unknown identifier '" + std::string(id) + "'", start);
  }

  std::string_view s_;
  int dim_;
  std::size_t pos_ = 0;
};

int precedence(const ExprNode& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

void print(const ExprNode& n, std::string& out);

void print_child(const ExprNode& n, bool parens, std::string& out) {
  if (parens) out += '(';
  print(n, out);
  if (parens) out += ')';
}

void print(const ExprNode& n, std::string& out) {
  switch (n.op) {
    case Op::Number: {
      char buf[64];
      const auto r = std::to_chars(buf, buf + sizeof buf, n.number);
      out.append(buf, r.ptr);
      return;
    }
    case Op::Pi:
      out += "pi";
      return;
    case Op::Var:
      out += 'x';
      out += std::to_string(n.var);
      return;
    case Op::Neg:
      out += '-';
      print_child(*n.lhs, precedence(*n.lhs) < 3, out);
      return;
    case Op::Pow:
      print_child(*n.lhs, precedence(*n.lhs) <= 4, out);
      out += '^';
      print_child(*n.rhs, precedence(*n.rhs) < 3, out);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const int p = precedence(n);
      print_child(*n.lhs, precedence(*n.lhs) < p, out);
      out += n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
      print_child(*n.rhs, precedence(*n.rhs) <= p, out);
      return;
    }
    default:
      out += function_name(n.op);
      out += '(';
      print(*n.lhs, out);
      out += ')';
  }
}

[[noreturn]] void domain_failure(const ExprNode& n, const char* why) {
  std::string s;
  print(n, s);
  throw DomainError(std::string(why) + " in '" + s + "'");
}

// Exponents that are constant and integral take the integer-power rule.
bool integral_constant(const ExprNode& n, int& k) {
  if (node_max_var(n) >= 0) return false;
  double v = 0.0;
  if (n.op == Op::Number)
    v = n.number;
  else if (n.op == Op::Neg && n.lhs->op == Op::Number)
    v = -n.lhs->number;
  else
    return false;
  if (v != std::round(v) || std::abs(v) > 64) return false;
  k = static_cast<int>(v);
  return true;
}

template <typename T, typename Leaf>
T eval_node(const ExprNode& n, const Leaf& leaf) {
  using std::cos, std::exp, std::log, std::sin, std::sqrt, std::tan;
  switch (n.op) {
    case Op::Number:
      return leaf.constant(n.number);
    case Op::Pi:
      return leaf.constant(std::numbers::pi);
    case Op::Var:
      return leaf.variable(n.var);
    case Op::Neg:
      return -eval_node<T>(*n.lhs, leaf);
    case Op::Add:
      return eval_node<T>(*n.lhs, leaf) + eval_node<T>(*n.rhs, leaf);
    case Op::Sub:
      return eval_node<T>(*n.lhs, leaf) - eval_node<T>(*n.rhs, leaf);
    case Op::Mul:
      return eval_node<T>(*n.lhs, leaf) * eval_node<T>(*n.rhs, leaf);
    case Op::Div: {
      const T d = eval_node<T>(*n.rhs, leaf);
      if (Leaf::value_of(d) == 0.0) domain_failure(n, "division by zero");
      return eval_node<T>(*n.lhs, leaf) / d;
    }
    case Op::Pow: {
      const T b = eval_node<T>(*n.lhs, leaf);
      int k = 0;
      if (integral_constant(*n.rhs, k)) {
        if (k < 0 && Leaf::value_of(b) == 0.0) domain_failure(n, "negative power of zero");
        return Leaf::integer_power(b, k);
      }
      if (Leaf::value_of(b) <= 0.0) domain_failure(n, "non-integer power of a nonpositive base");
      const T ex = eval_node<T>(*n.rhs, leaf);
      return exp(ex * log(b));
    }
    case Op::Sin:
      return sin(eval_node<T>(*n.lhs, leaf));
    case Op::Cos:
      return cos(eval_node<T>(*n.lhs, leaf));
    case Op::Tan: {
      const T a = eval_node<T>(*n.lhs, leaf);
      if (std::cos(Leaf::value_of(a)) == 0.0) domain_failure(n, "tan at a pole");
      return tan(a);
    }
    case Op::Exp:
      return exp(eval_node<T>(*n.lhs, leaf));
    case Op::Log: {
      const T a = eval_node<T>(*n.lhs, leaf);
      if (Leaf::value_of(a) <= 0.0) domain_failure(n, "log of a nonpositive value");
      return log(a);
    }
    case Op::Sqrt: {
      const T a = eval_node<T>(*n.lhs, leaf);
      if (Leaf::value_of(a) < 0.0) domain_failure(n, "sqrt of a negative value");
      if (Leaf::differentiable && Leaf::value_of(a) == 0.0)
        domain_failure(n, "sqrt is not differentiable at 0");
      return sqrt(a);
    }
  }
  domain_failure(n, "unknown operator");
}

struct DoubleLeaf {
  static constexpr bool differentiable = false;
  std::span<const double> x;
  double constant(double c) const { return c; }
  double variable(int i) const { return x[i]; }
  static double value_of(double v) { return v; }
  static double integer_power(double b, int k) { return std::pow(b, k); }
};

struct JetLeaf {
  static constexpr bool differentiable = true;
  std::span<const Jet2d> vars;
  int dim;
  Jet2d constant(double c) const { return Jet2d::constant(dim, c); }
  Jet2d variable(int i) const { return vars[i]; }
  static double value_of(const Jet2d& v) { return v.value(); }
  static Jet2d integer_power(const Jet2d& b, int k) { return powi(b, k); }
};

}  // namespace

Expr::Expr() : Expr(num(0.0)) {}

Expr::Expr(std::shared_ptr<const ExprNode> root)
    : root_(std::move(root)), max_var_(node_max_var(*root_)) {}

Expr Expr::num(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Number;
  n->number = v;
  return Expr(std::move(n));
}

Expr Expr::pi() {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Pi;
  return Expr(std::move(n));
}

Expr Expr::var(int index) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->var = index;
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr arg) {
  if (op != Op::Neg && !is_function(op)) throw InputError("not a unary operator");
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = arg.root_;
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  if (op != Op::Add && op != Op::Sub && op != Op::Mul && op != Op::Div && op != Op::Pow)
    throw InputError("not a binary operator");
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = lhs.root_;
  n->rhs = rhs.root_;
  return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) { return nodes_equal(*a.root_, *b.root_); }

Expr parse_expr(std::string_view text, int dim) { return Parser(text, dim).parse(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e.root(), out);
  return out;
}

double evaluate(const Expr& e, std::span<const double> x) {
  if (e.max_var() >= static_cast<int>(x.size()))
    throw InputError("expression references x" + std::to_string(e.max_var()) +
                     " but the point has dimension " + std::to_string(x.size()));
  return eval_node<double>(e.root(), DoubleLeaf{x});
}

Jet2d eval_jet2(const Expr& e, std::span<const Jet2d> vars) {
  if (e.max_var() >= static_cast<int>(vars.size()))
    throw InputError("expression references x" + std::to_string(e.max_var()) +
                     " but only " + std::to_string(vars.size()) + " variables were supplied");
  const int dim = vars.empty() ? 0 : vars.front().dim();
  return eval_node<Jet2d>(e.root(), JetLeaf{vars, dim});
}

Jet2d eval_jet2(const Expr& e, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n > kMaxDim) throw InputError("chart dimension exceeds " + std::to_string(kMaxDim));
  std::array<Jet2d, kMaxDim> vars;
  for (int i = 0; i < n; ++i) vars[i] = Jet2d::variable(n, i, x[i]);
  if (n == 0) return eval_node<Jet2d>(e.root(), JetLeaf{{}, 0});
  return eval_jet2(e, std::span<const Jet2d>(vars.data(), n));
}

}  // namespace lk
