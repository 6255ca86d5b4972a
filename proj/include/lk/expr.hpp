#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "lk/jet.hpp"

namespace lk {

enum class Op { Number, Pi, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Tan, Exp, Log, Sqrt };

struct ExprNode {
  Op op = Op::Number;
  double number = 0.0;  // Op::Number
  int var = -1;         // Op::Var
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

/// Immutable expression tree over x0..x{n-1}. Subtrees are shared, copies are cheap.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr num(double v);
  static Expr pi();
  static Expr var(int index);
  static Expr unary(Op op, Expr arg);
  static Expr binary(Op op, Expr lhs, Expr rhs);

  const ExprNode& root() const noexcept { return *root_; }

  /// Largest variable index referenced, or -1 for constant expressions.
  int max_var() const noexcept { return max_var_; }
  bool is_constant() const noexcept { return max_var_ < 0; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> root);
  std::shared_ptr<const ExprNode> root_;
  int max_var_ = -1;
};

/// Parses a metric-component expression. Precedence from loosest to tightest:
/// `+ -`, `* /`, unary minus, `^` (right associative). Functions: sin cos tan
/// exp log sqrt; constant `pi`; variables x0..x{dim-1}.
Expr parse_expr(std::string_view text, int dim);

/// Minimal-parenthesis rendering that parses back to the same tree.
std::string to_string(const Expr& e);

/// Plain evaluation. Throws DomainError with the offending subexpression.
double evaluate(const Expr& e, std::span<const double> x);

/// Value, gradient and Hessian with respect to all `x.size()` coordinates.
Jet2d eval_jet2(const Expr& e, std::span<const double> x);

/// Evaluation over caller-supplied jets for the variables (used when an
/// expression is composed with another map, e.g. a chart restriction).
Jet2d eval_jet2(const Expr& e, std::span<const Jet2d> vars);

}  // namespace lk
