#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rational.hpp"

namespace poisntt {

using Point = std::vector<double>;

enum class Op : std::uint8_t {
  Const,
  Var,
  // unary
  Neg,
  Sin,
  Cos,
  Exp,
  Ln,
  Sqrt,
  Abs,
  // binary
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // exponent restricted to a rational constant
};

bool is_unary(Op op);
bool is_binary(Op op);

struct ExprNode;

// Immutable symbolic expression over indexed variables and exact rational
// constants. Copies are cheap (shared subtrees); all operations are pure,
// so the same Expr may be evaluated from many threads concurrently.
class Expr {
 public:
  Expr() = default;  // empty handle; only valid as a placeholder

  static Expr constant(Rational value);
  static Expr constant(std::int64_t value) { return constant(Rational(value)); }
  static Expr variable(int index);

  // Smart constructors. Each applies the local, value-preserving
  // simplifications (constant folding, 0*e -> 0, 1*e -> e, e+-0 -> e, ...)
  // so parser output and derivatives come out pre-simplified.
  static Expr neg(Expr a);
  static Expr sin(Expr a);
  static Expr cos(Expr a);
  static Expr exp(Expr a);
  static Expr ln(Expr a);
  static Expr sqrt(Expr a);
  static Expr abs(Expr a);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr div(Expr a, Expr b);
  static Expr pow(Expr base, Rational exponent);

  bool valid() const { return node_ != nullptr; }
  const ExprNode& node() const { return *node_; }
  Op op() const;
  bool is_const() const;
  bool is_const(std::int64_t v) const;
  Rational const_value() const;  // requires is_const()
  int var_index() const;         // requires op() == Op::Var

  friend bool operator==(const Expr& a, const Expr& b) {
    return structurally_equal(a, b);
  }
  static bool structurally_equal(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Op op;
  Rational value;  // Const
  int var = -1;    // Var
  Expr a, b;       // children; unary ops use a only, Pow keeps exponent in b
};

// Evaluation in double precision. Throws EvalError at points outside the
// validity set (zero denominator, ln/sqrt of nonpositive argument, negative
// base under a fractional power, non-finite intermediate).
double evaluate(const Expr& e, std::span<const double> x);

// Exact symbolic partial derivative with respect to variable `var`.
// Total: every well-formed expression has a well-formed derivative.
Expr differentiate(const Expr& e, int var);

// (d/dx_0 e, ..., d/dx_{n-1} e)
std::vector<Expr> gradient(const Expr& e, int n);

// Replaces variable i by map[i]. The replacements live in the caller's
// target variable space; the result references only that space.
Expr substitute(const Expr& e, std::span<const Expr> map);

// Bottom-up rebuild through the smart constructors.
Expr simplify(const Expr& e);

// |symbolic derivative - central difference| at p with step h.
// The finite-difference side is the independent oracle used by the tests.
double derivative_residual(const Expr& e, int var, std::span<const double> p,
                           double h);

// Precedence-aware rendering; print∘parse is the identity on the AST.
std::string to_string(const Expr& e, std::span<const std::string> names);

// Largest variable index referenced, or -1 for closed expressions.
int max_var_index(const Expr& e);

}  // namespace poisntt
