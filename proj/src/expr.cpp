#include "expr.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "errors.hpp"

namespace poisntt {

bool is_unary(Op op) { return op >= Op::Neg && op <= Op::Abs; }
bool is_binary(Op op) { return op >= Op::Add && op <= Op::Pow; }

namespace {

std::shared_ptr<const ExprNode> make_node(ExprNode n) {
  return std::make_shared<const ExprNode>(std::move(n));
}

}  // namespace

Expr Expr::constant(Rational value) {
  ExprNode n;
  n.op = Op::Const;
  n.value = value;
  return Expr(make_node(std::move(n)));
}

Expr Expr::variable(int index) {
  if (index < 0) throw std::logic_error("negative variable index");
  ExprNode n;
  n.op = Op::Var;
  n.var = index;
  return Expr(make_node(std::move(n)));
}

Op Expr::op() const { return node_->op; }
bool Expr::is_const() const { return node_->op == Op::Const; }
bool Expr::is_const(std::int64_t v) const {
  return is_const() && node_->value == Rational(v);
}
Rational Expr::const_value() const { return node_->value; }
int Expr::var_index() const { return node_->var; }

Expr Expr::neg(Expr a) {
  if (a.is_const()) return constant(Rational::negate(a.const_value()));
  if (a.op() == Op::Neg) return a.node().a;
  ExprNode n;
  n.op = Op::Neg;
  n.a = std::move(a);
  return Expr(make_node(std::move(n)));
}

Expr Expr::sin(Expr a) {
  if (a.is_const(0)) return constant(0);
  ExprNode n;
  n.op = Op::Sin;
  n.a = std::move(a);
  return Expr(make_node(std::move(n)));
}

Expr Expr::cos(Expr a) {
  if (a.is_const(0)) return constant(1);
  ExprNode n;
  n.op = Op::Cos;
  n.a = std::move(a);
  return Expr(make_node(std::move(n)));
}

Expr Expr::exp(Expr a) {
  if (a.is_const(0)) return constant(1);
  ExprNode n;
  n.op = Op::Exp;
  n.a = std::move(a);
  return Expr(make_node(std::move(n)));
}

Expr Expr::ln(Expr a) {
  if (a.is_const(1)) return constant(0);
  ExprNode n;
  n.op = Op::Ln;
  n.a = std::move(a);
  return Expr(make_node(std::move(n)));
}

Expr Expr::sqrt(Expr a) {
  if (a.is_const(0)) return constant(0);
  if (a.is_const(1)) return constant(1);
  ExprNode n;
  n.op = Op::Sqrt;
  n.a = std::move(a);
  return Expr(make_node(std::move(n)));
}

Expr Expr::abs(Expr a) {
  if (a.is_const()) return constant(Rational::abs(a.const_value()));
  ExprNode n;
  n.op = Op::Abs;
  n.a = std::move(a);
  return Expr(make_node(std::move(n)));
}

Expr Expr::add(Expr a, Expr b) {
  if (a.is_const() && b.is_const()) {
    if (auto r = Rational::add(a.const_value(), b.const_value())) {
      return constant(*r);
    }
  }
  if (a.is_const(0)) return b;
  if (b.is_const(0)) return a;
  ExprNode n;
  n.op = Op::Add;
  n.a = std::move(a);
  n.b = std::move(b);
  return Expr(make_node(std::move(n)));
}

Expr Expr::sub(Expr a, Expr b) {
  if (a.is_const() && b.is_const()) {
    if (auto r = Rational::sub(a.const_value(), b.const_value())) {
      return constant(*r);
    }
  }
  if (b.is_const(0)) return a;
  if (a.is_const(0)) return neg(std::move(b));
  ExprNode n;
  n.op = Op::Sub;
  n.a = std::move(a);
  n.b = std::move(b);
  return Expr(make_node(std::move(n)));
}

Expr Expr::mul(Expr a, Expr b) {
  if (a.is_const() && b.is_const()) {
    if (auto r = Rational::mul(a.const_value(), b.const_value())) {
      return constant(*r);
    }
  }
  if (a.is_const(0) || b.is_const(0)) return constant(0);
  if (a.is_const(1)) return b;
  if (b.is_const(1)) return a;
  ExprNode n;
  n.op = Op::Mul;
  n.a = std::move(a);
  n.b = std::move(b);
  return Expr(make_node(std::move(n)));
}

Expr Expr::div(Expr a, Expr b) {
  if (a.is_const() && b.is_const() && !b.const_value().is_zero()) {
    if (auto r = Rational::div(a.const_value(), b.const_value())) {
      return constant(*r);
    }
  }
  if (b.is_const(1)) return a;
  // 0/e -> 0 shrinks the validity set only where e itself vanishes.
  if (a.is_const(0) && !b.is_const()) return constant(0);
  ExprNode n;
  n.op = Op::Div;
  n.a = std::move(a);
  n.b = std::move(b);
  return Expr(make_node(std::move(n)));
}

Expr Expr::pow(Expr base, Rational exponent) {
  if (exponent.is_zero()) return constant(1);  // 0^0 == 1 by convention
  if (exponent.is_one()) return base;
  if (base.is_const() && exponent.is_integer()) {
    if (auto r = Rational::pow(base.const_value(), exponent.num())) {
      return constant(*r);
    }
  }
  ExprNode n;
  n.op = Op::Pow;
  n.a = std::move(base);
  n.b = constant(exponent);
  return Expr(make_node(std::move(n)));
}

bool Expr::structurally_equal(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const ExprNode& x = *a.node_;
  const ExprNode& y = *b.node_;
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::Const:
      return x.value == y.value;
    case Op::Var:
      return x.var == y.var;
    default:
      if (is_unary(x.op)) return structurally_equal(x.a, y.a);
      return structurally_equal(x.a, y.a) && structurally_equal(x.b, y.b);
  }
}

namespace {

std::string default_names_string(const Expr& e);

[[noreturn]] void eval_fail(const Expr& e, std::span<const double> x,
                            const char* what) {
  std::string msg = std::string(what) + " in '" + default_names_string(e) +
                    "' at (";
  char buf[32];
  for (size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", x[i]);
    if (i) msg += ", ";
    msg += buf;
  }
  msg += ")";
  throw EvalError(std::move(msg), Point(x.begin(), x.end()));
}

double eval_pow(const Expr& e, std::span<const double> x, double base,
                const Rational& expo) {
  if (expo.is_integer()) {
    return std::pow(base, static_cast<double>(expo.num()));
  }
  if (base < 0.0) {
    eval_fail(e, x, "fractional power of negative base");
  }
  if (base == 0.0) {
    if (expo.negative()) eval_fail(e, x, "zero base under negative power");
    return 0.0;
  }
  return std::pow(base, expo.to_double());
}

}  // namespace

double evaluate(const Expr& e, std::span<const double> x) {
  const ExprNode& n = e.node();
  double v = 0.0;
  switch (n.op) {
    case Op::Const:
      return n.value.to_double();
    case Op::Var:
      if (n.var >= static_cast<int>(x.size())) {
        eval_fail(e, x, "variable index out of range");
      }
      return x[static_cast<size_t>(n.var)];
    case Op::Neg:
      v = -evaluate(n.a, x);
      break;
    case Op::Sin:
      v = std::sin(evaluate(n.a, x));
      break;
    case Op::Cos:
      v = std::cos(evaluate(n.a, x));
      break;
    case Op::Exp:
      v = std::exp(evaluate(n.a, x));
      break;
    case Op::Ln: {
      double a = evaluate(n.a, x);
      if (a <= 0.0) eval_fail(e, x, "logarithm of nonpositive argument");
      v = std::log(a);
      break;
    }
    case Op::Sqrt: {
      double a = evaluate(n.a, x);
      if (a < 0.0) eval_fail(e, x, "square root of negative argument");
      v = std::sqrt(a);
      break;
    }
    case Op::Abs:
      v = std::fabs(evaluate(n.a, x));
      break;
    case Op::Add:
      v = evaluate(n.a, x) + evaluate(n.b, x);
      break;
    case Op::Sub:
      v = evaluate(n.a, x) - evaluate(n.b, x);
      break;
    case Op::Mul:
      v = evaluate(n.a, x) * evaluate(n.b, x);
      break;
    case Op::Div: {
      double b = evaluate(n.b, x);
      if (b == 0.0) eval_fail(e, x, "division by zero");
      v = evaluate(n.a, x) / b;
      break;
    }
    case Op::Pow:
      v = eval_pow(e, x, evaluate(n.a, x), n.b.const_value());
      break;
  }
  if (!std::isfinite(v)) eval_fail(e, x, "non-finite value");
  return v;
}

Expr differentiate(const Expr& e, int var) {
  const ExprNode& n = e.node();
  switch (n.op) {
    case Op::Const:
      return Expr::constant(0);
    case Op::Var:
      return Expr::constant(n.var == var ? 1 : 0);
    case Op::Neg:
      return Expr::neg(differentiate(n.a, var));
    case Op::Sin:
      return Expr::mul(Expr::cos(n.a), differentiate(n.a, var));
    case Op::Cos:
      return Expr::neg(Expr::mul(Expr::sin(n.a), differentiate(n.a, var)));
    case Op::Exp:
      return Expr::mul(e, differentiate(n.a, var));
    case Op::Ln:
      return Expr::div(differentiate(n.a, var), n.a);
    case Op::Sqrt:
      return Expr::div(differentiate(n.a, var),
                       Expr::mul(Expr::constant(2), e));
    case Op::Abs:
      // d|u| = u/|u| * du; undefined where u == 0, which evaluation reports
      // as a division by zero.
      return Expr::mul(Expr::div(n.a, e), differentiate(n.a, var));
    case Op::Add:
      return Expr::add(differentiate(n.a, var), differentiate(n.b, var));
    case Op::Sub:
      return Expr::sub(differentiate(n.a, var), differentiate(n.b, var));
    case Op::Mul:
      return Expr::add(Expr::mul(differentiate(n.a, var), n.b),
                       Expr::mul(n.a, differentiate(n.b, var)));
    case Op::Div:
      if (n.b.is_const()) {
        return Expr::div(differentiate(n.a, var), n.b);
      }
      return Expr::div(
          Expr::sub(Expr::mul(differentiate(n.a, var), n.b),
                    Expr::mul(n.a, differentiate(n.b, var))),
          Expr::pow(n.b, Rational(2)));
    case Op::Pow: {
      Rational c = n.b.const_value();
      auto cm1 = Rational::sub(c, Rational(1));
      if (!cm1) return Expr::constant(0);  // unreachable: c fits int64
      return Expr::mul(
          Expr::mul(Expr::constant(c), Expr::pow(n.a, *cm1)),
          differentiate(n.a, var));
    }
  }
  throw std::logic_error("unhandled op in differentiate");
}

std::vector<Expr> gradient(const Expr& e, int n) {
  std::vector<Expr> g;
  g.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g.push_back(differentiate(e, i));
  return g;
}

Expr substitute(const Expr& e, std::span<const Expr> map) {
  const ExprNode& n = e.node();
  switch (n.op) {
    case Op::Const:
      return e;
    case Op::Var:
      if (n.var >= static_cast<int>(map.size())) {
        throw std::logic_error("substitute: unmapped variable");
      }
      return map[static_cast<size_t>(n.var)];
    case Op::Neg:
      return Expr::neg(substitute(n.a, map));
    case Op::Sin:
      return Expr::sin(substitute(n.a, map));
    case Op::Cos:
      return Expr::cos(substitute(n.a, map));
    case Op::Exp:
      return Expr::exp(substitute(n.a, map));
    case Op::Ln:
      return Expr::ln(substitute(n.a, map));
    case Op::Sqrt:
      return Expr::sqrt(substitute(n.a, map));
    case Op::Abs:
      return Expr::abs(substitute(n.a, map));
    case Op::Add:
      return Expr::add(substitute(n.a, map), substitute(n.b, map));
    case Op::Sub:
      return Expr::sub(substitute(n.a, map), substitute(n.b, map));
    case Op::Mul:
      return Expr::mul(substitute(n.a, map), substitute(n.b, map));
    case Op::Div:
      return Expr::div(substitute(n.a, map), substitute(n.b, map));
    case Op::Pow:
      return Expr::pow(substitute(n.a, map), n.b.const_value());
  }
  throw std::logic_error("unhandled op in substitute");
}

Expr simplify(const Expr& e) {
  const ExprNode& n = e.node();
  switch (n.op) {
    case Op::Const:
    case Op::Var:
      return e;
    case Op::Neg:
      return Expr::neg(simplify(n.a));
    case Op::Sin:
      return Expr::sin(simplify(n.a));
    case Op::Cos:
      return Expr::cos(simplify(n.a));
    case Op::Exp:
      return Expr::exp(simplify(n.a));
    case Op::Ln:
      return Expr::ln(simplify(n.a));
    case Op::Sqrt:
      return Expr::sqrt(simplify(n.a));
    case Op::Abs:
      return Expr::abs(simplify(n.a));
    case Op::Add:
      return Expr::add(simplify(n.a), simplify(n.b));
    case Op::Sub:
      return Expr::sub(simplify(n.a), simplify(n.b));
    case Op::Mul:
      return Expr::mul(simplify(n.a), simplify(n.b));
    case Op::Div:
      return Expr::div(simplify(n.a), simplify(n.b));
    case Op::Pow:
      return Expr::pow(simplify(n.a), n.b.const_value());
  }
  throw std::logic_error("unhandled op in simplify");
}

double derivative_residual(const Expr& e, int var, std::span<const double> p,
                           double h) {
  Point lo(p.begin(), p.end());
  Point hi(p.begin(), p.end());
  lo[static_cast<size_t>(var)] -= h;
  hi[static_cast<size_t>(var)] += h;
  double central = (evaluate(e, hi) - evaluate(e, lo)) / (2.0 * h);
  double symbolic = evaluate(differentiate(e, var), p);
  return std::fabs(symbolic - central);
}

namespace {

// Levels: 1 add/sub, 2 mul/div, 3 unary minus, 4 pow, 5 atom.
int print_level(const Expr& e) {
  switch (e.op()) {
    case Op::Const: {
      Rational v = e.const_value();
      if (!v.is_integer()) return 2;  // prints as p/q
      if (v.negative()) return 3;     // prints as -k
      return 5;
    }
    case Op::Var:
      return 5;
    case Op::Neg:
      return 3;
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Pow:
      return 4;
    default:
      return 5;  // function call syntax
  }
}

void print_rec(const Expr& e, std::span<const std::string> names,
               std::string& out);

void print_child(const Expr& child, std::span<const std::string> names,
                 std::string& out, int min_level) {
  if (print_level(child) < min_level) {
    out += '(';
    print_rec(child, names, out);
    out += ')';
  } else {
    print_rec(child, names, out);
  }
}

void print_rec(const Expr& e, std::span<const std::string> names,
               std::string& out) {
  const ExprNode& n = e.node();
  switch (n.op) {
    case Op::Const:
      out += n.value.to_string();
      return;
    case Op::Var: {
      int i = n.var;
      if (i < static_cast<int>(names.size())) {
        out += names[static_cast<size_t>(i)];
      } else {
        out += "x" + std::to_string(i + 1);
      }
      return;
    }
    case Op::Neg:
      out += '-';
      print_child(n.a, names, out, 3);
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Ln:
    case Op::Sqrt:
    case Op::Abs: {
      static const char* fn[] = {"sin", "cos", "exp", "ln", "sqrt", "abs"};
      out += fn[static_cast<int>(n.op) - static_cast<int>(Op::Sin)];
      out += '(';
      print_rec(n.a, names, out);
      out += ')';
      return;
    }
    case Op::Add:
    case Op::Sub:
      print_child(n.a, names, out, 1);
      out += (n.op == Op::Add) ? '+' : '-';
      print_child(n.b, names, out, 2);  // right operand binds as a term
      return;
    case Op::Mul:
    case Op::Div:
      print_child(n.a, names, out, 2);
      out += (n.op == Op::Mul) ? '*' : '/';
      print_child(n.b, names, out, 3);  // right operand binds as a unary
      return;
    case Op::Pow:
      print_child(n.a, names, out, 5);
      out += '^';
      print_child(n.b, names, out, 5);
      return;
  }
}

std::string default_names_string(const Expr& e) {
  return to_string(e, {});
}

}  // namespace

std::string to_string(const Expr& e, std::span<const std::string> names) {
  std::string out;
  print_rec(e, names, out);
  return out;
}

int max_var_index(const Expr& e) {
  const ExprNode& n = e.node();
  switch (n.op) {
    case Op::Const:
      return -1;
    case Op::Var:
      return n.var;
    default:
      if (is_unary(n.op)) return max_var_index(n.a);
      return std::max(max_var_index(n.a), max_var_index(n.b));
  }
}

}  // namespace poisntt
