#pragma once

// Shared fixtures and generators for the test suites: the harmonic
// oscillator, the so(3)-type and Lotka-Volterra-type 3d systems, the 4d
// canonical symplectic matrix, and deterministic random expressions.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ntt.hpp"
#include "parser.hpp"
#include "poisson.hpp"
#include "system_file.hpp"

namespace fx {

using namespace poisntt;

inline const std::vector<std::string> vars2{"x1", "x2"};
inline const std::vector<std::string> vars3{"x1", "x2", "x3"};
inline const std::vector<std::string> vars4{"x1", "x2", "x3", "x4"};

inline Expr E(const std::string& src, const std::vector<std::string>& vars) {
  return parse_expression(src, vars);
}

inline Domain box(std::vector<std::array<double, 2>> ranges,
                  std::vector<Expr> exclusions = {},
                  double eps = 1e-6) {
  Domain d;
  d.box = std::move(ranges);
  d.exclusions = std::move(exclusions);
  d.epsilon_exclude = eps;
  return d;
}

inline SamplePlan plan_for(const PoissonSystem& sys, int points = 200,
                           std::uint64_t seed = 42) {
  SamplePlan plan;
  plan.points = points;
  plan.seed = seed;
  plan.domain = sys.domain;
  return plan;
}

// Harmonic oscillator: J = [[0,1],[-1,0]], H = (x1^2+x2^2)/2, symplectic.
// Verification box sits in the positive quadrant so the reference etas
// (x1, x2, x1*x2, powers of x1^2+x2^2) are sign-definite on it.
inline PoissonSystem example1() {
  StructureMatrix J(2);
  J.set_upper(0, 1, Expr::constant(1));
  PoissonSystem sys{vars2, J, E("(x1^2 + x2^2)/2", vars2), {}, 2,
                    box({{0.25, 1.25}, {0.25, 1.25}})};
  return sys;
}

// Same oscillator on a box that contains the unit circle, for trajectories.
inline PoissonSystem example1_wide() {
  PoissonSystem sys = example1();
  sys.domain = box({{-1.2, 1.2}, {-1.2, 1.2}});
  return sys;
}

// so(3)-type 3d system: J12 = x3, J13 = -x2, J23 = x1, rank 2,
// C = |x|^2 / 2, H = x1^2/2 + x2^2. Box [0.5, 2]^3.
inline PoissonSystem so3() {
  StructureMatrix J(3);
  J.set_upper(0, 1, E("x3", vars3));
  J.set_upper(0, 2, E("-x2", vars3));
  J.set_upper(1, 2, E("x1", vars3));
  PoissonSystem sys{vars3, J, E("x1^2/2 + x2^2", vars3),
                    {E("(x1^2 + x2^2 + x3^2)/2", vars3)}, 2,
                    box({{0.5, 2.0}, {0.5, 2.0}, {0.5, 2.0}})};
  return sys;
}

// Same system on a box that contains whole orbits (for integration tests);
// the origin neighborhood is excluded to keep the rank constant.
inline PoissonSystem so3_wide() {
  PoissonSystem sys = so3();
  sys.domain = box({{-2.0, 2.0}, {-2.0, 2.0}, {-2.0, 2.0}},
                   {E("x1^2 + x2^2 + x3^2", vars3)}, 0.01);
  return sys;
}

// Lotka-Volterra-type 3d structure matrix: J12 = x1*x2, J13 = -x1*x3,
// J23 = x2*x3 (rank 2 on the positive octant).
inline StructureMatrix lotka_volterra_matrix() {
  StructureMatrix J(3);
  J.set_upper(0, 1, E("x1*x2", vars3));
  J.set_upper(0, 2, E("-x1*x3", vars3));
  J.set_upper(1, 2, E("x2*x3", vars3));
  return J;
}

// Constant skew 3x3 matrix (always a structure matrix).
inline StructureMatrix constant_skew3() {
  StructureMatrix J(3);
  J.set_upper(0, 1, Expr::constant(1));
  J.set_upper(0, 2, E("-2", vars3));
  J.set_upper(1, 2, Expr::constant(3));
  return J;
}

// Canonical 4x4 symplectic matrix [[0, I], [-I, 0]].
inline StructureMatrix canonical4() {
  StructureMatrix J(4);
  J.set_upper(0, 2, Expr::constant(1));
  J.set_upper(1, 3, Expr::constant(1));
  return J;
}

inline SamplePlan plan3(int points = 200, std::uint64_t seed = 42) {
  SamplePlan plan;
  plan.points = points;
  plan.seed = seed;
  plan.domain = box({{0.5, 2.0}, {0.5, 2.0}, {0.5, 2.0}});
  return plan;
}

inline SamplePlan plan4(int points = 200, std::uint64_t seed = 42) {
  SamplePlan plan;
  plan.points = points;
  plan.seed = seed;
  plan.domain = box({{0.5, 2.0}, {0.5, 2.0}, {0.5, 2.0}, {0.5, 2.0}});
  return plan;
}

// --- deterministic random generators ------------------------------------

// Random polynomial in nvars variables, total degree <= degree. With
// positive_coeffs every coefficient is a positive rational, so the
// polynomial (and its z1-derivative, if it has a z1 term) stays positive on
// positive boxes.
inline Expr random_polynomial(std::mt19937_64& rng, int nvars, int degree,
                              bool positive_coeffs) {
  std::uniform_int_distribution<int> n_terms(2, 5);
  std::uniform_int_distribution<int> coeff(1, 4);
  std::uniform_int_distribution<int> den(1, 2);
  std::uniform_int_distribution<int> deg(0, degree);
  Expr sum = Expr::constant(0);
  int terms = n_terms(rng);
  for (int t = 0; t < terms; ++t) {
    std::int64_t c = coeff(rng);
    if (!positive_coeffs && (rng() & 1)) c = -c;
    Expr term = Expr::constant(*Rational::make(c, den(rng)));
    int remaining = deg(rng);
    for (int v = 0; v < nvars && remaining > 0; ++v) {
      std::uniform_int_distribution<int> pick(0, remaining);
      int p = (v + 1 == nvars) ? remaining : pick(rng);
      if (p > 0) {
        term = Expr::mul(term, Expr::pow(Expr::variable(v), Rational(p)));
      }
      remaining -= p;
    }
    sum = Expr::add(sum, term);
  }
  return sum;
}

// Random polynomial with at least one z1-carrying monomial, so that
// dPhi/dz1 is a positive polynomial on positive boxes.
inline Expr random_phi(std::mt19937_64& rng, int nvars, int degree) {
  Expr phi = random_polynomial(rng, nvars, degree, true);
  // guarantee a z1 term
  return Expr::add(phi, Expr::variable(0));
}

// Random expression tree of the given depth over nvars variables.
// Transcendentals are included with small weight; ln/sqrt are applied to
// 1 + abs(...) style arguments elsewhere by point filtering in the tests.
inline Expr random_expr(std::mt19937_64& rng, int nvars, int depth) {
  std::uniform_int_distribution<int> leaf(0, 3);
  if (depth == 0) {
    if (leaf(rng) == 0) {
      std::uniform_int_distribution<int> num(-3, 3);
      std::uniform_int_distribution<int> den(1, 2);
      return Expr::constant(*Rational::make(num(rng), den(rng)));
    }
    std::uniform_int_distribution<int> var(0, nvars - 1);
    return Expr::variable(var(rng));
  }
  std::uniform_int_distribution<int> op(0, 11);
  switch (op(rng)) {
    case 0:
    case 1:
      return Expr::add(random_expr(rng, nvars, depth - 1),
                       random_expr(rng, nvars, depth - 1));
    case 2:
      return Expr::sub(random_expr(rng, nvars, depth - 1),
                       random_expr(rng, nvars, depth - 1));
    case 3:
    case 4:
      return Expr::mul(random_expr(rng, nvars, depth - 1),
                       random_expr(rng, nvars, depth - 1));
    case 5:
      return Expr::div(random_expr(rng, nvars, depth - 1),
                       random_expr(rng, nvars, depth - 1));
    case 6: {
      std::uniform_int_distribution<int> e(2, 3);
      return Expr::pow(random_expr(rng, nvars, depth - 1), Rational(e(rng)));
    }
    case 7:
      return Expr::neg(random_expr(rng, nvars, depth - 1));
    case 8:
      return Expr::sin(random_expr(rng, nvars, depth - 1));
    case 9:
      return Expr::cos(random_expr(rng, nvars, depth - 1));
    case 10:
      return Expr::exp(random_expr(rng, nvars, depth - 1));
    default:
      return random_expr(rng, nvars, depth - 1);
  }
}

inline Point random_point(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Point p(static_cast<size_t>(n));
  for (double& v : p) v = dist(rng);
  return p;
}

// Central difference with a Richardson consistency filter: the estimates at
// steps h and 2h must agree, otherwise the truncation term dominates and the
// finite-difference oracle is not applicable at this point. The filter uses
// only finite-difference values, so a broken symbolic derivative cannot
// influence which points get checked.
inline std::optional<double> stable_central_difference(const Expr& e,
                                                       const Point& p,
                                                       int var, double h) {
  auto central = [&](double step) {
    Point lo = p, hi = p;
    lo[static_cast<size_t>(var)] -= step;
    hi[static_cast<size_t>(var)] += step;
    return (evaluate(e, hi) - evaluate(e, lo)) / (2.0 * step);
  };
  double c1 = central(h);
  double c2 = central(2.0 * h);
  if (std::fabs(c1 - c2) > 1e-7 * (1.0 + std::fabs(c1))) return std::nullopt;
  return c1;
}

}  // namespace fx
