#pragma once

#include <string>
#include <vector>

#include "expr.hpp"
#include "report.hpp"
#include "sampling.hpp"

namespace poisntt {

// Skew-symmetric matrix of structure functions. Only the strict upper
// triangle is stored; J_ji = -J_ij and J_ii = 0 hold by construction, so a
// non-skew matrix is not representable.
class StructureMatrix {
 public:
  explicit StructureMatrix(int n);

  int dim() const { return n_; }
  void set_upper(int i, int j, Expr e);      // 0-based, requires i < j
  const Expr& upper(int i, int j) const;     // requires i < j
  Expr entry(int i, int j) const;            // signed view, any i, j

  // Evaluates the full n x n matrix at x (row-major into out).
  void eval(std::span<const double> x, double* out) const;

  // Entrywise product factor * J; stays skew by construction.
  StructureMatrix scaled(const Expr& factor) const;

 private:
  int n_;
  std::vector<Expr> upper_;  // packed strict upper triangle
};

// Numerical rank of a rows x cols matrix (row-major, destroyed) by complete
// pivoting; pivots below pivot_rel * max|entry| are treated as zero.
int numeric_rank(std::vector<double>& a, int rows, int cols, double pivot_rel);

struct PoissonSystem {
  std::vector<std::string> vars;
  StructureMatrix J;
  Expr hamiltonian;
  std::vector<Expr> casimirs;  // user-declared; may be empty
  int rank = 0;                // declared rank r, with casimirs.size() == n-r
  Domain domain;

  int dim() const { return static_cast<int>(vars.size()); }
};

// Validates the declared shape: r even, 0 < r <= n, casimir count == n - r,
// box covers every variable. Throws InputError on violation.
void validate_declaration(const PoissonSystem& sys);

// Sampled verification of the Jacobi identity
//   sum_l( J_li d_l J_jk + J_lj d_l J_ki + J_lk d_l J_ij ) = 0
// over all triples i<j<k. Scale for the relative tolerance is the largest
// single product term seen at the point.
VerificationReport check_jacobi(const StructureMatrix& J,
                                const SamplePlan& plan);

// Generalized Poisson bracket {f,g} = sum_ij d_i f J_ij d_j g as an Expr.
Expr bracket(const Expr& f, const Expr& g, const StructureMatrix& J);

// Sampled verification of J * grad(C) = 0.
VerificationReport check_casimir(const Expr& casimir,
                                 const StructureMatrix& J,
                                 const SamplePlan& plan,
                                 const std::string& check_name = "casimir");

// Numerical rank of J at a point.
int rank_at(const StructureMatrix& J, const Point& p, double pivot_rel);

// Pass iff rank_at == declared_rank at every accepted point.
VerificationReport check_rank_constant(const StructureMatrix& J,
                                       int declared_rank,
                                       const SamplePlan& plan);

// Pass iff the k x n Jacobian of the casimirs has rank k at every accepted
// point.
VerificationReport check_casimir_independence(const std::vector<Expr>& casimirs,
                                              int n, const SamplePlan& plan);

// Full battery: skew (structural), jacobi, each casimir, independence,
// rank constancy.
VerificationReport verify_system(const PoissonSystem& sys,
                                 const SamplePlan& plan);

}  // namespace poisntt
