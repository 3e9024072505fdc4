#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poisson.hpp"

namespace poisntt {

// A new-time transformation d(tau) = dt / eta(x), given in one of three
// forms. Reserved symbols for the z-space expressions:
//   Phi(z1, ..., z_{k+1})      z1 = H, z_{i+1} = C_i
//   F(z1, z2, ..., z_{k+2})    z1 = H, z2 = H*, z_{i+2} = C_i
struct NttSpec {
  enum class Kind { ExplicitEta, Constructive, Implicit };
  Kind kind = Kind::ExplicitEta;
  Expr payload;                      // eta (x-space) or Phi / F (z-space)
  std::optional<Expr> hstar_hint;    // x-space
  // classification inputs (used with Kind::Constructive):
  std::optional<Expr> eta0;            // rank-2 case factor
  std::optional<Expr> casimir_factor;  // rank>=4 case factor
  std::optional<Rational> constant_factor;  // symplectic case factor
};

enum class Preserves { Yes, No, Inconclusive };

const char* preserves_name(Preserves p);

// Outcome of an NTT analysis: the verdict, the derived scalings when they
// exist, and the per-check diagnostics behind the verdict.
struct NttVerdict {
  Preserves preserves = Preserves::Inconclusive;
  std::optional<Expr> eta;    // over system variables (or +1 free symbol)
  std::optional<Expr> hstar;
  std::vector<std::string> eta_names;  // variable names for printing eta
  VerificationReport diagnostics;
  std::string criterion;       // which decision rule produced the verdict
  std::string classification;  // "r=2" | "r>=4" | "symplectic" (classify)
};

// Curl residuals d_i(eta d_j H) - d_j(eta d_i H) for i < j, flattened in
// row order. eta * grad(H) is a gradient iff all of them vanish.
std::vector<Expr> curl_residuals(const Expr& eta, const Expr& hamiltonian,
                                 int n);

// Sampled test of the curl conditions above.
VerificationReport gradient_test(const Expr& eta, const Expr& hamiltonian,
                                 const SamplePlan& plan);

// Sampled functional-dependence test: eta depends on (H, C_1..C_k) iff the
// Jacobian of (eta, H, C...) has the same rank as the Jacobian of (H, C...)
// at every accepted point. Points where the base Jacobian drops rank are
// excluded and reported; above 10% exclusions the verdict degrades to
// inconclusive.
struct DependenceResult {
  Preserves verdict = Preserves::Inconclusive;
  VerificationReport report;
};
DependenceResult functional_dependence_test(const Expr& eta,
                                            const Expr& hamiltonian,
                                            const std::vector<Expr>& casimirs,
                                            const SamplePlan& plan);

// Decides whether an explicit eta preserves the Poisson structure:
// the curl criterion when r = n, the dependence criterion when r < n.
// With an H* hint the identity eta J grad(H) = J grad(H*) is also required.
// Throws PremiseError when |eta| < min_eta at an accepted point.
NttVerdict analyze(const PoissonSystem& sys, const Expr& eta,
                   const SamplePlan& plan,
                   const std::optional<Expr>& hstar_hint = std::nullopt);

// Constructive route: H* = Phi(H, C...), eta = d(Phi)/dz1 substituted.
// Verifies the identity eta J grad(H) = J grad(H*) on the plan.
// Throws PremiseError when the derived eta vanishes at an accepted point.
NttVerdict rescale(const PoissonSystem& sys, const Expr& phi,
                   const SamplePlan& plan);

// Implicit route: from F(H, H*, C...) = 0, eta = -(dF/dz1)/(dF/dz2).
// Without an H* hint the result keeps z2 as a free symbol and the verdict
// is inconclusive; with a hint the nonvanishing premises, F ~ 0 and the
// identity are all verified.
NttVerdict implicit_eta(const PoissonSystem& sys, const Expr& f,
                        const std::optional<Expr>& hstar_hint,
                        const SamplePlan& plan);

// Rank-based classification of admissible rescalings of the structure
// matrix itself: J* = eta0 J (r = 2), J* = C J (r >= 4), J* = c J
// (symplectic). Checks the case premises, that J* satisfies the Jacobi
// identity, and that J* grad(H*) = eta J grad(H) on the plan.
NttVerdict classify(const PoissonSystem& sys, const NttSpec& spec,
                    const SamplePlan& plan);

// Substitution helpers shared with the command layer.
Expr substitute_hamiltonian_casimirs(const Expr& z_expr,
                                     const PoissonSystem& sys);  // for Phi
// For F; when hstar is absent, z2 is kept as a trailing free variable of
// the result (index n).
Expr substitute_implicit(const Expr& z_expr, const PoissonSystem& sys,
                         const std::optional<Expr>& hstar);

}  // namespace poisntt
