#include "ntt.hpp"

#include <cmath>
#include <cstdio>

#include "errors.hpp"
#include "sampled_check.hpp"

namespace poisntt {

const char* preserves_name(Preserves p) {
  switch (p) {
    case Preserves::Yes: return "yes";
    case Preserves::No: return "no";
    case Preserves::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

using detail::run_sampled;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Tracks the minimum of |e| over the plan; throws PremiseError when it dips
// below min_eta, or when e takes both signs (a continuous function then
// vanishes somewhere in between). Returns a pass check carrying the
// observed minimum.
CheckResult require_nonvanishing(const Expr& e, const SamplePlan& plan,
                                 const std::string& check_name,
                                 const std::string& what) {
  double min_abs = 1e300;
  Point at;
  bool seen_pos = false, seen_neg = false;
  Point pos_at, neg_at;
  CheckResult c = run_sampled(
      check_name, plan, [&](const Point& p, ResidualTracker& tracker) {
        double v = evaluate(e, p);
        if (std::fabs(v) < min_abs) {
          min_abs = std::fabs(v);
          at = p;
        }
        if (v > 0.0 && !seen_pos) {
          seen_pos = true;
          pos_at = p;
        }
        if (v < 0.0 && !seen_neg) {
          seen_neg = true;
          neg_at = p;
        }
        tracker.observe(0.0, 0.0, p);  // presence only; verdict set below
      });
  if (min_abs < plan.tol.min_eta) {
    throw PremiseError(what + " vanishes on the domain: |value| = " +
                       fmt(min_abs) + " < " + fmt(plan.tol.min_eta) +
                       " at (" + format_point(at) + ")");
  }
  if (seen_pos && seen_neg) {
    throw PremiseError(what + " changes sign on the domain (positive at (" +
                       format_point(pos_at) + "), negative at (" +
                       format_point(neg_at) +
                       ")), so it vanishes in between");
  }
  c.max_residual = min_abs;
  c.witness = at;
  c.threshold = plan.tol.min_eta;
  c.detail = "minimum |" + what + "| over the plan (must stay above " +
             fmt(plan.tol.min_eta) + ")";
  return c;
}

// Sampled check of eta(x) J grad(H) = J* grad(H*). Jstar may be the system
// matrix itself or a rescaled one.
CheckResult identity_check(const PoissonSystem& sys,
                           const StructureMatrix& Jstar, const Expr& eta,
                           const Expr& hstar, const SamplePlan& plan,
                           const std::string& check_name) {
  const int n = sys.dim();
  std::vector<Expr> dH = gradient(sys.hamiltonian, n);
  std::vector<Expr> dHs = gradient(hstar, n);
  std::vector<double> Jx(static_cast<size_t>(n) * n);
  std::vector<double> Jsx(static_cast<size_t>(n) * n);
  std::vector<double> gH(static_cast<size_t>(n)), gHs(static_cast<size_t>(n));

  return run_sampled(
      check_name, plan, [&](const Point& p, ResidualTracker& tracker) {
        sys.J.eval(p, Jx.data());
        Jstar.eval(p, Jsx.data());
        double ev = evaluate(eta, p);
        for (int j = 0; j < n; ++j) {
          gH[static_cast<size_t>(j)] = evaluate(dH[static_cast<size_t>(j)], p);
          gHs[static_cast<size_t>(j)] =
              evaluate(dHs[static_cast<size_t>(j)], p);
        }
        double worst = 0.0, scale = 0.0;
        for (int i = 0; i < n; ++i) {
          double lhs = 0.0, rhs = 0.0;
          for (int j = 0; j < n; ++j) {
            double tl = ev * Jx[static_cast<size_t>(i) * n + j] *
                        gH[static_cast<size_t>(j)];
            double tr = Jsx[static_cast<size_t>(i) * n + j] *
                        gHs[static_cast<size_t>(j)];
            lhs += tl;
            rhs += tr;
            scale = std::max({scale, std::fabs(tl), std::fabs(tr)});
          }
          worst = std::max(worst, std::fabs(lhs - rhs));
        }
        tracker.observe(worst, scale, p);
      });
}

std::vector<std::string> with_free_symbol(const std::vector<std::string>& vars,
                                          const std::string& extra) {
  std::vector<std::string> names = vars;
  names.push_back(extra);
  return names;
}

}  // namespace

std::vector<Expr> curl_residuals(const Expr& eta, const Expr& hamiltonian,
                                 int n) {
  std::vector<Expr> field;
  field.reserve(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    field.push_back(Expr::mul(eta, differentiate(hamiltonian, j)));
  }
  std::vector<Expr> residuals;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      residuals.push_back(
          Expr::sub(differentiate(field[static_cast<size_t>(j)], i),
                    differentiate(field[static_cast<size_t>(i)], j)));
    }
  }
  return residuals;
}

VerificationReport gradient_test(const Expr& eta, const Expr& hamiltonian,
                                 const SamplePlan& plan) {
  const int n = plan.domain.dim();
  // evaluate the two sides separately so the relative scale is honest
  std::vector<Expr> lhs, rhs;
  {
    std::vector<Expr> field;
    for (int j = 0; j < n; ++j) {
      field.push_back(Expr::mul(eta, differentiate(hamiltonian, j)));
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        lhs.push_back(differentiate(field[static_cast<size_t>(j)], i));
        rhs.push_back(differentiate(field[static_cast<size_t>(i)], j));
      }
    }
  }

  CheckResult result = run_sampled(
      "gradient_test", plan, [&](const Point& p, ResidualTracker& tracker) {
        for (size_t m = 0; m < lhs.size(); ++m) {
          double a = evaluate(lhs[m], p);
          double b = evaluate(rhs[m], p);
          tracker.observe(std::fabs(a - b),
                          std::max(std::fabs(a), std::fabs(b)), p);
        }
        if (lhs.empty()) tracker.observe(0.0, 0.0, p);  // n == 1
      });
  VerificationReport report;
  report.add(std::move(result));
  return report;
}

DependenceResult functional_dependence_test(const Expr& eta,
                                            const Expr& hamiltonian,
                                            const std::vector<Expr>& casimirs,
                                            const SamplePlan& plan) {
  const int n = plan.domain.dim();
  const int k = static_cast<int>(casimirs.size());
  const int base_rows = k + 1;

  std::vector<std::vector<Expr>> grads;
  grads.push_back(gradient(hamiltonian, n));
  for (const Expr& c : casimirs) grads.push_back(gradient(c, n));
  std::vector<Expr> geta = gradient(eta, n);

  int excluded = 0;
  int violations = 0;
  CheckResult result = run_sampled(
      "functional_dependence", plan,
      [&](const Point& p, ResidualTracker& tracker) {
        std::vector<double> base(static_cast<size_t>(base_rows) * n);
        for (int r = 0; r < base_rows; ++r) {
          for (int c = 0; c < n; ++c) {
            base[static_cast<size_t>(r) * n + c] = evaluate(
                grads[static_cast<size_t>(r)][static_cast<size_t>(c)], p);
          }
        }
        std::vector<double> aug(static_cast<size_t>(base_rows + 1) * n);
        std::copy(base.begin(), base.end(), aug.begin());
        for (int c = 0; c < n; ++c) {
          aug[static_cast<size_t>(base_rows) * n + c] =
              evaluate(geta[static_cast<size_t>(c)], p);
        }
        std::vector<double> work = base;
        int rank_base = numeric_rank(work, base_rows, n, plan.tol.pivot_rel);
        if (rank_base < base_rows) {
          // H and the casimirs are not independent here; point excluded
          ++excluded;
          tracker.observe(0.0, 0.0, p);
          return;
        }
        int rank_aug = numeric_rank(aug, base_rows + 1, n, plan.tol.pivot_rel);
        if (rank_aug > rank_base) ++violations;
        tracker.observe(static_cast<double>(rank_aug - rank_base), 0.0, p);
      });

  DependenceResult out;
  if (violations > 0) {
    out.verdict = Preserves::No;
  } else if (excluded * 10 > plan.points) {
    out.verdict = Preserves::Inconclusive;
    result.verdict = Verdict::Skipped;
  } else {
    out.verdict = Preserves::Yes;
  }
  if (excluded > 0) {
    std::string note = std::to_string(excluded) +
                       " point(s) excluded: (H, C...) Jacobian rank-deficient";
    result.detail = result.detail.empty() ? note : result.detail + "; " + note;
  }
  out.report.add(std::move(result));
  return out;
}

NttVerdict analyze(const PoissonSystem& sys, const Expr& eta,
                   const SamplePlan& plan,
                   const std::optional<Expr>& hstar_hint) {
  NttVerdict v;
  v.eta = eta;
  v.eta_names = sys.vars;
  v.diagnostics.add(require_nonvanishing(eta, plan, "eta_nonvanishing", "eta"));

  if (sys.rank == sys.dim()) {
    VerificationReport g = gradient_test(eta, sys.hamiltonian, plan);
    v.criterion = "curl of eta*grad(H) (symplectic case), sampled";
    v.preserves = g.all_passed() ? Preserves::Yes : Preserves::No;
    v.diagnostics.merge(g);
  } else {
    DependenceResult dep =
        functional_dependence_test(eta, sys.hamiltonian, sys.casimirs, plan);
    v.criterion = "functional dependence on (H, C...), sampled";
    v.preserves = dep.verdict;
    v.diagnostics.merge(dep.report);
  }

  if (hstar_hint && v.preserves == Preserves::Yes) {
    v.hstar = *hstar_hint;
    CheckResult id = identity_check(sys, sys.J, eta, *hstar_hint, plan,
                                    "identity_eta_JgradH");
    if (id.verdict != Verdict::Pass) v.preserves = Preserves::No;
    v.diagnostics.add(std::move(id));
  }
  return v;
}

Expr substitute_hamiltonian_casimirs(const Expr& z_expr,
                                     const PoissonSystem& sys) {
  std::vector<Expr> map;
  map.push_back(sys.hamiltonian);
  for (const Expr& c : sys.casimirs) map.push_back(c);
  int top = max_var_index(z_expr);
  if (top >= static_cast<int>(map.size())) {
    throw InputError("expression references z" + std::to_string(top + 1) +
                     " but only z1..z" + std::to_string(map.size()) +
                     " are defined here");
  }
  return substitute(z_expr, map);
}

Expr substitute_implicit(const Expr& z_expr, const PoissonSystem& sys,
                         const std::optional<Expr>& hstar) {
  std::vector<Expr> map;
  map.push_back(sys.hamiltonian);
  map.push_back(hstar ? *hstar : Expr::variable(sys.dim()));
  for (const Expr& c : sys.casimirs) map.push_back(c);
  int top = max_var_index(z_expr);
  if (top >= static_cast<int>(map.size())) {
    throw InputError("expression references z" + std::to_string(top + 1) +
                     " but only z1..z" + std::to_string(map.size()) +
                     " are defined here");
  }
  return substitute(z_expr, map);
}

NttVerdict rescale(const PoissonSystem& sys, const Expr& phi,
                   const SamplePlan& plan) {
  NttVerdict v;
  Expr hstar = substitute_hamiltonian_casimirs(phi, sys);
  Expr eta = substitute_hamiltonian_casimirs(differentiate(phi, 0), sys);
  v.hstar = hstar;
  v.eta = eta;
  v.eta_names = sys.vars;
  v.criterion = "constructive rescaling H* = Phi(H, C...)";

  v.diagnostics.add(require_nonvanishing(eta, plan, "eta_nonvanishing",
                                         "eta = dPhi/dz1"));
  CheckResult id =
      identity_check(sys, sys.J, eta, hstar, plan, "identity_eta_JgradH");
  v.preserves = id.verdict == Verdict::Pass ? Preserves::Yes : Preserves::No;
  v.diagnostics.add(std::move(id));
  return v;
}

NttVerdict implicit_eta(const PoissonSystem& sys, const Expr& f,
                        const std::optional<Expr>& hstar_hint,
                        const SamplePlan& plan) {
  NttVerdict v;
  Expr df1 = differentiate(f, 0);
  Expr df2 = differentiate(f, 1);
  Expr eta_z = Expr::div(Expr::neg(df1), df2);

  if (!hstar_hint) {
    // Existence-only mode: report eta and the nonvanishing premises as
    // functions of the free symbol z2.
    std::vector<std::string> names = with_free_symbol(sys.vars, "z2");
    v.eta = substitute_implicit(eta_z, sys, std::nullopt);
    v.eta_names = names;
    v.preserves = Preserves::Inconclusive;
    v.criterion =
        "implicit relation without an H* hint: eta is reported with z2 free; "
        "existence of H* is guaranteed, no closed form to verify";
    CheckResult c;
    c.name = "implicit_premises";
    c.verdict = Verdict::Skipped;
    c.detail =
        "nonvanishing not checkable without H*: dF/dz1 = " +
        to_string(substitute_implicit(df1, sys, std::nullopt), names) +
        ", dF/dz2 = " +
        to_string(substitute_implicit(df2, sys, std::nullopt), names);
    v.diagnostics.add(std::move(c));
    return v;
  }

  Expr hstar = *hstar_hint;
  v.hstar = hstar;
  v.eta_names = sys.vars;
  v.criterion = "implicit relation F(H, H*, C...) = 0";

  // dF/dz2 must stay away from zero for H* to be implicitly defined
  Expr df2_x = substitute_implicit(df2, sys, hstar);
  v.diagnostics.add(
      require_nonvanishing(df2_x, plan, "dF_dz2_nonvanishing", "dF/dz2"));
  Expr df1_x = substitute_implicit(df1, sys, hstar);
  v.diagnostics.add(
      require_nonvanishing(df1_x, plan, "dF_dz1_nonvanishing", "dF/dz1"));

  Expr eta = substitute_implicit(eta_z, sys, hstar);
  v.eta = eta;
  v.diagnostics.add(require_nonvanishing(eta, plan, "eta_nonvanishing",
                                         "eta = -(dF/dz1)/(dF/dz2)"));

  // F(H, H*, C...) must actually vanish for the hint to be consistent
  Expr f_x = substitute_implicit(f, sys, hstar);
  std::vector<Expr> args;
  args.push_back(sys.hamiltonian);
  args.push_back(hstar);
  for (const Expr& c : sys.casimirs) args.push_back(c);
  CheckResult fres = run_sampled(
      "implicit_residual", plan, [&](const Point& p, ResidualTracker& tracker) {
        double r = std::fabs(evaluate(f_x, p));
        double scale = 0.0;
        for (const Expr& a : args) {
          scale = std::max(scale, std::fabs(evaluate(a, p)));
        }
        tracker.observe(r, scale, p);
      });
  bool f_ok = fres.verdict == Verdict::Pass;
  v.diagnostics.add(std::move(fres));

  CheckResult id =
      identity_check(sys, sys.J, eta, hstar, plan, "identity_eta_JgradH");
  bool id_ok = id.verdict == Verdict::Pass;
  v.diagnostics.add(std::move(id));

  v.preserves = (f_ok && id_ok) ? Preserves::Yes : Preserves::No;
  return v;
}

NttVerdict classify(const PoissonSystem& sys, const NttSpec& spec,
                    const SamplePlan& plan) {
  if (spec.kind != NttSpec::Kind::Constructive) {
    throw InputError("classification requires Phi");
  }
  int provided = (spec.eta0 ? 1 : 0) + (spec.casimir_factor ? 1 : 0) +
                 (spec.constant_factor ? 1 : 0);
  if (provided != 1) {
    throw InputError(
        "classification requires exactly one of eta0, casimir_factor, c");
  }

  NttVerdict v;
  Expr hstar = substitute_hamiltonian_casimirs(spec.payload, sys);
  Expr dphi = substitute_hamiltonian_casimirs(differentiate(spec.payload, 0),
                                              sys);
  v.hstar = hstar;
  v.eta_names = sys.vars;

  v.diagnostics.add(
      require_nonvanishing(dphi, plan, "dPhi_dz1_nonvanishing", "dPhi/dz1"));

  Expr factor = Expr::constant(1);
  if (spec.eta0) {
    if (sys.rank != 2) {
      throw PremiseError("eta0 rescaling applies only to rank-2 systems "
                         "(declared rank " + std::to_string(sys.rank) + ")");
    }
    factor = *spec.eta0;
    v.classification = "r=2";
    v.diagnostics.add(
        require_nonvanishing(factor, plan, "eta0_nonvanishing", "eta0"));
  } else if (spec.casimir_factor) {
    if (sys.rank < 4) {
      throw PremiseError(
          "casimir_factor rescaling applies only to systems of rank >= 4 "
          "(declared rank " + std::to_string(sys.rank) + ")");
    }
    factor = *spec.casimir_factor;
    v.classification = "r>=4";
    VerificationReport cas =
        check_casimir(factor, sys.J, plan, "casimir_factor_is_casimir");
    bool ok = cas.all_passed();
    v.diagnostics.merge(cas);
    if (!ok) {
      throw PremiseError("casimir_factor is not a Casimir invariant of J "
                         "(J*grad(C) does not vanish on the plan)");
    }
    v.diagnostics.add(require_nonvanishing(factor, plan,
                                           "casimir_factor_nonvanishing",
                                           "casimir_factor"));
  } else {
    if (sys.rank != sys.dim() || sys.dim() < 4) {
      throw PremiseError(
          "constant rescaling applies only to symplectic systems of "
          "dimension >= 4");
    }
    if (spec.constant_factor->is_zero()) {
      throw PremiseError("constant factor c must be nonzero");
    }
    factor = Expr::constant(*spec.constant_factor);
    v.classification = "symplectic";
  }

  Expr eta = Expr::mul(factor, dphi);
  v.eta = eta;
  v.criterion = "structure-matrix rescaling, case " + v.classification;

  StructureMatrix jstar = sys.J.scaled(factor);
  VerificationReport jac = check_jacobi(jstar, plan);
  bool jac_ok = jac.all_passed();
  // keep the rescaled-jacobi name distinct from a plain validate run
  jac.checks.front().name = "jacobi_rescaled";
  v.diagnostics.merge(jac);

  CheckResult id = identity_check(sys, jstar, eta, hstar, plan,
                                  "identity_Jstar_gradHstar");
  bool id_ok = id.verdict == Verdict::Pass;
  v.diagnostics.add(std::move(id));

  v.preserves = (jac_ok && id_ok) ? Preserves::Yes : Preserves::No;
  return v;
}

}  // namespace poisntt
