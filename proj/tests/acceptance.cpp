// Acceptance runner: executes the project's acceptance fixtures end to end
// and prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>

#include "commands.hpp"
#include "dynamics.hpp"
#include "fixtures.hpp"

using namespace poisntt;
using fx::E;
using fx::vars2;
using fx::vars3;

#define ACCEPT(cond, what)                                              \
  do {                                                                  \
    if (!(cond)) {                                                      \
      throw std::runtime_error(std::string(what) + "  (" #cond ")");    \
    }                                                                   \
  } while (0)

namespace {

int g_failures = 0;

void criterion(int number, const char* name,
               const std::function<void()>& body) {
  auto start = std::chrono::steady_clock::now();
  try {
    body();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    std::printf("[PASS] criterion %d: %s (%lld ms)\n", number, name,
                static_cast<long long>(ms));
  } catch (const std::exception& e) {
    ++g_failures;
    std::printf("[FAIL] criterion %d: %s\n       %s\n", number, name,
                e.what());
  }
  std::fflush(stdout);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

SystemFileData with_eta(const PoissonSystem& sys, const Expr& eta) {
  NttSpec spec;
  spec.kind = NttSpec::Kind::ExplicitEta;
  spec.payload = eta;
  return SystemFileData{sys, spec, 200, 42};
}

double endpoint_error(const Trajectory& traj, const Point& target) {
  double err = 0.0;
  for (size_t i = 0; i < target.size(); ++i) {
    err = std::max(err, std::fabs(traj.states.back()[i] - target[i]));
  }
  return err;
}

// -- criterion bodies ------------------------------------------------------

void oscillator_eta_family() {
  PoissonSystem sys = fx::example1();
  Options opts;

  const char* yes_etas[] = {"1", "x1^2 + x2^2", "(x1^2 + x2^2)^2",
                            "exp(x1^2 + x2^2)"};
  for (const char* s : yes_etas) {
    CommandOutcome out = cmd_analyze_ntt(with_eta(sys, E(s, vars2)), opts);
    ACCEPT(out.status == Status::Ok && out.verdict == "yes",
           std::string("expected yes for eta = ") + s + ": " + out.text);
  }

  const char* no_etas[] = {"x1", "x2", "x1*x2"};
  SamplePlan plan = fx::plan_for(sys, 200, 42);
  auto points = sample_points(plan);
  ACCEPT(points.size() == 200, "plan must deliver 200 points");
  for (const char* s : no_etas) {
    Expr eta = E(s, vars2);
    CommandOutcome out = cmd_analyze_ntt(with_eta(sys, eta), opts);
    ACCEPT(out.status == Status::CheckFailed && out.verdict == "no",
           std::string("expected no for eta = ") + s + ": " + out.text);

    // the failing curl residual is the characteristic combination
    // x2 d1(eta) - x1 d2(eta)
    auto curls = curl_residuals(eta, sys.hamiltonian, 2);
    ACCEPT(curls.size() == 1, "one curl pair in 2d");
    Expr characteristic =
        Expr::sub(Expr::mul(E("x2", vars2), differentiate(eta, 0)),
                  Expr::mul(E("x1", vars2), differentiate(eta, 1)));
    for (const Point& p : points) {
      double a = evaluate(curls[0], p);
      double b = evaluate(characteristic, p);
      double scale = std::max(std::fabs(a), std::fabs(b));
      ACCEPT(std::fabs(a - b) <= 1e-12 * scale || a == b,
             "curl residual must match the characteristic PDE");
    }
  }
}

void so3_rescale_fixture() {
  PoissonSystem sys = fx::so3();
  SamplePlan plan = fx::plan_for(sys);
  Options opts;

  NttSpec phi;
  phi.kind = NttSpec::Kind::Constructive;
  phi.payload = E("z1*z2^2", {"z1", "z2"});
  CommandOutcome out = cmd_rescale(SystemFileData{sys, phi, 200, 42}, opts);
  ACCEPT(out.status == Status::Ok, "rescale must verify: " + out.text);
  ACCEPT(out.hstar_text == "(x1^2/2+x2^2)*((x1^2+x2^2+x3^2)/2)^2",
         "H* must be H*C^2, got " + out.hstar_text);
  ACCEPT(out.eta_text == "((x1^2+x2^2+x3^2)/2)^2",
         "eta must be C^2, got " + out.eta_text);

  // identity holds to 1e-9 in absolute terms at every accepted point
  NttVerdict v = rescale(sys, phi.payload, plan);
  const CheckResult* id = v.diagnostics.find("identity_eta_JgradH");
  ACCEPT(id != nullptr && id->verdict == Verdict::Pass,
         "identity check present and passing");
  ACCEPT(id->max_residual <= 1e-9, "identity residual must stay below 1e-9");

  Expr c = sys.casimirs[0];
  CommandOutcome no = cmd_analyze_ntt(
      with_eta(sys, Expr::mul(E("x1", vars3), Expr::pow(c, Rational(2)))),
      opts);
  ACCEPT(no.status == Status::CheckFailed && no.verdict == "no",
         "eta = x1*C^2 must be refused: " + no.text);

  CommandOutcome yes = cmd_analyze_ntt(
      with_eta(sys, Expr::mul(sys.hamiltonian, Expr::pow(c, Rational(4)))),
      opts);
  ACCEPT(yes.status == Status::Ok && yes.verdict == "yes",
         "eta = H*C^4 must be accepted: " + yes.text);
}

void implicit_matches_constructive() {
  PoissonSystem sys = fx::so3();
  SamplePlan plan = fx::plan_for(sys);
  auto points = sample_points(plan);
  std::mt19937_64 rng(424242);
  for (int t = 0; t < 10; ++t) {
    Expr phi = fx::random_phi(rng, 2, 3);
    NttVerdict via_phi = rescale(sys, phi, plan);
    ACCEPT(via_phi.preserves == Preserves::Yes, "constructive route passes");

    std::vector<Expr> relabel{Expr::variable(0), Expr::variable(2)};
    Expr f = Expr::sub(Expr::variable(1), substitute(phi, relabel));
    NttVerdict via_f = implicit_eta(sys, f, via_phi.hstar, plan);
    ACCEPT(via_f.preserves == Preserves::Yes, "implicit route passes");

    for (const Point& p : points) {
      double a = evaluate(*via_phi.eta, p);
      double b = evaluate(*via_f.eta, p);
      ACCEPT(std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b))
                 || a == b,
             "etas from the two routes must agree to 1e-12 relative");
    }
  }
}

void rank2_rescalings_pass() {
  std::mt19937_64 rng(1001);
  const StructureMatrix catalog[] = {fx::so3().J, fx::lotka_volterra_matrix(),
                                     fx::constant_skew3()};
  for (const StructureMatrix& J : catalog) {
    for (int t = 0; t < 20; ++t) {
      Expr eta = fx::random_polynomial(rng, 3, 3, false);
      auto report = check_jacobi(J.scaled(eta), fx::plan3());
      ACCEPT(report.all_passed(), "eta*J must satisfy the Jacobi identity");
      ACCEPT(report.checks[0].max_residual <= 1e-9,
             "residual must stay below 1e-9");
    }
  }
}

void symplectic_rescalings_fail() {
  SamplePlan plan = fx::plan4();
  for (const char* s : {"x1", "x1 + x2^2", "exp(x1)"}) {
    auto report = check_jacobi(fx::canonical4().scaled(E(s, fx::vars4)),
                               plan);
    ACCEPT(report.checks[0].verdict == Verdict::Fail,
           std::string("eta = ") + s + " must fail on the canonical matrix");
    ACCEPT(report.checks[0].max_residual >= 1e-3,
           "witness residual must be bounded away from zero");
    ACCEPT(!report.checks[0].witness.empty(), "witness point must be attached");
  }
  auto constant = check_jacobi(fx::canonical4().scaled(Expr::constant(7)),
                               plan);
  ACCEPT(constant.all_passed(), "constant rescalings must pass");
}

void casimir_rescaling_passes() {
  PoissonSystem sys = fx::so3();
  auto report = check_jacobi(sys.J.scaled(sys.casimirs[0]), fx::plan_for(sys));
  ACCEPT(report.all_passed(), "C*J must satisfy the Jacobi identity");
  ACCEPT(report.checks[0].max_residual <= 1e-9,
         "residual must stay below 1e-9");
}

void dynamics_cross_check() {
  PoissonSystem osc = fx::example1_wide();
  Point x0{1.0, 0.0};

  // one period at dt = 1e-3 returns to the start
  Trajectory period = integrate(osc, std::nullopt, x0, kTwoPi, 1e-3);
  ACCEPT(endpoint_error(period, x0) <= 1e-6,
         "t-flow must return to (1,0) within 1e-6");

  // fourth-order convergence: halving dt cuts the endpoint error by >= 12
  double e1 =
      endpoint_error(integrate(osc, std::nullopt, x0, kTwoPi, 0.02), x0);
  double e2 =
      endpoint_error(integrate(osc, std::nullopt, x0, kTwoPi, 0.01), x0);
  ACCEPT(e2 > 0.0 && e1 / e2 >= 12.0,
         "halving dt must reduce the endpoint error by at least 12x");

  // every yes-verdict eta of criterion 1, with its matching H* primitive
  const std::pair<const char*, const char*> osc_cases[] = {
      {"1", "(x1^2 + x2^2)/2"},                 // Phi(z) = z
      {"x1^2 + x2^2", "((x1^2 + x2^2)/2)^2"},   // Phi(z) = z^2
      {"(x1^2 + x2^2)^2", "4/3*((x1^2 + x2^2)/2)^3"},
      {"exp(x1^2 + x2^2)", "exp(x1^2 + x2^2)/2"},
  };
  for (const auto& [eta_src, hstar_src] : osc_cases) {
    Expr eta = E(eta_src, vars2);
    Expr hstar = E(hstar_src, vars2);
    Trajectory tau = integrate(osc, eta, x0, 10.0, 1e-3);
    ACCEPT(!tau.truncated && !tau.aborted, "tau-flow must complete");
    auto drifts = invariant_drift(
        tau, std::vector<Expr>{osc.hamiltonian, hstar}, {});
    for (const auto& d : drifts) {
      ACCEPT(d.drift <= 1e-6,
             std::string("drift for eta = ") + eta_src + " must be <= 1e-6");
    }
  }

  // criterion-2 etas on the so(3) fixture: conserve H, C and H*
  PoissonSystem so3 = fx::so3_wide();
  Point y0{0.8, 0.7, 0.9};
  Expr c = so3.casimirs[0];
  const std::pair<Expr, Expr> so3_cases[] = {
      {Expr::pow(c, Rational(2)),
       Expr::mul(so3.hamiltonian, Expr::pow(c, Rational(2)))},
      {Expr::mul(so3.hamiltonian, Expr::pow(c, Rational(4))),
       Expr::div(Expr::mul(Expr::pow(so3.hamiltonian, Rational(2)),
                           Expr::pow(c, Rational(4))),
                 Expr::constant(2))},
  };
  for (const auto& [eta, hstar] : so3_cases) {
    Trajectory tau = integrate(so3, eta, y0, 10.0, 1e-3);
    ACCEPT(!tau.truncated && !tau.aborted, "so(3) tau-flow must complete");
    auto drifts = invariant_drift(
        tau, std::vector<Expr>{so3.hamiltonian, c, hstar}, {});
    for (const auto& d : drifts) {
      ACCEPT(d.drift <= 1e-6, "so(3) tau-flow drift must be <= 1e-6");
    }
  }
}

void expression_engine() {
  // symbolic vs central-difference agreement over 100 expressions x 100
  // points inside each expression's validity set
  // a point is valid when the expression evaluates there and the
  // finite-difference oracle is converged (Richardson filter at h vs 2h)
  std::mt19937_64 rng(888);
  const double h = 1e-5;
  int exprs_done = 0;
  long long points_done = 0;
  while (exprs_done < 100) {
    Expr e = fx::random_expr(rng, 3, 6);
    int valid = 0;
    for (int trial = 0; trial < 600 && valid < 100; ++trial) {
      Point p = fx::random_point(rng, 3, 0.55, 1.45);
      try {
        int var = static_cast<int>(rng() % 3);
        if (std::fabs(evaluate(e, p)) > 1e4) continue;
        auto central = fx::stable_central_difference(e, p, var, h);
        if (!central || std::fabs(*central) > 1e4) continue;
        double resid = derivative_residual(e, var, p, h);
        ACCEPT(resid <= 1e-6 * (1.0 + std::fabs(*central)),
               "derivative must match the central difference");
        ++valid;
        ++points_done;
      } catch (const EvalError&) {
        continue;
      }
    }
    if (valid >= 100) ++exprs_done;
  }
  ACCEPT(points_done >= 100LL * 100LL, "coverage: 100 expressions x 100 points");

  // parse/print round trip on the full corpus of fixture expressions
  const char* corpus[] = {
      "x1 + x2*x3^2", "(x1^2 + x2^2)/2", "x1^2/2 + x2^2",
      "(x1^2 + x2^2 + x3^2)/2", "x3", "-x2", "x1", "x1*x2", "-x1*x3",
      "x2*x3", "exp(x1^2 + x2^2)", "(x1^2 + x2^2)^2", "x1^2 + x2^2",
      "z1*z2^2", "z2 - z1*z3^2", "z1^2/2", "1/(2*z2)", "1 + x1^2",
      "4/3*((x1^2 + x2^2)/2)^3", "exp(x1^2 + x2^2)/2", "sqrt(abs(x1) + 1)",
      "sin(x1*x2)", "ln(x1 + 2)", "x1^-2", "-(x1 + x2)^3",
  };
  std::vector<std::string> names{"x1", "x2", "x3", "z1", "z2", "z3"};
  for (const char* s : corpus) {
    Expr e = parse_expression(s, names);
    Expr back = parse_expression(to_string(e, names), names);
    ACCEPT(e == back, std::string("round trip must preserve '") + s + "'");
  }
}

}  // namespace

int main() {
  std::printf("poisntt acceptance suite\n");
  criterion(1, "harmonic-oscillator eta family and characteristic residual",
            oscillator_eta_family);
  criterion(2, "so(3) fixture: rescale, refute x1*C^2, accept H*C^4",
            so3_rescale_fixture);
  criterion(3, "implicit relation agrees with the constructive rescaling",
            implicit_matches_constructive);
  criterion(4, "rank-2 catalog: every smooth rescaling stays Poisson",
            rank2_rescalings_pass);
  criterion(5, "canonical 4x4: nonconstant rescalings are refuted",
            symplectic_rescalings_fail);
  criterion(6, "casimir-scaled structure matrix stays Poisson",
            casimir_rescaling_passes);
  criterion(7, "dynamics cross-check: period, drift, convergence order",
            dynamics_cross_check);
  criterion(8, "expression engine: derivative oracle and round trip",
            expression_engine);
  if (g_failures == 0) {
    std::printf("all 8 criteria passed\n");
  } else {
    std::printf("%d criterion(s) FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
