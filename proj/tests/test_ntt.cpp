#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "errors.hpp"
#include "fixtures.hpp"

using namespace poisntt;
using fx::E;
using fx::vars2;
using fx::vars3;

namespace {

// Independent residual of the preservation identity at a point:
// eta J grad(H) - J grad(Hstar), evaluated straight from the definitions.
double identity_residual_at(const PoissonSystem& sys, const Expr& eta,
                            const Expr& hstar, const Point& p) {
  const int n = sys.dim();
  std::vector<double> J(static_cast<size_t>(n) * n);
  sys.J.eval(p, J.data());
  double ev = evaluate(eta, p);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double lhs = 0.0, rhs = 0.0;
    for (int j = 0; j < n; ++j) {
      lhs += ev * J[static_cast<size_t>(i) * n + j] *
             evaluate(differentiate(sys.hamiltonian, j), p);
      rhs += J[static_cast<size_t>(i) * n + j] *
             evaluate(differentiate(hstar, j), p);
    }
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  return worst;
}

}  // namespace

TEST_CASE("gradient test on the oscillator") {
  PoissonSystem sys = fx::example1();
  SamplePlan plan = fx::plan_for(sys);
  Expr h = sys.hamiltonian;

  // eta = 1: grad(H) is trivially a gradient, residual exactly zero
  auto trivially = gradient_test(Expr::constant(1), h, plan);
  CHECK(trivially.all_passed());
  CHECK(trivially.checks[0].max_residual == 0.0);

  // eta = x1^2 + x2^2 solves the characteristic equation
  CHECK(gradient_test(E("x1^2 + x2^2", vars2), h, plan).all_passed());

  // eta = x1 fails, and the curl residual IS x2 d1(eta) - x1 d2(eta) = x2
  Expr eta = E("x1", vars2);
  auto failing = gradient_test(eta, h, plan);
  REQUIRE(failing.checks.size() == 1);
  CHECK(failing.checks[0].verdict == Verdict::Fail);
  // refutations come with a concrete witness and a nonzero residual
  CHECK(!failing.checks[0].witness.empty());
  CHECK(failing.checks[0].max_residual > 0.25);  // x2 >= 0.25 on the box

  auto curls = curl_residuals(eta, h, 2);
  REQUIRE(curls.size() == 1);
  Expr characteristic =
      Expr::sub(Expr::mul(E("x2", vars2), differentiate(eta, 0)),
                Expr::mul(E("x1", vars2), differentiate(eta, 1)));
  for (const Point& p : sample_points(plan)) {
    double a = evaluate(curls[0], p);
    double b = evaluate(characteristic, p);
    CHECK(std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a)}));
  }
}

TEST_CASE("functional dependence test") {
  PoissonSystem sys = fx::so3();
  SamplePlan plan = fx::plan_for(sys);
  Expr h = sys.hamiltonian;
  Expr c = sys.casimirs[0];

  // eta = H is dependent even with k = 0 (identical Jacobian rows)
  auto self = functional_dependence_test(h, h, {}, plan);
  CHECK(self.verdict == Preserves::Yes);

  // eta = C^2 is a function of the casimir
  auto csq = functional_dependence_test(Expr::pow(c, Rational(2)), h,
                                        sys.casimirs, plan);
  CHECK(csq.verdict == Preserves::Yes);

  // eta = x1 against H = (x1^2+x2^2)/2 in 2d: the 2x2 Jacobian has
  // determinant x2, nonzero at generic points, hence independent
  PoissonSystem osc = fx::example1();
  auto indep = functional_dependence_test(E("x1", vars2), osc.hamiltonian, {},
                                          fx::plan_for(osc));
  CHECK(indep.verdict == Preserves::No);

  // a base Jacobian that is deficient everywhere degrades to inconclusive
  auto degenerate = functional_dependence_test(
      E("x1", vars2), Expr::constant(1), {}, fx::plan_for(osc));
  CHECK(degenerate.verdict == Preserves::Inconclusive);
}

TEST_CASE("gradient and dependence criteria agree on the symplectic case") {
  PoissonSystem sys = fx::example1();
  SamplePlan plan = fx::plan_for(sys);
  Expr h = sys.hamiltonian;

  const std::vector<std::pair<const char*, bool>> battery = {
      {"x1^2 + x2^2", true},       // the f(x1^2+x2^2) family
      {"(x1^2 + x2^2)^2", true},
      {"exp(x1^2 + x2^2)", true},
      {"2*(x1^2 + x2^2) + 1", true},
      {"(x1^2 + x2^2)^3", true},
      {"1/(x1^2 + x2^2)", true},
      {"sqrt(x1^2 + x2^2)", true},
      {"(x1^2 + x2^2)^2 + x1^2 + x2^2", true},
      {"sin(x1^2 + x2^2) + 2", true},
      {"exp(2*(x1^2 + x2^2)) + 1", true},
      {"x1", false},
      {"x2", false},
      {"x1*x2", false},
      {"x1^2", false},
      {"x2^2", false},
      {"x1 + x2", false},
      {"x1^2 + x2", false},
      {"sin(x1) + 2", false},
      {"x1^3 + 1", false},
      {"x1 + 2*x2 + 3", false},
  };
  for (const auto& [src, expect_pass] : battery) {
    CAPTURE(src);
    Expr eta = E(src, vars2);
    bool grad_pass = gradient_test(eta, h, plan).all_passed();
    auto dep = functional_dependence_test(eta, h, {}, plan);
    CHECK(grad_pass == expect_pass);
    REQUIRE(dep.verdict != Preserves::Inconclusive);
    CHECK((dep.verdict == Preserves::Yes) == expect_pass);
  }
}

TEST_CASE("analyze picks the criterion by rank") {
  PoissonSystem osc = fx::example1();
  SamplePlan plan2 = fx::plan_for(osc);
  NttVerdict a = analyze(osc, E("x1^2 + x2^2", vars2), plan2);
  CHECK(a.preserves == Preserves::Yes);
  CHECK(a.criterion.find("curl") != std::string::npos);

  PoissonSystem so3 = fx::so3();
  SamplePlan plan3 = fx::plan_for(so3);
  Expr c = so3.casimirs[0];

  NttVerdict yes = analyze(so3, Expr::pow(c, Rational(2)), plan3);
  CHECK(yes.preserves == Preserves::Yes);
  CHECK(yes.criterion.find("dependence") != std::string::npos);

  NttVerdict no = analyze(so3, Expr::mul(E("x1", vars3),
                                         Expr::pow(c, Rational(2))), plan3);
  CHECK(no.preserves == Preserves::No);
  // refutations carry a concrete witness
  const CheckResult* dep = no.diagnostics.find("functional_dependence");
  REQUIRE(dep != nullptr);
  CHECK(dep->verdict == Verdict::Fail);
  CHECK(!dep->witness.empty());
  CHECK(dep->max_residual >= 1.0);  // rank excess is at least one

  // eta = H*C^4 = xi(H C^2) C^2 with xi(z) = z stays admissible
  NttVerdict xi = analyze(
      so3, Expr::mul(so3.hamiltonian, Expr::pow(c, Rational(4))), plan3);
  CHECK(xi.preserves == Preserves::Yes);

  // vanishing eta violates the reparametrization premise
  CHECK_THROWS_AS(analyze(osc, E("x1 - x2", vars2), fx::plan_for(osc)),
                  PremiseError);
}

TEST_CASE("rescale builds H* and eta from Phi") {
  PoissonSystem so3 = fx::so3();
  SamplePlan plan = fx::plan_for(so3);
  std::vector<std::string> zs{"z1", "z2"};

  // Phi = z1 z2^2: H* = H C^2, eta = C^2
  NttVerdict v = rescale(so3, E("z1*z2^2", zs), plan);
  CHECK(v.preserves == Preserves::Yes);
  REQUIRE(v.hstar);
  REQUIRE(v.eta);
  CHECK(*v.hstar == Expr::mul(so3.hamiltonian,
                              Expr::pow(so3.casimirs[0], Rational(2))));
  CHECK(*v.eta == Expr::pow(so3.casimirs[0], Rational(2)));

  // identity residual is small in absolute terms, not only relative
  const CheckResult* id = v.diagnostics.find("identity_eta_JgradH");
  REQUIRE(id != nullptr);
  CHECK(id->max_residual <= 1e-9);

  // Phi = z1 is the identity transformation
  NttVerdict ident = rescale(so3, E("z1", zs), plan);
  CHECK(ident.preserves == Preserves::Yes);
  CHECK(ident.eta->is_const(1));
  CHECK(*ident.hstar == so3.hamiltonian);

  // Phi = z1^2/2 on the oscillator: H* = H^2/2, eta = H
  PoissonSystem osc = fx::example1();
  NttVerdict sq = rescale(osc, E("z1^2/2", {"z1"}), fx::plan_for(osc));
  CHECK(sq.preserves == Preserves::Yes);
  for (const Point& p : sample_points(fx::plan_for(osc))) {
    CHECK(identity_residual_at(osc, *sq.eta, *sq.hstar, p) <= 1e-12);
  }

  // Phi = z2 has eta = dPhi/dz1 = 0: premise violation
  CHECK_THROWS_AS(rescale(so3, E("z2", zs), plan), PremiseError);

  // reserved symbols beyond z1..z_{k+1} are rejected
  CHECK_THROWS_AS(rescale(so3, Expr::variable(5), plan), InputError);
}

TEST_CASE("rescale succeeds for random admissible Phi") {
  PoissonSystem so3 = fx::so3();
  SamplePlan plan = fx::plan_for(so3, 100);
  std::mt19937_64 rng(307);
  for (int t = 0; t < 25; ++t) {
    // positive coefficients keep dPhi/dz1 > 0 on the positive box, so the
    // transformation premise holds by construction
    Expr phi = fx::random_phi(rng, 2, 3);
    NttVerdict v = rescale(so3, phi, plan);
    CHECK(v.preserves == Preserves::Yes);
    const CheckResult* id = v.diagnostics.find("identity_eta_JgradH");
    REQUIRE(id != nullptr);
    for (const Point& p : sample_points(plan)) {
      double scale = std::max(1.0, std::fabs(evaluate(*v.eta, p)));
      CHECK(identity_residual_at(so3, *v.eta, *v.hstar, p) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("implicit relation recovers eta") {
  PoissonSystem so3 = fx::so3();
  SamplePlan plan = fx::plan_for(so3);
  std::vector<std::string> zs{"z1", "z2", "z3"};

  // F = z2 - z1 z3^2 with the hint H* = H C^2: eta = C^2, F-residual 0
  Expr hint = Expr::mul(so3.hamiltonian, Expr::pow(so3.casimirs[0],
                                                   Rational(2)));
  NttVerdict v = implicit_eta(so3, E("z2 - z1*z3^2", zs), hint, plan);
  CHECK(v.preserves == Preserves::Yes);
  REQUIRE(v.eta);
  CHECK(*v.eta == Expr::pow(so3.casimirs[0], Rational(2)));
  const CheckResult* fres = v.diagnostics.find("implicit_residual");
  REQUIRE(fres != nullptr);
  CHECK(fres->max_residual == 0.0);

  // F = z2 - z1, hint H* = H: the identity NTT
  NttVerdict ident = implicit_eta(so3, E("z2 - z1", zs), so3.hamiltonian,
                                  plan);
  CHECK(ident.preserves == Preserves::Yes);
  CHECK(ident.eta->is_const(1));

  // wrong hint: F does not vanish, verdict no
  NttVerdict wrong = implicit_eta(so3, E("z2 - z1*z3^2", zs),
                                  so3.hamiltonian, plan);
  CHECK(wrong.preserves == Preserves::No);

  // dF/dz2 = 0 breaks the implicit-function premise
  CHECK_THROWS_AS(implicit_eta(so3, E("z1 - z3", zs), hint, plan),
                  PremiseError);
}

TEST_CASE("implicit relation without a hint stays symbolic") {
  // F = z2^2 - z1 on a positive-H box: eta = 1/(2 z2), inconclusive
  PoissonSystem osc = fx::example1();
  osc.domain = fx::box({{0.5, 1.2}, {0.5, 1.2}});  // H > 0 region
  SamplePlan plan = fx::plan_for(osc);
  NttVerdict v = implicit_eta(osc, E("z2^2 - z1", {"z1", "z2"}), std::nullopt,
                              plan);
  CHECK(v.preserves == Preserves::Inconclusive);
  REQUIRE(v.eta);
  CHECK(to_string(*v.eta, v.eta_names) == "1/(2*z2)");

  // with the explicit hint H* = sqrt(H) the same relation verifies:
  // eta = 1/(2 sqrt(H)) satisfies grad(sqrt(H)) = eta grad(H)
  NttVerdict hinted = implicit_eta(osc, E("z2^2 - z1", {"z1", "z2"}),
                                   Expr::sqrt(osc.hamiltonian), plan);
  CHECK(hinted.preserves == Preserves::Yes);
  for (const Point& p : sample_points(plan)) {
    double expect = 1.0 / (2.0 * std::sqrt(evaluate(osc.hamiltonian, p)));
    CHECK(evaluate(*hinted.eta, p) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("transcendental dependence round trip") {
  // eta = exp(H + C) is admissible: analyze accepts it by the dependence
  // criterion, and the primitive Phi = exp(z1 + z2) reproduces the same
  // eta through the constructive route
  PoissonSystem so3 = fx::so3();
  SamplePlan plan = fx::plan_for(so3);
  Expr eta = Expr::exp(Expr::add(so3.hamiltonian, so3.casimirs[0]));

  NttVerdict direct = analyze(so3, eta, plan);
  CHECK(direct.preserves == Preserves::Yes);

  NttVerdict built =
      rescale(so3, Expr::exp(Expr::add(Expr::variable(0), Expr::variable(1))),
              plan);
  REQUIRE(built.preserves == Preserves::Yes);
  for (const Point& p : sample_points(plan)) {
    CHECK(evaluate(*built.eta, p) ==
          doctest::Approx(evaluate(eta, p)).epsilon(1e-14));
  }
}

TEST_CASE("implicit route agrees with the constructive route") {
  PoissonSystem so3 = fx::so3();
  SamplePlan plan = fx::plan_for(so3, 100);
  std::mt19937_64 rng(555);
  auto points = sample_points(plan);
  for (int t = 0; t < 10; ++t) {
    Expr phi = fx::random_phi(rng, 2, 3);
    NttVerdict via_phi = rescale(so3, phi, plan);
    REQUIRE(via_phi.preserves == Preserves::Yes);

    // F(z1, z2, z3) = z2 - Phi(z1, z3): relabel Phi's casimir slot
    std::vector<Expr> relabel{Expr::variable(0), Expr::variable(2)};
    Expr f = Expr::sub(Expr::variable(1), substitute(phi, relabel));
    NttVerdict via_f = implicit_eta(so3, f, via_phi.hstar, plan);
    REQUIRE(via_f.preserves == Preserves::Yes);

    for (const Point& p : points) {
      double a = evaluate(*via_phi.eta, p);
      double b = evaluate(*via_f.eta, p);
      CHECK(std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), 1.0));
    }
  }
}

TEST_CASE("classification by rank case") {
  std::vector<std::string> zs{"z1", "z2"};

  // r = 2: eta0-scaled so(3) matrix
  PoissonSystem so3 = fx::so3();
  NttSpec r2;
  r2.kind = NttSpec::Kind::Constructive;
  r2.payload = E("z1", zs);
  r2.eta0 = E("1 + x1^2", vars3);
  NttVerdict v2 = classify(so3, r2, fx::plan_for(so3));
  CHECK(v2.preserves == Preserves::Yes);
  CHECK(v2.classification == "r=2");

  // symplectic: constant rescaling of the canonical 4x4 system
  PoissonSystem sympl{fx::vars4, fx::canonical4(),
                      E("(x1^2 + x2^2 + x3^2 + x4^2)/2", fx::vars4), {}, 4,
                      fx::box({{0.5, 2.0}, {0.5, 2.0}, {0.5, 2.0},
                               {0.5, 2.0}})};
  NttSpec cs;
  cs.kind = NttSpec::Kind::Constructive;
  cs.payload = E("z1^2/2", {"z1"});
  cs.constant_factor = Rational(2);
  NttVerdict vc = classify(sympl, cs, fx::plan_for(sympl));
  CHECK(vc.preserves == Preserves::Yes);
  CHECK(vc.classification == "symplectic");
  // eta = c * Phi'(H) = 2 H
  for (const Point& p : sample_points(fx::plan_for(sympl, 20))) {
    CHECK(evaluate(*vc.eta, p) ==
          doctest::Approx(2.0 * evaluate(sympl.hamiltonian, p)));
  }

  // r >= 4: casimir-scaled 5d block system (canonical 4x4 plus a null row)
  StructureMatrix J5(5);
  J5.set_upper(0, 2, Expr::constant(1));
  J5.set_upper(1, 3, Expr::constant(1));
  std::vector<std::string> vars5{"x1", "x2", "x3", "x4", "x5"};
  PoissonSystem five{vars5, J5, parse_expression("(x1^2 + x2^2)/2", vars5),
                     {parse_expression("x5", vars5)}, 4,
                     fx::box({{0.5, 2.0}, {0.5, 2.0}, {0.5, 2.0}, {0.5, 2.0},
                              {0.5, 2.0}})};
  NttSpec r4;
  r4.kind = NttSpec::Kind::Constructive;
  r4.payload = E("z1", zs);
  r4.casimir_factor = parse_expression("x5", vars5);
  NttVerdict v4 = classify(five, r4, fx::plan_for(five));
  CHECK(v4.preserves == Preserves::Yes);
  CHECK(v4.classification == "r>=4");

  // premise violations are loud
  NttSpec bad_case = r4;
  bad_case.casimir_factor = parse_expression("x1", vars5);  // not a casimir
  CHECK_THROWS_AS(classify(five, bad_case, fx::plan_for(five)), PremiseError);
  NttSpec wrong_rank = r2;
  CHECK_THROWS_AS(classify(five, wrong_rank, fx::plan_for(five)),
                  PremiseError);
  NttSpec no_factor;
  no_factor.kind = NttSpec::Kind::Constructive;
  no_factor.payload = E("z1", zs);
  CHECK_THROWS_AS(classify(so3, no_factor, fx::plan_for(so3)), InputError);
}

TEST_CASE("candidate Hamiltonians split into gradient and remainder parts") {
  // G = x1^2 x2 x3 K + H C^2 with K = sin(x1): subtracting the remainder
  // P = x1^2 x2 x3 K leaves H C^2, and J grad(G - P) = C^2 J grad(H), the
  // admissible rescaling. The x1-weighted variant G~ = P + x1 H C^2 leaves
  // x1 grad(H C^2), which is not a gradient field; weighting by H C^2
  // itself (xi(z) = z) restores one.
  PoissonSystem sys = fx::so3();
  SamplePlan plan = fx::plan_for(sys);
  Expr p_part = E("x1^2*x2*x3*sin(x1)", vars3);
  Expr hc2 = Expr::mul(sys.hamiltonian, Expr::pow(sys.casimirs[0],
                                                  Rational(2)));
  Expr g = Expr::add(p_part, hc2);
  Expr g_minus_p = Expr::sub(g, p_part);
  Expr eta = Expr::pow(sys.casimirs[0], Rational(2));
  for (const Point& pt : sample_points(plan)) {
    double scale = std::max(1.0, std::fabs(evaluate(eta, pt)));
    CHECK(identity_residual_at(sys, eta, g_minus_p, pt) <= 1e-9 * scale);
  }

  // x1 * grad(H C^2) fails the curl conditions...
  CHECK(!gradient_test(E("x1", vars3), hc2, plan).all_passed());
  // ... while (H C^2) * grad(H C^2) = grad((H C^2)^2 / 2) passes them
  CHECK(gradient_test(hc2, hc2, plan).all_passed());
}

TEST_CASE("yes-verdicts satisfy the identity at every accepted point") {
  // soundness across the constructive route on both fixtures
  PoissonSystem so3 = fx::so3();
  SamplePlan plan = fx::plan_for(so3);
  std::vector<std::string> zs{"z1", "z2"};
  for (const char* phi_src : {"z1*z2^2", "z1^2*z2^4/2", "z1 + z2^3"}) {
    NttVerdict v = rescale(so3, E(phi_src, zs), plan);
    REQUIRE(v.preserves == Preserves::Yes);
    for (const Point& p : sample_points(plan)) {
      double scale = std::max(1.0, std::fabs(evaluate(*v.eta, p)));
      CHECK(identity_residual_at(so3, *v.eta, *v.hstar, p) <= 1e-9 * scale);
    }
  }
}
