#include "commands.hpp"

#include <cmath>
#include <cstdio>

namespace poisntt {

SamplePlan make_plan(const SystemFileData& data, const Options& opt) {
  SamplePlan plan = make_sample_plan(data);
  if (opt.points) plan.points = *opt.points;
  if (opt.seed) plan.seed = *opt.seed;
  if (opt.atol) plan.tol.atol = *opt.atol;
  if (opt.rtol) plan.tol.rtol = *opt.rtol;
  if (opt.min_eta) plan.tol.min_eta = *opt.min_eta;
  return plan;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Wraps a command body so every failure mode maps onto one status code.
template <typename Body>
CommandOutcome guarded(Body&& body) {
  CommandOutcome out;
  try {
    body(out);
  } catch (const ParseError& e) {
    out.status = Status::InputError;
    out.text += std::string("input error: ") + e.what() + "\n";
  } catch (const InputError& e) {
    out.status = Status::InputError;
    out.text += std::string("input error: ") + e.what() + "\n";
  } catch (const PremiseError& e) {
    out.status = Status::PremiseViolation;
    out.text += std::string("premise violation: ") + e.what() + "\n";
  } catch (const EvalError& e) {
    out.status = Status::RuntimeAbort;
    out.text += std::string("evaluation failed: ") + e.what() + "\n";
  }
  return out;
}

Status status_for(Preserves p) {
  switch (p) {
    case Preserves::Yes: return Status::Ok;
    case Preserves::No: return Status::CheckFailed;
    case Preserves::Inconclusive: return Status::Inconclusive;
  }
  return Status::RuntimeAbort;
}

// Runs the full system verification; false (with status/text set) when some
// check fails, so transformation commands can insist on a verified system.
bool verified_or_report(const SystemFileData& data, const SamplePlan& plan,
                        CommandOutcome& out) {
  VerificationReport report = verify_system(data.system, plan);
  bool ok = report.all_passed();
  out.report.merge(report);
  if (!ok) {
    out.status = Status::CheckFailed;
    out.text += "system verification failed; transformation analysis "
                "requires a verified Poisson system\n";
    out.text += render_human(report, data.system.vars);
  }
  return ok;
}

void append_verdict(CommandOutcome& out, const SystemFileData& data,
                    const NttVerdict& v) {
  out.verdict = preserves_name(v.preserves);
  out.text += "verdict: " + out.verdict;
  if (!v.criterion.empty()) out.text += " (criterion: " + v.criterion + ")";
  out.text += "\n";
  if (!v.classification.empty()) {
    out.text += "classification: " + v.classification + "\n";
  }
  if (v.eta) {
    out.eta_text = to_string(*v.eta, v.eta_names);
    out.text += "eta = " + out.eta_text + "\n";
  }
  if (v.hstar) {
    out.hstar_text = to_string(*v.hstar, data.system.vars);
    out.text += "Hstar = " + out.hstar_text + "\n";
  }
  out.report.merge(v.diagnostics);
  out.text += render_human(v.diagnostics, data.system.vars);
}

// eta (and H* when derivable) for the tau-flow, from whichever
// transformation form the file carries.
struct TauData {
  Expr eta;
  std::optional<Expr> hstar;
};

std::optional<TauData> tau_data(const SystemFileData& data) {
  if (!data.ntt) return std::nullopt;
  const NttSpec& spec = *data.ntt;
  const PoissonSystem& sys = data.system;
  TauData td;
  switch (spec.kind) {
    case NttSpec::Kind::ExplicitEta:
      td.eta = spec.payload;
      td.hstar = spec.hstar_hint;
      return td;
    case NttSpec::Kind::Constructive: {
      Expr dphi = differentiate(spec.payload, 0);
      td.eta = substitute_hamiltonian_casimirs(dphi, sys);
      td.hstar = substitute_hamiltonian_casimirs(spec.payload, sys);
      return td;
    }
    case NttSpec::Kind::Implicit: {
      if (!spec.hstar_hint) return std::nullopt;  // eta not closed-form
      Expr eta_z = Expr::div(Expr::neg(differentiate(spec.payload, 0)),
                             differentiate(spec.payload, 1));
      td.eta = substitute_implicit(eta_z, sys, spec.hstar_hint);
      td.hstar = spec.hstar_hint;
      return td;
    }
  }
  return std::nullopt;
}

}  // namespace

CommandOutcome cmd_validate(const SystemFileData& data, const Options& opt) {
  return guarded([&](CommandOutcome& out) {
    SamplePlan plan = make_plan(data, opt);
    VerificationReport report = verify_system(data.system, plan);
    out.report = report;
    out.status = report.all_passed() ? Status::Ok : Status::CheckFailed;
    out.text += render_human(report, data.system.vars);
  });
}

CommandOutcome cmd_analyze_ntt(const SystemFileData& data,
                               const Options& opt) {
  return guarded([&](CommandOutcome& out) {
    if (!data.ntt || data.ntt->kind != NttSpec::Kind::ExplicitEta) {
      throw InputError("analyze-ntt requires an [ntt] section with eta");
    }
    SamplePlan plan = make_plan(data, opt);
    if (!verified_or_report(data, plan, out)) return;
    NttVerdict v = analyze(data.system, data.ntt->payload, plan,
                           data.ntt->hstar_hint);
    out.status = status_for(v.preserves);
    append_verdict(out, data, v);
  });
}

CommandOutcome cmd_rescale(const SystemFileData& data, const Options& opt) {
  return guarded([&](CommandOutcome& out) {
    if (!data.ntt || data.ntt->kind != NttSpec::Kind::Constructive) {
      throw InputError("rescale requires an [ntt] section with Phi");
    }
    SamplePlan plan = make_plan(data, opt);
    if (!verified_or_report(data, plan, out)) return;
    NttVerdict v = rescale(data.system, data.ntt->payload, plan);
    out.status = status_for(v.preserves);
    append_verdict(out, data, v);
  });
}

CommandOutcome cmd_implicit(const SystemFileData& data, const Options& opt) {
  return guarded([&](CommandOutcome& out) {
    if (!data.ntt || data.ntt->kind != NttSpec::Kind::Implicit) {
      throw InputError("implicit requires an [ntt] section with F");
    }
    SamplePlan plan = make_plan(data, opt);
    if (!verified_or_report(data, plan, out)) return;
    NttVerdict v =
        implicit_eta(data.system, data.ntt->payload, data.ntt->hstar_hint,
                     plan);
    out.status = status_for(v.preserves);
    append_verdict(out, data, v);
  });
}

CommandOutcome cmd_classify(const SystemFileData& data, const Options& opt) {
  return guarded([&](CommandOutcome& out) {
    if (!data.ntt) {
      throw InputError("classify requires an [ntt] section with Phi and one "
                       "of eta0, c, casimir_factor");
    }
    SamplePlan plan = make_plan(data, opt);
    if (!verified_or_report(data, plan, out)) return;
    NttVerdict v = classify(data.system, *data.ntt, plan);
    out.status = status_for(v.preserves);
    append_verdict(out, data, v);
  });
}

CommandOutcome cmd_simulate(const SystemFileData& data, const Options& opt,
                            const SimulateParams& params) {
  return guarded([&](CommandOutcome& out) {
    const PoissonSystem& sys = data.system;
    SamplePlan plan = make_plan(data, opt);
    validate_declaration(sys);

    std::optional<TauData> tau;
    if (params.flow != Flow::T) {
      tau = tau_data(data);
      if (!tau) {
        throw InputError(
            "the tau-flow needs an eta: provide [ntt] eta, Phi, or F with an "
            "Hstar hint");
      }
    }

    // invariants watched along every flow
    std::vector<Expr> invariants{sys.hamiltonian};
    std::vector<std::string> inv_names{"H"};
    for (size_t i = 0; i < sys.casimirs.size(); ++i) {
      invariants.push_back(sys.casimirs[i]);
      inv_names.push_back("C" + std::to_string(i + 1));
    }
    if (params.flow == Flow::T) {
      // H* is conserved by the t-flow as well; show it when derivable
      if (auto td = tau_data(data); td && td->hstar) {
        invariants.push_back(*td->hstar);
        inv_names.push_back("Hstar");
      }
    } else if (tau->hstar) {
      invariants.push_back(*tau->hstar);
      inv_names.push_back("Hstar");
    }

    auto run_flow = [&](const std::optional<Expr>& eta) {
      Trajectory traj = integrate(sys, eta, params.x0, params.t_end,
                                  params.dt, plan.tol.min_eta);
      out.trajectories.push_back(traj);
      out.trajectory_csv.push_back(traj.to_csv(sys.vars));
      return traj;
    };

    std::vector<Trajectory> flows;
    if (params.flow == Flow::T || params.flow == Flow::Both) {
      flows.push_back(run_flow(std::nullopt));
    }
    if (params.flow == Flow::Tau || params.flow == Flow::Both) {
      flows.push_back(run_flow(tau->eta));
    }

    bool all_ok = true;
    for (const Trajectory& traj : flows) {
      out.text += traj.flow + "-flow: " +
                  std::to_string(traj.states.size()) + " states, step " +
                  fmt(traj.step) + ", reached t = " + fmt(traj.t_reached);
      if (traj.truncated) out.text += " (truncated: left the domain box)";
      if (traj.aborted) out.text += " (aborted: " + traj.abort_reason + ")";
      out.text += "\n";
      auto drifts = invariant_drift(traj, invariants, inv_names);
      for (const auto& d : drifts) {
        bool ok = d.drift <= opt.drift_tol;
        all_ok = all_ok && ok;
        out.text += "  drift " + d.name + " = " + fmt(d.drift) +
                    (ok ? "" : "  EXCEEDS " + fmt(opt.drift_tol)) + "\n";
        CheckResult c;
        c.name = "drift_" + d.name + "_" + traj.flow;
        c.verdict = ok ? Verdict::Pass : Verdict::Fail;
        c.max_residual = d.drift;
        c.witness = d.worst_state;
        c.threshold = opt.drift_tol;
        out.report.add(std::move(c));
      }
    }

    if (params.flow == Flow::Both) {
      auto coin = orbit_coincidence(flows[0], flows[1], invariants, inv_names);
      bool ok = coin.within(opt.drift_tol);
      all_ok = all_ok && ok;
      out.text += "orbit coincidence (shared level sets): worst deviation " +
                  fmt(coin.worst) + (ok ? "" : "  EXCEEDS " +
                                                fmt(opt.drift_tol)) + "\n";
      CheckResult c;
      c.name = "orbit_coincidence";
      c.verdict = ok ? Verdict::Pass : Verdict::Fail;
      c.max_residual = coin.worst;
      c.threshold = opt.drift_tol;
      if (!coin.combined.empty()) c.witness = coin.combined.front().worst_state;
      out.report.add(std::move(c));
    }

    bool aborted = false;
    for (const Trajectory& traj : flows) aborted = aborted || traj.aborted;
    if (aborted) {
      out.status = Status::RuntimeAbort;
    } else {
      out.status = all_ok ? Status::Ok : Status::CheckFailed;
    }
  });
}

}  // namespace poisntt
