#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poisson.hpp"

namespace poisntt {

// Discrete orbit of either the original t-flow x' = J grad(H) or the
// reparametrized tau-flow x' = eta J grad(H).
struct Trajectory {
  std::vector<double> times;   // strictly increasing
  std::vector<Point> states;
  std::string flow;            // "t" | "tau"
  double step = 0.0;           // actual uniform step used
  std::string integrator = "rk4";
  bool truncated = false;      // left the domain box before t_end
  bool aborted = false;        // evaluation error or eta violation mid-run
  std::string abort_reason;
  double t_reached = 0.0;

  // Delimited text export: header with variable names, rows t,x1,...,xn.
  std::string to_csv(std::span<const std::string> names) const;
};

// Classical fixed-step 4th-order integration of the selected field from x0
// to t_end. The step is adjusted to land exactly on t_end
// (step = t_end / round(t_end/dt)). Deterministic.
//
// Leaving the domain box truncates the trajectory (reported, not an error).
// An evaluation error mid-run, or |eta| dropping below min_eta / changing
// sign on the tau-flow, marks the partial trajectory as aborted.
// Bad arguments throw InputError; eta vanishing already at x0 throws
// PremiseError.
Trajectory integrate(const PoissonSystem& sys, const std::optional<Expr>& eta,
                     const Point& x0, double t_end, double dt,
                     double min_eta = 1e-9);

struct DriftEntry {
  std::string name;
  double drift = 0.0;      // max |I(x) - I(x0)| along the trajectory
  Point worst_state;
};

// Max absolute drift of each invariant along the trajectory.
std::vector<DriftEntry> invariant_drift(const Trajectory& traj,
                                        std::span<const Expr> invariants,
                                        std::span<const std::string> names);

// Certifies that two trajectories from the same x0 lie on the same joint
// invariant level set: for each invariant the max deviation from its x0
// value over BOTH trajectories must stay within tol.
struct CoincidenceReport {
  std::vector<DriftEntry> combined;  // per-invariant combined bound
  double worst = 0.0;
  bool within(double tol) const { return worst <= tol; }
};
CoincidenceReport orbit_coincidence(const Trajectory& a, const Trajectory& b,
                                    std::span<const Expr> invariants,
                                    std::span<const std::string> names);

}  // namespace poisntt
