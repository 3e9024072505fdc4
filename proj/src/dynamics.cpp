#include "dynamics.hpp"

#include <cmath>
#include <cstdio>

#include "errors.hpp"

namespace poisntt {

std::string Trajectory::to_csv(std::span<const std::string> names) const {
  std::string out = "t";
  for (const auto& n : names) {
    out += ",";
    out += n;
  }
  out += "\n";
  char buf[40];
  for (size_t r = 0; r < times.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", times[r]);
    out += buf;
    for (double v : states[r]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class VectorField {
 public:
  VectorField(const PoissonSystem& sys, const std::optional<Expr>& eta)
      : sys_(sys), eta_(eta), n_(sys.dim()),
        grad_h_(gradient(sys.hamiltonian, sys.dim())),
        jx_(static_cast<size_t>(sys.dim()) * sys.dim()),
        gh_(static_cast<size_t>(sys.dim())) {}

  void operator()(std::span<const double> x, std::span<double> out) {
    sys_.J.eval(x, jx_.data());
    for (int j = 0; j < n_; ++j) {
      gh_[static_cast<size_t>(j)] = evaluate(grad_h_[static_cast<size_t>(j)], x);
    }
    double scale = 1.0;
    if (eta_) scale = evaluate(*eta_, x);
    for (int i = 0; i < n_; ++i) {
      double v = 0.0;
      for (int j = 0; j < n_; ++j) {
        v += jx_[static_cast<size_t>(i) * n_ + j] * gh_[static_cast<size_t>(j)];
      }
      out[static_cast<size_t>(i)] = scale * v;
    }
  }

 private:
  const PoissonSystem& sys_;
  const std::optional<Expr>& eta_;
  int n_;
  std::vector<Expr> grad_h_;
  std::vector<double> jx_;
  std::vector<double> gh_;
};

}  // namespace

Trajectory integrate(const PoissonSystem& sys, const std::optional<Expr>& eta,
                     const Point& x0, double t_end, double dt,
                     double min_eta) {
  const int n = sys.dim();
  if (dt <= 0.0 || !std::isfinite(dt)) {
    throw InputError("time step dt must be positive");
  }
  if (t_end <= 0.0 || !std::isfinite(t_end)) {
    throw InputError("t_end must be positive");
  }
  if (static_cast<int>(x0.size()) != n) {
    throw InputError("initial point has wrong dimension");
  }
  for (double v : x0) {
    if (!std::isfinite(v)) throw InputError("initial point must be finite");
  }
  if (!sys.domain.contains(x0)) {
    throw InputError("initial point lies outside the domain box");
  }

  Trajectory traj;
  traj.flow = eta ? "tau" : "t";

  double eta_sign = 0.0;
  if (eta) {
    double e0 = evaluate(*eta, x0);
    if (std::fabs(e0) < min_eta) {
      throw PremiseError("eta vanishes at the initial point (|eta| = " +
                         fmt(std::fabs(e0)) + ")");
    }
    eta_sign = e0 > 0.0 ? 1.0 : -1.0;
  }

  long long steps = std::llround(t_end / dt);
  if (steps < 1) steps = 1;
  const double h = t_end / static_cast<double>(steps);
  traj.step = h;

  VectorField field(sys, eta);
  std::vector<double> k1(static_cast<size_t>(n)), k2(k1), k3(k1), k4(k1),
      tmp(k1);
  Point x = x0;
  traj.times.push_back(0.0);
  traj.states.push_back(x);

  for (long long s = 0; s < steps; ++s) {
    double t = static_cast<double>(s) * h;
    try {
      field(x, k1);
      for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
      field(tmp, k2);
      for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
      field(tmp, k3);
      for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
      field(tmp, k4);
    } catch (const EvalError& e) {
      traj.aborted = true;
      traj.abort_reason = "field evaluation failed at t = " +
                          fmt(t) + ": " + e.what();
      traj.t_reached = t;
      return traj;
    }
    for (int i = 0; i < n; ++i) {
      x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    double t_next = (s + 1 == steps) ? t_end : (static_cast<double>(s + 1) * h);

    for (double v : x) {
      if (!std::isfinite(v)) {
        traj.aborted = true;
        traj.abort_reason =
            "state became non-finite at t = " + fmt(t_next);
        traj.t_reached = t;
        return traj;
      }
    }
    if (!sys.domain.contains(x)) {
      traj.truncated = true;
      traj.t_reached = t;
      return traj;
    }
    if (eta) {
      double ev;
      try {
        ev = evaluate(*eta, x);
      } catch (const EvalError& e) {
        traj.aborted = true;
        traj.abort_reason = "eta undefined along the trajectory at t = " +
                            fmt(t_next) + ": " + e.what();
        traj.t_reached = t;
        return traj;
      }
      if (std::fabs(ev) < min_eta || ev * eta_sign < 0.0) {
        traj.aborted = true;
        traj.abort_reason =
            "eta reached zero or changed sign at t = " +
            fmt(t_next) + " (eta = " + fmt(ev) + ")";
        traj.t_reached = t;
        return traj;
      }
    }
    traj.times.push_back(t_next);
    traj.states.push_back(x);
  }
  traj.t_reached = t_end;
  return traj;
}

std::vector<DriftEntry> invariant_drift(const Trajectory& traj,
                                        std::span<const Expr> invariants,
                                        std::span<const std::string> names) {
  std::vector<DriftEntry> out;
  out.reserve(invariants.size());
  for (size_t m = 0; m < invariants.size(); ++m) {
    DriftEntry entry;
    entry.name = m < names.size() ? names[m] : ("invariant_" + std::to_string(m + 1));
    if (!traj.states.empty()) {
      double base = evaluate(invariants[m], traj.states.front());
      for (const Point& p : traj.states) {
        double d = std::fabs(evaluate(invariants[m], p) - base);
        if (d >= entry.drift) {
          entry.drift = d;
          entry.worst_state = p;
        }
      }
    }
    out.push_back(std::move(entry));
  }
  return out;
}

CoincidenceReport orbit_coincidence(const Trajectory& a, const Trajectory& b,
                                    std::span<const Expr> invariants,
                                    std::span<const std::string> names) {
  if (a.states.empty() || b.states.empty() ||
      a.states.front() != b.states.front()) {
    throw InputError("orbit comparison requires both flows to share x0");
  }
  CoincidenceReport report;
  auto da = invariant_drift(a, invariants, names);
  auto db = invariant_drift(b, invariants, names);
  for (size_t m = 0; m < da.size(); ++m) {
    DriftEntry combined = da[m].drift >= db[m].drift ? da[m] : db[m];
    report.worst = std::max(report.worst, combined.drift);
    report.combined.push_back(std::move(combined));
  }
  return report;
}

}  // namespace poisntt
