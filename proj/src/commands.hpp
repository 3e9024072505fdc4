#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "errors.hpp"
#include "system_file.hpp"

namespace poisntt {

// Runtime overrides on top of the values carried by the system file.
struct Options {
  std::optional<int> points;
  std::optional<std::uint64_t> seed;
  std::optional<double> atol;
  std::optional<double> rtol;
  std::optional<double> min_eta;
  double drift_tol = 1e-6;  // simulate pass threshold
};

SamplePlan make_plan(const SystemFileData& data, const Options& opt);

// Everything a front end needs to render one command run. status doubles as
// the process exit code; commands never throw.
struct CommandOutcome {
  Status status = Status::Ok;
  VerificationReport report;
  std::string text;          // human-readable narrative
  std::string verdict;       // yes | no | inconclusive (transformation runs)
  std::string eta_text;      // DSL rendering when derived/given
  std::string hstar_text;
  std::vector<Trajectory> trajectories;
  std::vector<std::string> trajectory_csv;  // parallel to trajectories

  std::string machine_report() const { return render_machine(report); }
};

// validate: skew (structural), Jacobi, each Casimir, independence,
// rank constancy. Ok iff everything passes.
CommandOutcome cmd_validate(const SystemFileData& data, const Options& opt);

// analyze-ntt: explicit-eta decision (curl test for r = n, functional
// dependence for r < n). Ok iff the verdict is yes.
CommandOutcome cmd_analyze_ntt(const SystemFileData& data, const Options& opt);

// rescale: H* and eta from Phi, identity verified on the plan.
CommandOutcome cmd_rescale(const SystemFileData& data, const Options& opt);

// implicit: eta from F; Inconclusive without an H* hint.
CommandOutcome cmd_implicit(const SystemFileData& data, const Options& opt);

// classify: rank-case rescaling of the structure matrix itself.
CommandOutcome cmd_classify(const SystemFileData& data, const Options& opt);

enum class Flow { T, Tau, Both };

struct SimulateParams {
  Point x0;
  double t_end = 0.0;
  double dt = 0.0;
  Flow flow = Flow::T;
};

// simulate: integrates the requested flow(s), prints the per-invariant
// drift table, and with Flow::Both certifies orbit coincidence through the
// shared invariant level sets.
CommandOutcome cmd_simulate(const SystemFileData& data, const Options& opt,
                            const SimulateParams& params);

}  // namespace poisntt
