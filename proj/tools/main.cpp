// poisntt command-line front end. Talks to the core exclusively through the
// C API in poisntt.h, the same surface other language bindings would use.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "poisntt.h"

namespace {

struct GlobalOpts {
  std::optional<int> points;
  std::optional<double> seed;
  std::optional<double> atol;
  std::optional<double> rtol;
  std::optional<double> min_eta;
  std::string report_path;
};

class SystemHandle {
 public:
  explicit SystemHandle(poisntt_system* s) : sys_(s) {}
  ~SystemHandle() { poisntt_system_free(sys_); }
  SystemHandle(const SystemHandle&) = delete;
  SystemHandle& operator=(const SystemHandle&) = delete;
  poisntt_system* get() const { return sys_; }

 private:
  poisntt_system* sys_;
};

class ResultHandle {
 public:
  explicit ResultHandle(poisntt_result* r) : res_(r) {}
  ~ResultHandle() { poisntt_result_free(res_); }
  ResultHandle(const ResultHandle&) = delete;
  ResultHandle& operator=(const ResultHandle&) = delete;
  poisntt_result* get() const { return res_; }

 private:
  poisntt_result* res_;
};

int load_system(const std::string& file, const GlobalOpts& opts,
                poisntt_system** out) {
  char errbuf[512];
  poisntt_status st = poisntt_load_file(file.c_str(), out, errbuf,
                                        sizeof errbuf);
  if (st != POISNTT_OK) {
    std::cerr << "error: " << errbuf << "\n";
    return static_cast<int>(st);
  }
  if (opts.points) poisntt_system_set(*out, "points", *opts.points);
  if (opts.seed) poisntt_system_set(*out, "seed", *opts.seed);
  if (opts.atol) poisntt_system_set(*out, "atol", *opts.atol);
  if (opts.rtol) poisntt_system_set(*out, "rtol", *opts.rtol);
  if (opts.min_eta) poisntt_system_set(*out, "min_eta", *opts.min_eta);
  return -1;  // loaded
}

bool write_file(const std::string& path, const char* content,
                const char* what) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << what << " to '" << path << "'\n";
    return false;
  }
  out << (content ? content : "");
  return true;
}

int emit_result(const ResultHandle& res, const GlobalOpts& opts) {
  std::cout << poisntt_result_text(res.get());
  if (!opts.report_path.empty()) {
    if (!write_file(opts.report_path, poisntt_result_report_lines(res.get()),
                    "report")) {
      return static_cast<int>(POISNTT_INPUT_ERROR);
    }
  }
  return static_cast<int>(poisntt_result_status(res.get()));
}

using CommandFn = poisntt_status (*)(const poisntt_system*,
                                     poisntt_result**);

int run_simple(const std::string& file, const GlobalOpts& opts,
               CommandFn command) {
  poisntt_system* sys = nullptr;
  int rc = load_system(file, opts, &sys);
  if (rc >= 0) return rc;
  SystemHandle handle(sys);
  poisntt_result* res = nullptr;
  command(handle.get(), &res);
  ResultHandle result(res);
  return emit_result(result, opts);
}

bool parse_x0(const std::string& text, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(tok, &used));
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
      if (used != tok.size()) return false;
    } catch (...) {
      return false;
    }
  }
  return !out.empty();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "poisntt - verifies finite-dimensional Poisson systems and decides "
      "which new-time rescalings dtau = dt/eta(x) keep their structure"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--points", opts.points, "sample points (overrides file)");
  app.add_option("--seed", opts.seed, "sample seed (overrides file)");
  app.add_option("--atol", opts.atol, "absolute tolerance (default 1e-9)");
  app.add_option("--rtol", opts.rtol, "relative tolerance (default 1e-9)");
  app.add_option("--min-eta", opts.min_eta,
                 "|eta| below this counts as vanishing (default 1e-9)");
  app.add_option("--report", opts.report_path,
                 "write the machine-readable check report to this path");
  std::string export_path;
  app.add_option("--export-trajectory", export_path,
                 "simulate: write trajectory CSV here (tau-flow of 'both' "
                 "goes to <path>.tau)");

  std::string file;
  auto add_file = [&](CLI::App* sub) {
    sub->fallthrough();  // global flags may follow the subcommand
    sub->add_option("file", file, "system-definition file")
        ->required()
        ->check(CLI::ExistingFile);
  };

  auto* validate = app.add_subcommand(
      "validate", "verify skew-symmetry, Jacobi identity, Casimirs, "
                  "independence and rank constancy");
  add_file(validate);

  auto* analyze = app.add_subcommand(
      "analyze-ntt", "decide whether the explicit eta preserves the Poisson "
                     "structure");
  add_file(analyze);

  auto* rescale = app.add_subcommand(
      "rescale", "build H* and eta from Phi and verify the identity");
  add_file(rescale);

  auto* implicit = app.add_subcommand(
      "implicit", "derive eta from an implicit relation F(H, H*, C...) = 0");
  add_file(implicit);

  auto* classify = app.add_subcommand(
      "classify", "match the rescaled structure matrix to its rank case");
  add_file(classify);

  auto* simulate = app.add_subcommand(
      "simulate", "integrate the t-flow and/or tau-flow and report "
                  "invariant drift");
  add_file(simulate);
  std::string x0_text, flow_text = "t";
  double t_end = 10.0, dt = 1e-3, drift_tol = 1e-6;
  simulate->add_option("--x0", x0_text, "initial point, comma-separated")
      ->required();
  simulate->add_option("--t-end", t_end, "integration horizon (default 10)");
  simulate->add_option("--dt", dt, "time step (default 1e-3)");
  simulate->add_option("--flow", flow_text, "t | tau | both (default t)");
  simulate->add_option("--drift-tol", drift_tol,
                       "max tolerated invariant drift (default 1e-6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help/--version exit 0; every argument problem is an input error
    int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(POISNTT_INPUT_ERROR);
  }

  if (validate->parsed()) return run_simple(file, opts, poisntt_validate);
  if (analyze->parsed()) return run_simple(file, opts, poisntt_analyze_ntt);
  if (rescale->parsed()) return run_simple(file, opts, poisntt_rescale);
  if (implicit->parsed()) return run_simple(file, opts, poisntt_implicit);
  if (classify->parsed()) return run_simple(file, opts, poisntt_classify);

  // simulate
  std::vector<double> x0;
  if (!parse_x0(x0_text, x0)) {
    std::cerr << "error: --x0 must be a comma-separated list of numbers\n";
    return static_cast<int>(POISNTT_INPUT_ERROR);
  }
  poisntt_flow flow;
  if (flow_text == "t") {
    flow = POISNTT_FLOW_T;
  } else if (flow_text == "tau") {
    flow = POISNTT_FLOW_TAU;
  } else if (flow_text == "both") {
    flow = POISNTT_FLOW_BOTH;
  } else {
    std::cerr << "error: --flow must be t, tau or both\n";
    return static_cast<int>(POISNTT_INPUT_ERROR);
  }

  poisntt_system* sys = nullptr;
  int rc = load_system(file, opts, &sys);
  if (rc >= 0) return rc;
  SystemHandle handle(sys);
  poisntt_system_set(handle.get(), "drift_tol", drift_tol);
  poisntt_result* res = nullptr;
  poisntt_simulate(handle.get(), x0.data(), static_cast<int>(x0.size()),
                   t_end, dt, flow, &res);
  ResultHandle result(res);

  if (!export_path.empty()) {
    int count = poisntt_result_trajectory_count(result.get());
    for (int i = 0; i < count; ++i) {
      std::string path = export_path;
      if (count > 1 &&
          std::string(poisntt_result_trajectory_tag(result.get(), i)) ==
              "tau") {
        path += ".tau";
      }
      if (!write_file(path, poisntt_result_trajectory_csv(result.get(), i),
                      "trajectory")) {
        return static_cast<int>(POISNTT_INPUT_ERROR);
      }
    }
  }
  return emit_result(result, opts);
}
