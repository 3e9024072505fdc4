#include "poisntt.h"

#include <cstring>
#include <new>
#include <string>

#include "commands.hpp"

using namespace poisntt;

struct poisntt_system {
  SystemFileData data;
  Options options;
};

struct poisntt_result {
  CommandOutcome outcome;
  std::string machine;
};

namespace {

void copy_error(char* errbuf, size_t errbuf_len, const std::string& msg) {
  if (!errbuf || errbuf_len == 0) return;
  size_t n = std::min(errbuf_len - 1, msg.size());
  std::memcpy(errbuf, msg.data(), n);
  errbuf[n] = '\0';
}

poisntt_status load_common(SystemFileData (*loader)(const std::string&),
                           const char* arg, poisntt_system** out_sys,
                           char* errbuf, size_t errbuf_len) {
  if (out_sys) *out_sys = nullptr;
  if (!arg || !out_sys) {
    copy_error(errbuf, errbuf_len, "null argument");
    return POISNTT_INPUT_ERROR;
  }
  try {
    auto* sys = new poisntt_system{loader(arg), Options{}};
    *out_sys = sys;
    return POISNTT_OK;
  } catch (const ParseError& e) {
    copy_error(errbuf, errbuf_len, e.what());
  } catch (const InputError& e) {
    copy_error(errbuf, errbuf_len, e.what());
  } catch (const std::bad_alloc&) {
    copy_error(errbuf, errbuf_len, "out of memory");
  } catch (const std::exception& e) {
    copy_error(errbuf, errbuf_len, e.what());
  }
  return POISNTT_INPUT_ERROR;
}

poisntt_status finish(poisntt_result** out, CommandOutcome outcome) {
  if (!out) return POISNTT_INPUT_ERROR;
  auto* res = new (std::nothrow) poisntt_result;
  if (!res) {
    *out = nullptr;
    return POISNTT_RUNTIME_ABORT;
  }
  res->outcome = std::move(outcome);
  res->machine = res->outcome.machine_report();
  *out = res;
  return static_cast<poisntt_status>(static_cast<int>(res->outcome.status));
}

}  // namespace

extern "C" {

const char* poisntt_version(void) { return "1.0.0"; }

poisntt_status poisntt_load_file(const char* path, poisntt_system** out_sys,
                                 char* errbuf, size_t errbuf_len) {
  return load_common(
      [](const std::string& p) { return load_system_file(p); }, path, out_sys,
      errbuf, errbuf_len);
}

poisntt_status poisntt_load_string(const char* text, poisntt_system** out_sys,
                                   char* errbuf, size_t errbuf_len) {
  return load_common(
      [](const std::string& t) { return parse_system_file(t); }, text,
      out_sys, errbuf, errbuf_len);
}

void poisntt_system_free(poisntt_system* sys) { delete sys; }

int poisntt_system_dimension(const poisntt_system* sys) {
  return sys ? sys->data.system.dim() : 0;
}

poisntt_status poisntt_system_set(poisntt_system* sys, const char* key,
                                  double value) {
  if (!sys || !key) return POISNTT_INPUT_ERROR;
  std::string k(key);
  if (k == "points") {
    if (value < 1 || value > 1e7) return POISNTT_INPUT_ERROR;
    sys->options.points = static_cast<int>(value);
  } else if (k == "seed") {
    if (value < 0 || value > 9e15) return POISNTT_INPUT_ERROR;
    sys->options.seed = static_cast<std::uint64_t>(value);
  } else if (k == "atol") {
    if (!(value >= 0)) return POISNTT_INPUT_ERROR;
    sys->options.atol = value;
  } else if (k == "rtol") {
    if (!(value >= 0)) return POISNTT_INPUT_ERROR;
    sys->options.rtol = value;
  } else if (k == "min_eta") {
    if (!(value >= 0)) return POISNTT_INPUT_ERROR;
    sys->options.min_eta = value;
  } else if (k == "drift_tol") {
    if (!(value > 0)) return POISNTT_INPUT_ERROR;
    sys->options.drift_tol = value;
  } else {
    return POISNTT_INPUT_ERROR;
  }
  return POISNTT_OK;
}

poisntt_status poisntt_validate(const poisntt_system* sys,
                                poisntt_result** out) {
  if (!sys || !out) return POISNTT_INPUT_ERROR;
  return finish(out, cmd_validate(sys->data, sys->options));
}

poisntt_status poisntt_analyze_ntt(const poisntt_system* sys,
                                   poisntt_result** out) {
  if (!sys || !out) return POISNTT_INPUT_ERROR;
  return finish(out, cmd_analyze_ntt(sys->data, sys->options));
}

poisntt_status poisntt_rescale(const poisntt_system* sys,
                               poisntt_result** out) {
  if (!sys || !out) return POISNTT_INPUT_ERROR;
  return finish(out, cmd_rescale(sys->data, sys->options));
}

poisntt_status poisntt_implicit(const poisntt_system* sys,
                                poisntt_result** out) {
  if (!sys || !out) return POISNTT_INPUT_ERROR;
  return finish(out, cmd_implicit(sys->data, sys->options));
}

poisntt_status poisntt_classify(const poisntt_system* sys,
                                poisntt_result** out) {
  if (!sys || !out) return POISNTT_INPUT_ERROR;
  return finish(out, cmd_classify(sys->data, sys->options));
}

poisntt_status poisntt_simulate(const poisntt_system* sys, const double* x0,
                                int n, double t_end, double dt,
                                poisntt_flow flow, poisntt_result** out) {
  if (!sys || !out || !x0 || n <= 0) return POISNTT_INPUT_ERROR;
  SimulateParams params;
  params.x0.assign(x0, x0 + n);
  params.t_end = t_end;
  params.dt = dt;
  params.flow = flow == POISNTT_FLOW_T
                    ? Flow::T
                    : (flow == POISNTT_FLOW_TAU ? Flow::Tau : Flow::Both);
  return finish(out, cmd_simulate(sys->data, sys->options, params));
}

void poisntt_result_free(poisntt_result* res) { delete res; }

poisntt_status poisntt_result_status(const poisntt_result* res) {
  if (!res) return POISNTT_INPUT_ERROR;
  return static_cast<poisntt_status>(static_cast<int>(res->outcome.status));
}

const char* poisntt_result_text(const poisntt_result* res) {
  return res ? res->outcome.text.c_str() : "";
}

const char* poisntt_result_report_lines(const poisntt_result* res) {
  return res ? res->machine.c_str() : "";
}

const char* poisntt_result_verdict(const poisntt_result* res) {
  if (!res || res->outcome.verdict.empty()) return nullptr;
  return res->outcome.verdict.c_str();
}

const char* poisntt_result_eta(const poisntt_result* res) {
  if (!res || res->outcome.eta_text.empty()) return nullptr;
  return res->outcome.eta_text.c_str();
}

const char* poisntt_result_hstar(const poisntt_result* res) {
  if (!res || res->outcome.hstar_text.empty()) return nullptr;
  return res->outcome.hstar_text.c_str();
}

int poisntt_result_check_count(const poisntt_result* res) {
  return res ? static_cast<int>(res->outcome.report.checks.size()) : 0;
}

static const CheckResult* check_at(const poisntt_result* res, int idx) {
  if (!res || idx < 0 ||
      idx >= static_cast<int>(res->outcome.report.checks.size())) {
    return nullptr;
  }
  return &res->outcome.report.checks[static_cast<size_t>(idx)];
}

const char* poisntt_result_check_name(const poisntt_result* res, int idx) {
  const CheckResult* c = check_at(res, idx);
  return c ? c->name.c_str() : nullptr;
}

const char* poisntt_result_check_verdict(const poisntt_result* res, int idx) {
  const CheckResult* c = check_at(res, idx);
  return c ? verdict_name(c->verdict) : nullptr;
}

double poisntt_result_check_residual(const poisntt_result* res, int idx) {
  const CheckResult* c = check_at(res, idx);
  return c ? c->max_residual : 0.0;
}

int poisntt_result_check_witness(const poisntt_result* res, int idx,
                                 double* coords, int cap) {
  const CheckResult* c = check_at(res, idx);
  if (!c) return 0;
  int n = static_cast<int>(c->witness.size());
  if (coords) {
    for (int i = 0; i < n && i < cap; ++i) {
      coords[i] = c->witness[static_cast<size_t>(i)];
    }
  }
  return n;
}

int poisntt_result_trajectory_count(const poisntt_result* res) {
  return res ? static_cast<int>(res->outcome.trajectories.size()) : 0;
}

const char* poisntt_result_trajectory_csv(const poisntt_result* res,
                                          int idx) {
  if (!res || idx < 0 ||
      idx >= static_cast<int>(res->outcome.trajectory_csv.size())) {
    return nullptr;
  }
  return res->outcome.trajectory_csv[static_cast<size_t>(idx)].c_str();
}

const char* poisntt_result_trajectory_tag(const poisntt_result* res,
                                          int idx) {
  if (!res || idx < 0 ||
      idx >= static_cast<int>(res->outcome.trajectories.size())) {
    return nullptr;
  }
  return res->outcome.trajectories[static_cast<size_t>(idx)].flow.c_str();
}

}  // extern "C"
