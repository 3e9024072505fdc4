#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expr.hpp"

namespace poisntt {

enum class Verdict { Pass, Fail, Skipped };

const char* verdict_name(Verdict v);

struct CheckResult {
  std::string name;           // machine token, e.g. "jacobi"
  Verdict verdict = Verdict::Skipped;
  double max_residual = 0.0;
  Point witness;              // point of the worst residual (empty if none)
  double threshold = 0.0;     // atol + rtol*scale applied at the witness
  std::string detail;         // free text: worst triple, replacements, ...
};

// Per-check verdicts with worst-case residuals and witness points.
// fail <=> some residual exceeded atol + rtol*scale at an accepted point.
struct VerificationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  const CheckResult* find(std::string_view name) const;
  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void merge(const VerificationReport& other);
};

// Running max-residual tracker for a sampled check. Records both the worst
// residual and the worst tolerance margin so a failing witness is always a
// genuinely failing point.
class ResidualTracker {
 public:
  ResidualTracker(std::string name, double atol, double rtol)
      : name_(std::move(name)), atol_(atol), rtol_(rtol) {}

  void observe(double residual, double scale, const Point& p);
  void note_replacements(std::int64_t count) { replaced_ = count; }
  void append_detail(const std::string& s);

  bool failed() const { return worst_margin_ > 0.0; }
  CheckResult finish() const;

 private:
  std::string name_;
  double atol_, rtol_;
  double max_residual_ = 0.0;
  double threshold_at_max_ = 0.0;
  Point at_max_;
  double worst_margin_ = -1.0;
  double residual_at_margin_ = 0.0;
  double threshold_at_margin_ = 0.0;
  Point at_margin_;
  std::int64_t replaced_ = 0;
  std::string detail_;
  bool any_ = false;
};

std::string format_point(std::span<const double> p);

// Human-readable rendering, one block per check.
std::string render_human(const VerificationReport& report,
                         std::span<const std::string> names);

// Machine-readable key-value lines:
//   check=<name> verdict=<pass|fail> residual=<val> witness=<x1,...,xn>
std::string render_machine(const VerificationReport& report);

}  // namespace poisntt
