#include "report.hpp"

#include <cstdio>

namespace poisntt {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Skipped: return "skipped";
  }
  return "?";
}

bool VerificationReport::all_passed() const {
  for (const auto& c : checks) {
    if (c.verdict == Verdict::Fail) return false;
  }
  return true;
}

const CheckResult* VerificationReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void VerificationReport::merge(const VerificationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

void ResidualTracker::observe(double residual, double scale, const Point& p) {
  double threshold = atol_ + rtol_ * scale;
  double margin = residual - threshold;
  if (!any_ || residual > max_residual_) {
    max_residual_ = residual;
    threshold_at_max_ = threshold;
    at_max_ = p;
  }
  if (!any_ || margin > worst_margin_) {
    worst_margin_ = margin;
    residual_at_margin_ = residual;
    threshold_at_margin_ = threshold;
    at_margin_ = p;
  }
  any_ = true;
}

void ResidualTracker::append_detail(const std::string& s) {
  if (!detail_.empty()) detail_ += "; ";
  detail_ += s;
}

CheckResult ResidualTracker::finish() const {
  CheckResult c;
  c.name = name_;
  if (!any_) {
    c.verdict = Verdict::Skipped;
    c.detail = detail_.empty() ? "no accepted sample points" : detail_;
    return c;
  }
  if (worst_margin_ > 0.0) {
    c.verdict = Verdict::Fail;
    c.max_residual = residual_at_margin_;
    c.witness = at_margin_;
    c.threshold = threshold_at_margin_;
  } else {
    c.verdict = Verdict::Pass;
    c.max_residual = max_residual_;
    c.witness = at_max_;
    c.threshold = threshold_at_max_;
  }
  c.detail = detail_;
  if (replaced_ > 0) {
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += std::to_string(replaced_) + " sample point(s) replaced after evaluation errors";
  }
  return c;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string format_point(std::span<const double> p) {
  std::string out;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) out += ",";
    out += fmt(p[i]);
  }
  return out;
}

std::string render_human(const VerificationReport& report,
                         std::span<const std::string> names) {
  std::string out;
  for (const auto& c : report.checks) {
    out += "check ";
    out += c.name;
    out += ": ";
    out += verdict_name(c.verdict);
    if (!c.witness.empty()) {
      out += "  max residual ";
      out += fmt(c.max_residual);
      out += " (threshold ";
      out += fmt(c.threshold);
      out += ") at (";
      for (size_t i = 0; i < c.witness.size(); ++i) {
        if (i) out += ", ";
        if (i < names.size()) {
          out += names[i];
          out += "=";
        }
        out += fmt(c.witness[i]);
      }
      out += ")";
    }
    if (!c.detail.empty()) {
      out += "\n  ";
      out += c.detail;
    }
    out += "\n";
  }
  return out;
}

std::string render_machine(const VerificationReport& report) {
  std::string out;
  for (const auto& c : report.checks) {
    out += "check=";
    out += c.name;
    out += " verdict=";
    out += verdict_name(c.verdict);
    out += " residual=";
    out += fmt(c.max_residual);
    out += " witness=";
    out += c.witness.empty() ? "-" : format_point(c.witness);
    out += "\n";
  }
  return out;
}

}  // namespace poisntt
