#pragma once

#include <string>

#include "errors.hpp"
#include "report.hpp"
#include "sampling.hpp"

namespace poisntt::detail {

// Shared skeleton of the sampled checks: draws plan.points accepted points,
// replaces (and counts) points where the body hits an evaluation error.
template <typename Body>
CheckResult run_sampled(const std::string& name, const SamplePlan& plan,
                        Body&& body) {
  ResidualTracker tracker(name, plan.tol.atol, plan.tol.rtol);
  PointStream stream(plan);
  std::int64_t replaced = 0;
  int done = 0;
  while (done < plan.points) {
    auto p = stream.next();
    if (!p) {
      throw InputError("sampling exhausted while running check '" + name +
                       "'");
    }
    try {
      body(*p, tracker);
    } catch (const EvalError&) {
      ++replaced;
      continue;
    }
    ++done;
  }
  tracker.note_replacements(replaced);
  return tracker.finish();
}

}  // namespace poisntt::detail
