#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ntt.hpp"
#include "poisson.hpp"

namespace poisntt {

// Parsed system-definition document: the Poisson system, the sampling
// settings, and at most one transformation section.
//
// Line-oriented format, '#' comments, sections in square brackets:
//   [system]   vars = x1 x2 x3 | rank = 2 | J 1 2 = <expr> (i < j only)
//              H = <expr> | casimir = <expr> (repeatable)
//   [domain]   range xk = lo hi | exclude = <expr> (repeatable)
//              epsilon_exclude = 1e-6
//   [sample]   points = 200 | seed = 42
//   [ntt]      exactly one of eta = <expr> | Phi = <expr in z1..> |
//              F = <expr in z1, z2, ..>; optional Hstar = <expr>;
//              classification factors: eta0 = <expr> | c = <number> |
//              casimir_factor = <expr>
struct SystemFileData {
  PoissonSystem system;
  std::optional<NttSpec> ntt;
  int points = 200;
  std::uint64_t seed = 42;
};

// Throws ParseError with a 1-based line number on malformed input and
// InputError on inconsistent declarations (rank/casimir count, ...).
SystemFileData parse_system_file(std::string_view text);

// Sampling plan exactly as the file specifies it (default tolerances).
SamplePlan make_sample_plan(const SystemFileData& data);

// Convenience: reads the file and parses it. IO failures surface as
// InputError.
SystemFileData load_system_file(const std::string& path);

}  // namespace poisntt
