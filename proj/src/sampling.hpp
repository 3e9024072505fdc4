#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "expr.hpp"

namespace poisntt {

// Axis-aligned sampling box with optional exclusion predicates: a candidate
// point is rejected when |predicate(x)| < epsilon_exclude for any predicate.
struct Domain {
  std::vector<std::array<double, 2>> box;  // per-variable [lo, hi]
  std::vector<Expr> exclusions;
  double epsilon_exclude = 1e-6;

  int dim() const { return static_cast<int>(box.size()); }
  bool contains(std::span<const double> x) const;
};

struct Tolerances {
  double atol = 1e-9;
  double rtol = 1e-9;       // scaled by the largest intermediate term
  double pivot_rel = 1e-10; // rank pivot threshold, relative to matrix norm
  double min_eta = 1e-9;    // |eta| below this counts as vanishing
};

// Deterministic point cloud: an additive-recurrence lattice over the box,
// filtered by the exclusion predicates. Reproducible from (seed, points).
struct SamplePlan {
  int points = 200;
  std::uint64_t seed = 42;
  Domain domain;
  Tolerances tol;
};

// Streams accepted points of a plan in a fixed order. Checks that hit an
// evaluation error at an accepted point draw a replacement from the same
// stream, so verdicts stay deterministic.
class PointStream {
 public:
  explicit PointStream(const SamplePlan& plan);

  // Next accepted point, or nullopt once the draw budget is exhausted
  // (the exclusion predicates then reject essentially everything).
  std::optional<Point> next();

  std::int64_t draws() const { return draws_; }

 private:
  Point raw(std::int64_t index) const;

  const SamplePlan& plan_;
  std::vector<double> alpha_;
  std::vector<double> offset_;
  std::int64_t index_ = 0;
  std::int64_t draws_ = 0;
  std::int64_t budget_ = 0;
};

// Materializes plan.points accepted points. Throws InputError when the
// stream cannot produce that many.
std::vector<Point> sample_points(const SamplePlan& plan);

}  // namespace poisntt
