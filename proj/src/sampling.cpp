#include "sampling.hpp"

#include <cmath>

#include "errors.hpp"

namespace poisntt {

bool Domain::contains(std::span<const double> x) const {
  if (x.size() != box.size()) return false;
  for (size_t i = 0; i < box.size(); ++i) {
    if (x[i] < box[i][0] || x[i] > box[i][1]) return false;
  }
  return true;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

PointStream::PointStream(const SamplePlan& plan) : plan_(plan) {
  int d = plan.domain.dim();
  if (d <= 0) throw InputError("sampling domain has no variables");
  // Generalized golden-ratio lattice: phi_d solves x^(d+1) = x + 1.
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) {
    phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  }
  alpha_.resize(static_cast<size_t>(d));
  offset_.resize(static_cast<size_t>(d));
  double a = 1.0;
  for (int j = 0; j < d; ++j) {
    a /= phi;
    alpha_[static_cast<size_t>(j)] = a;
    offset_[static_cast<size_t>(j)] = unit_from_bits(
        splitmix64(plan.seed * 0x5851F42D4C957F2DULL + static_cast<std::uint64_t>(j)));
  }
  budget_ = static_cast<std::int64_t>(plan.points) * 1000 + 1000;
}

Point PointStream::raw(std::int64_t index) const {
  int d = plan_.domain.dim();
  Point p(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) {
    double u = offset_[static_cast<size_t>(j)] +
               static_cast<double>(index + 1) * alpha_[static_cast<size_t>(j)];
    u -= std::floor(u);
    const auto& range = plan_.domain.box[static_cast<size_t>(j)];
    p[static_cast<size_t>(j)] = range[0] + u * (range[1] - range[0]);
  }
  return p;
}

std::optional<Point> PointStream::next() {
  while (draws_ < budget_) {
    Point p = raw(index_++);
    ++draws_;
    bool rejected = false;
    for (const Expr& pred : plan_.domain.exclusions) {
      double v;
      try {
        v = evaluate(pred, p);
      } catch (const EvalError&) {
        rejected = true;  // predicate undefined there: outside the domain
        break;
      }
      if (std::fabs(v) < plan_.domain.epsilon_exclude) {
        rejected = true;
        break;
      }
    }
    if (!rejected) return p;
  }
  return std::nullopt;
}

std::vector<Point> sample_points(const SamplePlan& plan) {
  PointStream stream(plan);
  std::vector<Point> pts;
  pts.reserve(static_cast<size_t>(plan.points));
  for (int i = 0; i < plan.points; ++i) {
    auto p = stream.next();
    if (!p) {
      throw InputError(
          "sampling exhausted: exclusion predicates reject the domain");
    }
    pts.push_back(std::move(*p));
  }
  return pts;
}

}  // namespace poisntt
