#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "hocal/mixture.hpp"
#include "hocal/moments.hpp"

namespace hocal {

/// Points within l1 distance `radius` of some center.
class PredictionSet {
 public:
  PredictionSet(std::vector<SimplexPoint> centers, double radius);

  const std::vector<SimplexPoint>& centers() const noexcept { return centers_; }
  double radius() const noexcept { return radius_; }
  bool contains(const SimplexPoint& p) const;

 private:
  std::vector<SimplexPoint> centers_;
  double radius_;
};

/// A bias interval [lo, hi] for binary labels.
class IntervalSet {
 public:
  IntervalSet(double lo, double hi);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool contains(const SimplexPoint& p) const;

 private:
  double lo_;
  double hi_;
};

/// Support points in decreasing weight (ties in support order) until the
/// captured mass reaches 1 - alpha. Radius 0.
PredictionSet build_mass_set(const Mixture& m, double alpha);

PredictionSet enlarge(const PredictionSet& s, double delta);

/// Total weight of the support points inside the set.
double coverage(const PredictionSet& s, const Mixture& m);
double coverage(const IntervalSet& s, const Mixture& m);

/// [m_1 - delta, m_1 + delta] clipped to [0, 1], delta = ((c_j + eps') / alpha)^(1/j)
/// with j the largest even order available and eps' = j eps (1 + m_1)^j / 2.
IntervalSet moment_interval(const MomentVector& mv, double alpha);

/// alpha = delta = sqrt(eps).
std::pair<double, double> recommended_alpha_delta(double eps);

nlohmann::json to_json(const PredictionSet& s);
nlohmann::json to_json(const IntervalSet& s);

}  // namespace hocal
