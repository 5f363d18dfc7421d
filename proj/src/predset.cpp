#include "hocal/predset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hocal/error.hpp"

namespace hocal {

namespace {

constexpr double kMembershipTolerance = 1e-12;
constexpr double kTieTolerance = 1e-12;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Domain, "alpha must be in (0, 1)");
}

}  // namespace

PredictionSet::PredictionSet(std::vector<SimplexPoint> centers, double radius)
    : centers_(std::move(centers)), radius_(radius) {
  if (!(radius_ >= 0.0)) throw Error(ErrorKind::Domain, "radius must be non-negative");
  for (const auto& c : centers_) {
    if (c.dim() != centers_.front().dim()) throw Error(ErrorKind::DimensionMismatch, "centers differ in dimension");
  }
}

bool PredictionSet::contains(const SimplexPoint& p) const {
  return std::any_of(centers_.begin(), centers_.end(), [&](const SimplexPoint& c) {
    return c.dim() == p.dim() && l1_distance(c, p) <= radius_ + kMembershipTolerance;
  });
}

IntervalSet::IntervalSet(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo_ >= 0.0 && lo_ <= hi_ && hi_ <= 1.0)) throw Error(ErrorKind::Domain, "interval must satisfy 0 <= lo <= hi <= 1");
}

bool IntervalSet::contains(const SimplexPoint& p) const {
  if (p.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "interval sets are binary");
  return p.bias() >= lo_ - kMembershipTolerance && p.bias() <= hi_ + kMembershipTolerance;
}

PredictionSet build_mass_set(const Mixture& m, double alpha) {
  check_alpha(alpha);
  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return m.weight(a) > m.weight(b) + kTieTolerance;
  });
  std::vector<SimplexPoint> centers;
  double captured = 0.0;
  for (std::size_t i : order) {
    if (captured >= 1.0 - alpha - kTieTolerance) break;
    centers.push_back(m.point(i));
    captured += m.weight(i);
  }
  return PredictionSet(std::move(centers), 0.0);
}

PredictionSet enlarge(const PredictionSet& s, double delta) {
  if (!(delta >= 0.0)) throw Error(ErrorKind::Domain, "delta must be non-negative");
  return PredictionSet(s.centers(), s.radius() + delta);
}

double coverage(const PredictionSet& s, const Mixture& m) {
  double c = 0.0;
  for (const auto& [p, w] : m.support()) {
    if (s.contains(p)) c += w;
  }
  return c;
}

double coverage(const IntervalSet& s, const Mixture& m) {
  double c = 0.0;
  for (const auto& [p, w] : m.support()) {
    if (s.contains(p)) c += w;
  }
  return c;
}

IntervalSet moment_interval(const MomentVector& mv, double alpha) {
  check_alpha(alpha);
  const std::uint32_t j = mv.k() - mv.k() % 2;
  if (j == 0) throw Error(ErrorKind::InvalidArgument, "moment interval needs k >= 2");
  const double m1 = mv[1];
  const double c = std::max(0.0, central_moment(mv, j).first);
  const double eps_prime = j * mv.eps() * std::pow(1.0 + m1, j) / 2.0;
  const double delta = std::pow((c + eps_prime) / alpha, 1.0 / j);
  return IntervalSet(std::clamp(m1 - delta, 0.0, 1.0), std::clamp(m1 + delta, 0.0, 1.0));
}

std::pair<double, double> recommended_alpha_delta(double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::Domain, "eps must be non-negative");
  const double r = std::sqrt(eps);
  return {r, r};
}

nlohmann::json to_json(const PredictionSet& s) {
  nlohmann::json centers = nlohmann::json::array();
  for (const auto& c : s.centers()) centers.push_back(std::vector<double>(c.probs().begin(), c.probs().end()));
  return nlohmann::json{{"centers", centers}, {"radius", s.radius()}};
}

nlohmann::json to_json(const IntervalSet& s) { return nlohmann::json{{"lo", s.lo()}, {"hi", s.hi()}}; }

}  // namespace hocal
