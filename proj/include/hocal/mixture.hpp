#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "hocal/rng.hpp"
#include "hocal/simplex.hpp"

namespace hocal {

inline constexpr double kMergeTolerance = 1e-12;

struct WeightedPoint {
  SimplexPoint point;
  double weight;
};

/// A finitely supported distribution over the simplex.
///
/// Construction merges support points closer than kMergeTolerance in l1,
/// drops zero weights, and checks that weights sum to one. The support is
/// stored in lexicographic order of the points, so two mixtures describing
/// the same distribution compare equal component by component.
class Mixture {
 public:
  Mixture(LabelSpace space, std::vector<WeightedPoint> components);

  static Mixture point_mass(SimplexPoint p);

  /// Binary convenience: pairs of (bias, weight).
  static Mixture binary(std::vector<std::pair<double, double>> bias_weights);

  const LabelSpace& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return support_.size(); }
  const std::vector<WeightedPoint>& support() const noexcept { return support_; }
  const SimplexPoint& point(std::size_t i) const { return support_[i].point; }
  double weight(std::size_t i) const { return support_[i].weight; }

 private:
  LabelSpace space_;
  std::vector<WeightedPoint> support_;
};

SimplexPoint centroid(const Mixture& m);

/// Exact k-th order projection: the law of the normalized histogram of k iid
/// labels drawn from a component drawn from `m`.
Mixture project_k(const Mixture& m, std::uint32_t k, std::size_t cap = kDefaultEnumerationCap);

/// Draws one component by weight, then k iid labels from it.
Snapshot sample_snapshot(const Mixture& m, std::uint32_t k, Rng& rng);

/// Uniform weights over the given points, duplicates merged.
Mixture empirical_mixture(const std::vector<SimplexPoint>& points);

/// log of the multinomial coefficient k! / prod(c_j!).
double log_multinomial(std::span<const std::uint32_t> counts);

}  // namespace hocal
