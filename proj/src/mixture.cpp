#include "hocal/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hocal/error.hpp"

namespace hocal {

Mixture::Mixture(LabelSpace space, std::vector<WeightedPoint> components) : space_(space) {
  if (components.empty()) throw Error(ErrorKind::EmptyInput, "mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components) {
    if (c.point.dim() != space_.size()) {
      throw Error(ErrorKind::DimensionMismatch, "mixture component over a different label space");
    }
    if (!std::isfinite(c.weight) || c.weight < 0.0) {
      throw Error(ErrorKind::Domain, "mixture weight must be finite and non-negative");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw Error(ErrorKind::Domain, "mixture weights sum to " + std::to_string(total));
  }

  std::sort(components.begin(), components.end(),
            [](const WeightedPoint& a, const WeightedPoint& b) { return a.point < b.point; });

  // Merge pass. Points within tolerance in l1 are within tolerance in the
  // first coordinate, so only the tail of `support_` sharing that coordinate
  // needs scanning.
  support_.reserve(components.size());
  for (auto& c : components) {
    if (c.weight == 0.0) continue;
    bool merged = false;
    for (auto it = support_.rbegin(); it != support_.rend(); ++it) {
      if (c.point[0] - it->point[0] > kMergeTolerance) break;
      if (l1_distance(c.point, it->point) <= kMergeTolerance) {
        it->weight += c.weight;
        merged = true;
        break;
      }
    }
    if (!merged) support_.push_back(std::move(c));
  }
  // Leave weights that already sum to one bit-for-bit, so serialized mixtures
  // read back unchanged.
  if (std::abs(total - 1.0) > 1e-14) {
    for (auto& c : support_) c.weight /= total;
  }
}

Mixture Mixture::point_mass(SimplexPoint p) {
  LabelSpace space = p.space();
  return Mixture(space, {{std::move(p), 1.0}});
}

Mixture Mixture::binary(std::vector<std::pair<double, double>> bias_weights) {
  std::vector<WeightedPoint> comps;
  comps.reserve(bias_weights.size());
  for (auto [bias, w] : bias_weights) comps.push_back({SimplexPoint::binary(bias), w});
  return Mixture(LabelSpace(2), std::move(comps));
}

SimplexPoint centroid(const Mixture& m) {
  std::vector<double> acc(m.space().size(), 0.0);
  for (const auto& [p, w] : m.support()) {
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w * p[j];
  }
  return SimplexPoint::normalized(std::move(acc));
}

double log_multinomial(std::span<const std::uint32_t> counts) {
  double k = 0.0;
  double out = 0.0;
  for (auto c : counts) {
    k += c;
    out -= std::lgamma(static_cast<double>(c) + 1.0);
  }
  return out + std::lgamma(k + 1.0);
}

Mixture project_k(const Mixture& m, std::uint32_t k, std::size_t cap) {
  const auto lattice = enumerate_snapshot_space(m.space(), k, cap);
  const std::size_t l = m.space().size();

  // log p_j per component, with -inf for zero coordinates.
  std::vector<std::vector<double>> log_probs;
  log_probs.reserve(m.size());
  for (const auto& [p, w] : m.support()) {
    std::vector<double> lp(l);
    for (std::size_t j = 0; j < l; ++j) lp[j] = p[j] > 0.0 ? std::log(p[j]) : -INFINITY;
    log_probs.push_back(std::move(lp));
  }

  std::vector<WeightedPoint> out;
  out.reserve(lattice.size());
  for (const auto& s : lattice) {
    const double log_coef = log_multinomial(s.counts());
    double mass = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      double log_term = log_coef;
      for (std::size_t j = 0; j < l && std::isfinite(log_term); ++j) {
        if (s[j] > 0) log_term += static_cast<double>(s[j]) * log_probs[i][j];
      }
      if (std::isfinite(log_term)) mass += m.weight(i) * std::exp(log_term);
    }
    if (mass > 0.0) out.push_back({snapshot_to_point(s), mass});
  }
  return Mixture(m.space(), std::move(out));
}

namespace {

template <typename Weights>
std::size_t draw_index(const Weights& weight_of, std::size_t n, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    acc += weight_of(i);
    if (u < acc) return i;
  }
  return n - 1;
}

}  // namespace

Snapshot sample_snapshot(const Mixture& m, std::uint32_t k, Rng& rng) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "snapshot size k must be >= 1");
  const std::size_t comp =
      draw_index([&](std::size_t i) { return m.weight(i); }, m.size(), rng.uniform());
  const SimplexPoint& p = m.point(comp);
  const std::size_t l = p.dim();
  std::vector<std::uint32_t> counts(l, 0);
  for (std::uint32_t t = 0; t < k; ++t) {
    std::size_t y = draw_index([&](std::size_t j) { return p[j]; }, l, rng.uniform());
    // never land on a zero-probability trailing label due to rounding
    while (p[y] == 0.0 && y > 0) --y;
    ++counts[y];
  }
  return Snapshot(std::move(counts));
}

Mixture empirical_mixture(const std::vector<SimplexPoint>& points) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "empirical mixture of an empty list");
  const double w = 1.0 / static_cast<double>(points.size());
  std::vector<WeightedPoint> comps;
  comps.reserve(points.size());
  for (const auto& p : points) comps.push_back({p, w});
  return Mixture(points.front().space(), std::move(comps));
}

}  // namespace hocal
