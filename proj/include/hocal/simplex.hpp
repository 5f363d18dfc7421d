#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hocal {

inline constexpr double kSimplexTolerance = 1e-9;
inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// The finite label set Y = {0, ..., num_labels - 1}.
class LabelSpace {
 public:
  explicit LabelSpace(std::size_t num_labels);
  std::size_t size() const noexcept { return num_labels_; }
  bool operator==(const LabelSpace&) const = default;

 private:
  std::size_t num_labels_;
};

/// A probability vector over a LabelSpace.
class SimplexPoint {
 public:
  /// Validates non-negativity and unit sum within kSimplexTolerance.
  explicit SimplexPoint(std::vector<double> probs);

  /// Ingests external data: clamps tiny negatives, renormalizes, and only then
  /// validates. Rejects vectors that are not near the simplex at all.
  static SimplexPoint normalized(std::vector<double> probs);

  /// Binary convenience: (1 - bias, bias).
  static SimplexPoint binary(double bias);

  static SimplexPoint vertex(std::size_t num_labels, std::size_t label);
  static SimplexPoint uniform(std::size_t num_labels);

  std::size_t dim() const noexcept { return probs_.size(); }
  LabelSpace space() const { return LabelSpace(probs_.size()); }
  double operator[](std::size_t j) const { return probs_[j]; }
  std::span<const double> probs() const noexcept { return probs_; }

  /// Probability of label 1; meaningful for binary spaces.
  double bias() const { return probs_.at(1); }

  bool operator==(const SimplexPoint&) const = default;
  auto operator<=>(const SimplexPoint& other) const { return probs_ <=> other.probs_; }

 private:
  std::vector<double> probs_;
};

/// A symmetrized k-snapshot: label counts summing to k.
class Snapshot {
 public:
  explicit Snapshot(std::vector<std::uint32_t> counts);

  /// Canonicalizes an ordered tuple of labels.
  static Snapshot from_labels(std::span<const std::uint32_t> labels, std::size_t num_labels);

  std::size_t dim() const noexcept { return counts_.size(); }
  std::uint32_t k() const noexcept { return k_; }
  std::uint32_t operator[](std::size_t j) const { return counts_[j]; }
  std::span<const std::uint32_t> counts() const noexcept { return counts_; }

  /// Labels in non-decreasing order; the canonical tuple for this multiset.
  std::vector<std::uint32_t> labels() const;

  bool operator==(const Snapshot&) const = default;
  auto operator<=>(const Snapshot& other) const { return counts_ <=> other.counts_; }

 private:
  std::vector<std::uint32_t> counts_;
  std::uint32_t k_ = 0;
};

double l1_distance(const SimplexPoint& a, const SimplexPoint& b);

SimplexPoint snapshot_to_point(const Snapshot& s);

/// |Y^(k)| = C(k + l - 1, l - 1), saturating at UINT64_MAX.
std::uint64_t snapshot_space_size(const LabelSpace& space, std::uint32_t k);

/// All multisets of size k over the label space, ordered lexicographically by
/// count vector in descending order, i.e. (k,0,..,0) first and (0,..,0,k) last.
std::vector<Snapshot> enumerate_snapshot_space(const LabelSpace& space, std::uint32_t k,
                                               std::size_t cap = kDefaultEnumerationCap);

/// Returns the count vector c with c/k == p when p lies on the k-lattice
/// within `tol` (in every coordinate), otherwise an empty vector.
std::vector<std::uint32_t> lattice_counts(const SimplexPoint& p, std::uint32_t k,
                                          double tol = kSimplexTolerance);

}  // namespace hocal
