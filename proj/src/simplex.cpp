#include "hocal/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hocal/error.hpp"

namespace hocal {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::CapExceeded: return "cap_exceeded";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::EmptyInput: return "empty_input";
    case ErrorKind::KeyMismatch: return "key_mismatch";
    case ErrorKind::OffLattice: return "off_lattice";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

LabelSpace::LabelSpace(std::size_t num_labels) : num_labels_(num_labels) {
  if (num_labels < 2) {
    throw Error(ErrorKind::InvalidArgument,
                "label space needs at least 2 labels, got " + std::to_string(num_labels));
  }
}

namespace {

void validate_probs(const std::vector<double>& probs) {
  if (probs.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "simplex point needs at least 2 coordinates");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorKind::Domain, "simplex point has a negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw Error(ErrorKind::Domain, "simplex point entries sum to " + std::to_string(sum));
  }
}

}  // namespace

SimplexPoint::SimplexPoint(std::vector<double> probs) : probs_(std::move(probs)) {
  validate_probs(probs_);
}

SimplexPoint SimplexPoint::normalized(std::vector<double> probs) {
  double sum = 0.0;
  for (double& p : probs) {
    if (!std::isfinite(p)) throw Error(ErrorKind::Domain, "non-finite probability");
    // rounding noise from external writers
    if (p < 0.0 && p > -1e-6) p = 0.0;
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorKind::Domain, "probabilities sum to " + std::to_string(sum));
  }
  for (double& p : probs) p /= sum;
  return SimplexPoint(std::move(probs));
}

SimplexPoint SimplexPoint::binary(double bias) {
  if (!(bias >= 0.0 && bias <= 1.0)) {
    throw Error(ErrorKind::Domain, "binary bias outside [0, 1]");
  }
  return SimplexPoint({1.0 - bias, bias});
}

SimplexPoint SimplexPoint::vertex(std::size_t num_labels, std::size_t label) {
  if (label >= num_labels) throw Error(ErrorKind::Domain, "vertex label out of range");
  std::vector<double> probs(num_labels, 0.0);
  probs[label] = 1.0;
  return SimplexPoint(std::move(probs));
}

SimplexPoint SimplexPoint::uniform(std::size_t num_labels) {
  return SimplexPoint(std::vector<double>(num_labels, 1.0 / static_cast<double>(num_labels)));
}

Snapshot::Snapshot(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {
  if (counts_.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "snapshot needs at least 2 label counts");
  }
  std::uint64_t total = 0;
  for (auto c : counts_) total += c;
  if (total == 0 || total > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::InvalidArgument, "snapshot size must be positive");
  }
  k_ = static_cast<std::uint32_t>(total);
}

Snapshot Snapshot::from_labels(std::span<const std::uint32_t> labels, std::size_t num_labels) {
  std::vector<std::uint32_t> counts(num_labels, 0);
  for (auto y : labels) {
    if (y >= num_labels) {
      throw Error(ErrorKind::Domain, "label " + std::to_string(y) + " out of range for " +
                                         std::to_string(num_labels) + " labels");
    }
    ++counts[y];
  }
  return Snapshot(std::move(counts));
}

std::vector<std::uint32_t> Snapshot::labels() const {
  std::vector<std::uint32_t> out;
  out.reserve(k_);
  for (std::uint32_t j = 0; j < counts_.size(); ++j) out.insert(out.end(), counts_[j], j);
  return out;
}

double l1_distance(const SimplexPoint& a, const SimplexPoint& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "l1_distance over different label spaces");
  }
  double d = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) d += std::abs(a[j] - b[j]);
  return d;
}

SimplexPoint snapshot_to_point(const Snapshot& s) {
  std::vector<double> probs(s.dim());
  const double k = static_cast<double>(s.k());
  for (std::size_t j = 0; j < s.dim(); ++j) probs[j] = static_cast<double>(s[j]) / k;
  return SimplexPoint(std::move(probs));
}

std::uint64_t snapshot_space_size(const LabelSpace& space, std::uint32_t k) {
  // C(n, r) with n = k + l - 1, r = min(k, l - 1), built incrementally so each
  // intermediate value is itself a binomial coefficient.
  const std::uint64_t n = static_cast<std::uint64_t>(k) + space.size() - 1;
  const std::uint64_t r = std::min<std::uint64_t>(k, space.size() - 1);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    c = c * (n - r + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(c);
}

std::vector<Snapshot> enumerate_snapshot_space(const LabelSpace& space, std::uint32_t k,
                                               std::size_t cap) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "snapshot size k must be >= 1");
  const std::uint64_t size = snapshot_space_size(space, k);
  if (size > cap) {
    throw Error(ErrorKind::CapExceeded, "|Y^(k)| = " + std::to_string(size) +
                                            " exceeds enumeration cap " + std::to_string(cap));
  }
  const std::size_t l = space.size();
  std::vector<Snapshot> out;
  out.reserve(static_cast<std::size_t>(size));

  // Descending lexicographic walk over compositions of k into l parts.
  std::vector<std::uint32_t> c(l, 0);
  c[0] = k;
  while (true) {
    out.emplace_back(c);
    // Rightmost position, excluding the last, that still holds a positive count.
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(l) - 2;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == 0) --i;
    if (i < 0) break;
    const auto at = static_cast<std::size_t>(i);
    // Everything right of `at` is zero except the last slot; gather it plus one
    // unit taken from `at` into position at + 1.
    const std::uint32_t tail = c[l - 1];
    c[l - 1] = 0;
    --c[at];
    c[at + 1] = tail + 1;
  }
  return out;
}

std::vector<std::uint32_t> lattice_counts(const SimplexPoint& p, std::uint32_t k, double tol) {
  std::vector<std::uint32_t> counts(p.dim());
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < p.dim(); ++j) {
    const double scaled = p[j] * static_cast<double>(k);
    const double nearest = std::round(scaled);
    if (std::abs(scaled - nearest) > tol * static_cast<double>(k) || nearest < 0.0) return {};
    counts[j] = static_cast<std::uint32_t>(nearest);
    total += counts[j];
  }
  if (total != k) return {};
  return counts;
}

}  // namespace hocal
