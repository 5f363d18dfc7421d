#include "hocal/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "hocal/error.hpp"
#include "hocal/transport.hpp"

namespace hocal {

SnapshotDataset::SnapshotDataset(LabelSpace space, std::uint32_t k) : space_(space), k_(k) {
  if (k_ < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
}

void SnapshotDataset::add(std::string partition, Snapshot snapshot) {
  if (snapshot.dim() != space_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "snapshot has the wrong number of labels");
  }
  if (snapshot.k() != k_) throw Error(ErrorKind::InvalidArgument, "snapshot size differs from k");
  records_.push_back({std::move(partition), std::move(snapshot)});
}

std::map<std::string, std::size_t> SnapshotDataset::partition_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records_) ++counts[r.partition];
  return counts;
}

CalibrationTable::CalibrationTable(LabelSpace space, std::optional<std::uint32_t> k) : space_(space), k_(k) {
  if (k_ && *k_ < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
}

void CalibrationTable::set(const std::string& partition, Mixture m, std::size_t records) {
  if (m.space() != space_) throw Error(ErrorKind::DimensionMismatch, "mixture has the wrong label space");
  if (k_) {
    for (const auto& [p, w] : m.support()) {
      if (lattice_counts(p, *k_).empty()) {
        throw Error(ErrorKind::OffLattice, "partition '" + partition + "' has a point off the k-lattice");
      }
    }
  }
  entries_.insert_or_assign(partition, std::move(m));
  counts_[partition] = records;
}

const Mixture& CalibrationTable::at(const std::string& partition) const {
  const auto it = entries_.find(partition);
  if (it == entries_.end()) throw Error(ErrorKind::KeyMismatch, "no partition '" + partition + "'");
  return it->second;
}

CalibrationTable posthoc_calibrate(const SnapshotDataset& ds, const CalibrateOptions& opts) {
  if (ds.empty() && opts.expected_partitions.empty()) {
    throw Error(ErrorKind::EmptyInput, "dataset has no records");
  }
  std::map<std::string, std::vector<SimplexPoint>> grouped;
  for (const auto& r : ds.records()) grouped[r.partition].push_back(snapshot_to_point(r.snapshot));

  CalibrationTable table(ds.space(), ds.k());
  for (auto& [id, pts] : grouped) {
    const std::size_t n = pts.size();
    table.set(id, empirical_mixture(pts), n);
  }
  for (const auto& id : opts.expected_partitions) {
    if (grouped.contains(id)) continue;
    if (opts.empty_policy == EmptyPartitionPolicy::Error) {
      throw Error(ErrorKind::EmptyInput, "partition '" + id + "' has no records");
    }
    std::vector<WeightedPoint> vertices;
    const std::size_t l = ds.space().size();
    for (std::size_t j = 0; j < l; ++j) vertices.push_back({SimplexPoint::vertex(l, j), 1.0 / l});
    table.set(id, Mixture(ds.space(), std::move(vertices)), 0);
  }
  return table;
}

CalibrationScore koc_error(const CalibrationTable& table, const CalibrationTable& reference) {
  if (table.space() != reference.space()) {
    throw Error(ErrorKind::DimensionMismatch, "tables live on different label spaces");
  }
  if (table.k() != reference.k()) throw Error(ErrorKind::InvalidArgument, "tables have different k");
  std::set<std::string> a;
  std::set<std::string> b;
  for (const auto& [id, m] : table.entries()) a.insert(id);
  for (const auto& [id, m] : reference.entries()) b.insert(id);
  if (a != b) throw Error(ErrorKind::KeyMismatch, "tables cover different partitions");

  TransportOptions opts;
  opts.lattice_k = table.k();
  CalibrationScore score;
  double total_records = 0.0;
  for (const auto& [id, n] : table.record_counts()) total_records += static_cast<double>(n);
  for (const auto& [id, m] : table.entries()) {
    const double w = wasserstein1(m, reference.at(id), opts).cost;
    score.per_partition[id] = w;
    score.worst = std::max(score.worst, w);
    const double weight = total_records > 0.0 ? static_cast<double>(table.record_counts().at(id)) / total_records
                                              : 1.0 / static_cast<double>(table.size());
    score.weighted_mean += weight * w;
  }
  score.weighted_mean = std::min(score.weighted_mean, score.worst);
  return score;
}

std::uint64_t required_samples(const LabelSpace& space, std::uint32_t k, double eps, double delta) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::Domain, "eps must be in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::Domain, "delta must be in (0, 1)");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  const double lattice = static_cast<double>(snapshot_space_size(space, k));
  const double n = 2.0 * (lattice * std::numbers::ln2 + std::log(1.0 / delta)) / (eps * eps);
  if (!(n < 1.8e19)) throw Error(ErrorKind::CapExceeded, "required sample size overflows");
  return static_cast<std::uint64_t>(std::ceil(n));
}

std::uint64_t brier_corollary_samples(double eps, double delta) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::Domain, "eps must be in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::Domain, "delta must be in (0, 1)");
  return static_cast<std::uint64_t>(
      std::ceil(128.0 * (4.0 * std::numbers::ln2 + std::log(1.0 / delta)) / (eps * eps)));
}

double hoc_bound(double eps, const LabelSpace& space, std::uint32_t k) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::Domain, "eps must be non-negative");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  return eps + static_cast<double>(space.size()) / (2.0 * std::sqrt(static_cast<double>(k)));
}

}  // namespace hocal
