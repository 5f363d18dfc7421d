#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hocal/mixture.hpp"
#include "hocal/simplex.hpp"

namespace hocal {

struct SnapshotRecord {
  std::string partition;
  Snapshot snapshot;
};

/// k-snapshots tagged with caller-supplied partition ids.
class SnapshotDataset {
 public:
  SnapshotDataset(LabelSpace space, std::uint32_t k);

  /// Throws if the snapshot has the wrong size or label count.
  void add(std::string partition, Snapshot snapshot);

  const LabelSpace& space() const noexcept { return space_; }
  std::uint32_t k() const noexcept { return k_; }
  const std::vector<SnapshotRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Record counts per partition, in key order.
  std::map<std::string, std::size_t> partition_counts() const;

 private:
  LabelSpace space_;
  std::uint32_t k_;
  std::vector<SnapshotRecord> records_;
};

/// Partition id -> mixture. With a k set, every mixture must live on the
/// k-lattice (a calibration table); without one it is a plain mixture table,
/// e.g. a Bayes reference before projection.
class CalibrationTable {
 public:
  CalibrationTable(LabelSpace space, std::optional<std::uint32_t> k);

  /// Inserts or replaces a partition. `records` feeds the weighted mean error.
  void set(const std::string& partition, Mixture m, std::size_t records = 0);

  const LabelSpace& space() const noexcept { return space_; }
  std::optional<std::uint32_t> k() const noexcept { return k_; }
  const std::map<std::string, Mixture>& entries() const noexcept { return entries_; }
  const std::map<std::string, std::size_t>& record_counts() const noexcept { return counts_; }
  const Mixture& at(const std::string& partition) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  LabelSpace space_;
  std::optional<std::uint32_t> k_;
  std::map<std::string, Mixture> entries_;
  std::map<std::string, std::size_t> counts_;
};

enum class EmptyPartitionPolicy {
  Error,
  UniformVertices,  // 1/l on each vertex, flagged with a record count of 0
};

struct CalibrateOptions {
  /// Partitions that must appear in the output; an empty list means "those
  /// present in the data".
  std::vector<std::string> expected_partitions;
  EmptyPartitionPolicy empty_policy = EmptyPartitionPolicy::Error;
};

/// Per partition, the uniform empirical mixture over its snapshot histograms.
CalibrationTable posthoc_calibrate(const SnapshotDataset& ds, const CalibrateOptions& opts = {});

struct CalibrationScore {
  std::map<std::string, double> per_partition;
  double worst = 0.0;
  /// Weighted by the table's record counts; uniform if it has none.
  double weighted_mean = 0.0;
};

/// Per-partition W1 between a table and a reference. Throws KeyMismatch when
/// the partition sets differ.
CalibrationScore koc_error(const CalibrationTable& table, const CalibrationTable& reference);

/// ceil(2 (|Y^(k)| ln 2 + ln(1/delta)) / eps^2).
std::uint64_t required_samples(const LabelSpace& space, std::uint32_t k, double eps, double delta);

/// ceil(128 (4 ln 2 + ln(1/delta)) / eps^2): the sample size quoted for
/// estimating average binary Brier entropy to within eps.
std::uint64_t brier_corollary_samples(double eps, double delta);

/// eps + l / (2 sqrt k).
double hoc_bound(double eps, const LabelSpace& space, std::uint32_t k);

}  // namespace hocal
