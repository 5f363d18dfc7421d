#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hocal/calibrate.hpp"

namespace hocal {

inline constexpr int kFormatVersion = 1;

/// Line-delimited JSON: a header {"format_version": 1, "num_labels": l, "k": k}
/// followed by one {"partition": id, "labels": [...]} per line. Labels are
/// canonicalized to count vectors. Errors carry the 1-based line number.
SnapshotDataset read_snapshot_dataset(std::istream& in, const std::string& source = "<stream>");
SnapshotDataset read_snapshot_dataset(const std::filesystem::path& path);
void write_snapshot_dataset(std::ostream& out, const SnapshotDataset& ds);

/// {"format_version": 1, "type": "calibration_table" | "mixture_table",
///  "num_labels": l, "k": k (calibration tables only),
///  "partitions": {id: {"records": n, "support": [{"point": [...], "weight": w}]}}}
nlohmann::json to_json(const CalibrationTable& t);
CalibrationTable table_from_json(const nlohmann::json& j);
CalibrationTable read_table(const std::filesystem::path& path);
void write_table(std::ostream& out, const CalibrationTable& t);

nlohmann::json to_json(const CalibrationScore& s);

/// Shortest decimal string that reads back to the same double.
std::string format_number(double v);

}  // namespace hocal
