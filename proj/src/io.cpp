#include "hocal/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "hocal/error.hpp"

namespace hocal {

namespace {

Error line_error(ErrorKind kind, const std::string& source, std::size_t line, const std::string& what) {
  return Error(kind, source + ":" + std::to_string(line) + ": " + what);
}

void check_version(const nlohmann::json& j) {
  if (j.contains("format_version") && j.at("format_version") != kFormatVersion) {
    throw Error(ErrorKind::Parse, "unsupported format_version " + j.at("format_version").dump());
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

}  // namespace

SnapshotDataset read_snapshot_dataset(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<SnapshotDataset> ds;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw line_error(ErrorKind::Parse, source, lineno, "malformed JSON");
    }
    if (!j.is_object()) throw line_error(ErrorKind::Parse, source, lineno, "expected an object");
    try {
      if (!ds) {
        check_version(j);
        const auto l = j.at("num_labels").get<std::size_t>();
        const auto k = j.at("k").get<std::uint32_t>();
        ds.emplace(LabelSpace(l), k);
        continue;
      }
      const auto partition = j.at("partition").get<std::string>();
      const auto labels = j.at("labels").get<std::vector<std::int64_t>>();
      if (labels.size() != ds->k()) {
        throw Error(ErrorKind::InvalidArgument,
                    "expected " + std::to_string(ds->k()) + " labels, got " + std::to_string(labels.size()));
      }
      std::vector<std::uint32_t> counts(ds->space().size(), 0);
      for (auto y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= counts.size()) {
          throw Error(ErrorKind::InvalidArgument, "label " + std::to_string(y) + " out of range");
        }
        ++counts[static_cast<std::size_t>(y)];
      }
      ds->add(partition, Snapshot(std::move(counts)));
    } catch (const nlohmann::json::exception& e) {
      throw line_error(ErrorKind::Parse, source, lineno, e.what());
    } catch (const Error& e) {
      throw line_error(e.kind(), source, lineno, e.what());
    }
  }
  if (!ds) throw Error(ErrorKind::EmptyInput, source + ": empty dataset file");
  return std::move(*ds);
}

SnapshotDataset read_snapshot_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_snapshot_dataset(in, path.string());
}

void write_snapshot_dataset(std::ostream& out, const SnapshotDataset& ds) {
  out << nlohmann::json{{"format_version", kFormatVersion}, {"num_labels", ds.space().size()}, {"k", ds.k()}}.dump()
      << '\n';
  for (const auto& r : ds.records()) {
    out << nlohmann::json{{"partition", r.partition}, {"labels", r.snapshot.labels()}}.dump() << '\n';
  }
}

nlohmann::json to_json(const CalibrationTable& t) {
  nlohmann::json parts = nlohmann::json::object();
  for (const auto& [id, m] : t.entries()) {
    nlohmann::json support = nlohmann::json::array();
    for (const auto& [p, w] : m.support()) {
      support.push_back({{"point", std::vector<double>(p.probs().begin(), p.probs().end())}, {"weight", w}});
    }
    parts[id] = {{"records", t.record_counts().at(id)}, {"support", support}};
  }
  nlohmann::json j{{"format_version", kFormatVersion},
                   {"type", t.k() ? "calibration_table" : "mixture_table"},
                   {"num_labels", t.space().size()}};
  if (t.k()) j["k"] = *t.k();
  j["partitions"] = parts;
  return j;
}

CalibrationTable table_from_json(const nlohmann::json& j) {
  try {
    check_version(j);
    const auto type = j.at("type").get<std::string>();
    if (type != "calibration_table" && type != "mixture_table") {
      throw Error(ErrorKind::Parse, "unknown table type '" + type + "'");
    }
    std::optional<std::uint32_t> k;
    if (type == "calibration_table") k = j.at("k").get<std::uint32_t>();
    const LabelSpace space(j.at("num_labels").get<std::size_t>());
    CalibrationTable t(space, k);
    for (const auto& [id, entry] : j.at("partitions").items()) {
      std::vector<WeightedPoint> comps;
      for (const auto& c : entry.at("support")) {
        comps.push_back({SimplexPoint(c.at("point").get<std::vector<double>>()), c.at("weight").get<double>()});
      }
      t.set(id, Mixture(space, std::move(comps)), entry.value("records", std::size_t{0}));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("bad table: ") + e.what());
  }
}

CalibrationTable read_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error&) {
    throw Error(ErrorKind::Parse, path.string() + ": malformed JSON");
  }
  return table_from_json(j);
}

void write_table(std::ostream& out, const CalibrationTable& t) { out << to_json(t).dump(2) << '\n'; }

nlohmann::json to_json(const CalibrationScore& s) {
  return nlohmann::json{{"per_partition", s.per_partition}, {"worst", s.worst}, {"weighted_mean", s.weighted_mean}};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace hocal
