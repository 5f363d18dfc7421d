#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hocal/cli.hpp"
#include "hocal/error.hpp"
#include "hocal/io.hpp"
#include "hocal/synth.hpp"
#include "support/test_support.hpp"

using namespace hocal;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("hocal_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_pipeline(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) { std::ofstream(path, std::ios::binary) << content; }

SnapshotDataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_snapshot_dataset(in, "mem");
}

// A diagnostic is one JSON line with an error kind and message.
void check_diagnostic(const Run& r, const std::string& kind) {
  CHECK(r.code != 0);
  CHECK(r.err.find('\n') == r.err.size() - 1);
  const auto j = nlohmann::json::parse(r.err);
  CHECK(j.at("error").at("kind") == kind);
  CHECK_FALSE(j.at("error").at("message").get<std::string>().empty());
}

bool same_table(const CalibrationTable& a, const CalibrationTable& b) {
  if (a.k() != b.k() || a.space() != b.space() || a.size() != b.size()) return false;
  if (a.record_counts() != b.record_counts()) return false;
  for (const auto& [id, m] : a.entries()) {
    const auto& n = b.at(id);
    if (m.size() != n.size()) return false;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!(m.point(i) == n.point(i)) || m.weight(i) != n.weight(i)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("read_snapshot_dataset examples") {
  const auto ds = parse("{\"num_labels\":2,\"k\":2}\n{\"partition\":\"a\",\"labels\":[0,1]}\n{\"partition\":\"a\",\"labels\":[1,0]}\n");
  REQUIRE(ds.size() == 2);
  CHECK(ds.records()[0].snapshot == Snapshot({1, 1}));
  CHECK(ds.records()[1].snapshot == ds.records()[0].snapshot);
  CHECK(ds.records()[0].partition == "a");
}

TEST_CASE("read_snapshot_dataset errors") {
  CHECK_THROWS_AS(parse(""), Error);
  CHECK_THROWS_AS(parse("\n\n"), Error);
  try {
    parse("{\"num_labels\":2,\"k\":2}\n{\"partition\":\"a\",\"labels\":[0,1]}\n{oops\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("mem:3") != std::string::npos);
  }
  try {
    parse("{\"num_labels\":2,\"k\":2}\n{\"partition\":\"a\",\"labels\":[0,1,1]}\n");
    FAIL("expected a k mismatch");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("mem:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("{\"num_labels\":2,\"k\":2}\n{\"partition\":\"a\",\"labels\":[0,2]}\n"), Error);
  CHECK_THROWS_AS(parse("{\"num_labels\":2,\"k\":2}\n{\"partition\":\"a\",\"labels\":[0,-1]}\n"), Error);
  CHECK_THROWS_AS(parse("{\"num_labels\":2,\"k\":2}\n{\"labels\":[0,1]}\n"), Error);
  CHECK_THROWS_AS(parse("{\"format_version\":2,\"num_labels\":2,\"k\":2}\n"), Error);
  CHECK_THROWS_AS(parse("[1,2]\n"), Error);
  CHECK_THROWS_AS(read_snapshot_dataset(fs::path("/nonexistent/file.jsonl")), Error);
}

TEST_CASE("dataset and table round trips are exact") {
  Rng rng(RngSeed{199});
  const auto data = gen_dataset(RandomMixtureSpec{3, 4, 0.8}, 300, 4, RngSeed{5});
  std::ostringstream out;
  write_snapshot_dataset(out, data.dataset);
  const auto back = parse(out.str());
  REQUIRE(back.size() == data.dataset.size());
  CHECK(back.k() == data.dataset.k());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.records()[i].partition == data.dataset.records()[i].partition);
    CHECK(back.records()[i].snapshot == data.dataset.records()[i].snapshot);
  }
  std::ostringstream again;
  write_snapshot_dataset(again, back);
  CHECK(again.str() == out.str());

  const auto table = posthoc_calibrate(data.dataset);
  for (const auto& t : {table, data.reference, data.bayes, bayes_table(BinaryRegression{}, RngSeed{1})}) {
    const auto rt = table_from_json(nlohmann::json::parse(to_json(t).dump()));
    CHECK(same_table(t, rt));
  }
  CHECK_THROWS_AS(table_from_json(nlohmann::json{{"type", "other"}}), Error);
  CHECK_THROWS_AS(table_from_json(nlohmann::json::parse(R"({"type":"calibration_table","num_labels":2,"k":2,
    "partitions":{"a":{"support":[{"point":[0.7,0.3],"weight":1.0}]}}})")), Error);
}

TEST_CASE("format_number is shortest round-trip") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3)) == 1.0 / 3);
  CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("gen, calibrate, evaluate end to end and byte-stable") {
  TempDir dir;
  std::vector<std::string> outputs;
  for (int rep = 0; rep < 2; ++rep) {
    const auto tag = std::to_string(rep);
    REQUIRE(run({"gen", "--nature", "two-scenario-2", "--n", "1000", "--k", "2", "--seed", "7", "--dataset",
                 dir / ("d" + tag + ".jsonl"), "--reference", dir / ("r" + tag + ".json")})
                .code == 0);
    REQUIRE(run({"calibrate", "--dataset", dir / ("d" + tag + ".jsonl"), "--out", dir / ("t" + tag + ".json")}).code ==
            0);
    const auto ev = run({"evaluate", "--table", dir / ("t" + tag + ".json"), "--reference", dir / ("r" + tag + ".json"),
                         "--out", dir / ("e" + tag + ".csv")});
    REQUIRE(ev.code == 0);
    const auto summary = nlohmann::json::parse(ev.out);
    CHECK(summary.at("worst").get<double>() < 0.1);
    outputs.push_back(slurp(dir / ("d" + tag + ".jsonl")) + slurp(dir / ("t" + tag + ".json")) +
                      slurp(dir / ("e" + tag + ".csv")));
  }
  CHECK(outputs[0] == outputs[1]);
  const auto csv = slurp(dir / "e0.csv");
  CHECK(csv.rfind("partition,records,w1_error\nall,1000,", 0) == 0);
}

TEST_CASE("seed falls back to HOCAL_SEED") {
  TempDir dir;
  REQUIRE(run({"gen", "--nature", "binary-regression", "--n", "200", "--k", "3", "--seed", "42", "--dataset", dir / "a.jsonl"}).code == 0);
  ::setenv("HOCAL_SEED", "42", 1);
  REQUIRE(run({"gen", "--nature", "binary-regression", "--n", "200", "--k", "3", "--dataset", dir / "b.jsonl"}).code == 0);
  ::setenv("HOCAL_SEED", "not-a-number", 1);
  check_diagnostic(run({"gen", "--nature", "binary-regression", "--n", "200", "--k", "3"}), "invalid_argument");
  ::unsetenv("HOCAL_SEED");
  REQUIRE(run({"gen", "--nature", "binary-regression", "--n", "200", "--k", "3", "--dataset", dir / "c.jsonl"}).code == 0);
  CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
  CHECK(slurp(dir / "a.jsonl") != slurp(dir / "c.jsonl"));
}

TEST_CASE("bounds and decompose outputs") {
  const auto b = run({"bounds", "--l", "2", "--k", "2", "--eps", "0.1", "--delta", "0.05"});
  REQUIRE(b.code == 0);
  CHECK(nlohmann::json::parse(b.out).at("N") == 1016);

  TempDir dir;
  REQUIRE(run({"gen", "--nature", "two-scenario-1", "--k", "1", "--n", "1", "--dataset", dir / "x", "--bayes", dir / "s1.json"}).code == 0);
  REQUIRE(run({"gen", "--nature", "two-scenario-2", "--k", "1", "--n", "1", "--dataset", dir / "y", "--bayes", dir / "s2.json"}).code == 0);
  const auto d1 = run({"decompose", "--table", dir / "s1.json", "--entropy", "shannon2"});
  const auto d2 = run({"decompose", "--table", dir / "s2.json", "--entropy", "shannon2"});
  CHECK(d1.out == "partition,pu,au,eu,pu_tmi,eu_tmi,eu_rmi\nall,1,1,0,1,0,0\n");
  CHECK(d2.out == "partition,pu,au,eu,pu_tmi,eu_tmi,eu_rmi\nall,1,0,1,,,\n");
  const auto with_bayes = run({"decompose", "--table", dir / "s1.json", "--bayes", dir / "s2.json", "--entropy", "brier"});
  REQUIRE(with_bayes.code == 0);
  CHECK(with_bayes.out.find("au_error") != std::string::npos);
}

TEST_CASE("moments, predset, fitpoly and bin subcommands") {
  TempDir dir;
  REQUIRE(run({"gen", "--nature", "binary-regression", "--n", "4000", "--k", "4", "--seed", "3", "--dataset", dir / "d.jsonl",
               "--bayes", dir / "b.json"}).code == 0);
  REQUIRE(run({"calibrate", "--dataset", dir / "d.jsonl", "--out", dir / "t.json"}).code == 0);

  const auto m = run({"moments", "--table", dir / "t.json", "--eps", "0.05", "--degree", "4", "--out", dir / "m.csv"});
  REQUIRE(m.code == 0);
  CHECK(slurp(dir / "m.csv").rfind("partition,order,moment,bound\nbin00,1,", 0) == 0);
  CHECK(nlohmann::json::parse(m.out).at("au_estimates").size() == 20);

  const auto p = run({"predset", "--table", dir / "t.json", "--reference", dir / "b.json", "--eps", "0.04", "--interval",
                      "--sets", dir / "sets.json", "--out", dir / "p.csv"});
  REQUIRE(p.code == 0);
  CHECK(nlohmann::json::parse(p.out).at("alpha").get<double>() == doctest::Approx(0.2));
  CHECK(slurp(dir / "p.csv").find(",interval,") != std::string::npos);
  CHECK(nlohmann::json::parse(slurp(dir / "sets.json")).size() == 20);

  const auto f = run({"fitpoly", "--entropy", "brier-scaled", "--degree", "2"});
  REQUIRE(f.code == 0);
  CHECK(nlohmann::json::parse(f.out).at("coeffs")[1].get<double>() == doctest::Approx(4.0));

  spit(dir / "scores.csv", "id,argmax_class,max_prob\n1,0,0.95\n2,3,0.31\n3,3,1.0\n");
  const auto bn = run({"bin", "--input", dir / "scores.csv"});
  REQUIRE(bn.code == 0);
  CHECK(bn.out == "row,argmax_class,max_prob,partition\n0,0,0.95,c0_s09\n1,3,0.31,c3_s03\n2,3,1.0,c3_s09\n");
}

TEST_CASE("every error path gives a nonzero exit and a one-line JSON diagnostic") {
  TempDir dir;
  check_diagnostic(run({}), "usage");
  check_diagnostic(run({"frobnicate"}), "usage");
  check_diagnostic(run({"gen", "--k", "2"}), "usage");
  check_diagnostic(run({"gen", "--nature", "nope", "--k", "2"}), "invalid_argument");
  check_diagnostic(run({"gen", "--nature", "two-scenario-1", "--k", "0"}), "invalid_argument");
  check_diagnostic(run({"calibrate", "--dataset", dir / "missing.jsonl"}), "io");
  spit(dir / "empty.jsonl", "");
  check_diagnostic(run({"calibrate", "--dataset", dir / "empty.jsonl"}), "empty_input");
  spit(dir / "bad.jsonl", "{\"num_labels\":2,\"k\":2}\n{\"partition\":\"a\",\"labels\":[0,1]}\nnot json\n");
  const auto bad = run({"calibrate", "--dataset", dir / "bad.jsonl"});
  check_diagnostic(bad, "parse");
  CHECK(bad.err.find("bad.jsonl:3") != std::string::npos);
  spit(dir / "t.json", "{\"type\":");
  check_diagnostic(run({"decompose", "--table", dir / "t.json"}), "parse");
  check_diagnostic(run({"bounds", "--l", "2", "--k", "2", "--eps", "0"}), "domain");
  check_diagnostic(run({"fitpoly", "--degree", "40"}), "cap_exceeded");
  check_diagnostic(run({"decompose", "--table", dir / "t.json", "--entropy", "renyi"}), "parse");

  REQUIRE(run({"gen", "--nature", "two-scenario-1", "--k", "2", "--n", "10", "--dataset", dir / "a.jsonl", "--reference",
               dir / "r.json"}).code == 0);
  REQUIRE(run({"gen", "--nature", "binary-regression", "--k", "2", "--n", "10", "--dataset", dir / "b.jsonl", "--reference",
               dir / "rb.json"}).code == 0);
  REQUIRE(run({"calibrate", "--dataset", dir / "a.jsonl", "--out", dir / "ta.json"}).code == 0);
  check_diagnostic(run({"evaluate", "--table", dir / "ta.json", "--reference", dir / "rb.json"}), "key_mismatch");
  check_diagnostic(run({"calibrate", "--dataset", dir / "a.jsonl", "--expect", "all,other"}), "empty_input");
  CHECK(run({"calibrate", "--dataset", dir / "a.jsonl", "--expect", "all,other", "--empty", "uniform"}).code == 0);
  check_diagnostic(run({"calibrate", "--dataset", dir / "a.jsonl", "--empty", "maybe"}), "invalid_argument");
  spit(dir / "s.csv", "argmax_class,max_prob\n0,1.5\n");
  check_diagnostic(run({"bin", "--input", dir / "s.csv"}), "domain");
  spit(dir / "s.csv", "argmax_class\n0\n");
  check_diagnostic(run({"bin", "--input", dir / "s.csv"}), "parse");
}

TEST_CASE("help exits cleanly") {
  const auto h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("calibrate") != std::string::npos);
}
