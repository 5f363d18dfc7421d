#include "hocal/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hocal/calibrate.hpp"
#include "hocal/decompose.hpp"
#include "hocal/error.hpp"
#include "hocal/io.hpp"
#include "hocal/moments.hpp"
#include "hocal/predset.hpp"
#include "hocal/synth.hpp"

namespace hocal {

namespace {

using nlohmann::json;

struct Context {
  std::ostream& out;
  std::ostream& err;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  f << content;
  if (!f) throw Error(ErrorKind::Io, "write failed for " + path);
}

/// Sends the main output to `path` (then prints the summary) or to stdout.
void emit(Context& ctx, const std::string& path, const std::string& content, json summary) {
  if (path.empty()) {
    ctx.out << content;
    return;
  }
  write_file(path, content);
  summary["output"] = path;
  ctx.out << summary.dump() << '\n';
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("HOCAL_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    errno = 0;
    const auto v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0') throw Error(ErrorKind::InvalidArgument, "HOCAL_SEED is not an unsigned integer");
    return v;
  }
  return 0;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

CalibrationTable project_table(const CalibrationTable& t, std::uint32_t k) {
  CalibrationTable out(t.space(), k);
  for (const auto& [id, m] : t.entries()) out.set(id, project_k(m, k), t.record_counts().at(id));
  return out;
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string nature;
  std::size_t n = 1000;
  std::uint32_t k = 0;
  std::optional<std::uint64_t> seed;
  std::string dataset;
  std::string reference;
  std::string bayes;
  BinaryRegression regression;
  RandomMixtureSpec random;
};

void run_gen(Context& ctx, const GenArgs& a) {
  NatureSpec spec = nature_from_name(a.nature);
  if (std::holds_alternative<BinaryRegression>(spec)) spec = a.regression;
  if (std::holds_alternative<RandomMixtureSpec>(spec)) spec = a.random;
  const auto seed = resolve_seed(a.seed);
  const auto data = gen_dataset(spec, a.n, a.k, RngSeed{seed});

  std::ostringstream ds;
  write_snapshot_dataset(ds, data.dataset);
  if (!a.reference.empty()) {
    std::ostringstream s;
    write_table(s, data.reference);
    write_file(a.reference, s.str());
  }
  if (!a.bayes.empty()) {
    std::ostringstream s;
    write_table(s, data.bayes);
    write_file(a.bayes, s.str());
  }
  json summary{{"command", "gen"},
               {"nature", a.nature},
               {"n", a.n},
               {"k", a.k},
               {"seed", seed},
               {"partitions", data.dataset.partition_counts().size()}};
  if (!a.reference.empty()) summary["reference"] = a.reference;
  if (!a.bayes.empty()) summary["bayes"] = a.bayes;
  emit(ctx, a.dataset, ds.str(), summary);
}

// ---- calibrate ---------------------------------------------------------------

struct CalibrateArgs {
  std::string dataset;
  std::string out;
  std::vector<std::string> expect;
  std::string empty = "error";
  std::optional<double> eps;
  double delta = 0.05;
};

void run_calibrate(Context& ctx, const CalibrateArgs& a) {
  const auto ds = read_snapshot_dataset(a.dataset);
  CalibrateOptions opts;
  opts.expected_partitions = a.expect;
  if (a.empty == "uniform") {
    opts.empty_policy = EmptyPartitionPolicy::UniformVertices;
  } else if (a.empty != "error") {
    throw Error(ErrorKind::InvalidArgument, "--empty must be 'error' or 'uniform'");
  }
  const auto table = posthoc_calibrate(ds, opts);
  std::ostringstream s;
  write_table(s, table);

  json summary{{"command", "calibrate"}, {"k", ds.k()}, {"records", ds.size()}, {"partitions", table.size()}};
  if (a.eps) {
    const auto needed = required_samples(ds.space(), ds.k(), *a.eps, a.delta);
    json adequacy = json::object();
    for (const auto& [id, n] : table.record_counts()) adequacy[id] = n >= needed;
    summary["required_samples"] = needed;
    summary["adequate"] = adequacy;
  }
  emit(ctx, a.out, s.str(), summary);
}

// ---- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string table;
  std::string reference;
  std::string out;
};

void run_evaluate(Context& ctx, const EvaluateArgs& a) {
  const auto table = read_table(a.table);
  auto reference = read_table(a.reference);
  if (!table.k()) throw Error(ErrorKind::InvalidArgument, "evaluate needs a calibration table");
  if (!reference.k()) reference = project_table(reference, *table.k());
  const auto score = koc_error(table, reference);

  std::ostringstream csv;
  csv << "partition,records,w1_error\n";
  for (const auto& [id, w] : score.per_partition) {
    csv << csv_field(id) << ',' << table.record_counts().at(id) << ',' << format_number(w) << '\n';
  }
  json summary{{"command", "evaluate"},
               {"worst", score.worst},
               {"weighted_mean", score.weighted_mean},
               {"hoc_bound", hoc_bound(score.worst, table.space(), *table.k())}};
  emit(ctx, a.out, csv.str(), summary);
}

// ---- decompose ---------------------------------------------------------------

struct DecomposeArgs {
  std::string table;
  std::string entropy = "shannon2";
  std::string bayes;
  std::string out;
};

void run_decompose(Context& ctx, const DecomposeArgs& a) {
  const auto table = read_table(a.table);
  const auto g = EntropySpec::from_name(a.entropy);
  std::optional<CalibrationTable> bayes;
  if (!a.bayes.empty()) bayes = read_table(a.bayes);

  std::ostringstream csv;
  csv << "partition,pu,au,eu,pu_tmi,eu_tmi,eu_rmi";
  if (bayes) csv << ",au_error,expected_loss,avg_au,avg_bias,grouping_loss,foc_error";
  csv << '\n';
  for (const auto& [id, m] : table.entries()) {
    const auto r = decompose(m, g);
    csv << csv_field(id) << ',' << format_number(r.pu) << ',' << format_number(r.au) << ',' << format_number(r.eu)
        << ',' << opt_number(r.pu_tmi) << ',' << opt_number(r.eu_tmi) << ',' << opt_number(r.eu_rmi);
    if (bayes) {
      const auto& truth = bayes->at(id);
      const auto lb = loss_breakdown(m, truth, g);
      csv << ',' << format_number(aleatoric_error(m, truth, g)) << ',' << format_number(lb.expected_loss) << ','
          << format_number(lb.avg_au) << ',' << format_number(lb.avg_bias) << ',' << format_number(lb.grouping_loss)
          << ',' << format_number(lb.foc_error);
    }
    csv << '\n';
  }
  emit(ctx, a.out, csv.str(), json{{"command", "decompose"}, {"entropy", g.name()}, {"partitions", table.size()}});
}

// ---- moments -----------------------------------------------------------------

struct MomentsArgs {
  std::string table;
  double eps = 0.0;
  std::optional<std::uint32_t> degree;
  std::string entropy = "shannon2";
  std::string out;
};

void run_moments(Context& ctx, const MomentsArgs& a) {
  const auto table = read_table(a.table);
  if (!table.k()) throw Error(ErrorKind::InvalidArgument, "moments needs a calibration table");
  std::optional<PolyApprox> pa;
  if (a.degree) pa = chebyshev_fit(EntropySpec::from_name(a.entropy), *a.degree);

  std::ostringstream csv;
  csv << "partition,order,moment,bound\n";
  json estimates = json::object();
  for (const auto& [id, m] : table.entries()) {
    const auto mv = estimate_moments(m, *table.k(), a.eps);
    for (std::uint32_t i = 1; i <= mv.k(); ++i) {
      csv << csv_field(id) << ',' << i << ',' << format_number(mv[i]) << ',' << format_number(mv.bound(i)) << '\n';
    }
    if (pa) {
      const auto [est, bound] = poly_au_estimate(*pa, mv);
      estimates[id] = {{"au_estimate", est}, {"bound", bound}};
    }
  }
  json summary{{"command", "moments"}, {"k", *table.k()}, {"eps", a.eps}};
  if (pa) {
    summary["polynomial"] = to_json(*pa);
    summary["au_estimates"] = estimates;
  }
  if (a.out.empty() && pa) {
    // Without an output file the estimates would be lost; append them.
    ctx.out << csv.str() << summary.dump() << '\n';
    return;
  }
  emit(ctx, a.out, csv.str(), summary);
}

// ---- predset -----------------------------------------------------------------

struct PredsetArgs {
  std::string table;
  std::string reference;
  std::optional<double> alpha;
  std::optional<double> delta;
  std::optional<double> eps;
  bool interval = false;
  std::string sets;
  std::string out;
};

void run_predset(Context& ctx, const PredsetArgs& a) {
  const auto table = read_table(a.table);
  std::optional<CalibrationTable> reference;
  if (!a.reference.empty()) reference = read_table(a.reference);
  double alpha = 0.1;
  double delta = 0.0;
  if (a.eps) std::tie(alpha, delta) = recommended_alpha_delta(*a.eps);
  if (a.alpha) alpha = *a.alpha;
  if (a.delta) delta = *a.delta;

  std::ostringstream csv;
  csv << "partition,set,size,radius,lo,hi,coverage,reference_coverage\n";
  json sets = json::object();
  for (const auto& [id, m] : table.entries()) {
    const auto s = enlarge(build_mass_set(m, alpha), delta);
    const std::string ref_cov = reference ? format_number(coverage(s, reference->at(id))) : std::string();
    csv << csv_field(id) << ",mass," << s.centers().size() << ',' << format_number(s.radius()) << ",,,"
        << format_number(coverage(s, m)) << ',' << ref_cov << '\n';
    sets[id]["mass"] = to_json(s);
    if (a.interval) {
      if (!table.k()) throw Error(ErrorKind::InvalidArgument, "moment intervals need a calibration table");
      const auto iv = moment_interval(estimate_moments(m, *table.k(), a.eps.value_or(0.0)), alpha);
      const std::string ref_iv = reference ? format_number(coverage(iv, reference->at(id))) : std::string();
      csv << csv_field(id) << ",interval,,," << format_number(iv.lo()) << ',' << format_number(iv.hi()) << ','
          << format_number(coverage(iv, m)) << ',' << ref_iv << '\n';
      sets[id]["interval"] = to_json(iv);
    }
  }
  if (!a.sets.empty()) write_file(a.sets, sets.dump(2) + "\n");
  emit(ctx, a.out, csv.str(), json{{"command", "predset"}, {"alpha", alpha}, {"delta", delta}});
}

// ---- bounds ------------------------------------------------------------------

struct BoundsArgs {
  std::size_t l = 2;
  std::uint32_t k = 1;
  double eps = 0.1;
  double delta = 0.05;
};

void run_bounds(Context& ctx, const BoundsArgs& a) {
  const LabelSpace space(a.l);
  json j{{"command", "bounds"},
         {"l", a.l},
         {"k", a.k},
         {"eps", a.eps},
         {"delta", a.delta},
         {"lattice_size", snapshot_space_size(space, a.k)},
         {"N", required_samples(space, a.k, a.eps, a.delta)},
         {"hoc_bound", hoc_bound(a.eps, space, a.k)}};
  if (a.l == 2) j["brier_N"] = brier_corollary_samples(a.eps, a.delta);
  ctx.out << j.dump() << '\n';
}

// ---- fitpoly -----------------------------------------------------------------

struct FitArgs {
  std::string entropy = "shannon2";
  std::uint32_t degree = 8;
  std::string out;
};

void run_fitpoly(Context& ctx, const FitArgs& a) {
  const auto g = EntropySpec::from_name(a.entropy);
  auto j = to_json(chebyshev_fit(g, a.degree));
  j["entropy"] = to_json(g);
  emit(ctx, a.out, j.dump(2) + "\n", json{{"command", "fitpoly"}, {"degree", a.degree}});
}

// ---- bin ---------------------------------------------------------------------

struct BinArgs {
  std::string input;
  std::uint32_t slices = 10;
  std::string out;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

void run_bin(Context& ctx, const BinArgs& a) {
  if (a.slices < 1) throw Error(ErrorKind::InvalidArgument, "--slices must be at least 1");
  std::ifstream in(a.input);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + a.input);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyInput, a.input + ": empty file");
  const auto header = split_csv_line(line);
  const auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorKind::Parse, a.input + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cls_col = col("argmax_class");
  const std::size_t prob_col = col("max_prob");
  const int width = static_cast<int>(std::to_string(a.slices - 1).size());

  std::ostringstream csv;
  csv << "row,argmax_class,max_prob,partition\n";
  std::size_t lineno = 1;
  std::size_t row = 0;
  std::map<std::string, std::size_t> counts;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    const auto where = a.input + ":" + std::to_string(lineno) + ": ";
    if (fields.size() != header.size()) throw Error(ErrorKind::Parse, where + "wrong number of columns");
    long cls = 0;
    double prob = 0.0;
    try {
      std::size_t used = 0;
      cls = std::stol(fields[cls_col], &used);
      if (used != fields[cls_col].size()) throw std::invalid_argument("trailing");
      prob = std::stod(fields[prob_col], &used);
      if (used != fields[prob_col].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, where + "bad number");
    }
    if (cls < 0) throw Error(ErrorKind::Domain, where + "argmax_class must be non-negative");
    if (!(prob >= 0.0 && prob <= 1.0)) throw Error(ErrorKind::Domain, where + "max_prob must be in [0, 1]");
    const auto slice = std::min(static_cast<std::uint32_t>(prob * a.slices), a.slices - 1);
    char id[64];
    std::snprintf(id, sizeof id, "c%ld_s%0*u", cls, std::max(width, 2), slice);
    ++counts[id];
    csv << row++ << ',' << cls << ',' << fields[prob_col] << ',' << id << '\n';
  }
  emit(ctx, a.out, csv.str(), json{{"command", "bin"}, {"rows", row}, {"partitions", counts}});
}

json error_json(std::string_view kind, const std::string& message) {
  return json{{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

int run_pipeline(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  CLI::App app{"Higher-order calibration toolkit", "hocal"};
  app.require_subcommand(1);

  std::function<void()> action;

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic snapshot dataset and its reference tables");
  g->add_option("--nature", gen.nature, "two-scenario-1 | two-scenario-2 | binary-regression | random-mixture")
      ->required();
  g->add_option("--n", gen.n, "Number of snapshots");
  g->add_option("--k", gen.k, "Snapshot size")->required();
  g->add_option("--seed", gen.seed, "Seed (falls back to HOCAL_SEED, then 0)");
  g->add_option("--dataset", gen.dataset, "Dataset output path (JSONL)");
  g->add_option("--reference", gen.reference, "Projected reference table output path");
  g->add_option("--bayes", gen.bayes, "Unprojected Bayes table output path");
  g->add_option("--bins", gen.regression.bins, "binary-regression: number of bins");
  g->add_option("--a1", gen.regression.a1);
  g->add_option("--w1", gen.regression.w1);
  g->add_option("--a2", gen.regression.a2);
  g->add_option("--w2", gen.regression.w2);
  g->add_option("--labels", gen.random.num_labels, "random-mixture: number of labels");
  g->add_option("--support", gen.random.support_size, "random-mixture: support size");
  g->add_option("--dirichlet-alpha", gen.random.dirichlet_alpha, "random-mixture: Dirichlet concentration");
  g->callback([&] { action = [&] { run_gen(ctx, gen); }; });

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Post-hoc k-th order calibration of a snapshot dataset");
  c->add_option("--dataset", cal.dataset)->required();
  c->add_option("--out", cal.out, "Calibration table output path");
  c->add_option("--expect", cal.expect, "Partitions that must appear in the table")->delimiter(',');
  c->add_option("--empty", cal.empty, "Missing partitions: error | uniform");
  c->add_option("--eps", cal.eps, "Report sample adequacy for this W1 target");
  c->add_option("--delta", cal.delta);
  c->callback([&] { action = [&] { run_calibrate(ctx, cal); }; });

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Per-partition W1 between a calibration table and a reference");
  e->add_option("--table", ev.table)->required();
  e->add_option("--reference", ev.reference, "Reference table; mixture tables are projected to the table's k")
      ->required();
  e->add_option("--out", ev.out, "CSV output path");
  e->callback([&] { action = [&] { run_evaluate(ctx, ev); }; });

  DecomposeArgs dec;
  auto* d = app.add_subcommand("decompose", "Uncertainty decomposition per partition");
  d->add_option("--table", dec.table)->required();
  d->add_option("--entropy", dec.entropy, "shannon2 | shannon | brier | brier-scaled");
  d->add_option("--bayes", dec.bayes, "Bayes table for aleatoric error and loss breakdown");
  d->add_option("--out", dec.out, "CSV output path");
  d->callback([&] { action = [&] { run_decompose(ctx, dec); }; });

  MomentsArgs mom;
  auto* m = app.add_subcommand("moments", "Binary moment estimates from a calibration table");
  m->add_option("--table", mom.table)->required();
  m->add_option("--eps", mom.eps, "Calibration error used for the bounds");
  m->add_option("--degree", mom.degree, "Also estimate AU with a Chebyshev fit of this degree");
  m->add_option("--entropy", mom.entropy);
  m->add_option("--out", mom.out, "CSV output path");
  m->callback([&] { action = [&] { run_moments(ctx, mom); }; });

  PredsetArgs ps;
  auto* p = app.add_subcommand("predset", "Prediction sets and coverage audit");
  p->add_option("--table", ps.table)->required();
  p->add_option("--reference", ps.reference, "Table to audit coverage against");
  p->add_option("--alpha", ps.alpha);
  p->add_option("--delta", ps.delta, "l1 enlargement radius");
  p->add_option("--eps", ps.eps, "Calibration error; sets alpha = delta = sqrt(eps) unless given");
  p->add_flag("--interval", ps.interval, "Also emit binary moment intervals");
  p->add_option("--sets", ps.sets, "JSON output path for the sets");
  p->add_option("--out", ps.out, "CSV output path");
  p->callback([&] { action = [&] { run_predset(ctx, ps); }; });

  BoundsArgs bd;
  auto* b = app.add_subcommand("bounds", "Sample-size and higher-order calibration bounds");
  b->add_option("--l", bd.l, "Number of labels");
  b->add_option("--k", bd.k, "Snapshot size");
  b->add_option("--eps", bd.eps);
  b->add_option("--delta", bd.delta);
  b->callback([&] { action = [&] { run_bounds(ctx, bd); }; });

  FitArgs fit;
  auto* f = app.add_subcommand("fitpoly", "Chebyshev polynomial fit of a binary entropy");
  f->add_option("--entropy", fit.entropy);
  f->add_option("--degree", fit.degree);
  f->add_option("--out", fit.out, "JSON output path");
  f->callback([&] { action = [&] { run_fitpoly(ctx, fit); }; });

  BinArgs bn;
  auto* n = app.add_subcommand("bin", "Partition ids from (argmax_class, max_prob) columns");
  n->add_option("--input", bn.input)->required();
  n->add_option("--slices", bn.slices, "Equal-width slices of [0, 1] per class");
  n->add_option("--out", bn.out, "CSV output path");
  n->callback([&] { action = [&] { run_bin(ctx, bn); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) return app.exit(ex, out, err);
    err << error_json("usage", ex.what()).dump() << '\n';
    return 2;
  }

  try {
    action();
    return 0;
  } catch (const Error& ex) {
    err << error_json(to_string(ex.kind()), ex.what()).dump() << '\n';
  } catch (const nlohmann::json::exception& ex) {
    err << error_json("parse", ex.what()).dump() << '\n';
  } catch (const std::exception& ex) {
    err << error_json("internal", ex.what()).dump() << '\n';
  }
  return 1;
}

}  // namespace hocal
