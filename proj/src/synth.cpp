#include "hocal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "hocal/error.hpp"

namespace hocal {

namespace {

constexpr double kBinDomain = 3.0;
constexpr double kTailEnd = 8.0;
constexpr int kQuadraturePoints = 1000;
const std::string kSinglePartition = "all";

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> dirichlet(Rng& rng, std::size_t dim, double alpha) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> v(dim);
  double sum = 0.0;
  for (auto& x : v) {
    x = gamma(rng);
    sum += x;
  }
  if (!(sum > 0.0)) return std::vector<double>(dim, 1.0 / static_cast<double>(dim));
  for (auto& x : v) x /= sum;
  return v;
}

Mixture scenario_mixture(int which) {
  return which == 1 ? Mixture::binary({{0.5, 1.0}}) : Mixture::binary({{0.0, 0.5}, {1.0, 0.5}});
}

std::uint32_t bin_of(const BinaryRegression& spec, double x) {
  const double width = kBinDomain / spec.bins;
  return std::min(static_cast<std::uint32_t>(x / width), spec.bins - 1);
}

/// Within-bin Bayes mixture: 1000 midpoints weighted by the half-normal density.
Mixture regression_bin_mixture(const BinaryRegression& spec, std::uint32_t b) {
  const double width = kBinDomain / spec.bins;
  const double lo = b * width;
  const double hi = b + 1 == spec.bins ? kTailEnd : lo + width;
  const double h = (hi - lo) / kQuadraturePoints;
  std::vector<std::pair<double, double>> bw;
  double total = 0.0;
  for (int i = 0; i < kQuadraturePoints; ++i) {
    const double x = lo + (i + 0.5) * h;
    const double w = std::exp(-0.5 * x * x);
    bw.emplace_back(regression_bias(spec, x), w);
    total += w;
  }
  for (auto& [bias, w] : bw) w /= total;
  return Mixture::binary(std::move(bw));
}

Snapshot bernoulli_snapshot(double bias, std::uint32_t k, Rng& rng) {
  std::uint32_t ones = 0;
  for (std::uint32_t t = 0; t < k; ++t) ones += rng.uniform() < bias ? 1 : 0;
  return Snapshot({k - ones, ones});
}

}  // namespace

NatureSpec nature_from_name(const std::string& name) {
  if (name == "two-scenario-1") return TwoScenario{1};
  if (name == "two-scenario-2") return TwoScenario{2};
  if (name == "binary-regression") return BinaryRegression{};
  if (name == "random-mixture") return RandomMixtureSpec{};
  throw Error(ErrorKind::InvalidArgument, "unknown nature '" + name + "'");
}

void validate(const NatureSpec& spec) {
  std::visit(overloaded{
                 [](const TwoScenario& s) {
                   if (s.which != 1 && s.which != 2) throw Error(ErrorKind::InvalidArgument, "scenario must be 1 or 2");
                 },
                 [](const BinaryRegression& s) {
                   if (s.bins < 1) throw Error(ErrorKind::InvalidArgument, "bins must be at least 1");
                   for (double v : {s.a1, s.w1, s.a2, s.w2}) {
                     if (!std::isfinite(v)) throw Error(ErrorKind::Domain, "regression parameters must be finite");
                   }
                 },
                 [](const RandomMixtureSpec& s) {
                   if (s.num_labels < 2) throw Error(ErrorKind::InvalidArgument, "need at least two labels");
                   if (s.support_size < 1) throw Error(ErrorKind::InvalidArgument, "support size must be positive");
                   if (!(s.dirichlet_alpha > 0.0) || !std::isfinite(s.dirichlet_alpha)) {
                     throw Error(ErrorKind::Domain, "dirichlet alpha must be positive");
                   }
                 },
             },
             spec);
}

double regression_bias(const BinaryRegression& spec, double x) {
  return std::clamp(0.5 + spec.a1 * std::sin(spec.w1 * x) + spec.a2 * std::sin(spec.w2 * x), 0.01, 0.99);
}

std::string bin_id(std::uint32_t b, std::uint32_t bins) {
  const int width = static_cast<int>(std::to_string(bins - 1).size());
  char buf[32];
  std::snprintf(buf, sizeof buf, "bin%0*u", std::max(width, 2), b);
  return buf;
}

Mixture random_mixture(const RandomMixtureSpec& spec, RngSeed seed) {
  validate(spec);
  Rng rng(seed);
  const auto weights = dirichlet(rng, spec.support_size, 1.0);
  std::vector<WeightedPoint> comps;
  for (std::size_t i = 0; i < spec.support_size; ++i) {
    comps.push_back({SimplexPoint::normalized(dirichlet(rng, spec.num_labels, spec.dirichlet_alpha)), weights[i]});
  }
  return Mixture(LabelSpace(spec.num_labels), std::move(comps));
}

CalibrationTable bayes_table(const NatureSpec& spec, RngSeed seed) {
  validate(spec);
  return std::visit(overloaded{
                        [](const TwoScenario& s) {
                          CalibrationTable t(LabelSpace(2), std::nullopt);
                          t.set(kSinglePartition, scenario_mixture(s.which));
                          return t;
                        },
                        [](const BinaryRegression& s) {
                          CalibrationTable t(LabelSpace(2), std::nullopt);
                          for (std::uint32_t b = 0; b < s.bins; ++b) t.set(bin_id(b, s.bins), regression_bin_mixture(s, b));
                          return t;
                        },
                        [&](const RandomMixtureSpec& s) {
                          CalibrationTable t(LabelSpace(s.num_labels), std::nullopt);
                          t.set(kSinglePartition, random_mixture(s, seed));
                          return t;
                        },
                    },
                    spec);
}

GeneratedData gen_dataset(const NatureSpec& spec, std::size_t n, std::uint32_t k, RngSeed seed) {
  validate(spec);
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be at least 1");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  auto bayes = bayes_table(spec, seed);
  Rng rng = Rng(seed).split(1);
  SnapshotDataset ds(bayes.space(), k);

  if (const auto* reg = std::get_if<BinaryRegression>(&spec)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = std::abs(normal(rng));
      ds.add(bin_id(bin_of(*reg, x), reg->bins), bernoulli_snapshot(regression_bias(*reg, x), k, rng));
    }
  } else {
    const Mixture& m = bayes.at(kSinglePartition);
    for (std::size_t i = 0; i < n; ++i) ds.add(kSinglePartition, sample_snapshot(m, k, rng));
  }

  CalibrationTable reference(bayes.space(), k);
  for (const auto& [id, m] : bayes.entries()) reference.set(id, project_k(m, k));
  return GeneratedData{std::move(ds), std::move(reference), std::move(bayes)};
}

}  // namespace hocal
