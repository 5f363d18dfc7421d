#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hocal/error.hpp"
#include "hocal/synth.hpp"
#include "hocal/transport.hpp"

using namespace hocal;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double half_normal_mass(double lo, double hi) { return std::erfc(lo / std::sqrt(2.0)) - std::erfc(hi / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("two-scenario snapshot histograms") {
  const auto one = gen_dataset(TwoScenario{1}, 10000, 2, RngSeed{1});
  std::array<int, 3> hist{};
  for (const auto& r : one.dataset.records()) ++hist[r.snapshot[1]];
  const std::array<double, 3> expected{0.25, 0.5, 0.25};
  for (int i = 0; i < 3; ++i) {
    const double sigma = std::sqrt(expected[i] * (1 - expected[i]) / 1e4);
    CHECK(std::abs(hist[i] / 1e4 - expected[i]) <= 3 * sigma);
  }
  const auto two = gen_dataset(TwoScenario{2}, 10000, 2, RngSeed{2});
  for (const auto& r : two.dataset.records()) CHECK(r.snapshot != Snapshot({1, 1}));
  CHECK(one.dataset.partition_counts().size() == 1);
}

TEST_CASE("two scenarios agree at k = 1 and separate at k = 2") {
  const auto a1 = gen_dataset(TwoScenario{1}, 1, 1, RngSeed{3}).reference;
  const auto b1 = gen_dataset(TwoScenario{2}, 1, 1, RngSeed{3}).reference;
  CHECK(wasserstein1(a1.at("all"), b1.at("all")).cost <= 1e-12);
  const auto a2 = gen_dataset(TwoScenario{1}, 1, 2, RngSeed{3}).reference;
  const auto b2 = gen_dataset(TwoScenario{2}, 1, 2, RngSeed{3}).reference;
  CHECK(wasserstein1(a2.at("all"), b2.at("all")).cost == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("binary regression nature") {
  const BinaryRegression spec;
  for (double x = 0.0; x < 8.0; x += 0.01) {
    const double b = regression_bias(spec, x);
    CHECK(b >= 0.01);
    CHECK(b <= 0.99);
  }
  const auto data = gen_dataset(spec, 20000, 2, RngSeed{5});
  CHECK(data.bayes.size() == 20);
  CHECK(data.reference.size() == 20);
  CHECK(data.reference.k() == 2u);
  CHECK_FALSE(data.bayes.k().has_value());
  // Zero-padded ids sort numerically.
  std::vector<std::string> ids;
  for (const auto& [id, m] : data.bayes.entries()) ids.push_back(id);
  CHECK(ids.front() == "bin00");
  CHECK(ids.back() == "bin19");

  // Bin frequencies follow the half-normal law, tail folded into the last bin.
  const auto counts = data.dataset.partition_counts();
  for (std::uint32_t b = 0; b < 20; ++b) {
    const double lo = 0.15 * b;
    const double hi = b == 19 ? INFINITY : lo + 0.15;
    const double p = half_normal_mass(lo, hi);
    const double freq = counts.contains(bin_id(b, 20)) ? counts.at(bin_id(b, 20)) / 20000.0 : 0.0;
    CHECK(std::abs(freq - p) <= 4 * std::sqrt(p * (1 - p) / 20000) + 1e-12);
  }

  // Bayes mean bias per bin matches the empirical label rate.
  for (const auto& [id, n] : counts) {
    if (n < 500) continue;
    double ones = 0.0;
    for (const auto& r : data.dataset.records()) {
      if (r.partition == id) ones += r.snapshot[1];
    }
    const double rate = ones / (2.0 * n);
    CHECK(std::abs(rate - centroid(data.bayes.at(id)).bias()) <= 4 * std::sqrt(0.25 / (2.0 * n)));
  }

  CHECK_THROWS_AS(gen_dataset(BinaryRegression{.bins = 0}, 10, 2, RngSeed{1}), Error);
  CHECK_THROWS_AS(gen_dataset(spec, 0, 2, RngSeed{1}), Error);
  CHECK(bin_id(3, 100) == "bin03");
  CHECK(bin_id(3, 1000) == "bin003");
}

TEST_CASE("random_mixture examples") {
  const auto point = random_mixture(RandomMixtureSpec{3, 1, 1.0}, RngSeed{7});
  CHECK(point.size() == 1);
  const auto flat = random_mixture(RandomMixtureSpec{4, 5, 1e4}, RngSeed{8});
  for (const auto& [p, w] : flat.support()) CHECK(l1_distance(p, SimplexPoint::uniform(4)) <= 0.05);
  const auto a = random_mixture(RandomMixtureSpec{3, 6, 0.7}, RngSeed{9});
  const auto b = random_mixture(RandomMixtureSpec{3, 6, 0.7}, RngSeed{9});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.point(i) == b.point(i));
    CHECK(a.weight(i) == b.weight(i));
  }
  CHECK_THROWS_AS(random_mixture(RandomMixtureSpec{3, 0, 1.0}, RngSeed{1}), Error);
  CHECK_THROWS_AS(random_mixture(RandomMixtureSpec{3, 2, -1.0}, RngSeed{1}), Error);
}

TEST_CASE("generated frequencies converge to the reference") {
  const RandomMixtureSpec spec{3, 4, 1.0};
  double prev = INFINITY;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto data = gen_dataset(spec, n, 3, RngSeed{seed});
      const auto table = posthoc_calibrate(data.dataset);
      errs.push_back(koc_error(table, data.reference).worst);
    }
    const double med = median(errs);
    CHECK(med < prev);
    prev = med;
  }
}

TEST_CASE("generation is seed-deterministic") {
  const auto a = gen_dataset(BinaryRegression{}, 500, 3, RngSeed{11});
  const auto b = gen_dataset(BinaryRegression{}, 500, 3, RngSeed{11});
  const auto c = gen_dataset(BinaryRegression{}, 500, 3, RngSeed{12});
  REQUIRE(a.dataset.size() == b.dataset.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.dataset.size(); ++i) {
    CHECK(a.dataset.records()[i].partition == b.dataset.records()[i].partition);
    CHECK(a.dataset.records()[i].snapshot == b.dataset.records()[i].snapshot);
    differs |= !(a.dataset.records()[i].snapshot == c.dataset.records()[i].snapshot);
  }
  CHECK(differs);
  CHECK_THROWS_AS(nature_from_name("three-scenario"), Error);
  CHECK(std::holds_alternative<TwoScenario>(nature_from_name("two-scenario-2")));
}
