#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hocal/error.hpp"
#include "hocal/predset.hpp"
#include "hocal/transport.hpp"
#include "support/test_support.hpp"

using namespace hocal;

namespace {

MomentVector exact_moments(const Mixture& m, std::uint32_t k, double eps = 0.0) {
  std::vector<double> v;
  for (std::uint32_t i = 1; i <= k; ++i) v.push_back(true_moments(m, i));
  return MomentVector(v, eps);
}

// Smallest subset size reaching the target mass, by brute force.
std::size_t min_cover_size(const Mixture& m, double target) {
  const std::size_t n = m.size();
  std::size_t best = n;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) mass += m.weight(i);
    }
    if (mass >= target - 1e-12) best = std::min<std::size_t>(best, __builtin_popcount(mask));
  }
  return best;
}

}  // namespace

TEST_CASE("build_mass_set examples") {
  const auto three = Mixture::binary({{0.1, 1.0 / 3}, {0.5, 1.0 / 3}, {0.9, 1.0 / 3}});
  const auto s = build_mass_set(three, 1.0 / 3);
  CHECK(s.centers().size() == 2);
  CHECK(s.radius() == 0.0);
  CHECK(coverage(s, three) == doctest::Approx(2.0 / 3));

  const auto point = Mixture::binary({{0.3, 1.0}});
  for (double alpha : {0.01, 0.5, 0.99}) {
    const auto p = build_mass_set(point, alpha);
    REQUIRE(p.centers().size() == 1);
    CHECK(p.centers()[0] == SimplexPoint::binary(0.3));
  }
  CHECK_THROWS_AS(build_mass_set(point, 0.0), Error);
  CHECK_THROWS_AS(build_mass_set(point, 1.0), Error);
}

TEST_CASE("build_mass_set is minimal against exhaustive subsets") {
  Rng rng(RngSeed{167});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t support = 1 + trial % 12;
    const auto m = testing::random_mixture(rng, 2 + trial % 3, support);
    const double alpha = 0.02 + 0.9 * rng.uniform();
    const auto s = build_mass_set(m, alpha);
    CHECK(coverage(s, m) >= 1.0 - alpha - 1e-12);
    CHECK(s.centers().size() == min_cover_size(m, 1.0 - alpha));
  }
}

TEST_CASE("enlarge examples") {
  const PredictionSet s({SimplexPoint::binary(0.2)}, 0.1);
  const auto same = enlarge(s, 0.0);
  CHECK(same.radius() == s.radius());
  CHECK(same.centers() == s.centers());
  const auto all = enlarge(PredictionSet({SimplexPoint::vertex(3, 0)}, 0.0), 2.0);
  Rng rng(RngSeed{173});
  for (int i = 0; i < 100; ++i) CHECK(all.contains(SimplexPoint::normalized(testing::dirichlet(rng, 3, 0.5))));
  CHECK(all.contains(SimplexPoint::vertex(3, 2)));
  // Distance from 0.2 to 0.5 is 0.6 in l1.
  CHECK(enlarge(s, 0.5).contains(SimplexPoint::binary(0.5)));
  CHECK_FALSE(enlarge(s, 0.49).contains(SimplexPoint::binary(0.5)));
  CHECK_THROWS_AS(enlarge(s, -0.1), Error);
  CHECK_THROWS_AS(PredictionSet({SimplexPoint::binary(0.2)}, -1.0), Error);
}

TEST_CASE("coverage examples and monotonicity") {
  Rng rng(RngSeed{179});
  const auto m = testing::random_mixture(rng, 3, 6);
  std::vector<SimplexPoint> all;
  for (const auto& [p, w] : m.support()) all.push_back(p);
  CHECK(coverage(PredictionSet(all, 0.0), m) == doctest::Approx(1.0));
  CHECK(coverage(PredictionSet({}, 0.5), m) == 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mm = testing::random_mixture(rng, 3, 5);
    const auto s = build_mass_set(testing::random_mixture(rng, 3, 4), 0.3);
    double prev = coverage(s, mm);
    for (double d : {0.1, 0.3, 0.7, 1.5}) {
      const double c = coverage(enlarge(s, d), mm);
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("two-sided prediction-set bound on coupled instances") {
  Rng rng(RngSeed{181});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t l = 2 + trial % 3;
    const auto pi = testing::random_mixture(rng, l, 2 + trial % 7);
    const auto pi_star = testing::perturbed_copy(rng, pi, 0.3);
    const double eps = wasserstein1(pi, pi_star).cost;
    const double alpha = 0.05 + 0.5 * rng.uniform();
    const double delta = 0.05 + 0.5 * rng.uniform();
    const auto s = build_mass_set(pi, alpha);
    const double lower = coverage(s, pi) - eps / delta;
    const double mid = coverage(enlarge(s, delta), pi_star);
    const double upper = coverage(enlarge(s, 2 * delta), pi) + eps / delta;
    CHECK(mid >= lower - 1e-9);
    CHECK(mid <= upper + 1e-9);
    CHECK(mid >= 1.0 - alpha - eps / delta - 1e-9);
  }
}

TEST_CASE("moment_interval examples") {
  const auto half = moment_interval(exact_moments(Mixture::binary({{0.5, 1.0}}), 4), 0.2);
  CHECK(half.lo() == doctest::Approx(0.5));
  CHECK(half.hi() == doctest::Approx(0.5));

  const auto u = moment_interval(exact_moments(Mixture::binary({{0.0, 0.5}, {1.0, 0.5}}), 2), 0.5);
  CHECK(u.lo() == 0.0);
  CHECK(u.hi() == 1.0);

  // Odd k falls back to k - 1.
  const auto m = Mixture::binary({{0.3, 0.5}, {0.6, 0.5}});
  const auto odd = moment_interval(exact_moments(m, 3), 0.5);
  const auto even = moment_interval(exact_moments(m, 2), 0.5);
  CHECK(odd.lo() == doctest::Approx(even.lo()));
  CHECK(even.hi() - 0.45 == doctest::Approx(std::sqrt(0.0225 / 0.5)));
  CHECK_THROWS_AS(moment_interval(exact_moments(m, 1), 0.5), Error);
  CHECK_THROWS_AS(moment_interval(exact_moments(m, 2), 1.5), Error);
  CHECK_THROWS_AS(IntervalSet(0.6, 0.5), Error);
}

TEST_CASE("moment_interval satisfies its Markov guarantee") {
  Rng rng(RngSeed{191});
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = testing::random_binary_mixture(rng, 1 + trial % 8);
    const std::uint32_t k = 2 + 2 * (trial % 4);
    const double alpha = 0.05 + 0.9 * rng.uniform();
    CHECK(coverage(moment_interval(exact_moments(m, k), alpha), m) >= 1.0 - alpha - 1e-12);
  }
}

TEST_CASE("recommended alpha and delta") {
  const auto [a, d] = recommended_alpha_delta(0.04);
  CHECK(a == doctest::Approx(0.2));
  CHECK(d == doctest::Approx(0.2));
  CHECK_THROWS_AS(recommended_alpha_delta(-1.0), Error);
  const auto j = to_json(PredictionSet({SimplexPoint::binary(0.2)}, 0.1));
  CHECK(j.at("centers").size() == 1);
  CHECK(to_json(IntervalSet(0.1, 0.4)).at("hi") == 0.4);
}
