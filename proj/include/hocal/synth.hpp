#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "hocal/calibrate.hpp"
#include "hocal/mixture.hpp"
#include "hocal/rng.hpp"

namespace hocal {

/// Scenario 1: every x has p*(x) = 1/2. Scenario 2: p*(x) is 0 or 1 with
/// probability 1/2 each. Both look identical to first-order labels.
struct TwoScenario {
  int which = 1;
};

/// x = |z| with z standard normal; p*(x) = clamp(0.5 + a1 sin(w1 x) + a2 sin(w2 x))
/// to [0.01, 0.99]; partitions are equal-width bins of x over [0, 3], with
/// the tail beyond 3 folded into the last bin.
struct BinaryRegression {
  double a1 = 0.3;
  double w1 = 2.0;
  double a2 = 0.15;
  double w2 = 20.0;
  std::uint32_t bins = 20;
};

/// One Bayes mixture shared by every x: support points from a symmetric
/// Dirichlet(dirichlet_alpha), weights from Dirichlet(1).
struct RandomMixtureSpec {
  std::size_t num_labels = 3;
  std::size_t support_size = 4;
  double dirichlet_alpha = 1.0;
};

using NatureSpec = std::variant<TwoScenario, BinaryRegression, RandomMixtureSpec>;

/// Parses "two-scenario-1", "two-scenario-2", "binary-regression" or
/// "random-mixture" with default parameters.
NatureSpec nature_from_name(const std::string& name);
void validate(const NatureSpec& spec);

struct GeneratedData {
  SnapshotDataset dataset;
  /// Exact k-th order projection of each partition's Bayes mixture.
  CalibrationTable reference;
  /// The unprojected Bayes mixtures.
  CalibrationTable bayes;
};

/// Draws n tagged k-snapshots. References are computed exactly (quadrature
/// for BinaryRegression), never sampled.
GeneratedData gen_dataset(const NatureSpec& spec, std::size_t n, std::uint32_t k, RngSeed seed);

/// Unprojected per-partition Bayes mixtures, for every partition the nature
/// can produce.
CalibrationTable bayes_table(const NatureSpec& spec, RngSeed seed);

Mixture random_mixture(const RandomMixtureSpec& spec, RngSeed seed);

/// p*(x) for the regression nature.
double regression_bias(const BinaryRegression& spec, double x);

/// Zero-padded partition id for bin b, e.g. "bin07".
std::string bin_id(std::uint32_t b, std::uint32_t bins);

}  // namespace hocal
