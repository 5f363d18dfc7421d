#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hocal/mixture.hpp"

namespace hocal {

/// Sparse transport plan between the supports of two mixtures. Rows index the
/// support of the first mixture, columns the support of the second.
struct Coupling {
  struct Entry {
    std::size_t row;
    std::size_t col;
    double mass;
  };

  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Entry> entries;

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  /// Transport cost of this plan under the l1 ground metric.
  double cost(const Mixture& a, const Mixture& b) const;
};

enum class TransportMethod {
  Auto,
  Binary1D,   // closed form over the bias coordinate; l = 2 only
  Bipartite,  // network simplex on the complete bipartite support graph
  Lattice,    // network simplex on the Y^(k) neighbour graph
};

struct TransportOptions {
  TransportMethod method = TransportMethod::Auto;
  /// When both mixtures live on the k-lattice, Auto uses the sparse
  /// neighbour graph instead of the complete bipartite graph.
  std::optional<std::uint32_t> lattice_k;
  /// Upper bound on |supp a| * |supp b| for the bipartite solver.
  std::size_t max_cells = 4'000'000;
  std::size_t lattice_cap = kDefaultEnumerationCap;
};

struct TransportResult {
  double cost = 0.0;
  Coupling coupling;
  TransportMethod method = TransportMethod::Auto;
  /// Complementary-slackness residual of the final basis (0 for the 1-D route).
  double optimality_residual = 0.0;
};

/// Exact Wasserstein-1 distance under the l1 ground metric on the simplex,
/// with an optimal coupling. Auto picks Binary1D for two labels, Lattice when
/// a lattice hint is given and both supports sit on it, Bipartite otherwise.
TransportResult wasserstein1(const Mixture& a, const Mixture& b, const TransportOptions& opts = {});

/// 2 * integral over [0, 1] of |F_a(t) - F_b(t)| for binary mixtures.
double wasserstein1_binary(const Mixture& a, const Mixture& b);

double tv_distance(const Mixture& a, const Mixture& b);

/// W1 <= diam(simplex) * TV with diam = 2 under l1.
bool w1_tv_bound_check(const Mixture& a, const Mixture& b);

}  // namespace hocal
