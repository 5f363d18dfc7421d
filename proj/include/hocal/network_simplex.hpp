#pragma once

#include <cstddef>
#include <vector>

namespace hocal {

/// Primal network simplex for uncapacitated min-cost flow with real-valued
/// supplies and non-negative arc costs.
///
/// The basis is a spanning tree rooted at an artificial node joined to every
/// real node by a big-M arc. The leaving arc follows the strongly feasible
/// tree rule, which rules out cycling on degenerate pivots. Potentials are
/// carried in extended precision because big-M potentials would otherwise
/// swamp the reduced costs of unit-scale arcs.
class NetworkSimplex {
 public:
  explicit NetworkSimplex(std::size_t num_nodes);

  std::size_t add_arc(std::size_t from, std::size_t to, double cost);
  void set_supply(std::size_t node, double supply);

  /// Solves to optimality. Returns the cost over real arcs.
  double solve();

  double flow(std::size_t arc) const { return static_cast<double>(flow_[arc]); }
  double potential(std::size_t node) const { return static_cast<double>(pi_[node]); }
  std::size_t num_arcs() const noexcept { return num_real_arcs_; }
  std::size_t source(std::size_t arc) const { return source_[arc]; }
  std::size_t target(std::size_t arc) const { return target_[arc]; }
  std::size_t pivots() const noexcept { return pivots_; }

  /// max(0, -min reduced cost) over real arcs at the final basis; an
  /// optimality certificate when it is ~0.
  double reduced_cost_violation() const;

 private:
  using Real = long double;

  void init_tree();
  bool find_entering(std::size_t& entering);
  void pivot(std::size_t entering);
  Real reduced_cost(std::size_t arc) const {
    return static_cast<Real>(cost_[arc]) + pi_[source_[arc]] - pi_[target_[arc]];
  }

  std::size_t num_nodes_;
  std::size_t num_real_arcs_ = 0;
  std::vector<double> supply_;

  std::vector<std::size_t> source_;
  std::vector<std::size_t> target_;
  std::vector<double> cost_;
  std::vector<Real> flow_;
  std::vector<char> in_tree_;

  // Tree over num_nodes_ + 1 nodes; the last is the artificial root.
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> pred_;
  std::vector<char> up_;  // pred arc points from the node to its parent
  std::vector<std::size_t> depth_;
  std::vector<Real> pi_;
  std::vector<std::vector<std::size_t>> tree_adj_;

  std::size_t next_arc_ = 0;
  std::size_t block_size_ = 0;
  Real tolerance_ = 0;
  std::size_t pivots_ = 0;
};

}  // namespace hocal
