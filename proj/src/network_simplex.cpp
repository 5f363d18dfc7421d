#include "hocal/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hocal/error.hpp"

namespace hocal {

NetworkSimplex::NetworkSimplex(std::size_t num_nodes)
    : num_nodes_(num_nodes), supply_(num_nodes, 0.0) {}

std::size_t NetworkSimplex::add_arc(std::size_t from, std::size_t to, double cost) {
  if (from >= num_nodes_ || to >= num_nodes_) {
    throw Error(ErrorKind::InvalidArgument, "arc endpoint out of range");
  }
  if (!(cost >= 0.0) || !std::isfinite(cost)) {
    throw Error(ErrorKind::Domain, "arc costs must be finite and non-negative");
  }
  source_.push_back(from);
  target_.push_back(to);
  cost_.push_back(cost);
  return num_real_arcs_++;
}

void NetworkSimplex::set_supply(std::size_t node, double supply) { supply_.at(node) = supply; }

void NetworkSimplex::init_tree() {
  const std::size_t root = num_nodes_;
  double max_cost = 0.0;
  for (double c : cost_) max_cost = std::max(max_cost, c);
  const double art_cost = (max_cost + 1.0) * static_cast<double>(num_nodes_ + 1);

  flow_.assign(num_real_arcs_, 0);
  in_tree_.assign(num_real_arcs_, 0);
  parent_.assign(num_nodes_ + 1, root);
  pred_.assign(num_nodes_ + 1, 0);
  up_.assign(num_nodes_ + 1, 0);
  depth_.assign(num_nodes_ + 1, 1);
  pi_.assign(num_nodes_ + 1, 0);
  tree_adj_.assign(num_nodes_ + 1, {});
  depth_[root] = 0;

  for (std::size_t u = 0; u < num_nodes_; ++u) {
    const std::size_t e = source_.size();
    if (supply_[u] >= 0.0) {
      source_.push_back(u);
      target_.push_back(root);
      cost_.push_back(0.0);
      flow_.push_back(supply_[u]);
      up_[u] = 1;
      pi_[u] = 0;
    } else {
      source_.push_back(root);
      target_.push_back(u);
      cost_.push_back(art_cost);
      flow_.push_back(-static_cast<Real>(supply_[u]));
      up_[u] = 0;
      pi_[u] = art_cost;
    }
    in_tree_.push_back(1);
    pred_[u] = e;
    tree_adj_[u].push_back(e);
    tree_adj_[root].push_back(e);
  }

  block_size_ = std::max<std::size_t>(
      10, static_cast<std::size_t>(std::sqrt(static_cast<double>(num_real_arcs_))));
  // Potentials reach art_cost in magnitude; the tolerance scales with the
  // extended-precision ulp at that size times a generous depth allowance.
  tolerance_ = std::max<Real>(static_cast<Real>(art_cost) * 1e-16L, 1e-14L);
}

bool NetworkSimplex::find_entering(std::size_t& entering) {
  if (num_real_arcs_ == 0) return false;
  Real best = -tolerance_;
  std::size_t best_arc = num_real_arcs_;
  std::size_t scanned_in_block = 0;
  for (std::size_t step = 0; step < num_real_arcs_; ++step) {
    const std::size_t e = (next_arc_ + step) % num_real_arcs_;
    if (!in_tree_[e]) {
      const Real rc = reduced_cost(e);
      if (rc < best) {
        best = rc;
        best_arc = e;
      }
    }
    if (++scanned_in_block == block_size_) {
      if (best_arc != num_real_arcs_) {
        next_arc_ = (e + 1) % num_real_arcs_;
        entering = best_arc;
        return true;
      }
      scanned_in_block = 0;
    }
  }
  if (best_arc != num_real_arcs_) {
    next_arc_ = (best_arc + 1) % num_real_arcs_;
    entering = best_arc;
    return true;
  }
  return false;
}

void NetworkSimplex::pivot(std::size_t in_arc) {
  const std::size_t first = source_[in_arc];
  const std::size_t second = target_[in_arc];

  std::size_t u = first;
  std::size_t v = second;
  while (u != v) {
    if (depth_[u] >= depth_[v]) {
      u = parent_[u];
    } else {
      v = parent_[v];
    }
  }
  const std::size_t join = u;

  // Flow travels first -> second along the entering arc, then back up from
  // second to join and down from join to first. Only arcs whose flow would
  // decrease can block; ties resolve toward the last blocking arc met when
  // walking the cycle in flow direction from the join.
  constexpr Real kInf = std::numeric_limits<Real>::infinity();
  Real delta = kInf;
  std::size_t u_out = 0;
  int side = 0;
  for (std::size_t w = first; w != join; w = parent_[w]) {
    const Real d = up_[w] ? flow_[pred_[w]] : kInf;
    if (d < delta) {
      delta = d;
      u_out = w;
      side = 1;
    }
  }
  for (std::size_t w = second; w != join; w = parent_[w]) {
    const Real d = up_[w] ? kInf : flow_[pred_[w]];
    if (d <= delta) {
      delta = d;
      u_out = w;
      side = 2;
    }
  }
  if (side == 0) throw Error(ErrorKind::Domain, "network simplex: unbounded pivot");

  if (delta > 0) {
    flow_[in_arc] += delta;
    for (std::size_t w = first; w != join; w = parent_[w]) {
      flow_[pred_[w]] += up_[w] ? -delta : delta;
    }
    for (std::size_t w = second; w != join; w = parent_[w]) {
      flow_[pred_[w]] += up_[w] ? delta : -delta;
    }
  }
  const std::size_t out_arc = pred_[u_out];
  flow_[out_arc] = 0;

  auto erase_arc = [this](std::size_t node, std::size_t arc) {
    auto& adj = tree_adj_[node];
    adj.erase(std::find(adj.begin(), adj.end(), arc));
  };
  erase_arc(u_out, out_arc);
  erase_arc(parent_[u_out], out_arc);
  in_tree_[out_arc] = 0;
  in_tree_[in_arc] = 1;
  tree_adj_[first].push_back(in_arc);
  tree_adj_[second].push_back(in_arc);

  // The subtree under u_out now hangs from the entering arc.
  const std::size_t a = side == 1 ? first : second;
  const std::size_t b = side == 1 ? second : first;
  auto attach = [this](std::size_t node, std::size_t par, std::size_t arc) {
    parent_[node] = par;
    pred_[node] = arc;
    up_[node] = source_[arc] == node;
    depth_[node] = depth_[par] + 1;
    const Real c = static_cast<Real>(cost_[arc]);
    pi_[node] = up_[node] ? pi_[par] - c : pi_[par] + c;
  };
  attach(a, b, in_arc);
  std::vector<std::size_t> stack{a};
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t e : tree_adj_[x]) {
      if (e == pred_[x]) continue;
      const std::size_t y = source_[e] == x ? target_[e] : source_[e];
      attach(y, x, e);
      stack.push_back(y);
    }
  }
  ++pivots_;
}

double NetworkSimplex::solve() {
  Real total_supply = 0;
  Real scale = 0;
  for (double s : supply_) {
    total_supply += s;
    scale += std::abs(s);
  }
  if (std::abs(total_supply) > 1e-9L * std::max<Real>(1, scale)) {
    throw Error(ErrorKind::Domain, "network simplex: supplies do not balance");
  }
  init_tree();
  std::size_t entering = 0;
  while (find_entering(entering)) pivot(entering);

  Real total = 0;
  for (std::size_t e = 0; e < num_real_arcs_; ++e) total += flow_[e] * cost_[e];
  return static_cast<double>(total);
}

double NetworkSimplex::reduced_cost_violation() const {
  Real worst = 0;
  for (std::size_t e = 0; e < num_real_arcs_; ++e) worst = std::min(worst, reduced_cost(e));
  return static_cast<double>(-worst);
}

}  // namespace hocal
