#include "hocal/transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "hocal/error.hpp"
#include "hocal/network_simplex.hpp"

namespace hocal {

std::vector<double> Coupling::row_sums() const {
  std::vector<double> out(rows, 0.0);
  for (const auto& e : entries) out[e.row] += e.mass;
  return out;
}

std::vector<double> Coupling::col_sums() const {
  std::vector<double> out(cols, 0.0);
  for (const auto& e : entries) out[e.col] += e.mass;
  return out;
}

double Coupling::cost(const Mixture& a, const Mixture& b) const {
  double total = 0.0;
  for (const auto& e : entries) total += e.mass * l1_distance(a.point(e.row), b.point(e.col));
  return total;
}

namespace {

void require_same_space(const Mixture& a, const Mixture& b) {
  if (!(a.space() == b.space())) {
    throw Error(ErrorKind::DimensionMismatch, "mixtures over different label spaces");
  }
}

struct BiasAtom {
  double bias;
  double weight;
  std::size_t index;
};

// Ascending in bias. Mixture support is sorted by (1 - bias, bias), i.e.
// descending bias, so reversing suffices.
std::vector<BiasAtom> ascending_atoms(const Mixture& m) {
  std::vector<BiasAtom> atoms;
  atoms.reserve(m.size());
  for (std::size_t i = m.size(); i-- > 0;) atoms.push_back({m.point(i).bias(), m.weight(i), i});
  return atoms;
}

TransportResult solve_binary(const Mixture& a, const Mixture& b) {
  TransportResult out;
  out.method = TransportMethod::Binary1D;
  out.cost = wasserstein1_binary(a, b);

  // The monotone (quantile) coupling is optimal on the line.
  const auto xa = ascending_atoms(a);
  const auto xb = ascending_atoms(b);
  out.coupling.rows = a.size();
  out.coupling.cols = b.size();
  std::size_t i = 0;
  std::size_t j = 0;
  double ra = xa.empty() ? 0.0 : xa[0].weight;
  double rb = xb.empty() ? 0.0 : xb[0].weight;
  while (i < xa.size() && j < xb.size()) {
    const double m = std::min(ra, rb);
    if (m > 0.0) out.coupling.entries.push_back({xa[i].index, xb[j].index, m});
    ra -= m;
    rb -= m;
    // Advance whichever side is exhausted; on the last atom absorb rounding.
    const bool last_a = i + 1 == xa.size();
    const bool last_b = j + 1 == xb.size();
    if (ra <= 1e-15 && !last_a) {
      ra = xa[++i].weight;
    } else if (rb <= 1e-15 && !last_b) {
      rb = xb[++j].weight;
    } else {
      break;
    }
  }
  return out;
}

TransportResult solve_bipartite(const Mixture& a, const Mixture& b, const TransportOptions& opts) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n * m > opts.max_cells) {
    throw Error(ErrorKind::CapExceeded, "transport problem has " + std::to_string(n * m) +
                                            " cells, cap is " + std::to_string(opts.max_cells));
  }
  NetworkSimplex solver(n + m);
  for (std::size_t i = 0; i < n; ++i) solver.set_supply(i, a.weight(i));
  for (std::size_t j = 0; j < m; ++j) solver.set_supply(n + j, -b.weight(j));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      solver.add_arc(i, n + j, l1_distance(a.point(i), b.point(j)));
    }
  }
  TransportResult out;
  out.method = TransportMethod::Bipartite;
  out.cost = solver.solve();
  out.optimality_residual = solver.reduced_cost_violation();
  out.coupling.rows = n;
  out.coupling.cols = m;
  for (std::size_t e = 0; e < solver.num_arcs(); ++e) {
    const double f = solver.flow(e);
    if (f > 0.0) out.coupling.entries.push_back({solver.source(e), solver.target(e) - n, f});
  }
  return out;
}

// On Y^(k), ||c/k - c'/k||_1 equals 2/k times the fewest single-count moves
// turning c into c', so W1 is a min-cost flow over the move graph.
TransportResult solve_lattice(const Mixture& a, const Mixture& b, std::uint32_t k,
                              const TransportOptions& opts) {
  const auto lattice = enumerate_snapshot_space(a.space(), k, opts.lattice_cap);
  std::map<std::vector<std::uint32_t>, std::size_t> index;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto c = lattice[i].counts();
    index.emplace(std::vector<std::uint32_t>(c.begin(), c.end()), i);
  }
  const std::size_t none = lattice.size();
  std::vector<std::size_t> row_of(lattice.size(), none);
  std::vector<std::size_t> col_of(lattice.size(), none);
  std::vector<double> supply(lattice.size(), 0.0);
  auto place = [&](const Mixture& m, std::vector<std::size_t>& slot, double sign) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto counts = lattice_counts(m.point(i), k);
      if (counts.empty()) {
        throw Error(ErrorKind::OffLattice,
                    "support point is not on the k = " + std::to_string(k) + " lattice");
      }
      const std::size_t node = index.at(counts);
      slot[node] = i;
      supply[node] += sign * m.weight(i);
    }
  };
  place(a, row_of, 1.0);
  place(b, col_of, -1.0);

  const std::size_t l = a.space().size();
  const double step_cost = 2.0 / static_cast<double>(k);
  NetworkSimplex solver(lattice.size());
  for (std::size_t u = 0; u < lattice.size(); ++u) {
    solver.set_supply(u, supply[u]);
    auto c = std::vector<std::uint32_t>(lattice[u].counts().begin(), lattice[u].counts().end());
    for (std::size_t from = 0; from < l; ++from) {
      if (c[from] == 0) continue;
      for (std::size_t to = 0; to < l; ++to) {
        if (to == from) continue;
        --c[from];
        ++c[to];
        solver.add_arc(u, index.at(c), step_cost);
        ++c[from];
        --c[to];
      }
    }
  }

  TransportResult out;
  out.method = TransportMethod::Lattice;
  out.cost = solver.solve();
  out.optimality_residual = solver.reduced_cost_violation();
  out.coupling.rows = a.size();
  out.coupling.cols = b.size();

  // Mass present on both sides at a node stays put.
  std::vector<double> excess(lattice.size(), 0.0);
  std::vector<double> deficit(lattice.size(), 0.0);
  for (std::size_t u = 0; u < lattice.size(); ++u) {
    const double wa = row_of[u] == none ? 0.0 : a.weight(row_of[u]);
    const double wb = col_of[u] == none ? 0.0 : b.weight(col_of[u]);
    const double stay = std::min(wa, wb);
    if (stay > 0.0) out.coupling.entries.push_back({row_of[u], col_of[u], stay});
    excess[u] = wa - stay;
    deficit[u] = wb - stay;
  }

  // Decompose the (forest-supported, hence acyclic) optimal flow into
  // source-to-sink paths.
  constexpr double kEps = 1e-15;
  std::vector<std::vector<std::size_t>> out_arcs(lattice.size());
  std::vector<double> flow(solver.num_arcs());
  for (std::size_t e = 0; e < solver.num_arcs(); ++e) {
    flow[e] = solver.flow(e);
    if (flow[e] > kEps) out_arcs[solver.source(e)].push_back(e);
  }
  std::vector<std::size_t> path;
  for (std::size_t s = 0; s < lattice.size(); ++s) {
    while (excess[s] > kEps) {
      path.clear();
      std::size_t x = s;
      double bottleneck = excess[s];
      while (deficit[x] <= kEps) {
        std::size_t best = solver.num_arcs();
        for (std::size_t e : out_arcs[x]) {
          if (flow[e] > kEps && (best == solver.num_arcs() || flow[e] > flow[best])) best = e;
        }
        if (best == solver.num_arcs()) break;
        path.push_back(best);
        bottleneck = std::min(bottleneck, flow[best]);
        x = solver.target(best);
      }
      if (deficit[x] <= kEps) {
        // Residual rounding noise: nothing left to route from here.
        excess[s] = 0.0;
        break;
      }
      bottleneck = std::min(bottleneck, deficit[x]);
      for (std::size_t e : path) flow[e] -= bottleneck;
      excess[s] -= bottleneck;
      deficit[x] -= bottleneck;
      out.coupling.entries.push_back({row_of[s], col_of[x], bottleneck});
    }
  }
  return out;
}

bool on_lattice(const Mixture& m, std::uint32_t k) {
  return std::all_of(m.support().begin(), m.support().end(),
                     [k](const WeightedPoint& wp) { return !lattice_counts(wp.point, k).empty(); });
}

}  // namespace

double wasserstein1_binary(const Mixture& a, const Mixture& b) {
  require_same_space(a, b);
  if (a.space().size() != 2) {
    throw Error(ErrorKind::DimensionMismatch, "1-D transport formula needs two labels");
  }
  // Sweep the merged breakpoints and integrate |F_a - F_b| piecewise.
  std::vector<std::pair<double, double>> events;  // (bias, signed weight)
  events.reserve(a.size() + b.size());
  for (const auto& [p, w] : a.support()) events.emplace_back(p.bias(), w);
  for (const auto& [p, w] : b.support()) events.emplace_back(p.bias(), -w);
  std::sort(events.begin(), events.end());
  double diff = 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    diff += events[i].second;
    if (i + 1 < events.size()) area += std::abs(diff) * (events[i + 1].first - events[i].first);
  }
  return 2.0 * area;
}

TransportResult wasserstein1(const Mixture& a, const Mixture& b, const TransportOptions& opts) {
  require_same_space(a, b);
  TransportMethod method = opts.method;
  if (method == TransportMethod::Auto) {
    if (a.space().size() == 2) {
      method = TransportMethod::Binary1D;
    } else if (opts.lattice_k && on_lattice(a, *opts.lattice_k) && on_lattice(b, *opts.lattice_k)) {
      method = TransportMethod::Lattice;
    } else {
      method = TransportMethod::Bipartite;
    }
  }
  switch (method) {
    case TransportMethod::Binary1D:
      if (a.space().size() != 2) {
        throw Error(ErrorKind::DimensionMismatch, "1-D transport formula needs two labels");
      }
      return solve_binary(a, b);
    case TransportMethod::Lattice:
      if (!opts.lattice_k) throw Error(ErrorKind::InvalidArgument, "lattice route needs k");
      return solve_lattice(a, b, *opts.lattice_k, opts);
    case TransportMethod::Bipartite:
    case TransportMethod::Auto:
      break;
  }
  return solve_bipartite(a, b, opts);
}

double tv_distance(const Mixture& a, const Mixture& b) {
  require_same_space(a, b);
  struct Atom {
    const SimplexPoint* point;
    double wa;
    double wb;
  };
  std::vector<Atom> atoms;
  atoms.reserve(a.size() + b.size());
  for (const auto& [p, w] : a.support()) atoms.push_back({&p, w, 0.0});
  for (const auto& [p, w] : b.support()) atoms.push_back({&p, 0.0, w});
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return *x.point < *y.point; });
  std::vector<Atom> merged;
  for (const auto& atom : atoms) {
    bool hit = false;
    for (auto it = merged.rbegin(); it != merged.rend(); ++it) {
      if ((*atom.point)[0] - (*it->point)[0] > kMergeTolerance) break;
      if (l1_distance(*atom.point, *it->point) <= kMergeTolerance) {
        it->wa += atom.wa;
        it->wb += atom.wb;
        hit = true;
        break;
      }
    }
    if (!hit) merged.push_back(atom);
  }
  double total = 0.0;
  for (const auto& atom : merged) total += std::abs(atom.wa - atom.wb);
  return 0.5 * total;
}

bool w1_tv_bound_check(const Mixture& a, const Mixture& b) {
  return wasserstein1(a, b).cost <= 2.0 * tv_distance(a, b) + 1e-8;
}

}  // namespace hocal
