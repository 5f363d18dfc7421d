// Shared fixtures and independent oracles for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "hocal/mixture.hpp"
#include "hocal/rng.hpp"

namespace hocal::testing {

/// Dirichlet(alpha, ..., alpha) draw, via normalized gammas.
inline std::vector<double> dirichlet(Rng& rng, std::size_t dim, double alpha) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> v(dim);
  double sum = 0.0;
  for (auto& x : v) {
    x = gamma(rng);
    sum += x;
  }
  if (sum <= 0.0) {
    v.assign(dim, 0.0);
    v[0] = 1.0;
    return v;
  }
  for (auto& x : v) x /= sum;
  return v;
}

/// Random mixture with `support` components drawn uniformly on the simplex.
inline Mixture random_mixture(Rng& rng, std::size_t labels, std::size_t support) {
  const auto weights = dirichlet(rng, support, 1.0);
  std::vector<WeightedPoint> comps;
  for (std::size_t i = 0; i < support; ++i) {
    comps.push_back({SimplexPoint::normalized(dirichlet(rng, labels, 1.0)), weights[i]});
  }
  return Mixture(LabelSpace(labels), std::move(comps));
}

/// Binary mixture whose biases are drawn uniformly on [0, 1].
inline Mixture random_binary_mixture(Rng& rng, std::size_t support) {
  const auto weights = dirichlet(rng, support, 1.0);
  std::vector<std::pair<double, double>> bw;
  for (std::size_t i = 0; i < support; ++i) bw.emplace_back(rng.uniform(), weights[i]);
  return Mixture::binary(std::move(bw));
}

/// Moves every support point of `m` a random fraction (at most `reach`) of
/// the way toward an independent uniform point; weights are kept. The
/// identity pairing is a coupling, so W1 is at most its cost.
inline Mixture perturbed_copy(Rng& rng, const Mixture& m, double reach) {
  std::vector<WeightedPoint> comps;
  for (const auto& [p, w] : m.support()) {
    const auto target = dirichlet(rng, p.dim(), 1.0);
    const double t = reach * rng.uniform();
    std::vector<double> v(p.dim());
    for (std::size_t j = 0; j < p.dim(); ++j) v[j] = (1.0 - t) * p[j] + t * target[j];
    comps.push_back({SimplexPoint::normalized(v), w});
  }
  return Mixture(m.space(), std::move(comps));
}

/// Dense two-phase tableau simplex with Bland's rule:
///   min c^T x  s.t.  A x = b, x >= 0, b >= 0.
/// Written for tiny problems; used as an independent check on the network
/// simplex solver.
inline double dense_lp_min(std::vector<std::vector<double>> A, std::vector<double> b,
                           const std::vector<double>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  const std::size_t cols = n + m + 1;
  const std::size_t rhs = n + m;
  constexpr double tol = 1e-12;
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1.0;
    T[i][rhs] = b[i];
    basis[i] = n + i;
  }
  auto pivot = [&](std::size_t r, std::size_t col) {
    const double p = T[r][col];
    for (auto& x : T[r]) x /= p;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r || T[i][col] == 0.0) continue;
      const double f = T[i][col];
      for (std::size_t j = 0; j < cols; ++j) T[i][j] -= f * T[r][j];
    }
    basis[r] = col;
  };
  auto run = [&](std::size_t allowed) {
    while (true) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (T[m][j] < -tol) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (T[i][enter] > tol) {
          const double ratio = T[i][rhs] / T[i][enter];
          if (ratio < best - tol || (std::abs(ratio - best) <= tol && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return;  // unbounded; cannot happen for transport
      pivot(leave, enter);
    }
  };
  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += T[i][j];
    T[m][j] = j >= n && j < rhs ? 0.0 : -s;
  }
  run(n + m);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(T[i][j]) > 1e-9) {
        pivot(i, j);
        break;
      }
    }
  }
  // Phase 2.
  for (std::size_t j = 0; j < cols; ++j) T[m][j] = j < n ? c[j] : 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n) continue;
    const double cb = c[basis[i]];
    for (std::size_t j = 0; j < cols; ++j) T[m][j] -= cb * T[i][j];
  }
  run(n);
  return -T[m][rhs];
}

/// Transport cost via the dense LP over the full coupling polytope.
inline double transport_lp_oracle(const Mixture& a, const Mixture& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<double>> A(n + m, std::vector<double>(n * m, 0.0));
  std::vector<double> rhs(n + m);
  std::vector<double> cost(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      A[i][i * m + j] = 1.0;
      A[n + j][i * m + j] = 1.0;
      cost[i * m + j] = l1_distance(a.point(i), b.point(j));
    }
    rhs[i] = a.weight(i);
  }
  for (std::size_t j = 0; j < m; ++j) rhs[n + j] = b.weight(j);
  return dense_lp_min(std::move(A), std::move(rhs), cost);
}

}  // namespace hocal::testing
