#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hocal/entropy.hpp"
#include "hocal/mixture.hpp"

namespace hocal {

inline constexpr std::uint32_t kMaxChebyshevDegree = 24;

/// Fitted constant for the Shannon (base 2) Chebyshev sup-error rate:
/// alpha(d) <= kShannonRateConstant * (4 / d)^(1 / ln 4) for 1 <= d <= 24.
inline constexpr double kShannonRateConstant = 0.25;

/// Estimates m_i ~ E[p^i], i = 1..k, of the bias of a binary mixture.
class MomentVector {
 public:
  /// Validates m_i in [0, 1] and m_{i+1} <= m_i, both within 1e-9.
  MomentVector(std::vector<double> values, double eps = 0.0);

  std::uint32_t k() const noexcept { return static_cast<std::uint32_t>(values_.size()); }
  double eps() const noexcept { return eps_; }
  const std::vector<double>& values() const noexcept { return values_; }
  /// m_i for 1 <= i <= k; m_0 = 1.
  double operator[](std::uint32_t i) const;
  /// Per-entry error bound i * eps / 2.
  double bound(std::uint32_t i) const;

 private:
  std::vector<double> values_;
  double eps_;
};

/// C(c_1, m) / C(k, m), with c_1 the count of label 1; zero when c_1 < m.
double moment_weight(std::uint32_t k, std::uint32_t m, const Snapshot& s);

/// m_i = E_kth[M_{k,i}] for i = 1..k. Throws OffLattice if a support point is
/// not on the k-lattice.
MomentVector estimate_moments(const Mixture& kth, std::uint32_t k, double eps);

/// sum_j w_j p_j^i over the bias coordinate.
double true_moments(const Mixture& m, std::uint32_t i);

/// Central moment c_j = sum_i C(j, i) m_i (-m_1)^(j - i) and its error bound
/// j * eps * (1 + m_1)^j / 2.
std::pair<double, double> central_moment(const MomentVector& mv, std::uint32_t j);

/// A (d, alpha, B) polynomial approximation of a binary entropy on [0, 1].
struct PolyApprox {
  std::uint32_t degree = 0;
  std::vector<double> coeffs;  // monomial, coeffs[i] multiplies x^i
  double sup_error = 0.0;      // measured on a 10^4-point grid
  double coeff_bound = 0.0;    // max |coeffs[i]|

  double operator()(double x) const;
};

/// Chebyshev interpolation at the d + 1 Chebyshev nodes of [0, 1].
PolyApprox chebyshev_fit(const EntropySpec& g, std::uint32_t d);

/// Returns beta_0 + sum beta_i m_i and the bound alpha + d^2 eps B / 2.
std::pair<double, double> poly_au_estimate(const PolyApprox& pa, const MomentVector& mv);

nlohmann::json to_json(const PolyApprox& pa);
PolyApprox poly_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MomentVector& mv);

}  // namespace hocal
