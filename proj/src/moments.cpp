#include "hocal/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hocal/error.hpp"

namespace hocal {

namespace {

constexpr double kMomentTolerance = 1e-9;
constexpr std::uint32_t kExactBinomialLimit = 62;
constexpr int kGridPoints = 10000;

void require_binary(const Mixture& m) {
  if (m.space().size() != 2) throw Error(ErrorKind::DimensionMismatch, "moments need a binary label space");
}

std::uint64_t binomial_u64(std::uint32_t n, std::uint32_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t out = 1;
  // out * (n - r + i) / i stays exact: it is C(n - r + i, i) at every step.
  for (std::uint32_t i = 1; i <= r; ++i) {
    out = static_cast<std::uint64_t>(static_cast<unsigned __int128>(out) * (n - r + i) / i);
  }
  return out;
}

double log_binomial(std::uint32_t n, std::uint32_t r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

}  // namespace

MomentVector::MomentVector(std::vector<double> values, double eps) : values_(std::move(values)), eps_(eps) {
  if (values_.empty()) throw Error(ErrorKind::InvalidArgument, "moment vector needs k >= 1");
  if (!(eps_ >= 0.0)) throw Error(ErrorKind::Domain, "eps must be non-negative");
  double prev = 1.0;
  for (auto& v : values_) {
    if (!(v >= -kMomentTolerance && v <= 1.0 + kMomentTolerance)) {
      throw Error(ErrorKind::Domain, "moments must lie in [0, 1]");
    }
    if (v > prev + kMomentTolerance) throw Error(ErrorKind::Domain, "moments must be non-increasing");
    v = std::clamp(v, 0.0, 1.0);
    prev = v;
  }
}

double MomentVector::operator[](std::uint32_t i) const {
  if (i == 0) return 1.0;
  if (i > k()) throw Error(ErrorKind::InvalidArgument, "moment index exceeds k");
  return values_[i - 1];
}

double MomentVector::bound(std::uint32_t i) const { return i * eps_ / 2.0; }

double moment_weight(std::uint32_t k, std::uint32_t m, const Snapshot& s) {
  if (s.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "moment weights need a binary snapshot");
  if (s.k() != k) throw Error(ErrorKind::InvalidArgument, "snapshot size differs from k");
  if (m < 1 || m > k) throw Error(ErrorKind::InvalidArgument, "moment order must be in [1, k]");
  const std::uint32_t c1 = s[1];
  if (c1 < m) return 0.0;
  if (k <= kExactBinomialLimit) {
    return static_cast<double>(static_cast<long double>(binomial_u64(c1, m)) /
                               static_cast<long double>(binomial_u64(k, m)));
  }
  return std::exp(log_binomial(c1, m) - log_binomial(k, m));
}

MomentVector estimate_moments(const Mixture& kth, std::uint32_t k, double eps) {
  require_binary(kth);
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  std::vector<long double> acc(k, 0.0L);
  for (const auto& [p, w] : kth.support()) {
    const auto counts = lattice_counts(p, k, kMomentTolerance);
    if (counts.empty()) throw Error(ErrorKind::OffLattice, "support point is not on the k-lattice");
    const Snapshot s(counts);
    for (std::uint32_t m = 1; m <= std::min<std::uint32_t>(k, s[1]); ++m) acc[m - 1] += w * moment_weight(k, m, s);
  }
  std::vector<double> values(acc.begin(), acc.end());
  return MomentVector(std::move(values), eps);
}

double true_moments(const Mixture& m, std::uint32_t i) {
  require_binary(m);
  long double acc = 0.0L;
  for (const auto& [p, w] : m.support()) acc += w * std::pow(static_cast<long double>(p.bias()), i);
  return static_cast<double>(acc);
}

std::pair<double, double> central_moment(const MomentVector& mv, std::uint32_t j) {
  if (j > mv.k()) throw Error(ErrorKind::InvalidArgument, "central moment order exceeds k");
  const long double m1 = mv[1];
  long double c = 0.0L;
  long double binom = 1.0L;
  for (std::uint32_t i = 0; i <= j; ++i) {
    c += binom * mv[i] * std::pow(-m1, static_cast<int>(j - i));
    binom = binom * (j - i) / (i + 1);
  }
  const double bound = j * mv.eps() * std::pow(1.0 + mv[1], j) / 2.0;
  return {static_cast<double>(c), bound};
}

double PolyApprox::operator()(double x) const {
  long double acc = 0.0L;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return static_cast<double>(acc);
}

PolyApprox chebyshev_fit(const EntropySpec& g, std::uint32_t d) {
  if (d < 1 || d > kMaxChebyshevDegree) throw Error(ErrorKind::CapExceeded, "degree must be in [1, 24]");
  const std::uint32_t n = d + 1;
  std::vector<long double> f(n);
  std::vector<long double> u(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    u[i] = std::cos(std::numbers::pi_v<long double> * (i + 0.5L) / n);
    f[i] = binary_entropy_value(g, static_cast<double>((1.0L + u[i]) / 2.0L));
  }
  // Chebyshev coefficients in u = 2x - 1.
  std::vector<long double> cheb(n, 0.0L);
  for (std::uint32_t j = 0; j < n; ++j) {
    long double s = 0.0L;
    for (std::uint32_t i = 0; i < n; ++i) s += f[i] * std::cos(j * std::acos(u[i]));
    cheb[j] = (j == 0 ? 1.0L : 2.0L) * s / n;
  }
  // T_j(2x - 1) as monomials in x.
  std::vector<long double> mono(n, 0.0L);
  std::vector<long double> prev(n, 0.0L);
  std::vector<long double> cur(n, 0.0L);
  prev[0] = 1.0L;
  cur[0] = -1.0L;
  cur[1] = 2.0L;
  for (std::uint32_t i = 0; i < n; ++i) mono[i] += cheb[0] * prev[i];
  if (n > 1) {
    for (std::uint32_t i = 0; i < n; ++i) mono[i] += cheb[1] * cur[i];
  }
  for (std::uint32_t j = 2; j < n; ++j) {
    std::vector<long double> next(n, 0.0L);
    for (std::uint32_t i = 0; i < n; ++i) {
      next[i] -= 2.0L * cur[i] + prev[i];
      if (i + 1 < n) next[i + 1] += 4.0L * cur[i];
    }
    for (std::uint32_t i = 0; i < n; ++i) mono[i] += cheb[j] * next[i];
    prev = std::move(cur);
    cur = std::move(next);
  }

  PolyApprox pa;
  pa.degree = d;
  pa.coeffs.assign(mono.begin(), mono.end());
  for (double c : pa.coeffs) pa.coeff_bound = std::max(pa.coeff_bound, std::abs(c));
  for (int i = 0; i < kGridPoints; ++i) {
    const double x = static_cast<double>(i) / (kGridPoints - 1);
    pa.sup_error = std::max(pa.sup_error, std::abs(pa(x) - binary_entropy_value(g, x)));
  }
  return pa;
}

std::pair<double, double> poly_au_estimate(const PolyApprox& pa, const MomentVector& mv) {
  if (pa.degree > mv.k()) throw Error(ErrorKind::InvalidArgument, "polynomial degree exceeds available moments");
  long double est = 0.0L;
  for (std::uint32_t i = 0; i < pa.coeffs.size(); ++i) est += static_cast<long double>(pa.coeffs[i]) * mv[i];
  const double d = pa.degree;
  return {static_cast<double>(est), pa.sup_error + d * d * mv.eps() * pa.coeff_bound / 2.0};
}

nlohmann::json to_json(const PolyApprox& pa) {
  return nlohmann::json{{"degree", pa.degree},
                        {"coeffs", pa.coeffs},
                        {"sup_error", pa.sup_error},
                        {"coeff_bound", pa.coeff_bound}};
}

PolyApprox poly_from_json(const nlohmann::json& j) {
  try {
    PolyApprox pa;
    pa.degree = j.at("degree").get<std::uint32_t>();
    pa.coeffs = j.at("coeffs").get<std::vector<double>>();
    pa.sup_error = j.at("sup_error").get<double>();
    pa.coeff_bound = j.at("coeff_bound").get<double>();
    if (pa.coeffs.size() != pa.degree + 1) throw Error(ErrorKind::Parse, "coefficient count differs from degree");
    return pa;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("bad polynomial: ") + e.what());
  }
}

nlohmann::json to_json(const MomentVector& mv) {
  nlohmann::json bounds = nlohmann::json::array();
  for (std::uint32_t i = 1; i <= mv.k(); ++i) bounds.push_back(mv.bound(i));
  return nlohmann::json{{"k", mv.k()}, {"eps", mv.eps()}, {"moments", mv.values()}, {"bounds", bounds}};
}

}  // namespace hocal
