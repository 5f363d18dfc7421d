#include "hocal/entropy.hpp"

#include <cmath>
#include <numeric>

#include "hocal/error.hpp"

namespace hocal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double poly_eval(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double poly_derivative(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * coeffs[i];
  return acc;
}

void require_binary(const SimplexPoint& p, const char* what) {
  if (p.dim() != 2) throw Error(ErrorKind::DimensionMismatch, std::string(what) + " needs two labels");
}

bool brier_is_scaled(const BrierEntropy& b, const SimplexPoint& p) {
  return b.binary_scaled && p.dim() == 2;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

EntropySpec::EntropySpec(Kind kind) : kind_(std::move(kind)) {
  std::visit(overloaded{
                 [](const ShannonEntropy& s) {
                   if (!(s.log_base > 1.0) || !std::isfinite(s.log_base)) {
                     throw Error(ErrorKind::Domain, "Shannon log base must exceed 1");
                   }
                 },
                 [](const BrierEntropy&) {},
                 [](const ExponentialEntropy& e) {
                   if (e.t.size() < 2) throw Error(ErrorKind::InvalidArgument, "exponential entropy needs t");
                   for (double t : e.t) {
                     if (!(t >= -1.0 && t <= 1.0)) {
                       throw Error(ErrorKind::Domain, "exponential entropy t entries must lie in [-1, 1]");
                     }
                   }
                 },
                 [](const PolynomialEntropy& p) {
                   if (p.coeffs.empty()) throw Error(ErrorKind::InvalidArgument, "empty polynomial");
                   // Concavity via second differences on a 1e-3 grid.
                   constexpr double h = 1e-3;
                   for (int i = 1; i < 1000; ++i) {
                     const double x = i * h;
                     const double second = poly_eval(p.coeffs, x - h) - 2.0 * poly_eval(p.coeffs, x) +
                                           poly_eval(p.coeffs, x + h);
                     if (second > 1e-12) {
                       throw Error(ErrorKind::Domain, "polynomial entropy is not concave on [0, 1]");
                     }
                   }
                 },
             },
             kind_);
}

EntropySpec EntropySpec::from_name(const std::string& name) {
  if (name == "shannon2" || name == "shannon-bits") return shannon(2.0);
  if (name == "shannon" || name == "shannon-nats") return shannon(std::exp(1.0));
  if (name == "brier") return brier(false);
  if (name == "brier-scaled") return brier(true);
  throw Error(ErrorKind::InvalidArgument, "unknown entropy '" + name + "'");
}

std::string EntropySpec::name() const {
  return std::visit(overloaded{
                        [](const ShannonEntropy& s) {
                          return s.log_base == 2.0 ? std::string("shannon2") : std::string("shannon");
                        },
                        [](const BrierEntropy& b) {
                          return b.binary_scaled ? std::string("brier-scaled") : std::string("brier");
                        },
                        [](const ExponentialEntropy&) { return std::string("exponential"); },
                        [](const PolynomialEntropy&) { return std::string("polynomial"); },
                    },
                    kind_);
}

double entropy_value(const EntropySpec& g, const SimplexPoint& p) {
  return std::visit(
      overloaded{
          [&](const ShannonEntropy& s) {
            double h = 0.0;
            for (double x : p.probs()) {
              if (x > 0.0) h -= x * std::log(x);
            }
            return h / std::log(s.log_base);
          },
          [&](const BrierEntropy& b) {
            if (brier_is_scaled(b, p)) return 4.0 * p[0] * p[1];
            return 1.0 - dot(p.probs(), p.probs());
          },
          [&](const ExponentialEntropy& e) {
            if (e.t.size() != p.dim()) throw Error(ErrorKind::DimensionMismatch, "t has the wrong length");
            return -std::exp(dot(e.t, p.probs()));
          },
          [&](const PolynomialEntropy& poly) {
            require_binary(p, "polynomial entropy");
            return poly_eval(poly.coeffs, p.bias());
          },
      },
      g.kind());
}

std::vector<double> entropy_gradient(const EntropySpec& g, const SimplexPoint& p) {
  std::vector<double> grad(p.dim(), 0.0);
  std::visit(overloaded{
                 [&](const ShannonEntropy& s) {
                   const double scale = 1.0 / std::log(s.log_base);
                   for (std::size_t j = 0; j < p.dim(); ++j) {
                     grad[j] = p[j] > 0.0 ? -(std::log(p[j]) + 1.0) * scale : -INFINITY;
                   }
                 },
                 [&](const BrierEntropy& b) {
                   const double factor = brier_is_scaled(b, p) ? 4.0 : 2.0;
                   for (std::size_t j = 0; j < p.dim(); ++j) grad[j] = -factor * p[j];
                 },
                 [&](const ExponentialEntropy& e) {
                   if (e.t.size() != p.dim()) throw Error(ErrorKind::DimensionMismatch, "t has the wrong length");
                   const double v = std::exp(dot(e.t, p.probs()));
                   for (std::size_t j = 0; j < p.dim(); ++j) grad[j] = -e.t[j] * v;
                 },
                 [&](const PolynomialEntropy& poly) {
                   require_binary(p, "polynomial entropy");
                   grad[1] = poly_derivative(poly.coeffs, p.bias());
                 },
             },
             g.kind());
  return grad;
}

FlaggedValue divergence(const EntropySpec& g, const SimplexPoint& p, const SimplexPoint& q) {
  if (p.dim() != q.dim()) throw Error(ErrorKind::DimensionMismatch, "divergence over different spaces");
  return std::visit(
      overloaded{
          [&](const ShannonEntropy& s) {
            double kl = 0.0;
            for (std::size_t j = 0; j < p.dim(); ++j) {
              if (p[j] == 0.0) continue;
              if (q[j] == 0.0) return FlaggedValue{INFINITY, true};
              kl += p[j] * std::log(p[j] / q[j]);
            }
            return FlaggedValue{std::max(0.0, kl / std::log(s.log_base)), false};
          },
          [&](const BrierEntropy& b) {
            double d = 0.0;
            for (std::size_t j = 0; j < p.dim(); ++j) d += (p[j] - q[j]) * (p[j] - q[j]);
            return FlaggedValue{brier_is_scaled(b, p) ? 2.0 * d : d, false};
          },
          [&](const ExponentialEntropy& e) {
            if (e.t.size() != p.dim()) throw Error(ErrorKind::DimensionMismatch, "t has the wrong length");
            double shift = 0.0;
            for (std::size_t j = 0; j < p.dim(); ++j) shift += e.t[j] * (p[j] - q[j]);
            const double v = std::exp(dot(e.t, q.probs())) * (std::expm1(shift) - shift);
            return FlaggedValue{std::max(0.0, v), false};
          },
          [&](const PolynomialEntropy& poly) {
            require_binary(p, "polynomial entropy");
            const double x = p.bias();
            const double y = q.bias();
            return FlaggedValue{poly_eval(poly.coeffs, y) - poly_eval(poly.coeffs, x) +
                                    poly_derivative(poly.coeffs, y) * (x - y),
                                false};
          },
      },
      g.kind());
}

FlaggedValue proper_loss(const EntropySpec& g, const SimplexPoint& p_true, const SimplexPoint& q) {
  if (p_true.dim() != q.dim()) throw Error(ErrorKind::DimensionMismatch, "loss over different spaces");
  if (const auto* s = std::get_if<ShannonEntropy>(&g.kind())) {
    double ce = 0.0;
    for (std::size_t j = 0; j < q.dim(); ++j) {
      if (p_true[j] == 0.0) continue;
      if (q[j] == 0.0) return {INFINITY, true};
      ce -= p_true[j] * std::log(q[j]);
    }
    return {ce / std::log(s->log_base), false};
  }
  // L<p || q> = G(q) + <grad G(q), p - q>
  const auto grad = entropy_gradient(g, q);
  double value = entropy_value(g, q);
  for (std::size_t j = 0; j < q.dim(); ++j) value += grad[j] * (p_true[j] - q[j]);
  return {value, false};
}

double shannon_modulus_bound(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::Domain, "modulus bound needs x in [0, 1]");
  return std::pow(4.0 * x, 1.0 / std::log(4.0));
}

double binary_entropy_value(const EntropySpec& g, double x) {
  return entropy_value(g, SimplexPoint::binary(x));
}

nlohmann::json to_json(const EntropySpec& g) {
  return std::visit(overloaded{
                        [](const ShannonEntropy& s) {
                          return nlohmann::json{{"kind", "shannon"}, {"log_base", s.log_base}};
                        },
                        [](const BrierEntropy& b) {
                          return nlohmann::json{{"kind", "brier"}, {"binary_scaled", b.binary_scaled}};
                        },
                        [](const ExponentialEntropy& e) {
                          return nlohmann::json{{"kind", "exponential"}, {"t", e.t}};
                        },
                        [](const PolynomialEntropy& p) {
                          return nlohmann::json{{"kind", "polynomial"}, {"coeffs", p.coeffs}};
                        },
                    },
                    g.kind());
}

EntropySpec entropy_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "shannon") return EntropySpec(ShannonEntropy{j.value("log_base", 2.0)});
    if (kind == "brier") return EntropySpec(BrierEntropy{j.value("binary_scaled", false)});
    if (kind == "exponential") return EntropySpec(ExponentialEntropy{j.at("t").get<std::vector<double>>()});
    if (kind == "polynomial") {
      return EntropySpec(PolynomialEntropy{j.at("coeffs").get<std::vector<double>>()});
    }
    throw Error(ErrorKind::Parse, "unknown entropy kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("bad entropy spec: ") + e.what());
  }
}

}  // namespace hocal
