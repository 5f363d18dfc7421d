#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hocal/simplex.hpp"

namespace hocal {

struct ShannonEntropy {
  double log_base = 2.0;
};

/// 1 - ||p||^2, or 4 p (1 - p) on two labels when `binary_scaled`.
struct BrierEntropy {
  bool binary_scaled = false;
};

/// G_t(p) = -exp(<t, p>), the probe family behind the moment generating
/// function diagnostic.
struct ExponentialEntropy {
  std::vector<double> t;
};

/// Binary only: G(p) = sum_i coeffs[i] * bias^i. Must be concave on [0, 1].
struct PolynomialEntropy {
  std::vector<double> coeffs;
};

/// A concave generalized entropy G together with its proper loss and Bregman
/// divergence. Only the four families above are supported.
class EntropySpec {
 public:
  using Kind = std::variant<ShannonEntropy, BrierEntropy, ExponentialEntropy, PolynomialEntropy>;

  EntropySpec(Kind kind);  // NOLINT(google-explicit-constructor)

  static EntropySpec shannon(double log_base = 2.0) { return EntropySpec(ShannonEntropy{log_base}); }
  static EntropySpec brier(bool binary_scaled = false) { return EntropySpec(BrierEntropy{binary_scaled}); }

  /// Parses a CLI shorthand: shannon2, shannon (natural log), brier,
  /// brier-scaled.
  static EntropySpec from_name(const std::string& name);

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;

 private:
  Kind kind_;
};

/// A divergence or loss value; `infinite` is set when Shannon meets a
/// prediction that puts zero mass on a label the reference can produce.
struct FlaggedValue {
  double value = 0.0;
  bool infinite = false;
};

double entropy_value(const EntropySpec& g, const SimplexPoint& p);

/// A (super)gradient of G at p, extended off the simplex. Shannon returns
/// -inf in coordinates where p is zero.
std::vector<double> entropy_gradient(const EntropySpec& g, const SimplexPoint& p);

/// Bregman divergence D<p || q> = G(q) - G(p) + <grad G(q), p - q>.
FlaggedValue divergence(const EntropySpec& g, const SimplexPoint& p, const SimplexPoint& q);

/// Proper loss L<p_true || q> = E_{y ~ p_true} L<y || q>.
FlaggedValue proper_loss(const EntropySpec& g, const SimplexPoint& p_true, const SimplexPoint& q);

/// (4x)^(1 / ln 4), an upper bound on the binary Shannon entropy (in bits)
/// over [0, 1/2].
double shannon_modulus_bound(double x);

/// Evaluates G on the binary bias coordinate: G((1 - x, x)).
double binary_entropy_value(const EntropySpec& g, double x);

nlohmann::json to_json(const EntropySpec& g);
EntropySpec entropy_from_json(const nlohmann::json& j);

}  // namespace hocal
