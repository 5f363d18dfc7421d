#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hocal/entropy.hpp"
#include "hocal/mixture.hpp"

namespace hocal {

inline constexpr std::size_t kTmiSupportCap = 512;

/// Predictive = aleatoric + epistemic under a generalized entropy G, plus the
/// total/reverse mutual information variants when they are computable.
struct UncertaintyReport {
  double pu = 0.0;
  double au = 0.0;
  double eu = 0.0;
  std::optional<double> pu_tmi;
  std::optional<double> eu_tmi;
  std::optional<double> eu_rmi;
  /// Why the TMI fields are absent: "support_too_large" or "kl_infinite".
  std::optional<std::string> tmi_absent_reason;
};

struct LossBreakdown {
  double expected_loss = 0.0;
  double avg_au = 0.0;
  double avg_bias = 0.0;
  double grouping_loss = 0.0;
  double foc_error = 0.0;
  /// Set when some divergence was infinite; the affected terms are +inf.
  bool infinite = false;
};

/// Aleatoric estimate E[G(p)] for p drawn from the mixture.
double aleatoric(const Mixture& m, const EntropySpec& g);

UncertaintyReport decompose(const Mixture& m, const EntropySpec& g);

/// |AU(predicted) - AU(bayes)|.
double aleatoric_error(const Mixture& predicted, const Mixture& bayes, const EntropySpec& g);

/// Expected loss of the predicted centroid against labels from `bayes`,
/// split into average aleatoric uncertainty, grouping loss and first-order
/// calibration error.
LossBreakdown loss_breakdown(const Mixture& predicted, const Mixture& bayes, const EntropySpec& g);

/// All t with entries in {-1, -0.5, 0, 0.5, 1} while that grid has at most
/// 243 points, else entries in {-1, 0, 1}, truncated to 243 points.
std::vector<std::vector<double>> default_mgf_grid(std::size_t num_labels);

/// max over t of |AU_{G_t}(a) - AU_{G_t}(b)| with G_t(p) = -exp(<t, p>).
double mgf_diagnostic(const Mixture& a, const Mixture& b, const std::vector<std::vector<double>>& t_grid);

nlohmann::json to_json(const UncertaintyReport& r);
nlohmann::json to_json(const LossBreakdown& r);

}  // namespace hocal
