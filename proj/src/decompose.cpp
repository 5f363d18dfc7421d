#include "hocal/decompose.hpp"

#include <algorithm>
#include <cmath>

#include "hocal/error.hpp"

namespace hocal {

namespace {

void require_same_space(const Mixture& a, const Mixture& b) {
  if (a.space().size() != b.space().size()) {
    throw Error(ErrorKind::DimensionMismatch, "mixtures live on different label spaces");
  }
}

/// pu - au can round so that au + eu misses pu by an ulp. Steps eu until
/// the identity holds in floating point; when au sits on a rounding tie no eu
/// works, so au (already summed with far larger rounding error) moves one ulp.
void close_identity(UncertaintyReport& r) {
  const double au = r.au;
  for (double shift : {0.0, 1.0, -1.0}) {
    r.au = shift == 0.0 ? au : std::nextafter(au, shift * INFINITY);
    r.eu = r.pu - r.au;
    for (int i = 0; i < 4 && r.au + r.eu != r.pu; ++i) {
      r.eu = std::nextafter(r.eu, r.au + r.eu < r.pu ? INFINITY : -INFINITY);
    }
    if (r.au + r.eu == r.pu) return;
  }
  r.au = au;
  r.eu = r.pu - au;
}

}  // namespace

double aleatoric(const Mixture& m, const EntropySpec& g) {
  double au = 0.0;
  for (const auto& [p, w] : m.support()) au += w * entropy_value(g, p);
  return au;
}

UncertaintyReport decompose(const Mixture& m, const EntropySpec& g) {
  UncertaintyReport r;
  const auto bar = centroid(m);
  r.pu = entropy_value(g, bar);
  r.au = aleatoric(m, g);
  close_identity(r);

  if (m.size() > kTmiSupportCap) {
    r.tmi_absent_reason = "support_too_large";
    return r;
  }
  // E_{rho, rho'} D<rho || rho'> splits into E D<rho || bar> + E D<bar || rho>;
  // the pairwise sum is still evaluated directly.
  double pairwise = 0.0;
  double reverse = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto rev = divergence(g, bar, m.point(i));
    if (rev.infinite) {
      r.tmi_absent_reason = "kl_infinite";
      return r;
    }
    reverse += m.weight(i) * rev.value;
    for (std::size_t j = 0; j < m.size(); ++j) {
      const auto d = divergence(g, m.point(i), m.point(j));
      if (d.infinite) {
        r.tmi_absent_reason = "kl_infinite";
        return r;
      }
      pairwise += m.weight(i) * m.weight(j) * d.value;
    }
  }
  r.eu_tmi = pairwise;
  r.pu_tmi = r.au + pairwise;
  r.eu_rmi = reverse;
  return r;
}

double aleatoric_error(const Mixture& predicted, const Mixture& bayes, const EntropySpec& g) {
  require_same_space(predicted, bayes);
  return std::abs(aleatoric(predicted, g) - aleatoric(bayes, g));
}

LossBreakdown loss_breakdown(const Mixture& predicted, const Mixture& bayes, const EntropySpec& g) {
  require_same_space(predicted, bayes);
  const auto pred_bar = centroid(predicted);
  const auto bayes_bar = centroid(bayes);

  LossBreakdown r;
  r.avg_au = aleatoric(bayes, g);
  for (const auto& [p, w] : bayes.support()) {
    const auto bias = divergence(g, p, pred_bar);
    const auto group = divergence(g, p, bayes_bar);
    if (bias.infinite && w > 0.0) r.infinite = true;
    if (!r.infinite) {
      r.avg_bias += w * bias.value;
      r.grouping_loss += w * group.value;
    }
  }
  const auto foc = divergence(g, bayes_bar, pred_bar);
  if (r.infinite || foc.infinite) {
    r.infinite = true;
    r.avg_bias = INFINITY;
    r.expected_loss = INFINITY;
    r.foc_error = INFINITY;
    // grouping_loss only involves the Bayes mixture and stays finite.
    r.grouping_loss = 0.0;
    for (const auto& [p, w] : bayes.support()) r.grouping_loss += w * divergence(g, p, bayes_bar).value;
    return r;
  }
  r.foc_error = foc.value;
  r.expected_loss = r.avg_au + r.avg_bias;
  return r;
}

std::vector<std::vector<double>> default_mgf_grid(std::size_t num_labels) {
  constexpr std::size_t kMaxPoints = 243;
  const std::vector<double> fine{-1.0, -0.5, 0.0, 0.5, 1.0};
  const std::vector<double> coarse{-1.0, 0.0, 1.0};
  std::size_t fine_count = 1;
  bool use_fine = true;
  for (std::size_t i = 0; i < num_labels && use_fine; ++i) {
    fine_count *= fine.size();
    if (fine_count > kMaxPoints) use_fine = false;
  }
  const auto& values = use_fine ? fine : coarse;

  std::vector<std::vector<double>> grid;
  std::vector<std::size_t> digit(num_labels, 0);
  while (grid.size() < kMaxPoints) {
    std::vector<double> t(num_labels);
    for (std::size_t i = 0; i < num_labels; ++i) t[i] = values[digit[i]];
    grid.push_back(std::move(t));
    std::size_t pos = num_labels;
    while (pos > 0) {
      --pos;
      if (++digit[pos] < values.size()) break;
      digit[pos] = 0;
      if (pos == 0) return grid;
    }
  }
  return grid;
}

double mgf_diagnostic(const Mixture& a, const Mixture& b, const std::vector<std::vector<double>>& t_grid) {
  require_same_space(a, b);
  double worst = 0.0;
  for (const auto& t : t_grid) {
    if (t.size() != a.space().size()) throw Error(ErrorKind::DimensionMismatch, "t has the wrong length");
    const EntropySpec g(ExponentialEntropy{t});
    worst = std::max(worst, std::abs(aleatoric(a, g) - aleatoric(b, g)));
  }
  return worst;
}

nlohmann::json to_json(const UncertaintyReport& r) {
  nlohmann::json j{{"pu", r.pu}, {"au", r.au}, {"eu", r.eu}};
  if (r.pu_tmi) j["pu_tmi"] = *r.pu_tmi;
  if (r.eu_tmi) j["eu_tmi"] = *r.eu_tmi;
  if (r.eu_rmi) j["eu_rmi"] = *r.eu_rmi;
  if (r.tmi_absent_reason) j["tmi_absent_reason"] = *r.tmi_absent_reason;
  return j;
}

nlohmann::json to_json(const LossBreakdown& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf"); };
  return nlohmann::json{{"expected_loss", num(r.expected_loss)}, {"avg_au", num(r.avg_au)},
                        {"avg_bias", num(r.avg_bias)},           {"grouping_loss", num(r.grouping_loss)},
                        {"foc_error", num(r.foc_error)},         {"infinite", r.infinite}};
}

}  // namespace hocal
