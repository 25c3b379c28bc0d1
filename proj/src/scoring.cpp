#include "vidsearch/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vidsearch/anchors.hpp"
#include "vidsearch/errors.hpp"

namespace vidsearch {

double query_score(std::span<const double> similarities, double tau_c) {
  if (!(tau_c > 0.0) || !std::isfinite(tau_c)) throw RejectedInput("tau_c must be positive");
  if (similarities.empty()) return 0.0;
  const double peak = *std::max_element(similarities.begin(), similarities.end());
  double sum = 0.0;
  for (const double phi : similarities) sum += std::exp((phi - peak) / tau_c);
  const double u = peak + tau_c * std::log(sum / static_cast<double>(similarities.size()));
  // Rounding can push the result a hair outside [mean, max].
  const double mean = std::accumulate(similarities.begin(), similarities.end(), 0.0) /
                      static_cast<double>(similarities.size());
  return std::clamp(u, std::min(mean, peak), peak);
}

double query_score(const SegmentInterval& segment, const AnchorSet& anchors, double tau_c,
                   Timestamp video_end) {
  std::vector<double> phi;
  for (const auto& a : anchors_in(segment, anchors, video_end)) phi.push_back(a.similarity);
  return query_score(phi, tau_c);
}

std::vector<double> softmax(std::span<const double> values, double scale) {
  std::vector<double> p(values.size());
  if (values.empty()) return p;
  const double peak = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    p[i] = std::exp(scale * (values[i] - peak));
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

double normalized_entropy(std::span<const double> values, double scale) {
  if (values.empty()) throw RejectedInput("entropy needs at least one value");
  for (const double v : values) {
    if (!std::isfinite(v)) throw RejectedInput("entropy input must be finite");
  }
  if (values.size() == 1) return 0.0;
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    return 1.0;
  }
  double h = 0.0;
  for (const double p : softmax(values, scale)) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::clamp(h / std::log(static_cast<double>(values.size())), 0.0, 1.0);
}

FusionResult fuse(std::span<const FusionInput> candidates, double tau_c, double logit_scale,
                  bool bypass) {
  if (candidates.empty()) throw RejectedInput("fusion needs at least one candidate");
  if (!(tau_c > 0.0)) throw RejectedInput("tau_c must be positive");
  if (!(logit_scale > 0.0)) throw RejectedInput("reward logit scale must be positive");
  std::vector<double> r;
  r.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (!(c.intrinsic >= 0.0 && c.intrinsic <= 1.0) || !(c.query >= 0.0 && c.query <= 1.0)) {
      throw RejectedInput("fusion inputs must lie in [0,1]");
    }
    r.push_back(c.intrinsic);
  }
  FusionResult out;
  out.context.tau_c = tau_c;
  out.context.candidate_count = candidates.size();
  out.context.entropy = normalized_entropy(r, logit_scale);
  out.context.probabilities = softmax(r, logit_scale);
  const double H = out.context.entropy;
  for (const auto& c : candidates) {
    double h = bypass ? c.intrinsic : (1.0 - H) * c.intrinsic + H * c.query;
    h = std::clamp(h, std::min(c.intrinsic, c.query), std::max(c.intrinsic, c.query));
    out.bundles.push_back(ScoreBundle{c.node, c.intrinsic, c.query, h});
  }
  return out;
}

NormalizedReward normalize_intrinsic(int raw_score) {
  if (raw_score < 0 || raw_score > 100) {
    const int clamped = std::clamp(raw_score, 0, 100);
    return {clamped / 100.0,
            "reward score " + std::to_string(raw_score) + " outside 0..100, clamped to " +
                std::to_string(clamped)};
  }
  return {raw_score / 100.0, std::nullopt};
}

}  // namespace vidsearch
