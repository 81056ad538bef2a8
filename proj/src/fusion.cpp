#include "wearfuse/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "wearfuse/error.hpp"

namespace wearfuse {

std::string Team::name() const {
  std::string out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) out += '+';
    out += to_string(members[i]);
  }
  return out;
}

void check_distribution(std::span<const double> p) {
  if (p.size() < 2) fail(ErrorCode::InvalidDistribution, "distribution needs at least two classes");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::InvalidDistribution, "negative or non-finite probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) fail(ErrorCode::InvalidDistribution, "probabilities do not sum to 1");
}

double normalized_entropy(std::span<const double> p) {
  check_distribution(p);
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return std::clamp(h / std::log(static_cast<double>(p.size())), 0.0, 1.0);
}

TeamDecision fuse(std::span<const SspOutput> members) {
  if (members.empty()) fail(ErrorCode::EmptyTeam, "cannot fuse an empty team");
  TeamDecision out;
  for (const auto& m : members) {
    if (!(m.f1 >= 0.0 && m.f1 <= 1.0)) fail(ErrorCode::InvalidArgument, "F1 must lie in [0, 1]");
    const double h = normalized_entropy(m.p);
    // rounding leaves ~1e-16 for a uniform P, which a fractional power inflates
    const double base = (1.0 - h) < 1e-12 ? 0.0 : 1.0 - h;
    // std::pow(0, 0) == 1, which is the intended zero-confidence convention.
    out.entropies.push_back(h);
    out.weights.push_back(std::pow(base, m.f1));
  }
  for (double w : out.weights) out.gamma += w;

  out.p.fill(0.0);
  if (out.gamma < 1e-12) {
    out.fallback = true;
    for (const auto& m : members) {
      for (std::size_t c = 0; c < kNumClasses; ++c) out.p[c] += m.p[c];
    }
    for (double& v : out.p) v /= static_cast<double>(members.size());
    return out;
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t c = 0; c < kNumClasses; ++c) out.p[c] += out.weights[i] * members[i].p[c];
  }
  for (double& v : out.p) v /= out.gamma;
  return out;
}

std::vector<Team> enumerate_teams(std::span<const Modality> sensors, std::optional<std::size_t> size) {
  const std::size_t n = sensors.size();
  if (n < 1) fail(ErrorCode::SizeOutOfRange, "no sensors to form teams from");
  if (n > 20) fail(ErrorCode::SizeOutOfRange, "too many sensors for exhaustive team enumeration");
  if (size && (*size < 1 || *size > n)) {
    fail(ErrorCode::SizeOutOfRange, "team size " + std::to_string(*size) + " outside [1, " + std::to_string(n) + "]");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sensors[i] == sensors[j]) fail(ErrorCode::InvalidArgument, "duplicate sensor in team pool");
    }
  }

  std::vector<Team> out;
  auto emit_size = [&](std::size_t k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      Team t;
      for (auto i : idx) t.members.push_back(sensors[i]);
      out.push_back(std::move(t));
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  };
  if (size) {
    emit_size(*size);
  } else {
    for (std::size_t k = 1; k <= n; ++k) emit_size(k);
  }
  return out;
}

std::vector<double> feature_level_fuse(std::span<const SensorFeatures> parts,
                                       std::span<const Modality> order) {
  std::vector<double> out;
  for (Modality m : order) {
    auto it = std::find_if(parts.begin(), parts.end(), [m](const SensorFeatures& f) { return f.sensor == m; });
    if (it == parts.end()) {
      fail(ErrorCode::MissingModality, "feature-level fusion is missing " + std::string(to_string(m)));
    }
    out.insert(out.end(), it->values.begin(), it->values.end());
  }
  return out;
}

}  // namespace wearfuse
