#include "wearfuse/features.hpp"

#include <cmath>

#include "wearfuse/error.hpp"

namespace wearfuse {

double mode_energy(std::span<const double> mode) {
  if (mode.empty()) fail(ErrorCode::InvalidArgument, "mode must be nonempty");
  double acc = 0.0;
  for (double v : mode) acc += v * v;
  return acc / static_cast<double>(mode.size());
}

double mode_log_energy(double energy, double epsilon) {
  if (!(energy >= 0.0) || !(epsilon > 0.0)) {
    fail(ErrorCode::InvalidArgument, "log-energy needs E >= 0 and epsilon > 0");
  }
  return std::log(energy + epsilon);
}

double mode_entropy(std::span<const double> mode) {
  if (mode.empty()) fail(ErrorCode::InvalidArgument, "mode must be nonempty");
  double total = 0.0;
  for (double v : mode) total += v * v;
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (double v : mode) {
    const double p = v * v / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

std::vector<double> feature_values(const ModeSet& modes, std::size_t max_modes, double epsilon) {
  if (modes.modes.size() > max_modes) {
    fail(ErrorCode::TooManyModes, std::to_string(modes.modes.size()) + " modes for " +
                                      std::to_string(max_modes) + " slots");
  }
  std::vector<double> out;
  out.reserve(kFeaturesPerMode * max_modes);
  for (const auto& mode : modes.modes) {
    const double e = mode_energy(mode);
    out.push_back(e);
    out.push_back(mode_log_energy(e, epsilon));
    out.push_back(mode_entropy(mode));
  }
  for (std::size_t r = modes.modes.size(); r < max_modes; ++r) {
    out.push_back(0.0);
    out.push_back(std::log(epsilon));
    out.push_back(0.0);
  }
  return out;
}

FeatureVector feature_vector(const ModeSet& modes, const LabeledWindow& window,
                             std::size_t max_modes, double epsilon) {
  return {window.subject_id, window.modality, window.k, window.label,
          feature_values(modes, max_modes, epsilon)};
}

Standardizer Standardizer::fit(std::span<const std::vector<double>> rows) {
  if (rows.empty()) fail(ErrorCode::InsufficientData, "cannot fit normalization on zero rows");
  const std::size_t dim = rows.front().size();
  Standardizer s;
  s.mean.assign(dim, 0.0);
  s.scale.assign(dim, 0.0);
  for (const auto& r : rows) {
    if (r.size() != dim) fail(ErrorCode::DimensionMismatch, "ragged feature rows");
    for (std::size_t j = 0; j < dim; ++j) s.mean[j] += r[j];
  }
  const double n = static_cast<double>(rows.size());
  for (double& m : s.mean) m /= n;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = r[j] - s.mean[j];
      s.scale[j] += d * d;
    }
  }
  for (double& v : s.scale) {
    v = std::sqrt(v / n);
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  if (row.size() != mean.size()) fail(ErrorCode::DimensionMismatch, "feature dimension mismatch");
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / scale[j];
  return out;
}

}  // namespace wearfuse
