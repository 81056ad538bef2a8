#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wearfuse/windowing.hpp"

namespace wearfuse {

using ClassDistribution = std::array<double, kNumClasses>;

struct MlpHyper {
  std::vector<std::size_t> hidden{64, 32};
  double learning_rate = 1e-3;
  double l2 = 1e-4;
  double dropout = 0.2;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Fully connected ReLU network with a softmax head. Parameters live in one
/// flat buffer: per layer, a row-major (out x in) weight block then the bias.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t input_dim, std::span<const std::size_t> hidden, std::size_t outputs);

  std::size_t input_dim() const noexcept { return shape_.empty() ? 0 : shape_.front(); }
  std::size_t output_dim() const noexcept { return shape_.empty() ? 0 : shape_.back(); }
  /// Layer widths including input and output.
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t layer_count() const noexcept { return shape_.size() - 1; }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + shape_[layer] * shape_[layer + 1];
  }
  bool is_weight(std::size_t index) const;

  /// He-normal weights (std sqrt(2 / fan_in)), zero biases.
  void initialize(std::uint64_t seed);

  std::vector<double> logits(std::span<const double> x) const;
  ClassDistribution predict_proba(std::span<const double> x) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

struct Batch {
  std::span<const std::vector<double>> x;
  std::span<const int> y;
};

/// Mean cross-entropy plus 0.5 * l2 * sum(w^2) over weights (biases exempt).
/// With a non-null rng, inverted dropout is applied to hidden activations.
double loss_and_gradient(const Mlp& net, Batch batch, double l2, double dropout,
                         std::vector<double>& gradient, std::mt19937_64* rng = nullptr);

double cross_entropy(const Mlp& net, Batch batch);

/// Macro-averaged F1; a class absent from both sequences scores 0.
double macro_f1(std::span<const int> predictions, std::span<const int> truths,
                std::size_t num_classes = kNumClasses);

double accuracy(std::span<const int> predictions, std::span<const int> truths);

int argmax(const ClassDistribution& p) noexcept;

struct LabeledSet {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

struct EpochRecord {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainedMlp {
  Mlp net;
  MlpHyper hyper;
  double f1 = 0.0;        // macro F1 on the validation set
  double val_accuracy = 0.0;
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> history;
};

/// Adam (0.9, 0.999, 1e-8), early stopping on validation cross-entropy with
/// restoration of the best parameters. Deterministic for a given seed.
TrainedMlp train_mlp(const LabeledSet& train, const LabeledSet& val, const MlpHyper& hyper);

}  // namespace wearfuse
