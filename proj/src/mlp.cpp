#include "wearfuse/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "wearfuse/error.hpp"

namespace wearfuse {

namespace {

void softmax_inplace(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

void check_set(const LabeledSet& s, std::size_t dim, const char* what) {
  if (s.x.size() != s.y.size()) fail(ErrorCode::DimensionMismatch, std::string(what) + ": rows and labels differ in count");
  for (const auto& row : s.x) {
    if (row.size() != dim) fail(ErrorCode::DimensionMismatch, std::string(what) + ": inconsistent feature dimension");
  }
  for (int label : s.y) {
    if (label < 0 || label >= static_cast<int>(kNumClasses)) {
      fail(ErrorCode::InvalidArgument, std::string(what) + ": label out of range");
    }
  }
}

}  // namespace

void MlpHyper::validate() const {
  if (!(learning_rate > 0.0)) fail(ErrorCode::Validation, "learning_rate must be positive");
  if (!(l2 >= 0.0)) fail(ErrorCode::Validation, "l2 must be nonnegative");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail(ErrorCode::Validation, "dropout must lie in [0, 1)");
  if (batch_size < 1) fail(ErrorCode::Validation, "batch_size must be positive");
  if (max_epochs < 1) fail(ErrorCode::Validation, "max_epochs must be positive");
  for (auto h : hidden) {
    if (h < 1) fail(ErrorCode::Validation, "hidden layer widths must be positive");
  }
}

Mlp::Mlp(std::size_t input_dim, std::span<const std::size_t> hidden, std::size_t outputs) {
  if (input_dim < 1 || outputs < 1) fail(ErrorCode::InvalidArgument, "network dimensions must be positive");
  shape_.push_back(input_dim);
  shape_.insert(shape_.end(), hidden.begin(), hidden.end());
  shape_.push_back(outputs);
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < shape_.size(); ++l) {
    offsets_.push_back(total);
    total += shape_[l] * shape_[l + 1] + shape_[l + 1];
  }
  params_.assign(total, 0.0);
}

bool Mlp::is_weight(std::size_t index) const {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    if (index >= weight_offset(l) && index < bias_offset(l)) return true;
  }
  return false;
}

void Mlp::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < layer_count(); ++l) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(shape_[l])));
    const std::size_t w0 = weight_offset(l);
    const std::size_t b0 = bias_offset(l);
    for (std::size_t i = w0; i < b0; ++i) params_[i] = dist(rng);
    std::fill(params_.begin() + static_cast<std::ptrdiff_t>(b0),
              params_.begin() + static_cast<std::ptrdiff_t>(b0 + shape_[l + 1]), 0.0);
  }
}

std::vector<double> Mlp::logits(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    fail(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                           " features, model expects " + std::to_string(input_dim()));
  }
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const std::size_t in = shape_[l];
    const std::size_t out = shape_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    std::vector<double> z(out);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += w[o * in + i] * a[i];
      z[o] = (l + 1 < layer_count()) ? std::max(0.0, acc) : acc;
    }
    a = std::move(z);
  }
  return a;
}

ClassDistribution Mlp::predict_proba(std::span<const double> x) const {
  if (output_dim() != kNumClasses) fail(ErrorCode::DimensionMismatch, "model is not a 3-class model");
  auto z = logits(x);
  softmax_inplace(z);
  ClassDistribution p{};
  std::copy(z.begin(), z.end(), p.begin());
  return p;
}

double loss_and_gradient(const Mlp& net, Batch batch, double l2, double dropout,
                         std::vector<double>& gradient, std::mt19937_64* rng) {
  const auto& shape = net.shape();
  const std::size_t layers = net.layer_count();
  const auto params = net.parameters();
  gradient.assign(params.size(), 0.0);
  if (batch.x.empty()) fail(ErrorCode::EmptyInput, "empty batch");

  const bool use_dropout = rng != nullptr && dropout > 0.0;
  const double keep = 1.0 - dropout;
  std::bernoulli_distribution keep_dist(use_dropout ? keep : 1.0);
  const double inv_n = 1.0 / static_cast<double>(batch.x.size());

  double loss = 0.0;
  std::vector<std::vector<double>> acts(layers + 1);
  std::vector<std::vector<double>> masks(layers);
  for (std::size_t s = 0; s < batch.x.size(); ++s) {
    const auto& x = batch.x[s];
    if (x.size() != shape.front()) fail(ErrorCode::DimensionMismatch, "batch feature dimension mismatch");
    acts[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < layers; ++l) {
      const std::size_t in = shape[l];
      const std::size_t out = shape[l + 1];
      const double* w = params.data() + net.weight_offset(l);
      const double* b = params.data() + net.bias_offset(l);
      auto& z = acts[l + 1];
      z.assign(out, 0.0);
      const bool hidden = l + 1 < layers;
      if (hidden) masks[l].assign(out, 1.0);
      for (std::size_t o = 0; o < out; ++o) {
        double acc = b[o];
        for (std::size_t i = 0; i < in; ++i) acc += w[o * in + i] * acts[l][i];
        if (hidden) {
          acc = std::max(0.0, acc);
          if (use_dropout) masks[l][o] = keep_dist(*rng) ? 1.0 / keep : 0.0;
          acc *= masks[l][o];
        }
        z[o] = acc;
      }
    }
    auto probs = acts[layers];
    softmax_inplace(probs);
    const auto label = static_cast<std::size_t>(batch.y[s]);
    loss -= std::log(std::max(probs[label], std::numeric_limits<double>::min())) * inv_n;

    std::vector<double> delta = probs;
    delta[label] -= 1.0;
    for (double& d : delta) d *= inv_n;
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = shape[l];
      const std::size_t out = shape[l + 1];
      const double* w = params.data() + net.weight_offset(l);
      double* gw = gradient.data() + net.weight_offset(l);
      double* gb = gradient.data() + net.bias_offset(l);
      for (std::size_t o = 0; o < out; ++o) {
        gb[o] += delta[o];
        for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += delta[o] * acts[l][i];
      }
      if (l == 0) break;
      std::vector<double> prev(in, 0.0);
      for (std::size_t i = 0; i < in; ++i) {
        if (acts[l][i] <= 0.0) continue;  // ReLU gate (also zero where dropped)
        double acc = 0.0;
        for (std::size_t o = 0; o < out; ++o) acc += w[o * in + i] * delta[o];
        prev[i] = acc * masks[l - 1][i];
      }
      delta = std::move(prev);
    }
  }

  if (l2 > 0.0) {
    for (std::size_t l = 0; l < layers; ++l) {
      for (std::size_t i = net.weight_offset(l); i < net.bias_offset(l); ++i) {
        loss += 0.5 * l2 * params[i] * params[i];
        gradient[i] += l2 * params[i];
      }
    }
  }
  return loss;
}

double cross_entropy(const Mlp& net, Batch batch) {
  if (batch.x.empty()) fail(ErrorCode::EmptyInput, "empty batch");
  double loss = 0.0;
  for (std::size_t s = 0; s < batch.x.size(); ++s) {
    const auto p = net.predict_proba(batch.x[s]);
    loss -= std::log(std::max(p[static_cast<std::size_t>(batch.y[s])], std::numeric_limits<double>::min()));
  }
  return loss / static_cast<double>(batch.x.size());
}

double macro_f1(std::span<const int> predictions, std::span<const int> truths, std::size_t num_classes) {
  if (predictions.empty() || predictions.size() != truths.size()) {
    fail(ErrorCode::EmptyInput, "macro F1 needs equal-length nonempty sequences");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const int cls = static_cast<int>(c);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      const bool pred = predictions[i] == cls;
      const bool truth = truths[i] == cls;
      if (pred && truth) ++tp;
      else if (pred) ++fp;
      else if (truth) ++fn;
    }
    if (tp == 0) continue;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    total += 2.0 * precision * recall / (precision + recall);
  }
  return total / static_cast<double>(num_classes);
}

double accuracy(std::span<const int> predictions, std::span<const int> truths) {
  if (predictions.empty() || predictions.size() != truths.size()) {
    fail(ErrorCode::EmptyInput, "accuracy needs equal-length nonempty sequences");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += predictions[i] == truths[i];
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

int argmax(const ClassDistribution& p) noexcept {
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

TrainedMlp train_mlp(const LabeledSet& train, const LabeledSet& val, const MlpHyper& hyper) {
  hyper.validate();
  if (train.x.empty() || val.x.empty()) fail(ErrorCode::InsufficientData, "training and validation sets must be nonempty");
  const std::size_t dim = train.x.front().size();
  check_set(train, dim, "train");
  check_set(val, dim, "validation");
  if (std::set<int>(train.y.begin(), train.y.end()).size() < 2) {
    fail(ErrorCode::InsufficientData, "training data must contain at least two classes");
  }

  TrainedMlp result;
  result.hyper = hyper;
  result.net = Mlp(dim, hyper.hidden, kNumClasses);
  std::mt19937_64 rng(hyper.seed);
  result.net.initialize(rng());

  auto params = result.net.parameters();
  const std::size_t np = params.size();
  std::vector<double> m(np, 0.0), v(np, 0.0), grad;
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::uint64_t step = 0;

  std::vector<std::size_t> order(train.x.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> bx;
  std::vector<int> by;

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_params(params.begin(), params.end());
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < hyper.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      bx.clear();
      by.clear();
      for (std::size_t i = start; i < end; ++i) {
        bx.push_back(train.x[order[i]]);
        by.push_back(train.y[order[i]]);
      }
      const double loss = loss_and_gradient(result.net, {bx, by}, hyper.l2, hyper.dropout, grad, &rng);
      epoch_loss += loss * static_cast<double>(end - start);

      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t i = 0; i < np; ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        params[i] -= hyper.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
      }
    }

    const double val_loss = cross_entropy(result.net, {val.x, val.y});
    result.history.push_back({epoch_loss / static_cast<double>(order.size()), val_loss});
    if (val_loss < best_val) {
      best_val = val_loss;
      best_params.assign(params.begin(), params.end());
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= hyper.patience) {
      break;
    }
  }
  std::copy(best_params.begin(), best_params.end(), params.begin());

  std::vector<int> preds;
  preds.reserve(val.x.size());
  for (const auto& row : val.x) preds.push_back(argmax(result.net.predict_proba(row)));
  result.f1 = macro_f1(preds, val.y);
  result.val_accuracy = accuracy(preds, val.y);
  return result;
}

}  // namespace wearfuse
