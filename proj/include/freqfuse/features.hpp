#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freqfuse/freqcube.hpp"
#include "freqfuse/image.hpp"

namespace freqfuse {

enum class Branch : std::uint8_t { Spatial = 0, Frequency = 1, Fused = 2 };

std::string_view to_string(Branch branch) noexcept;
Branch parse_branch(std::string_view name);

/// Finite real feature vector tagged with the branch that produced it.
class FeatureVector {
 public:
  FeatureVector() = default;
  FeatureVector(std::vector<double> values, Branch branch);

  std::size_t dim() const noexcept { return values_.size(); }
  Branch branch() const noexcept { return branch_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<double> values_;
  Branch branch_ = Branch::Spatial;
};

/// Per channel (mean, population std), interleaved; dim 2C, frequency branch.
FeatureVector pool_statistics(const FrequencyCube& cube);

/// Same statistics over the R, G, B channels; dim 6, spatial branch.
FeatureVector pool_statistics(const RgbImage& img);

double l2_norm(std::span<const double> v) noexcept;

/// v / |v|; vectors with norm <= 1e-12 come back unchanged.
FeatureVector l2_normalize(const FeatureVector& v);

/// concat(l2_normalize(spatial), l2_normalize(frequency)).
FeatureVector fuse(const FeatureVector& spatial, const FeatureVector& frequency);

// --- linear probe -----------------------------------------------------------

/// Multinomial logistic regression: logits = W x + b.
struct LinearProbe {
  std::size_t dim = 0;
  std::vector<std::string> class_names;
  std::vector<double> weights;  // k x dim, row-major
  std::vector<double> bias;     // k

  std::size_t classes() const noexcept { return class_names.size(); }
  friend bool operator==(const LinearProbe&, const LinearProbe&) = default;
};

struct ProbeConfig {
  int epochs = 200;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
};

struct ProbeGradient {
  double loss = 0.0;  // mean softmax cross-entropy
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Loss and analytic gradient over a labeled batch. `labels` index into
/// probe.class_names.
ProbeGradient probe_loss_and_gradient(const LinearProbe& probe,
                                      std::span<const FeatureVector> features,
                                      std::span<const std::size_t> labels);

/// Full-batch gradient descent from seeded uniform [-0.01, 0.01] weights and
/// zero bias. Classes are indexed in order of first appearance in `labels`.
/// When `loss_trace` is given it receives the loss before each update.
LinearProbe train_linear_probe(std::span<const FeatureVector> features,
                               std::span<const std::string> labels, const ProbeConfig& cfg,
                               std::vector<double>* loss_trace = nullptr);

/// Pre-softmax logits, tagged with the input's branch.
FeatureVector embed(const LinearProbe& probe, const FeatureVector& v);

std::size_t predict(const LinearProbe& probe, const FeatureVector& v);

}  // namespace freqfuse
