#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace freqfuse {

/// Labeled feature matrix from which episodes are drawn. Classes are indexed
/// in order of first appearance.
class FeatureSet {
 public:
  FeatureSet() = default;
  explicit FeatureSet(std::size_t dim) : dim_(dim) {}

  void add(std::string_view class_name, std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t class_count() const noexcept { return class_names_.size(); }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }

  std::size_t label(std::size_t item) const { return labels_[item]; }
  std::span<const double> features(std::size_t item) const {
    return std::span<const double>(values_).subspan(item * dim_, dim_);
  }
  /// Item indices of one class, in insertion order.
  const std::vector<std::size_t>& items_of(std::size_t cls) const { return members_[cls]; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> class_names_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::size_t> labels_;
  std::vector<double> values_;
};

struct EpisodeSpec {
  std::size_t k_way = 5;
  std::size_t n_shot = 1;
  std::size_t n_query = 15;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpisodeItem {
  std::size_t item;   // index into the source FeatureSet
  std::size_t label;  // episode-local class, 0..k_way-1
  std::vector<double> features;
};

struct Episode {
  std::vector<std::size_t> classes;  // FeatureSet class index per local label
  std::vector<EpisodeItem> support;  // grouped by local label, n_shot each
  std::vector<EpisodeItem> query;    // grouped by local label, n_query each

  std::size_t way() const noexcept { return classes.size(); }
};

/// Per-episode generator seed: a 64-bit mix of (seed, index).
std::uint64_t episode_stream_seed(std::uint64_t seed, std::uint64_t episode_index) noexcept;

/// Draws k classes, then n_shot + n_query items per class, uniformly without
/// replacement; the first n_shot become support. Every class in the set must
/// hold at least n_shot + n_query items.
Episode sample_episode(const FeatureSet& set, const EpisodeSpec& spec, std::uint64_t episode_index);

enum class Metric { Euclidean, Cosine };

/// cos(a, b); throws ZeroPrototype if either side has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Class means of the support set, indexed by local label.
std::vector<std::vector<double>> prototypes(const Episode& episode);

/// Nearest prototype per query. Ties go to the lowest local label.
std::vector<std::size_t> prototype_classify(const Episode& episode, Metric metric);

struct CosineHeadConfig {
  int epochs = 100;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
};

/// Scores s_c = tau * cos(w_c, f) with w_c initialized at the class prototype.
class CosineHead {
 public:
  static constexpr double kTemperature = 10.0;

  explicit CosineHead(std::vector<std::vector<double>> weights) : weights_(std::move(weights)) {}

  std::size_t classes() const noexcept { return weights_.size(); }
  const std::vector<std::vector<double>>& weights() const noexcept { return weights_; }

  std::size_t predict(std::span<const double> features) const;

 private:
  std::vector<std::vector<double>> weights_;
};

/// Full-batch gradient descent on mean softmax cross-entropy over the support
/// set. The seed is recorded for reproducibility; initialization is the
/// deterministic prototype, so no random draws are made.
CosineHead finetune_cosine_head(std::span<const EpisodeItem> support, std::size_t way,
                                const CosineHeadConfig& cfg);

enum class ClassifierKind { ProtoEuclidean, ProtoCosine, CosineHead };

std::string_view to_string(ClassifierKind kind) noexcept;
ClassifierKind parse_classifier(std::string_view name);

/// Mean and 95% half-width, both in percent.
struct AccuracyReport {
  std::size_t episodes = 0;
  double mean_accuracy = 0.0;
  double half_width = 0.0;
};

/// 1.96 * s / sqrt(E) with the E-1 sample standard deviation. Inputs are
/// per-episode accuracies in [0, 1]; E >= 2. Compensated summation keeps the
/// result insensitive to input order.
AccuracyReport summarize_accuracies(std::span<const double> accuracies);

/// Fraction of correctly classified queries in one episode.
double episode_accuracy(const Episode& episode, ClassifierKind kind,
                        const CosineHeadConfig& head_cfg = {});

struct EvaluationOptions {
  ClassifierKind classifier = ClassifierKind::ProtoEuclidean;
  CosineHeadConfig head;
  /// Worker threads; 0 picks hardware concurrency. Results do not depend on it.
  unsigned threads = 1;
};

AccuracyReport evaluate_episodes(const FeatureSet& set, const EpisodeSpec& spec,
                                 std::size_t episodes, const EvaluationOptions& options,
                                 std::vector<double>* per_episode = nullptr);

}  // namespace freqfuse
