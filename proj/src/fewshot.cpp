#include "freqfuse/fewshot.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "freqfuse/error.hpp"

namespace freqfuse {

void FeatureSet::add(std::string_view class_name, std::span<const double> values) {
  if (values.size() != dim_) {
    throw Error(ErrorCode::DimMismatch, "feature dim " + std::to_string(values.size()) +
                                            " vs set dim " + std::to_string(dim_));
  }
  auto it = std::find(class_names_.begin(), class_names_.end(), class_name);
  const auto cls = static_cast<std::size_t>(it - class_names_.begin());
  if (it == class_names_.end()) {
    class_names_.emplace_back(class_name);
    members_.emplace_back();
  }
  members_[cls].push_back(labels_.size());
  labels_.push_back(cls);
  values_.insert(values_.end(), values.begin(), values.end());
}

void EpisodeSpec::validate() const {
  if (k_way < 2 || n_shot < 1 || n_query < 1) {
    throw Error(ErrorCode::BadEpisodeSpec, "need way >= 2, shot >= 1, query >= 1");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Unbiased draw from [0, bound) by rejection; mt19937_64 output is fixed by
// the standard, distributions are not.
std::size_t uniform_below(std::mt19937_64& rng, std::size_t bound) {
  const std::uint64_t b = bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % b;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % b);
}

// First `count` entries of `pool` become a uniform sample without replacement.
void partial_shuffle(std::vector<std::size_t>& pool, std::size_t count, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
  }
}

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Cosine argmax with lowest-index tie breaking; shared by the prototype
// classifier and the cosine head so an untrained head agrees with it exactly.
std::size_t cosine_argmax(std::span<const double> query, const std::vector<std::vector<double>>& centers) {
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double s = cosine_similarity(query, centers[c]);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

}  // namespace

std::uint64_t episode_stream_seed(std::uint64_t seed, std::uint64_t episode_index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(episode_index + 0x632be59bd9b4e019ULL));
}

Episode sample_episode(const FeatureSet& set, const EpisodeSpec& spec, std::uint64_t episode_index) {
  spec.validate();
  if (set.class_count() < spec.k_way) {
    throw Error(ErrorCode::NotEnoughClasses, std::to_string(set.class_count()) + " classes available, " +
                                                 std::to_string(spec.k_way) + " requested");
  }
  const std::size_t per_class = spec.n_shot + spec.n_query;
  for (std::size_t c = 0; c < set.class_count(); ++c) {
    if (set.items_of(c).size() < per_class) {
      throw Error(ErrorCode::NotEnoughItems, "class '" + set.class_names()[c] + "' has " +
                                                 std::to_string(set.items_of(c).size()) + " items, needs " +
                                                 std::to_string(per_class));
    }
  }

  std::mt19937_64 rng(episode_stream_seed(spec.seed, episode_index));
  std::vector<std::size_t> class_pool(set.class_count());
  for (std::size_t i = 0; i < class_pool.size(); ++i) class_pool[i] = i;
  partial_shuffle(class_pool, spec.k_way, rng);

  Episode ep;
  ep.classes.assign(class_pool.begin(), class_pool.begin() + static_cast<std::ptrdiff_t>(spec.k_way));
  ep.support.reserve(spec.k_way * spec.n_shot);
  ep.query.reserve(spec.k_way * spec.n_query);
  for (std::size_t local = 0; local < spec.k_way; ++local) {
    std::vector<std::size_t> items = set.items_of(ep.classes[local]);
    partial_shuffle(items, per_class, rng);
    for (std::size_t i = 0; i < per_class; ++i) {
      const auto f = set.features(items[i]);
      EpisodeItem entry{items[i], local, std::vector<double>(f.begin(), f.end())};
      (i < spec.n_shot ? ep.support : ep.query).push_back(std::move(entry));
    }
  }
  return ep;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroPrototype, "cosine similarity with a zero vector");
  return dot(a, b) / (na * nb);
}

std::vector<std::vector<double>> prototypes(const Episode& episode) {
  const std::size_t dim = episode.support.empty() ? 0 : episode.support.front().features.size();
  std::vector<std::vector<double>> protos(episode.way(), std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(episode.way(), 0);
  for (const auto& s : episode.support) {
    if (s.features.size() != dim) throw Error(ErrorCode::DimMismatch, "support features differ in dim");
    for (std::size_t j = 0; j < dim; ++j) protos[s.label][j] += s.features[j];
    ++counts[s.label];
  }
  for (std::size_t c = 0; c < protos.size(); ++c) {
    if (counts[c] == 0) throw Error(ErrorCode::NotEnoughItems, "class without support items");
    for (double& v : protos[c]) v /= static_cast<double>(counts[c]);
  }
  return protos;
}

std::vector<std::size_t> prototype_classify(const Episode& episode, Metric metric) {
  const auto protos = prototypes(episode);
  std::vector<std::size_t> out;
  out.reserve(episode.query.size());
  for (const auto& q : episode.query) {
    if (metric == Metric::Cosine) {
      out.push_back(cosine_argmax(q.features, protos));
      continue;
    }
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < protos.size(); ++c) {
      const double d = squared_distance(q.features, protos[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    out.push_back(best);
  }
  return out;
}

std::size_t CosineHead::predict(std::span<const double> features) const {
  return cosine_argmax(features, weights_);
}

CosineHead finetune_cosine_head(std::span<const EpisodeItem> support, std::size_t way,
                                const CosineHeadConfig& cfg) {
  if (cfg.epochs < 0) throw Error(ErrorCode::BadConfig, "epochs must be >= 0");
  std::vector<bool> present(way, false);
  for (const auto& s : support) {
    if (s.label >= way) throw Error(ErrorCode::BadEpisodeSpec, "support label outside [0, way)");
    present[s.label] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2) {
    throw Error(ErrorCode::SingleClass, "cosine head needs support from at least two classes");
  }

  Episode tmp;
  tmp.classes.resize(way);
  tmp.support.assign(support.begin(), support.end());
  auto w = prototypes(tmp);
  const std::size_t dim = w.front().size();
  constexpr double tau = CosineHead::kTemperature;

  std::vector<double> fnorms;
  for (const auto& s : support) {
    const double n = norm(s.features);
    if (n == 0.0) throw Error(ErrorCode::ZeroPrototype, "zero-norm support feature");
    fnorms.push_back(n);
  }

  std::vector<double> cos(way), p(way), wnorm(way);
  std::vector<std::vector<double>> grad(way, std::vector<double>(dim));
  const double inv_n = 1.0 / static_cast<double>(support.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t c = 0; c < way; ++c) {
      wnorm[c] = norm(w[c]);
      if (wnorm[c] == 0.0) throw Error(ErrorCode::ZeroPrototype, "zero-norm class weight");
      std::fill(grad[c].begin(), grad[c].end(), 0.0);
    }
    for (std::size_t i = 0; i < support.size(); ++i) {
      const auto& f = support[i].features;
      for (std::size_t c = 0; c < way; ++c) cos[c] = dot(w[c], f) / (wnorm[c] * fnorms[i]);
      const double mx = tau * *std::max_element(cos.begin(), cos.end());
      double z = 0.0;
      for (std::size_t c = 0; c < way; ++c) z += (p[c] = std::exp(tau * cos[c] - mx));
      for (std::size_t c = 0; c < way; ++c) {
        const double delta = (p[c] / z - (c == support[i].label ? 1.0 : 0.0)) * tau * inv_n;
        // d cos(w, f) / dw = f / (|w||f|) - cos * w / |w|^2
        const double a = delta / (wnorm[c] * fnorms[i]);
        const double b = delta * cos[c] / (wnorm[c] * wnorm[c]);
        for (std::size_t j = 0; j < dim; ++j) grad[c][j] += a * f[j] - b * w[c][j];
      }
    }
    for (std::size_t c = 0; c < way; ++c) {
      for (std::size_t j = 0; j < dim; ++j) w[c][j] -= cfg.learning_rate * grad[c][j];
    }
  }
  return CosineHead(std::move(w));
}

std::string_view to_string(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::ProtoEuclidean: return "proto-euclid";
    case ClassifierKind::ProtoCosine: return "proto-cosine";
    case ClassifierKind::CosineHead: return "cosine-head";
  }
  return "unknown";
}

ClassifierKind parse_classifier(std::string_view name) {
  if (name == "proto-euclid") return ClassifierKind::ProtoEuclidean;
  if (name == "proto-cosine") return ClassifierKind::ProtoCosine;
  if (name == "cosine-head") return ClassifierKind::CosineHead;
  throw Error(ErrorCode::BadConfig, "unknown classifier '" + std::string(name) + "'");
}

AccuracyReport summarize_accuracies(std::span<const double> accuracies) {
  const std::size_t e = accuracies.size();
  if (e < 2) throw Error(ErrorCode::TooFewEpisodes, "a confidence interval needs at least 2 episodes");
  CompensatedSum sum;
  for (double a : accuracies) sum.add(a);
  const double mean = sum.value() / static_cast<double>(e);
  CompensatedSum ss;
  for (double a : accuracies) ss.add((a - mean) * (a - mean));
  const double sd = std::sqrt(ss.value() / static_cast<double>(e - 1));
  return {e, 100.0 * mean, 100.0 * 1.96 * sd / std::sqrt(static_cast<double>(e))};
}

double episode_accuracy(const Episode& episode, ClassifierKind kind, const CosineHeadConfig& head_cfg) {
  std::vector<std::size_t> predicted;
  switch (kind) {
    case ClassifierKind::ProtoEuclidean:
      predicted = prototype_classify(episode, Metric::Euclidean);
      break;
    case ClassifierKind::ProtoCosine:
      predicted = prototype_classify(episode, Metric::Cosine);
      break;
    case ClassifierKind::CosineHead: {
      const auto head = finetune_cosine_head(episode.support, episode.way(), head_cfg);
      for (const auto& q : episode.query) predicted.push_back(head.predict(q.features));
      break;
    }
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == episode.query[i].label;
  return static_cast<double>(correct) / static_cast<double>(episode.query.size());
}

AccuracyReport evaluate_episodes(const FeatureSet& set, const EpisodeSpec& spec, std::size_t episodes,
                                 const EvaluationOptions& options, std::vector<double>* per_episode) {
  if (episodes < 2) throw Error(ErrorCode::TooFewEpisodes, "evaluation needs at least 2 episodes");
  spec.validate();
  std::vector<double> acc(episodes, 0.0);
  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, episodes));

  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned worker) {
    try {
      for (std::size_t i = worker; i < episodes; i += threads) {
        acc[i] = episode_accuracy(sample_episode(set, spec, i), options.classifier, options.head);
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  if (per_episode) *per_episode = acc;
  return summarize_accuracies(acc);
}

}  // namespace freqfuse
