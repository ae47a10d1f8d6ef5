#include "freqfuse/features.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_map>

#include "freqfuse/error.hpp"

namespace freqfuse {

std::string_view to_string(Branch branch) noexcept {
  switch (branch) {
    case Branch::Spatial: return "spatial";
    case Branch::Frequency: return "frequency";
    case Branch::Fused: return "fused";
  }
  return "unknown";
}

Branch parse_branch(std::string_view name) {
  if (name == "spatial") return Branch::Spatial;
  if (name == "frequency") return Branch::Frequency;
  if (name == "fused") return Branch::Fused;
  throw Error(ErrorCode::BranchMismatch, "unknown branch '" + std::string(name) + "'");
}

FeatureVector::FeatureVector(std::vector<double> values, Branch branch)
    : values_(std::move(values)), branch_(branch) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "feature vector holds a non-finite value");
  }
}

namespace {

// Two-pass mean and population standard deviation.
std::pair<double, double> mean_std(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

}  // namespace

FeatureVector pool_statistics(const FrequencyCube& cube) {
  if (cube.channels() == 0 || cube.height() == 0 || cube.width() == 0) {
    throw Error(ErrorCode::EmptyCube, "cannot pool an empty cube");
  }
  std::vector<double> out;
  out.reserve(2 * cube.channels());
  for (std::size_t ch = 0; ch < cube.channels(); ++ch) {
    const auto [m, s] = mean_std(cube.channel(ch));
    out.push_back(m);
    out.push_back(s);
  }
  return FeatureVector(std::move(out), Branch::Frequency);
}

FeatureVector pool_statistics(const RgbImage& img) {
  if (img.empty()) throw Error(ErrorCode::EmptyCube, "cannot pool an empty image");
  std::vector<double> out;
  std::vector<double> chan(img.width() * img.height());
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < chan.size(); ++i) chan[i] = img.pixels()[i * 3 + c];
    const auto [m, s] = mean_std(chan);
    out.push_back(m);
    out.push_back(s);
  }
  return FeatureVector(std::move(out), Branch::Spatial);
}

double l2_norm(std::span<const double> v) noexcept {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  return std::sqrt(ss);
}

FeatureVector l2_normalize(const FeatureVector& v) {
  const double norm = l2_norm(v.values());
  if (norm <= 1e-12) return v;
  std::vector<double> out(v.values().begin(), v.values().end());
  for (double& x : out) x /= norm;
  return FeatureVector(std::move(out), v.branch());
}

FeatureVector fuse(const FeatureVector& spatial, const FeatureVector& frequency) {
  if (spatial.branch() != Branch::Spatial || frequency.branch() != Branch::Frequency) {
    throw Error(ErrorCode::BranchMismatch, "fuse expects (spatial, frequency), got (" +
                                               std::string(to_string(spatial.branch())) + ", " +
                                               std::string(to_string(frequency.branch())) + ")");
  }
  const auto s = l2_normalize(spatial);
  const auto f = l2_normalize(frequency);
  std::vector<double> out(s.values().begin(), s.values().end());
  out.insert(out.end(), f.values().begin(), f.values().end());
  return FeatureVector(std::move(out), Branch::Fused);
}

// --- linear probe -----------------------------------------------------------

namespace {

void logits_into(const LinearProbe& probe, std::span<const double> x, std::vector<double>& out) {
  const std::size_t k = probe.classes();
  out.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    double acc = probe.bias[c];
    const double* w = probe.weights.data() + c * probe.dim;
    for (std::size_t j = 0; j < probe.dim; ++j) acc += w[j] * x[j];
    out[c] = acc;
  }
}

// In-place softmax; returns log-sum-exp.
double softmax(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return mx + std::log(sum);
}

void check_dim(const LinearProbe& probe, const FeatureVector& v) {
  if (v.dim() != probe.dim) {
    throw Error(ErrorCode::DimMismatch, "feature dim " + std::to_string(v.dim()) +
                                            " vs probe dim " + std::to_string(probe.dim));
  }
}

}  // namespace

ProbeGradient probe_loss_and_gradient(const LinearProbe& probe,
                                      std::span<const FeatureVector> features,
                                      std::span<const std::size_t> labels) {
  if (features.size() != labels.size() || features.empty()) {
    throw Error(ErrorCode::DimMismatch, "features and labels must be non-empty and equally long");
  }
  const std::size_t k = probe.classes();
  ProbeGradient g{0.0, std::vector<double>(probe.weights.size(), 0.0), std::vector<double>(k, 0.0)};
  std::vector<double> z;
  for (std::size_t i = 0; i < features.size(); ++i) {
    check_dim(probe, features[i]);
    const auto x = features[i].values();
    logits_into(probe, x, z);
    const double true_logit = z[labels[i]];
    g.loss += softmax(z) - true_logit;
    z[labels[i]] -= 1.0;
    for (std::size_t c = 0; c < k; ++c) {
      g.bias[c] += z[c];
      double* gw = g.weights.data() + c * probe.dim;
      for (std::size_t j = 0; j < probe.dim; ++j) gw[j] += z[c] * x[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(features.size());
  g.loss *= inv;
  for (double& v : g.weights) v *= inv;
  for (double& v : g.bias) v *= inv;
  return g;
}

LinearProbe train_linear_probe(std::span<const FeatureVector> features,
                               std::span<const std::string> labels, const ProbeConfig& cfg,
                               std::vector<double>* loss_trace) {
  if (features.size() != labels.size()) {
    throw Error(ErrorCode::DimMismatch, "features and labels differ in length");
  }
  if (cfg.epochs < 1) throw Error(ErrorCode::BadConfig, "epochs must be >= 1");

  LinearProbe probe;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> ids;
  ids.reserve(labels.size());
  for (const auto& name : labels) {
    auto [it, inserted] = index.emplace(name, probe.class_names.size());
    if (inserted) probe.class_names.push_back(name);
    ids.push_back(it->second);
  }
  if (probe.classes() < 2) throw Error(ErrorCode::SingleClass, "training needs at least two classes");

  probe.dim = features.front().dim();
  for (const auto& f : features) {
    if (f.dim() != probe.dim) throw Error(ErrorCode::DimMismatch, "feature dims differ across the batch");
  }

  std::mt19937_64 rng(cfg.seed);
  probe.weights.resize(probe.classes() * probe.dim);
  for (double& w : probe.weights) {
    // 53-bit uniform in [0, 1), portable across standard libraries.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    w = -0.01 + 0.02 * u;
  }
  probe.bias.assign(probe.classes(), 0.0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto g = probe_loss_and_gradient(probe, features, ids);
    if (!std::isfinite(g.loss)) throw Error(ErrorCode::NonFinite, "probe loss diverged");
    if (loss_trace) loss_trace->push_back(g.loss);
    for (std::size_t i = 0; i < probe.weights.size(); ++i) probe.weights[i] -= cfg.learning_rate * g.weights[i];
    for (std::size_t c = 0; c < probe.bias.size(); ++c) probe.bias[c] -= cfg.learning_rate * g.bias[c];
  }
  return probe;
}

FeatureVector embed(const LinearProbe& probe, const FeatureVector& v) {
  check_dim(probe, v);
  std::vector<double> z;
  logits_into(probe, v.values(), z);
  return FeatureVector(std::move(z), v.branch());
}

std::size_t predict(const LinearProbe& probe, const FeatureVector& v) {
  const auto z = embed(probe, v);
  const auto vals = z.values();
  return static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
}

}  // namespace freqfuse
