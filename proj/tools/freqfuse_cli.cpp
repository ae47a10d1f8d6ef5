// freqfuse: frequency-domain feature extraction, fusion and episodic
// few-shot evaluation from the command line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freqfuse/binary.hpp"
#include "freqfuse/error.hpp"
#include "freqfuse/extract.hpp"
#include "freqfuse/featureio.hpp"
#include "freqfuse/fewshot.hpp"
#include "freqfuse/freqcube.hpp"
#include "freqfuse/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace freqfuse;

namespace {

enum ExitStatus { kOk = 0, kUsage = 2, kDataError = 3, kNumericError = 4 };

int exit_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadConfig:
    case ErrorCode::BadEpisodeSpec:
    case ErrorCode::BadBlockSize:
    case ErrorCode::OddTarget:
    case ErrorCode::SelectionTooLarge:
      return kUsage;
    default:
      return is_numeric(code) ? kNumericError : kDataError;
  }
}

ChromaUpsampling parse_upsampling(const std::string& name) {
  if (name == "bilinear") return ChromaUpsampling::Bilinear;
  if (name == "nearest") return ChromaUpsampling::Nearest;
  throw Error(ErrorCode::BadConfig, "unknown upsampling '" + name + "'");
}

std::string format_accuracy(double mean, double half_width) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << mean << " +- " << half_width;
  return os.str();
}

// Outputs a command produced; removed again if the command fails.
class OutputTracker {
 public:
  void file(const fs::path& p) {
    if (!fs::exists(p)) fresh_.push_back(p);
    outputs_.push_back(p);
  }
  void directory(const fs::path& p) {
    if (!fs::exists(p)) fresh_.push_back(p);
    outputs_.push_back(p);
  }
  void discard() const {
    std::error_code ec;
    for (const auto& p : fresh_) fs::remove_all(p, ec);
  }
  const std::vector<fs::path>& outputs() const { return outputs_; }

 private:
  std::vector<fs::path> outputs_;
  std::vector<fs::path> fresh_;
};

struct Options {
  // extract / cube
  std::string manifest, root = ".", mode, channels = "top24", upsampling = "bilinear", out, image;
  std::size_t image_size = 448, filter_size = 8;
  unsigned threads = 1;
  // fuse
  std::string spatial, frequency;
  // episodes
  std::string features, classifier = "proto-euclid", report;
  std::size_t way = 5, shot = 1, query = 15, episodes = 600;
  int head_epochs = 100;
  double head_lr = 0.1;
  std::uint64_t seed = 0;
  // synth
  std::string preset = "mixed";
  std::size_t classes = 10, per_class = 100, size = 112;
  // inspect / replay
  std::string dump, record;
  bool no_record = false;
};

ExtractConfig extract_config(const Options& o) {
  ExtractConfig cfg;
  cfg.mode = parse_extract_mode(o.mode);
  cfg.image_size = o.image_size;
  cfg.dct.s_image = o.image_size;
  cfg.dct.s_dct = o.filter_size;
  cfg.dct.selection = parse_channel_selection(o.channels);
  cfg.dct.upsampling = parse_upsampling(o.upsampling);
  return cfg;
}

void cmd_extract(const Options& o, OutputTracker& outputs) {
  const auto cfg = extract_config(o);
  const auto manifest = load_manifest(o.manifest);
  const auto dump = extract_dataset(manifest, o.root, cfg, o.threads);
  outputs.file(o.out);
  write_dump(dump, o.out);
  std::cout << "extracted " << dump.rows.size() << " rows, dim " << dump.dim << ", branch "
            << to_string(dump.branch) << " -> " << o.out << '\n';
}

void cmd_cube(const Options& o, OutputTracker& outputs) {
  DctConfig cfg;
  cfg.s_image = o.image_size;
  cfg.s_dct = o.filter_size;
  cfg.selection = parse_channel_selection(o.channels);
  cfg.upsampling = parse_upsampling(o.upsampling);
  const auto cube = dct_pipeline(load_image(o.image), cfg);
  outputs.file(o.out);
  write_cube(cube, o.out);
  std::cout << "cube " << cube.channels() << "x" << cube.height() << "x" << cube.width() << " -> " << o.out
            << '\n';
}

void cmd_fuse(const Options& o, OutputTracker& outputs) {
  const auto fused = merge_dumps(read_dump(o.spatial), read_dump(o.frequency));
  outputs.file(o.out);
  write_dump(fused, o.out);
  std::cout << "fused " << fused.rows.size() << " rows, dim " << fused.dim << " -> " << o.out << '\n';
}

void cmd_episodes(const Options& o, OutputTracker& outputs) {
  const auto dump = read_dump(o.features);
  std::optional<DatasetManifest> manifest;
  if (!o.manifest.empty()) manifest = load_manifest(o.manifest);
  const auto set = to_feature_set(dump, [&](const std::string& cls) {
    if (!manifest) return true;
    const Split* s = manifest->split_of(cls);
    return s != nullptr && *s == Split::Novel;
  });

  const EpisodeSpec spec{o.way, o.shot, o.query, o.seed};
  EvaluationOptions eval;
  eval.classifier = parse_classifier(o.classifier);
  eval.head = {o.head_epochs, o.head_lr, o.seed};
  eval.threads = o.threads;
  const auto report = evaluate_episodes(set, spec, o.episodes, eval);

  json j;
  j["way"] = o.way;
  j["shot"] = o.shot;
  j["query"] = o.query;
  j["episodes"] = report.episodes;
  j["classifier"] = o.classifier;
  j["mean"] = report.mean_accuracy;
  j["half_width"] = report.half_width;
  j["seed"] = o.seed;
  j["feature_dim"] = dump.dim;
  j["branch"] = std::string(to_string(dump.branch));
  const std::string text = j.dump(2) + "\n";
  outputs.file(o.report);
  write_file_atomically(o.report, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));

  std::cout << std::left << std::setw(14) << "classifier" << std::setw(10) << "branch" << std::right
            << std::setw(5) << "way" << std::setw(6) << "shot" << std::setw(7) << "query" << std::setw(10)
            << "episodes" << "  accuracy (%)\n";
  std::cout << std::left << std::setw(14) << o.classifier << std::setw(10) << to_string(dump.branch)
            << std::right << std::setw(5) << o.way << std::setw(6) << o.shot << std::setw(7) << o.query
            << std::setw(10) << report.episodes << "  " << format_accuracy(report.mean_accuracy, report.half_width)
            << '\n';
}

void cmd_synth(const Options& o, OutputTracker& outputs) {
  SynthConfig cfg{parse_synth_preset(o.preset), o.classes, o.per_class, o.size, o.seed};
  const auto samples = generate_synthetic(cfg);
  outputs.directory(o.out);
  const auto manifest = write_synthetic_dataset(samples, o.out);
  std::cout << "wrote " << manifest.size() << " images in " << cfg.classes << " classes to " << o.out << '\n';
}

void cmd_inspect(const Options& o) {
  const auto dump = read_dump(o.dump);
  std::map<std::string, std::size_t> per_class;
  double lo = INFINITY, hi = -INFINITY, sum = 0.0, norm_sum = 0.0;
  for (const auto& r : dump.rows) {
    ++per_class[r.class_name];
    double ss = 0.0;
    for (double v : r.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      ss += v * v;
    }
    norm_sum += std::sqrt(ss);
  }
  std::cout << "format   FSFD v" << kFsfdVersion << '\n'
            << "branch   " << to_string(dump.branch) << '\n'
            << "dim      " << dump.dim << '\n'
            << "rows     " << dump.rows.size() << '\n'
            << "classes  " << per_class.size() << '\n';
  if (!dump.rows.empty() && dump.dim > 0) {
    const double n = static_cast<double>(dump.rows.size());
    std::cout << "min      " << lo << '\n'
              << "max      " << hi << '\n'
              << "mean     " << sum / (n * static_cast<double>(dump.dim)) << '\n'
              << "row norm " << norm_sum / n << " (mean L2)\n";
  }
  for (const auto& [name, count] : per_class) std::cout << "  " << name << ": " << count << '\n';
}

json config_snapshot(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help") continue;
    const auto& res = opt->results();
    std::string key = opt->get_name();
    key.erase(0, key.find_first_not_of('-'));
    cfg[key] = res.empty() ? opt->get_default_str() : res.back();
  }
  return cfg;
}

void write_record(const fs::path& path, const std::vector<std::string>& args, const std::string& command,
                  const json& config, std::optional<std::uint64_t> seed, const OutputTracker& outputs,
                  double seconds) {
  json rec;
  rec["tool"] = "freqfuse";
  rec["argv"] = args;
  rec["command"] = command;
  rec["config"] = config;
  rec["seed"] = seed ? json(*seed) : json(nullptr);
  json outs = json::array();
  for (const auto& p : outputs.outputs()) {
    json o{{"path", p.string()}};
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) o["bytes"] = fs::file_size(p, ec);
    outs.push_back(o);
  }
  rec["outputs"] = outs;
  rec["wall_time_seconds"] = seconds;
  std::ofstream(path) << rec.dump(2) << '\n';
}

int run(std::vector<std::string> args);

int cmd_replay(const Options& o) {
  std::ifstream in(o.dump);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open record " + o.dump);
  json rec;
  try {
    rec = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, o.dump + ": " + e.what());
  }
  if (!rec.contains("argv") || !rec["argv"].is_array()) throw Error(ErrorCode::CorruptFile, o.dump + ": no argv");
  auto args = rec["argv"].get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") throw Error(ErrorCode::BadConfig, "refusing to replay a replay");
  return run(std::move(args));
}

int run(std::vector<std::string> args) {
  CLI::App app{"Frequency-domain features, fusion and few-shot episodic evaluation", "freqfuse"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--record", o.record, "Run record path (default: next to the primary output)");
  app.add_flag("--no-record", o.no_record, "Do not write a run record");

  auto* extract = app.add_subcommand("extract", "Extract pooled branch features for every manifest image");
  extract->add_option("--manifest", o.manifest, "CSV manifest (path,class,split)")->required();
  extract->add_option("--root", o.root, "Image root directory")->capture_default_str();
  extract->add_option("--mode", o.mode, "spatial or frequency")->required();
  extract->add_option("--image-size", o.image_size, "Working image side")->capture_default_str();
  extract->add_option("--filter-size", o.filter_size, "DCT block size")->capture_default_str();
  extract->add_option("--channels", o.channels, "top24, all or square:a,b")->capture_default_str();
  extract->add_option("--upsampling", o.upsampling, "Chroma upsampling: bilinear or nearest")->capture_default_str();
  extract->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  extract->add_option("--out", o.out, "Output FSFD dump")->required();

  auto* cube = app.add_subcommand("cube", "Dump the frequency cube of one image (FQC1)");
  cube->add_option("--image", o.image, "PNG or PPM image")->required();
  cube->add_option("--image-size", o.image_size, "Working image side")->capture_default_str();
  cube->add_option("--filter-size", o.filter_size, "DCT block size")->capture_default_str();
  cube->add_option("--channels", o.channels, "top24, all or square:a,b")->capture_default_str();
  cube->add_option("--upsampling", o.upsampling, "bilinear or nearest")->capture_default_str();
  cube->add_option("--out", o.out, "Output cube file")->required();

  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse spatial and frequency dumps");
  fuse_cmd->add_option("--spatial", o.spatial, "Spatial FSFD dump")->required();
  fuse_cmd->add_option("--frequency", o.frequency, "Frequency FSFD dump")->required();
  fuse_cmd->add_option("--out", o.out, "Output fused dump")->required();

  auto* episodes = app.add_subcommand("episodes", "Evaluate k-way n-shot episodes");
  episodes->add_option("--features", o.features, "FSFD dump")->required();
  episodes->add_option("--manifest", o.manifest, "Restrict to classes of the novel split");
  episodes->add_option("--way", o.way)->capture_default_str();
  episodes->add_option("--shot", o.shot)->capture_default_str();
  episodes->add_option("--query", o.query)->capture_default_str();
  episodes->add_option("--episodes", o.episodes)->capture_default_str();
  episodes->add_option("--classifier", o.classifier, "proto-euclid, proto-cosine or cosine-head")
      ->capture_default_str();
  episodes->add_option("--head-epochs", o.head_epochs, "Cosine-head fine-tuning epochs")->capture_default_str();
  episodes->add_option("--head-lr", o.head_lr, "Cosine-head learning rate")->capture_default_str();
  episodes->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  episodes->add_option("--seed", o.seed, "Root seed")->required();
  episodes->add_option("--report", o.report, "JSON report path")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--preset", o.preset, "gratings, colors or mixed")->capture_default_str();
  synth->add_option("--classes", o.classes)->capture_default_str();
  synth->add_option("--per-class", o.per_class)->capture_default_str();
  synth->add_option("--size", o.size)->capture_default_str();
  synth->add_option("--seed", o.seed)->required();
  synth->add_option("--out", o.out, "Output directory")->required();

  auto* inspect = app.add_subcommand("inspect", "Print header and row statistics of a dump");
  inspect->add_option("--dump", o.dump, "FSFD dump")->required();

  auto* replay = app.add_subcommand("replay", "Re-run the command stored in a run record");
  replay->add_option("record", o.dump, "Run record JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (name == "replay") return cmd_replay(o);

  OutputTracker outputs;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (name == "extract") cmd_extract(o, outputs);
    else if (name == "cube") cmd_cube(o, outputs);
    else if (name == "fuse") cmd_fuse(o, outputs);
    else if (name == "episodes") cmd_episodes(o, outputs);
    else if (name == "synth") cmd_synth(o, outputs);
    else if (name == "inspect") cmd_inspect(o);
  } catch (...) {
    outputs.discard();
    throw;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!o.no_record) {
    fs::path record = o.record;
    if (record.empty() && !outputs.outputs().empty()) {
      const fs::path& primary = outputs.outputs().front();
      record = name == "synth" ? primary / "run.json" : fs::path(primary.string() + ".run.json");
    }
    const bool seeded = name == "episodes" || name == "synth";
    if (!record.empty()) {
      write_record(record, args, name, config_snapshot(sub), seeded ? std::optional(o.seed) : std::nullopt, outputs,
                   seconds);
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(std::move(args));
  } catch (const Error& e) {
    std::cerr << "freqfuse: error: " << e.what() << '\n';
    return exit_status_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "freqfuse: error: " << e.what() << '\n';
    return kDataError;
  }
}
