#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "freqfuse/dct.hpp"
#include "freqfuse/error.hpp"
#include "freqfuse/extract.hpp"
#include "freqfuse/featureio.hpp"
#include "freqfuse/features.hpp"
#include "freqfuse/fewshot.hpp"
#include "freqfuse/freqcube.hpp"
#include "freqfuse/image.hpp"
#include "freqfuse/synth.hpp"

namespace py = pybind11;
using namespace freqfuse;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using U8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

RgbImage to_image(const U8& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("image must be an (H, W, 3) uint8 array");
  const auto h = static_cast<std::size_t>(a.shape(0)), w = static_cast<std::size_t>(a.shape(1));
  return RgbImage(w, h, std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

py::array_t<std::uint8_t> from_image(const RgbImage& img) {
  py::array_t<std::uint8_t> out({img.height(), img.width(), std::size_t{3}});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const F64& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

Block to_block(const F64& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw py::value_error("block must be a square 2-D array");
  return Block(static_cast<std::size_t>(a.shape(0)), std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> from_block(const Block& b) {
  py::array_t<double> out({b.size(), b.size()});
  std::copy(b.values().begin(), b.values().end(), out.mutable_data());
  return out;
}

ChromaUpsampling parse_upsampling(const std::string& name) {
  if (name == "bilinear") return ChromaUpsampling::Bilinear;
  if (name == "nearest") return ChromaUpsampling::Nearest;
  throw Error(ErrorCode::BadConfig, "unknown upsampling '" + name + "'");
}

DctConfig dct_config(std::size_t image_size, std::size_t filter_size, const std::string& channels,
                     const std::string& upsampling) {
  return {image_size, filter_size, parse_channel_selection(channels), parse_upsampling(upsampling)};
}

FeatureDump make_dump(const std::string& branch, const std::vector<std::string>& item_ids,
                      const std::vector<std::string>& classes, const F64& values) {
  if (values.ndim() != 2) throw py::value_error("values must be a 2-D array");
  const auto rows = static_cast<std::size_t>(values.shape(0)), dim = static_cast<std::size_t>(values.shape(1));
  if (item_ids.size() != rows || classes.size() != rows)
    throw py::value_error("item_ids, classes and values must have the same number of rows");
  FeatureDump d{dim, parse_branch(branch), {}};
  for (std::size_t r = 0; r < rows; ++r)
    d.rows.push_back({item_ids[r], classes[r], std::vector<double>(values.data() + r * dim, values.data() + (r + 1) * dim)});
  d.validate();
  return d;
}

py::array_t<double> dump_values(const FeatureDump& d) {
  py::array_t<double> out({d.rows.size(), d.dim});
  double* p = out.mutable_data();
  for (const auto& row : d.rows) p = std::copy(row.values.begin(), row.values.end(), p);
  return out;
}

}  // namespace

PYBIND11_MODULE(_freqfuse, m) {
  m.doc() = "Spatial and frequency feature fusion for few-shot classification";

  py::register_exception<Error>(m, "FreqfuseError", PyExc_ValueError);

  m.def("dct_matrix", [](std::size_t n) {
    const DctMatrix t(n);
    py::array_t<double> out({n, n});
    std::copy(t.data().begin(), t.data().end(), out.mutable_data());
    return out;
  }, py::arg("n"));
  m.def("forward_dct_block", [](const F64& samples) {
    const Block b = to_block(samples);
    return from_block(forward_dct_block(b, DctMatrix(b.size())));
  }, py::arg("samples"), "D = T (M - 128) T^T");
  m.def("inverse_dct_block", [](const F64& coeffs) {
    const Block b = to_block(coeffs);
    return from_block(inverse_dct_block(b, DctMatrix(b.size())));
  }, py::arg("coeffs"), "M = T^T D T + 128");
  m.def("zigzag_index", &zigzag_index, py::arg("u"), py::arg("v"), py::arg("n"));

  m.def("dct_pipeline", [](const U8& image, std::size_t image_size, std::size_t filter_size,
                           const std::string& channels, const std::string& upsampling) {
    const auto cube = dct_pipeline(to_image(image), dct_config(image_size, filter_size, channels, upsampling));
    py::array_t<double> data({cube.channels(), cube.height(), cube.width()});
    std::copy(cube.data().begin(), cube.data().end(), data.mutable_data());
    std::vector<std::tuple<std::string, int, int>> labels;
    for (const auto& l : cube.labels()) labels.emplace_back(std::string(to_string(l.plane)), l.u, l.v);
    return py::make_tuple(data, labels);
  }, py::arg("image"), py::arg("image_size") = 448, py::arg("filter_size") = 8, py::arg("channels") = "top24",
     py::arg("upsampling") = "bilinear", "Returns (cube C x H x W, [(plane, u, v), ...]).");

  m.def("extract_features", [](const U8& image, const std::string& mode, std::size_t image_size,
                               std::size_t filter_size, const std::string& channels, const std::string& upsampling) {
    const ExtractConfig cfg{parse_extract_mode(mode), image_size,
                            dct_config(image_size, filter_size, channels, upsampling)};
    return to_array(extract_features(to_image(image), cfg).values());
  }, py::arg("image"), py::arg("mode") = "frequency", py::arg("image_size") = 448, py::arg("filter_size") = 8,
     py::arg("channels") = "top24", py::arg("upsampling") = "bilinear");

  m.def("l2_normalize", [](const F64& v) {
    return to_array(l2_normalize(FeatureVector(to_vector(v), Branch::Fused)).values());
  }, py::arg("v"));
  m.def("fuse", [](const F64& spatial, const F64& frequency) {
    return to_array(fuse(FeatureVector(to_vector(spatial), Branch::Spatial),
                         FeatureVector(to_vector(frequency), Branch::Frequency)).values());
  }, py::arg("spatial"), py::arg("frequency"));

  m.def("load_image", [](const std::filesystem::path& p) { return from_image(load_image(p)); }, py::arg("path"));

  py::class_<FeatureDump>(m, "FeatureDump")
      .def(py::init(&make_dump), py::arg("branch"), py::arg("item_ids"), py::arg("classes"), py::arg("values"))
      .def_property_readonly("dim", [](const FeatureDump& d) { return d.dim; })
      .def_property_readonly("branch", [](const FeatureDump& d) { return std::string(to_string(d.branch)); })
      .def_property_readonly("item_ids", [](const FeatureDump& d) {
        std::vector<std::string> out;
        for (const auto& r : d.rows) out.push_back(r.item_id);
        return out;
      })
      .def_property_readonly("classes", [](const FeatureDump& d) {
        std::vector<std::string> out;
        for (const auto& r : d.rows) out.push_back(r.class_name);
        return out;
      })
      .def_property_readonly("values", &dump_values)
      .def("__len__", [](const FeatureDump& d) { return d.rows.size(); })
      .def("__eq__", [](const FeatureDump& a, const FeatureDump& b) { return a == b; });

  m.def("read_dump", &read_dump, py::arg("path"));
  m.def("write_dump", &write_dump, py::arg("dump"), py::arg("path"));
  m.def("merge_dumps", &merge_dumps, py::arg("spatial"), py::arg("frequency"));

  m.def("summarize_accuracies", [](const std::vector<double>& acc) {
    const auto r = summarize_accuracies(acc);
    return py::make_tuple(r.mean_accuracy, r.half_width);
  }, py::arg("accuracies"), "Returns (mean %, 95% half-width %).");

  m.def("evaluate_episodes", [](const FeatureDump& dump, std::size_t way, std::size_t shot, std::size_t query,
                                std::size_t episodes, std::uint64_t seed, const std::string& classifier,
                                int head_epochs, double head_lr, unsigned threads) {
    const EpisodeSpec spec{way, shot, query, seed};
    const EvaluationOptions opts{parse_classifier(classifier), {head_epochs, head_lr, seed}, threads};
    AccuracyReport r;
    {
      py::gil_scoped_release release;
      r = evaluate_episodes(to_feature_set(dump), spec, episodes, opts);
    }
    py::dict out;
    out["episodes"] = r.episodes;
    out["mean"] = r.mean_accuracy;
    out["half_width"] = r.half_width;
    return out;
  }, py::arg("dump"), py::arg("way") = 5, py::arg("shot") = 1, py::arg("query") = 15, py::arg("episodes") = 600,
     py::arg("seed") = 0, py::arg("classifier") = "proto-euclid", py::arg("head_epochs") = 100,
     py::arg("head_lr") = 0.1, py::arg("threads") = 1);

  m.def("generate_synthetic", [](const std::string& preset, std::size_t classes, std::size_t per_class,
                                 std::size_t size, std::uint64_t seed) {
    const auto samples = generate_synthetic({parse_synth_preset(preset), classes, per_class, size, seed});
    py::list out;
    for (const auto& s : samples) out.append(py::make_tuple(s.item_id, s.class_name, from_image(s.image)));
    return out;
  }, py::arg("preset") = "mixed", py::arg("classes") = 10, py::arg("per_class") = 100, py::arg("size") = 112,
     py::arg("seed") = 0, "Returns [(item_id, class, image), ...].");
}
