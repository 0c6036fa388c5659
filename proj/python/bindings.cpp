#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lunggan/cli.hpp"
#include "lunggan/dataset.hpp"
#include "lunggan/interpolation.hpp"
#include "lunggan/minibatch.hpp"
#include "lunggan/roc.hpp"
#include "lunggan/skeleton.hpp"
#include "lunggan/stats.hpp"

namespace py = pybind11;
using namespace lunggan;

namespace {

std::vector<Patch> patches_from_array(const py::array_t<float, py::array::c_style>& arr) {
  if (arr.ndim() != 4) throw ArgumentError("expected a (n, d, h, w) float32 array");
  std::array<int64_t, 3> shape{arr.shape(1), arr.shape(2), arr.shape(3)};
  int64_t item = shape[0] * shape[1] * shape[2];
  const float* src = arr.data();
  std::vector<Patch> patches;
  patches.reserve(static_cast<size_t>(arr.shape(0)));
  for (int64_t i = 0; i < arr.shape(0); ++i) {
    Patch p(shape);
    std::copy(src + i * item, src + (i + 1) * item, p.data.begin());
    patches.push_back(std::move(p));
  }
  return patches;
}

py::array_t<float> patches_to_array(const std::vector<Patch>& patches) {
  if (patches.empty()) throw ArgumentError("no patches to pack");
  auto shape = patches.front().shape;
  py::array_t<float> arr({static_cast<int64_t>(patches.size()), shape[0], shape[1], shape[2]});
  float* dst = arr.mutable_data();
  int64_t item = shape[0] * shape[1] * shape[2];
  for (size_t i = 0; i < patches.size(); ++i) {
    std::copy(patches[i].data.begin(), patches[i].data.end(),
              dst + static_cast<int64_t>(i) * item);
  }
  return arr;
}

Mask3D mask_from_array(const py::array_t<uint8_t, py::array::c_style>& arr) {
  if (arr.ndim() != 3) throw ArgumentError("expected a (d, h, w) uint8 array");
  Mask3D mask({arr.shape(0), arr.shape(1), arr.shape(2)});
  std::copy(arr.data(), arr.data() + mask.size(), mask.data.begin());
  return mask;
}

py::array_t<uint8_t> mask_to_array(const Mask3D& mask) {
  py::array_t<uint8_t> arr({mask.shape[0], mask.shape[1], mask.shape[2]});
  std::copy(mask.data.begin(), mask.data.end(), arr.mutable_data());
  return arr;
}

Generator generator_from(const std::string& family, const std::string& width, uint64_t seed) {
  GeneratorConfig config;
  config.family = parse_family(family);
  config.width = Rational::parse(width);
  config.seed = seed;
  return build_generator(config);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "3-D adversarial synthesis and evaluation of healthy lung CT patches";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<LoadError>(m, "LoadError", PyExc_IOError);
  py::register_exception<IntegrityError>(m, "IntegrityError", PyExc_RuntimeError);

  m.def("version", [] { return std::string(kVersion); });

  m.def(
      "run_cli", [](const std::vector<std::string>& args) { return run_cli(args); },
      py::arg("args"), "run a command line invocation; returns the exit code");

  m.def(
      "phantom_patches",
      [](int64_t scan_count, int64_t per_scan, uint64_t seed) {
        PhantomDataset dataset(scan_count, seed);
        Rng rng(mix_seed(seed, "python-patches"));
        std::vector<Patch> all;
        for (const auto& id : dataset.scan_ids()) {
          for (auto& p : dataset.sample_patches(id, per_scan, rng)) {
            all.push_back(std::move(p));
          }
        }
        return patches_to_array(all);
      },
      py::arg("scan_count"), py::arg("per_scan"), py::arg("seed") = 7,
      "windowed lung patches drawn from synthetic chest phantoms, (n, d, h, w)");

  m.def(
      "generate",
      [](const std::string& family, const std::string& width, uint64_t seed, int64_t count) {
        auto generator = generator_from(family, width, seed);
        return patches_to_array(generator.generate(count, mix_seed(seed, "python-sample")));
      },
      py::arg("family"), py::arg("width") = "1", py::arg("seed") = 7, py::arg("count") = 4,
      "sample patches from a freshly initialized generator");

  m.def(
      "generator_parameter_count",
      [](const std::string& family, const std::string& width) {
        return generator_from(family, width, 7).parameter_count();
      },
      py::arg("family"), py::arg("width") = "1");

  m.def(
      "fid",
      [](const py::array_t<float, py::array::c_style>& real,
         const py::array_t<float, py::array::c_style>& fake, const std::string& extractor) {
        VectorPatchSource real_src(patches_from_array(real));
        VectorPatchSource fake_src(patches_from_array(fake));
        auto ex = make_extractor(extractor);
        int64_t n = std::min<int64_t>(real.shape(0), fake.shape(0));
        return compute_fid(real_src, fake_src, *ex, n).value;
      },
      py::arg("real"), py::arg("fake"), py::arg("extractor") = "pool2d:8",
      "distribution distance between two (n, d, h, w) patch stacks");

  m.def(
      "skeletonize",
      [](const py::array_t<float, py::array::c_style>& volume, float threshold) {
        if (volume.ndim() != 3) throw ArgumentError("expected a (d, h, w) float32 array");
        Volume3D vol({volume.shape(0), volume.shape(1), volume.shape(2)});
        std::copy(volume.data(), volume.data() + vol.size(), vol.data.begin());
        return mask_to_array(skeletonize(binarize(vol, threshold)));
      },
      py::arg("volume"), py::arg("threshold") = 0.0f,
      "threshold and thin a volume to its centerline skeleton");

  m.def(
      "branch_count",
      [](const py::array_t<uint8_t, py::array::c_style>& mask) {
        return count_branch_points(mask_from_array(mask)).count;
      },
      py::arg("skeleton"), "skeleton voxels with three or more skeleton neighbours");

  m.def(
      "roc_auc",
      [](const std::vector<int>& real, const std::vector<int>& fake) {
        return roc_auc(real, fake);
      },
      py::arg("real_counts"), py::arg("fake_counts"));

  m.def(
      "welch",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        auto r = welch_t_test(a, b);
        return py::make_tuple(r.t, r.df, r.p);
      },
      py::arg("a"), py::arg("b"), "(t, df, p) of the unequal-variance t-test");

  m.def(
      "mdmin",
      [](const py::array_t<float, py::array::c_style>& features) {
        if (features.ndim() != 2) throw ArgumentError("expected a (n, d) float32 array");
        auto t = torch::from_blob(const_cast<float*>(features.data()),
                                  {features.shape(0), features.shape(1)}, torch::kFloat32)
                     .clone();
        auto scores = mdmin_scores(t).contiguous();
        py::array_t<float> out(scores.size(0));
        std::copy(scores.data_ptr<float>(), scores.data_ptr<float>() + scores.size(0),
                  out.mutable_data());
        return out;
      },
      py::arg("features"), "per-row L1 distance to the nearest other row");

  m.def(
      "select_redundant",
      [](const py::array_t<float, py::array::c_style>& features, int64_t keep) {
        if (features.ndim() != 2) throw ArgumentError("expected a (n, d) float32 array");
        auto t = torch::from_blob(const_cast<float*>(features.data()),
                                  {features.shape(0), features.shape(1)}, torch::kFloat32)
                     .clone();
        return largeebs_select_from(t, keep);
      },
      py::arg("features"), py::arg("keep"),
      "indices of the rows most crowded by near-duplicates");

  m.def(
      "slerp_path",
      [](const std::vector<double>& a, const std::vector<double>& b, int steps) {
        Eigen::VectorXd va = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
        Eigen::VectorXd vb = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
        auto path = interpolation_path(va, vb, steps, /*spherical=*/true);
        py::array_t<double> out({static_cast<int64_t>(path.size()),
                                 static_cast<int64_t>(va.size())});
        double* dst = out.mutable_data();
        for (size_t i = 0; i < path.size(); ++i) {
          for (int64_t j = 0; j < va.size(); ++j) dst[i * va.size() + j] = path[i](j);
        }
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("steps") = 8,
      "great-circle interpolation path between two vectors, inclusive");
}
