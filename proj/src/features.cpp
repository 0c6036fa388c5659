#include "lunggan/features.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace lunggan {

namespace fs = std::filesystem;

ImageBatch ImageBatch::from_slices(const std::vector<Image2D>& slices) {
  if (slices.empty()) throw ArgumentError("cannot pack an empty slice batch");
  ImageBatch batch;
  batch.rank = 2;
  batch.shape = {static_cast<int64_t>(slices.size()), slices[0].height, slices[0].width, 0};
  batch.data.reserve(slices.size() * slices[0].data.size());
  for (const auto& s : slices) {
    if (s.height != slices[0].height || s.width != slices[0].width) {
      throw ArgumentError("slice batch items must share one shape");
    }
    batch.data.insert(batch.data.end(), s.data.begin(), s.data.end());
  }
  return batch;
}

ImageBatch ImageBatch::from_patches(const std::vector<Patch>& patches) {
  if (patches.empty()) throw ArgumentError("cannot pack an empty patch batch");
  ImageBatch batch;
  batch.rank = 3;
  batch.shape = {static_cast<int64_t>(patches.size()), patches[0].shape[0],
                 patches[0].shape[1], patches[0].shape[2]};
  batch.data.reserve(patches.size() * patches[0].data.size());
  for (const auto& p : patches) {
    if (p.shape != patches[0].shape) {
      throw ArgumentError("patch batch items must share one shape");
    }
    batch.data.insert(batch.data.end(), p.data.begin(), p.data.end());
  }
  return batch;
}

namespace {

void check_rank(const ImageBatch& batch, int expected, const std::string& name) {
  if (batch.rank != expected) {
    throw ArgumentError("extractor " + name + " expects rank-" + std::to_string(expected) +
                        " input, got rank " + std::to_string(batch.rank));
  }
}

}  // namespace

MeanPool2dExtractor::MeanPool2dExtractor(int grid) : grid_(grid) {
  if (grid < 1) throw ArgumentError("pooling grid must be at least 1");
}

ExtractorInfo MeanPool2dExtractor::info() const {
  return {"pool2d:" + std::to_string(grid_), 2, static_cast<int64_t>(grid_) * grid_};
}

Eigen::MatrixXd MeanPool2dExtractor::extract(const ImageBatch& batch) const {
  check_rank(batch, 2, "pool2d");
  int64_t n = batch.shape[0], h = batch.shape[1], w = batch.shape[2];
  Eigen::MatrixXd out(n, static_cast<int64_t>(grid_) * grid_);
  for (int64_t i = 0; i < n; ++i) {
    const float* item = batch.data.data() + i * h * w;
    for (int gy = 0; gy < grid_; ++gy) {
      int64_t y0 = h * gy / grid_, y1 = h * (gy + 1) / grid_;
      for (int gx = 0; gx < grid_; ++gx) {
        int64_t x0 = w * gx / grid_, x1 = w * (gx + 1) / grid_;
        double sum = 0.0;
        for (int64_t y = y0; y < y1; ++y)
          for (int64_t x = x0; x < x1; ++x) sum += item[y * w + x];
        double cells = static_cast<double>((y1 - y0) * (x1 - x0));
        out(i, gy * grid_ + gx) = cells > 0 ? sum / cells : 0.0;
      }
    }
  }
  return out;
}

MeanPool3dExtractor::MeanPool3dExtractor(int grid) : grid_(grid) {
  if (grid < 1) throw ArgumentError("pooling grid must be at least 1");
}

ExtractorInfo MeanPool3dExtractor::info() const {
  return {"pool3d:" + std::to_string(grid_), 3,
          static_cast<int64_t>(grid_) * grid_ * grid_};
}

Eigen::MatrixXd MeanPool3dExtractor::extract(const ImageBatch& batch) const {
  check_rank(batch, 3, "pool3d");
  int64_t n = batch.shape[0], d = batch.shape[1], h = batch.shape[2], w = batch.shape[3];
  Eigen::MatrixXd out(n, static_cast<int64_t>(grid_) * grid_ * grid_);
  for (int64_t i = 0; i < n; ++i) {
    const float* item = batch.data.data() + i * d * h * w;
    for (int gz = 0; gz < grid_; ++gz) {
      int64_t z0 = d * gz / grid_, z1 = d * (gz + 1) / grid_;
      for (int gy = 0; gy < grid_; ++gy) {
        int64_t y0 = h * gy / grid_, y1 = h * (gy + 1) / grid_;
        for (int gx = 0; gx < grid_; ++gx) {
          int64_t x0 = w * gx / grid_, x1 = w * (gx + 1) / grid_;
          double sum = 0.0;
          for (int64_t z = z0; z < z1; ++z)
            for (int64_t y = y0; y < y1; ++y)
              for (int64_t x = x0; x < x1; ++x) sum += item[(z * h + y) * w + x];
          double cells = static_cast<double>((z1 - z0) * (y1 - y0) * (x1 - x0));
          out(i, (gz * grid_ + gy) * grid_ + gx) = cells > 0 ? sum / cells : 0.0;
        }
      }
    }
  }
  return out;
}

LinearProjectionExtractor::LinearProjectionExtractor(int rank, Eigen::MatrixXd projection,
                                                     std::string name)
    : rank_(rank), projection_(std::move(projection)), name_(std::move(name)) {
  if (rank_ != 2 && rank_ != 3) throw ArgumentError("projection rank must be 2 or 3");
}

ExtractorInfo LinearProjectionExtractor::info() const {
  return {name_, rank_, projection_.rows()};
}

Eigen::MatrixXd LinearProjectionExtractor::extract(const ImageBatch& batch) const {
  check_rank(batch, rank_, name_);
  int64_t n = batch.shape[0];
  int64_t item = batch.item_size();
  if (item != projection_.cols()) {
    throw ArgumentError("projection expects " + std::to_string(projection_.cols()) +
                        " inputs per item, got " + std::to_string(item));
  }
  Eigen::MatrixXd flat(n, item);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < item; ++j) flat(i, j) = batch.data[i * item + j];
  return flat * projection_.transpose();
}

std::unique_ptr<FeatureExtractor> make_extractor(const std::string& spec) {
  std::vector<std::string> parts;
  {
    std::string cur;
    for (char c : spec) {
      if (c == ':') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
  }
  const std::string& kind = parts[0];
  auto arg = [&](size_t i) -> std::string { return parts.size() > i ? parts[i] : ""; };
  try {
    if (kind == "pool2d") {
      return std::make_unique<MeanPool2dExtractor>(arg(1).empty() ? 8 : std::stoi(arg(1)));
    }
    if (kind == "pool3d") {
      return std::make_unique<MeanPool3dExtractor>(arg(1).empty() ? 4 : std::stoi(arg(1)));
    }
    if (kind == "proj2d" || kind == "proj3d") {
      if (arg(1).empty()) throw ValidationError("extractor", kind + " needs a matrix file");
      return std::make_unique<LinearProjectionExtractor>(
          kind == "proj2d" ? 2 : 3, read_matrix(arg(1)), spec);
    }
    if (kind == "ts2d" || kind == "ts3d") {
      if (arg(1).empty()) throw ValidationError("extractor", kind + " needs a network file");
      int64_t size = arg(2).empty() ? 0 : std::stoll(arg(2));
      int64_t channels = arg(3).empty() ? (kind == "ts2d" && size > 0 ? 3 : 1) : std::stoll(arg(3));
      return make_torchscript_extractor(arg(1), kind == "ts2d" ? 2 : 3, size, channels);
    }
  } catch (const std::logic_error&) {
    throw ValidationError("extractor", "malformed extractor spec '" + spec + "'");
  }
  throw ValidationError("extractor", "unknown extractor spec '" + spec + "'");
}

VectorPatchSource::VectorPatchSource(std::vector<Patch> patches)
    : patches_(std::move(patches)) {}

int64_t VectorPatchSource::next(std::vector<Patch>& out, int64_t want) {
  int64_t given = 0;
  while (given < want && cursor_ < patches_.size()) {
    out.push_back(patches_[cursor_++]);
    ++given;
  }
  return given;
}

void VectorPatchSource::reset() { cursor_ = 0; }

DirectoryPatchSource::DirectoryPatchSource(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw LoadError(dir.string() + " is not a directory");
  for (const auto& entry : fs::directory_iterator(dir)) {
    auto ext = entry.path().extension().string();
    if (ext == ".vol" || ext == ".mhd") files_.push_back(entry.path());
  }
  std::sort(files_.begin(), files_.end());
}

int64_t DirectoryPatchSource::next(std::vector<Patch>& out, int64_t want) {
  int64_t given = 0;
  while (given < want && cursor_ < files_.size()) {
    const auto& f = files_[cursor_++];
    out.push_back(f.extension() == ".vol" ? read_vol(f) : read_mhd_volume(f));
    ++given;
  }
  return given;
}

void DirectoryPatchSource::reset() { cursor_ = 0; }

Eigen::MatrixXd extract_features(PatchSource& source, const FeatureExtractor& extractor,
                                 int64_t n, int64_t batch) {
  if (n < 2) throw ArgumentError("feature extraction needs at least two patches");
  if (batch < 1) throw ArgumentError("batch size must be positive");
  ExtractorInfo info = extractor.info();
  Eigen::MatrixXd features(n, info.feature_dim);
  int64_t done = 0;
  std::vector<Patch> patches;
  while (done < n) {
    patches.clear();
    int64_t got = source.next(patches, std::min(batch, n - done));
    if (got == 0) {
      throw LoadError("patch source exhausted after " + std::to_string(done) + " of " +
                      std::to_string(n) + " patches");
    }
    Eigen::MatrixXd rows;
    if (info.input_rank == 2) {
      std::vector<Image2D> slices;
      slices.reserve(patches.size());
      for (const auto& p : patches) slices.push_back(central_slice(p));
      rows = extractor.extract(ImageBatch::from_slices(slices));
    } else {
      rows = extractor.extract(ImageBatch::from_patches(patches));
    }
    features.middleRows(done, got) = rows;
    done += got;
  }
  return features;
}

FidResult compute_fid(PatchSource& real, PatchSource& fake,
                      const FeatureExtractor& extractor, int64_t n, int64_t batch) {
  Eigen::MatrixXd real_features = extract_features(real, extractor, n, batch);
  Eigen::MatrixXd fake_features = extract_features(fake, extractor, n, batch);
  FidResult result;
  result.value = frechet_distance(gaussian_stats(real_features), gaussian_stats(fake_features));
  result.n_real = real_features.rows();
  result.n_fake = fake_features.rows();
  result.extractor = extractor.info();
  return result;
}

namespace {
constexpr char kMatMagic[8] = {'L', 'G', 'M', 'A', 'T', '0', '0', '1'};
}

Eigen::MatrixXd read_matrix(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, kMatMagic, 8) != 0) {
    throw LoadError(path.string() + ": not a matrix container file");
  }
  int64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || dims[0] <= 0 || dims[1] <= 0) {
    throw LoadError(path.string() + ": malformed matrix header");
  }
  Eigen::MatrixXd m(dims[0], dims[1]);
  std::vector<double> row(static_cast<size_t>(dims[1]));
  for (int64_t r = 0; r < dims[0]; ++r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (static_cast<size_t>(in.gcount()) != row.size() * sizeof(double)) {
      throw LoadError(path.string() + ": truncated matrix payload");
    }
    for (int64_t c = 0; c < dims[1]; ++c) m(r, c) = row[static_cast<size_t>(c)];
  }
  return m;
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out.write(kMatMagic, 8);
  int64_t dims[2] = {m.rows(), m.cols()};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  std::vector<double> row(static_cast<size_t>(m.cols()));
  for (int64_t r = 0; r < m.rows(); ++r) {
    for (int64_t c = 0; c < m.cols(); ++c) row[static_cast<size_t>(c)] = m(r, c);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
}

}  // namespace lunggan
