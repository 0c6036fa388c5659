#include "lunggan/volume.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lunggan {

namespace fs = std::filesystem;

int64_t Mask3D::count() const {
  int64_t n = 0;
  for (uint8_t v : data) n += (v != 0);
  return n;
}

void CtVolume::validate() const {
  int64_t n = shape[0] * shape[1] * shape[2];
  if (static_cast<int64_t>(hu.size()) != n) {
    throw IntegrityError("scan " + scan_id + ": HU grid size does not match its shape");
  }
  if (lung_mask.shape != shape) {
    throw IntegrityError("scan " + scan_id + ": lung mask shape does not match the HU grid");
  }
  if (nodule_mask.shape != shape) {
    throw IntegrityError("scan " + scan_id + ": nodule mask shape does not match the HU grid");
  }
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

struct MhdHeader {
  std::array<int64_t, 3> shape{0, 0, 0};  // z, y, x
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::string element_type;
  std::string data_file;       // "LOCAL" or a file name
  std::streampos data_offset;  // valid when data_file == "LOCAL"
};

MhdHeader read_mhd_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  MhdHeader h;
  bool have_dims = false;
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "NDims") {
      if (value != "3") throw LoadError(path.string() + ": only 3-D images are supported");
    } else if (key == "DimSize") {
      auto parts = split(value, ' ');
      std::vector<int64_t> dims;
      for (const auto& p : parts) {
        if (!trim(p).empty()) dims.push_back(std::stoll(trim(p)));
      }
      if (dims.size() != 3) throw LoadError(path.string() + ": DimSize must have 3 entries");
      // MetaImage orders dimensions fastest first (x y z).
      h.shape = {dims[2], dims[1], dims[0]};
      have_dims = true;
    } else if (key == "ElementSpacing") {
      auto parts = split(value, ' ');
      std::vector<double> sp;
      for (const auto& p : parts) {
        if (!trim(p).empty()) sp.push_back(std::stod(trim(p)));
      }
      if (sp.size() == 3) h.spacing = {sp[2], sp[1], sp[0]};
    } else if (key == "ElementType") {
      h.element_type = value;
    } else if (key == "BinaryData") {
      if (value != "True" && value != "true")
        throw LoadError(path.string() + ": only binary MetaImage payloads are supported");
    } else if (key == "BinaryDataByteOrderMSB" || key == "ElementByteOrderMSB") {
      if (value == "True" || value == "true")
        throw LoadError(path.string() + ": big-endian payloads are not supported");
    } else if (key == "CompressedData") {
      if (value == "True" || value == "true")
        throw LoadError(path.string() + ": compressed payloads are not supported");
    } else if (key == "ElementDataFile") {
      h.data_file = value;
      h.data_offset = in.tellg();
      break;
    }
  }
  if (!have_dims || h.element_type.empty() || h.data_file.empty()) {
    throw LoadError(path.string() + ": incomplete MetaImage header");
  }
  return h;
}

size_t element_size(const std::string& type) {
  if (type == "MET_UCHAR" || type == "MET_CHAR") return 1;
  if (type == "MET_SHORT" || type == "MET_USHORT") return 2;
  if (type == "MET_FLOAT" || type == "MET_INT" || type == "MET_UINT") return 4;
  if (type == "MET_DOUBLE") return 8;
  throw LoadError("unsupported MetaImage element type " + type);
}

std::vector<char> read_mhd_payload(const fs::path& path, const MhdHeader& h) {
  size_t bytes = static_cast<size_t>(h.shape[0] * h.shape[1] * h.shape[2]) *
                 element_size(h.element_type);
  std::vector<char> raw(bytes);
  if (h.data_file == "LOCAL") {
    std::ifstream in(path, std::ios::binary);
    in.seekg(h.data_offset);
    in.read(raw.data(), static_cast<std::streamsize>(bytes));
    if (static_cast<size_t>(in.gcount()) != bytes)
      throw LoadError(path.string() + ": truncated inline payload");
  } else {
    fs::path data_path = path.parent_path() / h.data_file;
    std::ifstream in(data_path, std::ios::binary);
    if (!in) throw LoadError("cannot open companion data file " + data_path.string());
    in.read(raw.data(), static_cast<std::streamsize>(bytes));
    if (static_cast<size_t>(in.gcount()) != bytes)
      throw LoadError(data_path.string() + ": truncated payload");
  }
  return raw;
}

template <typename T>
void convert_payload(const std::vector<char>& raw, std::vector<float>& out) {
  size_t n = raw.size() / sizeof(T);
  out.resize(n);
  const T* src = reinterpret_cast<const T*>(raw.data());
  for (size_t i = 0; i < n; ++i) out[i] = static_cast<float>(src[i]);
}

std::vector<float> payload_to_float(const std::vector<char>& raw, const std::string& type) {
  std::vector<float> out;
  if (type == "MET_UCHAR") convert_payload<uint8_t>(raw, out);
  else if (type == "MET_CHAR") convert_payload<int8_t>(raw, out);
  else if (type == "MET_SHORT") convert_payload<int16_t>(raw, out);
  else if (type == "MET_USHORT") convert_payload<uint16_t>(raw, out);
  else if (type == "MET_INT") convert_payload<int32_t>(raw, out);
  else if (type == "MET_UINT") convert_payload<uint32_t>(raw, out);
  else if (type == "MET_FLOAT") convert_payload<float>(raw, out);
  else if (type == "MET_DOUBLE") convert_payload<double>(raw, out);
  else throw LoadError("unsupported MetaImage element type " + type);
  return out;
}

void write_mhd(const fs::path& path, const std::array<int64_t, 3>& shape,
               std::array<double, 3> spacing, const std::string& element_type,
               const void* data, size_t bytes) {
  fs::path raw_path = path;
  raw_path.replace_extension(".raw");
  {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    out << "ObjectType = Image\n";
    out << "NDims = 3\n";
    out << "BinaryData = True\n";
    out << "BinaryDataByteOrderMSB = False\n";
    out << "CompressedData = False\n";
    out << "DimSize = " << shape[2] << " " << shape[1] << " " << shape[0] << "\n";
    out << "ElementSpacing = " << spacing[2] << " " << spacing[1] << " " << spacing[0] << "\n";
    out << "ElementType = " << element_type << "\n";
    out << "ElementDataFile = " << raw_path.filename().string() << "\n";
  }
  std::ofstream out(raw_path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + raw_path.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

}  // namespace

Volume3D read_mhd_volume(const fs::path& path, std::array<double, 3>* spacing_out) {
  MhdHeader h = read_mhd_header(path);
  auto raw = read_mhd_payload(path, h);
  Volume3D vol;
  vol.shape = h.shape;
  vol.data = payload_to_float(raw, h.element_type);
  if (spacing_out) *spacing_out = h.spacing;
  return vol;
}

void write_mhd_volume(const fs::path& path, const Volume3D& vol,
                      std::array<double, 3> spacing) {
  write_mhd(path, vol.shape, spacing, "MET_FLOAT", vol.data.data(),
            vol.data.size() * sizeof(float));
}

Mask3D read_mhd_mask(const fs::path& path) {
  std::array<double, 3> spacing;
  Volume3D vol = read_mhd_volume(path, &spacing);
  Mask3D mask;
  mask.shape = vol.shape;
  mask.data.resize(vol.data.size());
  for (size_t i = 0; i < vol.data.size(); ++i) mask.data[i] = vol.data[i] != 0.0f ? 1 : 0;
  return mask;
}

void write_mhd_mask(const fs::path& path, const Mask3D& mask,
                    std::array<double, 3> spacing) {
  write_mhd(path, mask.shape, spacing, "MET_UCHAR", mask.data.data(), mask.data.size());
}

Mask3D read_rle_mask(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::string magic;
  int64_t z = 0, y = 0, x = 0;
  in >> magic >> z >> y >> x;
  if (magic != "RLE3D" || !in || z <= 0 || y <= 0 || x <= 0) {
    throw LoadError(path.string() + ": not a run-length mask file");
  }
  Mask3D mask({z, y, x});
  int64_t total = mask.size();
  int64_t start = 0, length = 0, prev_end = 0;
  while (in >> start >> length) {
    if (start < prev_end || length <= 0 || start + length > total) {
      throw LoadError(path.string() + ": malformed run list");
    }
    std::fill(mask.data.begin() + start, mask.data.begin() + start + length, uint8_t{1});
    prev_end = start + length;
  }
  return mask;
}

void write_rle_mask(const fs::path& path, const Mask3D& mask) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "RLE3D " << mask.shape[0] << " " << mask.shape[1] << " " << mask.shape[2] << "\n";
  int64_t n = mask.size();
  int64_t i = 0;
  while (i < n) {
    if (!mask.data[i]) {
      ++i;
      continue;
    }
    int64_t start = i;
    while (i < n && mask.data[i]) ++i;
    out << start << " " << (i - start) << "\n";
  }
}

namespace {
constexpr char kVolMagic[8] = {'L', 'G', 'V', 'O', 'L', '0', '0', '1'};
}

Volume3D read_vol(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, kVolMagic, 8) != 0) {
    throw LoadError(path.string() + ": not a volume container file");
  }
  int64_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
    throw LoadError(path.string() + ": malformed volume header");
  }
  Volume3D vol({dims[0], dims[1], dims[2]});
  in.read(reinterpret_cast<char*>(vol.data.data()),
          static_cast<std::streamsize>(vol.data.size() * sizeof(float)));
  if (static_cast<size_t>(in.gcount()) != vol.data.size() * sizeof(float)) {
    throw LoadError(path.string() + ": truncated volume payload");
  }
  return vol;
}

void write_vol(const fs::path& path, const Volume3D& vol) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out.write(kVolMagic, 8);
  int64_t dims[3] = {vol.shape[0], vol.shape[1], vol.shape[2]};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(vol.data.data()),
            static_cast<std::streamsize>(vol.data.size() * sizeof(float)));
}

std::map<std::string, std::vector<NoduleAnnotation>> read_annotation_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::map<std::string, std::vector<NoduleAnnotation>> by_scan;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("scan_id,", 0) == 0) continue;  // header
    }
    auto cols = split(line, ',');
    if (cols.size() != 6) throw LoadError(path.string() + ": expected 6 columns, got line '" + line + "'");
    const std::string& scan_id = cols[0];
    const std::string& nodule_id = cols[1];
    std::array<int64_t, 3> voxel{std::stoll(cols[2]), std::stoll(cols[3]), std::stoll(cols[4])};
    auto& nodules = by_scan[scan_id];
    auto it = std::find_if(nodules.begin(), nodules.end(),
                           [&](const NoduleAnnotation& n) { return n.nodule_id == nodule_id; });
    if (it == nodules.end()) {
      NoduleAnnotation ann;
      ann.nodule_id = nodule_id;
      for (const auto& s : split(cols[5], ';')) {
        if (!trim(s).empty()) ann.malignancy_scores.push_back(std::stoi(trim(s)));
      }
      nodules.push_back(std::move(ann));
      it = std::prev(nodules.end());
    }
    it->voxels.push_back(voxel);
  }
  return by_scan;
}

void write_annotation_csv(const fs::path& path,
                          const std::map<std::string, std::vector<NoduleAnnotation>>& by_scan) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "scan_id,nodule_id,z,y,x,scores\n";
  for (const auto& [scan_id, nodules] : by_scan) {
    for (const auto& nodule : nodules) {
      std::string scores;
      for (size_t i = 0; i < nodule.malignancy_scores.size(); ++i) {
        if (i) scores += ';';
        scores += std::to_string(nodule.malignancy_scores[i]);
      }
      for (const auto& v : nodule.voxels) {
        out << scan_id << ',' << nodule.nodule_id << ',' << v[0] << ',' << v[1] << ','
            << v[2] << ',' << scores << "\n";
      }
    }
  }
}

std::vector<std::string> read_split_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty() && line[0] != '#') ids.push_back(line);
  }
  return ids;
}

void write_split_manifest(const fs::path& path, const std::vector<std::string>& scan_ids) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  for (const auto& id : scan_ids) out << id << "\n";
}

CtVolume load_ct_volume(const fs::path& mhd_path) {
  CtVolume vol;
  vol.scan_id = mhd_path.stem().string();
  Volume3D grid = read_mhd_volume(mhd_path, &vol.spacing);
  vol.shape = grid.shape;
  vol.hu = std::move(grid.data);

  fs::path stem = mhd_path.parent_path() / mhd_path.stem();
  fs::path mask_mhd = stem;
  mask_mhd += ".lungmask.mhd";
  fs::path mask_rle = stem;
  mask_rle += ".lungmask.rle";
  if (fs::exists(mask_mhd)) {
    vol.lung_mask = read_mhd_mask(mask_mhd);
  } else if (fs::exists(mask_rle)) {
    vol.lung_mask = read_rle_mask(mask_rle);
  } else {
    throw LoadError("scan " + vol.scan_id + ": missing lung mask companion (" +
                    mask_mhd.string() + " or " + mask_rle.string() + ")");
  }

  fs::path ann_own = stem;
  ann_own += ".annotations.csv";
  fs::path ann_shared = mhd_path.parent_path() / "annotations.csv";
  if (fs::exists(ann_own)) {
    auto by_scan = read_annotation_csv(ann_own);
    if (auto it = by_scan.find(vol.scan_id); it != by_scan.end()) {
      vol.annotations = std::move(it->second);
    }
  } else if (fs::exists(ann_shared)) {
    auto by_scan = read_annotation_csv(ann_shared);
    if (auto it = by_scan.find(vol.scan_id); it != by_scan.end()) {
      vol.annotations = std::move(it->second);
    }
  }

  vol.nodule_mask = Mask3D(vol.shape);
  for (const auto& nodule : vol.annotations) {
    for (const auto& v : nodule.voxels) {
      if (v[0] < 0 || v[1] < 0 || v[2] < 0 || v[0] >= vol.shape[0] ||
          v[1] >= vol.shape[1] || v[2] >= vol.shape[2]) {
        throw IntegrityError("scan " + vol.scan_id + ": nodule " + nodule.nodule_id +
                             " has a voxel outside the HU grid");
      }
      vol.nodule_mask.at(v[0], v[1], v[2]) = 1;
    }
  }

  vol.validate();
  return vol;
}

}  // namespace lunggan
