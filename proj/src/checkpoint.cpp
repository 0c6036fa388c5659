#include "lunggan/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include <json.hpp>

namespace lunggan {

namespace {

constexpr char kMagic[8] = {'L', 'G', 'C', 'K', 'P', 'T', '0', '1'};

std::string dtype_name(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return "float32";
    case torch::kFloat64: return "float64";
    case torch::kInt64: return "int64";
    default: break;
  }
  throw ArgumentError("checkpoint cannot store dtype " + std::string(torch::toString(t)));
}

torch::ScalarType dtype_from_name(const std::string& name) {
  if (name == "float32") return torch::kFloat32;
  if (name == "float64") return torch::kFloat64;
  if (name == "int64") return torch::kInt64;
  throw LoadError("checkpoint header names unknown dtype '" + name + "'");
}

// Stable flat view of a module's state: parameters under p/, buffers under b/.
std::map<std::string, torch::Tensor> state_tensors(const torch::nn::Module& module) {
  std::map<std::string, torch::Tensor> out;
  for (const auto& item : module.named_parameters(/*recurse=*/true)) {
    out["p/" + item.key()] = item.value();
  }
  for (const auto& item : module.named_buffers(/*recurse=*/true)) {
    out["b/" + item.key()] = item.value();
  }
  return out;
}

nlohmann::json generator_json(const GeneratorConfig& c) {
  return {{"family", family_name(c.family)}, {"width", c.width.str()}, {"seed", c.seed}};
}

nlohmann::json discriminator_json(const DiscriminatorConfig& c) {
  return {{"use_mdmin", c.use_mdmin}, {"width", c.width.str()}, {"seed", c.seed}};
}

GeneratorConfig generator_from_json(const nlohmann::json& j) {
  GeneratorConfig c;
  c.family = parse_family(j.at("family").get<std::string>());
  c.width = Rational::parse(j.at("width").get<std::string>());
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

DiscriminatorConfig discriminator_from_json(const nlohmann::json& j) {
  DiscriminatorConfig c;
  c.use_mdmin = j.at("use_mdmin").get<bool>();
  c.width = Rational::parse(j.at("width").get<std::string>());
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

void write_u64(std::ostream& out, uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

uint64_t read_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Generator& generator,
                     const Discriminator& discriminator, const CheckpointMeta& meta) {
  std::map<std::string, torch::Tensor> tensors;
  for (auto& [name, t] : state_tensors(*generator.module())) tensors["g/" + name] = t;
  for (auto& [name, t] : state_tensors(*discriminator.module())) tensors["d/" + name] = t;

  nlohmann::json header;
  header["version"] = kVersion;
  header["generator"] = generator_json(meta.generator);
  header["discriminator"] = discriminator_json(meta.discriminator);
  header["epoch"] = meta.epoch;
  header["iteration"] = meta.iteration;

  uint64_t offset = 0;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [name, t] : tensors) {
    auto flat = t.detach().contiguous();
    uint64_t bytes = static_cast<uint64_t>(flat.numel()) * flat.element_size();
    entries.push_back({{"name", name},
                       {"dtype", dtype_name(flat.scalar_type())},
                       {"shape", std::vector<int64_t>(t.sizes().begin(), t.sizes().end())},
                       {"offset", offset},
                       {"bytes", bytes}});
    offset += bytes;
  }
  header["tensors"] = entries;

  std::string header_text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot open checkpoint for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, header_text.size());
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& [name, t] : tensors) {
    auto flat = t.detach().contiguous();
    out.write(static_cast<const char*>(flat.data_ptr()),
              static_cast<std::streamsize>(flat.numel() * flat.element_size()));
  }
  if (!out) throw LoadError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw LoadError("not a checkpoint container: " + path.string());
  }
  uint64_t header_size = read_u64(in);
  std::string header_text(header_size, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_size));
  if (!in) throw LoadError("truncated checkpoint header: " + path.string());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("bad checkpoint header in " + path.string() + ": " + e.what());
  }

  Checkpoint result;
  try {
    result.meta.generator = generator_from_json(header.at("generator"));
    result.meta.discriminator = discriminator_from_json(header.at("discriminator"));
    result.meta.epoch = header.at("epoch").get<int64_t>();
    result.meta.iteration = header.at("iteration").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("bad checkpoint header in " + path.string() + ": " + e.what());
  }
  result.generator = build_generator(result.meta.generator);
  result.discriminator = build_discriminator(result.meta.discriminator);

  std::map<std::string, torch::Tensor> live;
  for (auto& [name, t] : state_tensors(*result.generator.module())) live["g/" + name] = t;
  for (auto& [name, t] : state_tensors(*result.discriminator.module())) live["d/" + name] = t;

  auto payload_start = static_cast<std::streamoff>(sizeof(kMagic) + 8 + header_size);
  size_t restored = 0;
  torch::NoGradGuard no_grad;
  for (const auto& entry : header.at("tensors")) {
    std::string name = entry.at("name").get<std::string>();
    auto it = live.find(name);
    if (it == live.end()) {
      throw IntegrityError("checkpoint tensor '" + name + "' has no destination");
    }
    auto shape = entry.at("shape").get<std::vector<int64_t>>();
    auto dtype = dtype_from_name(entry.at("dtype").get<std::string>());
    auto stored = torch::empty(shape, torch::dtype(dtype));
    uint64_t bytes = entry.at("bytes").get<uint64_t>();
    if (bytes != static_cast<uint64_t>(stored.numel()) * stored.element_size()) {
      throw IntegrityError("checkpoint tensor '" + name + "' has inconsistent byte count");
    }
    in.seekg(payload_start + static_cast<std::streamoff>(entry.at("offset").get<uint64_t>()));
    in.read(static_cast<char*>(stored.data_ptr()), static_cast<std::streamsize>(bytes));
    if (!in) throw LoadError("truncated checkpoint payload: " + path.string());
    if (it->second.sizes() != stored.sizes() || it->second.scalar_type() != dtype) {
      throw IntegrityError("checkpoint tensor '" + name +
                           "' does not match the rebuilt module");
    }
    it->second.copy_(stored);
    ++restored;
  }
  if (restored != live.size()) {
    throw IntegrityError("checkpoint restored " + std::to_string(restored) + " of " +
                         std::to_string(live.size()) + " module tensors");
  }
  return result;
}

}  // namespace lunggan
