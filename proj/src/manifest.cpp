#include "lunggan/manifest.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace lunggan {

namespace {

// Standard SHA-256 over a byte buffer.
struct Sha256 {
  uint32_t state[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                       0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  uint64_t total = 0;
  uint8_t buffer[64];
  size_t buffered = 0;

  static uint32_t rotr(uint32_t v, int n) { return (v >> n) | (v << (32 - n)); }

  void process(const uint8_t* block) {
    static constexpr uint32_t k[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    uint32_t w[64];
    for (int i = 0; i < 16; ++i) {
      w[i] = (uint32_t(block[i * 4]) << 24) | (uint32_t(block[i * 4 + 1]) << 16) |
             (uint32_t(block[i * 4 + 2]) << 8) | uint32_t(block[i * 4 + 3]);
    }
    for (int i = 16; i < 64; ++i) {
      uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    uint32_t a = state[0], b = state[1], c = state[2], d = state[3];
    uint32_t e = state[4], f = state[5], g = state[6], h = state[7];
    for (int i = 0; i < 64; ++i) {
      uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      uint32_t ch = (e & f) ^ (~e & g);
      uint32_t t1 = h + s1 + ch + k[i] + w[i];
      uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      uint32_t t2 = s0 + maj;
      h = g; g = f; f = e; e = d + t1;
      d = c; c = b; b = a; a = t1 + t2;
    }
    state[0] += a; state[1] += b; state[2] += c; state[3] += d;
    state[4] += e; state[5] += f; state[6] += g; state[7] += h;
  }

  void update(const uint8_t* data, size_t len) {
    total += len;
    while (len > 0) {
      size_t take = std::min(len, sizeof(buffer) - buffered);
      std::memcpy(buffer + buffered, data, take);
      buffered += take;
      data += take;
      len -= take;
      if (buffered == sizeof(buffer)) {
        process(buffer);
        buffered = 0;
      }
    }
  }

  std::array<uint8_t, 32> finish() {
    uint64_t bit_len = total * 8;
    uint8_t pad = 0x80;
    update(&pad, 1);
    uint8_t zero = 0;
    while (buffered != 56) update(&zero, 1);
    uint8_t len_bytes[8];
    for (int i = 0; i < 8; ++i) len_bytes[i] = static_cast<uint8_t>(bit_len >> (56 - 8 * i));
    update(len_bytes, 8);
    std::array<uint8_t, 32> digest;
    for (int i = 0; i < 8; ++i) {
      digest[i * 4] = static_cast<uint8_t>(state[i] >> 24);
      digest[i * 4 + 1] = static_cast<uint8_t>(state[i] >> 16);
      digest[i * 4 + 2] = static_cast<uint8_t>(state[i] >> 8);
      digest[i * 4 + 3] = static_cast<uint8_t>(state[i]);
    }
    return digest;
  }
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Sha256 hasher;
  hasher.update(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size());
  auto digest = hasher.finish();
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (uint8_t b : digest) {
    out += hex[b >> 4];
    out += hex[b & 0xf];
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["version"] = manifest.version;
  j["seed"] = manifest.seed;
  j["config_hash"] = manifest.config_hash();
  j["config"] = nlohmann::json::object();
  for (const auto& [k, v] : manifest.config.entries()) j["config"][k] = v;
  j["artifacts"] = manifest.artifacts;
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  RunManifest manifest;
  try {
    manifest.command = j.at("command").get<std::string>();
    manifest.version = j.value("version", std::string(kVersion));
    manifest.seed = j.at("seed").get<uint64_t>();
    for (const auto& [k, v] : j.at("config").items()) {
      manifest.config.set(k, v.get<std::string>());
    }
    if (j.contains("artifacts")) {
      manifest.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    }
    std::string stored_hash = j.value("config_hash", "");
    if (!stored_hash.empty() && stored_hash != manifest.config_hash()) {
      throw IntegrityError(path.string() + ": config hash does not match the stored config");
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return manifest;
}

}  // namespace lunggan
