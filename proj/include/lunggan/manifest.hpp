#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lunggan/config.hpp"

namespace lunggan {

// SHA-256 hex digest of a byte string.
std::string sha256_hex(const std::string& bytes);

// Provenance record written into every artifact directory: the command, the
// fully resolved configuration and its hash, the seed, and the artifacts the
// run produced. `rerun` reconstructs the invocation from this file.
struct RunManifest {
  std::string command;
  KeyValueConfig config;
  uint64_t seed = 0;
  std::vector<std::string> artifacts;  // paths relative to the manifest dir
  std::string version = kVersion;

  std::string config_hash() const { return sha256_hex(config.canonical_text()); }
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace lunggan
