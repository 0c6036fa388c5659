#pragma once

#include <filesystem>

#include "lunggan/discriminator.hpp"
#include "lunggan/generator.hpp"

namespace lunggan {

struct CheckpointMeta {
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  int64_t epoch = 0;
  int64_t iteration = 0;
};

struct Checkpoint {
  CheckpointMeta meta;
  Generator generator;
  Discriminator discriminator;
};

// Binary container: magic "LGCKPT01", a little-endian u64 header length, a
// JSON header describing both models and every tensor (name, dtype, shape,
// payload offset), then the raw little-endian tensor payload. Parameters and
// buffers are stored verbatim, so a save/load round trip is bit exact.
void save_checkpoint(const std::filesystem::path& path, const Generator& generator,
                     const Discriminator& discriminator, const CheckpointMeta& meta);

// Rebuilds both models from the header configs and restores every tensor.
// Throws LoadError on container damage and IntegrityError when the stored
// tensors do not match the rebuilt modules.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lunggan
