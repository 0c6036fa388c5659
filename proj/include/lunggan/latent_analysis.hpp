#pragma once

#include <string>

#include "lunggan/embedding.hpp"
#include "lunggan/generator.hpp"
#include "lunggan/skeleton.hpp"

namespace lunggan {

// Draws `count` latents from `seed`, reduces them to 2-D and returns the
// embedding. space "z" uses raw latents for any family; space "w" passes
// them through the style mapping (style family only). Latents run through
// the mapping in chunks to bound memory.
LatentEmbedding embed_latents(Generator& generator, int64_t count, uint64_t seed,
                              const std::string& space, const std::string& reducer_spec,
                              int64_t chunk = 64);

// Generates the patch behind every embedded latent and labels the point with
// the branch-point count of its vessel skeleton. Patches are synthesized
// from embedding.latents (and embedding.space) in chunks.
void label_with_branch_counts(Generator& generator, LatentEmbedding& embedding,
                              float threshold, int64_t chunk = 16);

}  // namespace lunggan
