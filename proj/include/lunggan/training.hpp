#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "lunggan/checkpoint.hpp"
#include "lunggan/dataset.hpp"
#include "lunggan/discriminator.hpp"
#include "lunggan/generator.hpp"
#include "lunggan/losses.hpp"
#include "lunggan/minibatch.hpp"

namespace lunggan {

struct TrainConfig {
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  GanLoss loss = GanLoss::Relativistic;
  int64_t batch_size = 48;
  int epochs = 20;
  int64_t max_iterations = 0;  // hard stop after this many minibatches; 0 = no cap
  double lr_generator = 1e-4;
  double lr_discriminator = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  bool use_largeebs = false;
  int64_t ebs_candidates = 192;
  int ebs_warmup_epochs = 5;
  int ebs_tap_layer = 4;
  double mixing_prob = 0.9;  // per-sample style mixing chance, style family only
  uint64_t seed = 7;
  std::string fid_extractor = "pool2d:8";
  int64_t fid_samples = 10000;
  int minibatches_per_scan = kMinibatchesPerScan;
  std::filesystem::path out_dir;  // empty = train in memory, write nothing
  bool write_images = true;
};

// Throws ValidationError carrying the dotted config key of the bad field.
void validate_train_config(const TrainConfig& config);

struct EpochMetrics {
  int epoch = 0;
  int64_t iterations = 0;  // cumulative minibatches at the end of this epoch
  double d_loss = 0.0;     // epoch means
  double g_loss = 0.0;
  double fid = 0.0;
  int64_t selections = 0;  // redundancy-selection passes run this epoch
  std::string checkpoint;  // file name inside out_dir, empty when not written
};

struct TrainResult {
  Generator generator;
  Discriminator discriminator;
  std::vector<EpochMetrics> epochs;
  // One row per scan visit: {iteration, d_loss, g_loss}.
  std::vector<std::array<double, 3>> loss_trace;
  int64_t iterations = 0;
  int64_t selections = 0;
  std::filesystem::path out_dir;
};

// Deterministic adversarial training driven entirely by config.seed: epoch
// order, patch draws, latents, selection and mixing decisions all come from
// seeded streams. Each epoch ends with a checkpoint, a pooled-feature
// distribution distance against real patches, and refreshed metrics.csv /
// loss_trace.csv / losses.png artifacts (when out_dir is set). Non-finite
// losses raise TrainingDivergedError.
TrainResult train_gan(PatchDataset& dataset, const TrainConfig& config);

// Numeric column of a metrics CSV by header name; throws LoadError on
// missing file/column or non-numeric cells.
std::vector<double> read_csv_column(const std::filesystem::path& csv,
                                    const std::string& column);

// Path of the epoch checkpoint with the lowest recorded distribution
// distance in <run_dir>/metrics.csv.
std::filesystem::path select_best_model(const std::filesystem::path& run_dir);

struct BestModel {
  std::filesystem::path checkpoint;  // lowest-value epoch of the winning run
  double min_value = 0.0;
  size_t run_index = 0;
  std::vector<double> per_run_minima;  // one minimum per run directory
};

// Global argmin of a metrics column across several run directories; ties
// resolve to the earliest (run, epoch). The per-run minima feed significance
// tests between method groups.
BestModel select_best_model(const std::vector<std::filesystem::path>& run_dirs,
                            const std::string& column = "fid");

}  // namespace lunggan
