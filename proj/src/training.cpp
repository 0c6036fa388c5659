#include "lunggan/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lunggan/image_io.hpp"

namespace lunggan {

void validate_train_config(const TrainConfig& config) {
  if (config.batch_size < 2) {
    throw ValidationError("train.batch_size", "needs at least 2 samples per minibatch");
  }
  if (config.epochs < 1) throw ValidationError("train.epochs", "must be positive");
  if (config.max_iterations < 0) {
    throw ValidationError("train.max_iterations", "must be >= 0 (0 disables the cap)");
  }
  if (!(config.lr_generator > 0)) {
    throw ValidationError("train.lr_generator", "must be positive");
  }
  if (!(config.lr_discriminator > 0)) {
    throw ValidationError("train.lr_discriminator", "must be positive");
  }
  for (auto [value, key] : {std::pair<double, const char*>{config.adam_beta1, "train.adam_beta1"},
                            {config.adam_beta2, "train.adam_beta2"}}) {
    if (!(value >= 0.0 && value < 1.0)) {
      throw ValidationError(key, "must lie in [0, 1)");
    }
  }
  if (config.use_largeebs && config.ebs_candidates < config.batch_size) {
    throw ValidationError("train.ebs_candidates",
                          "must be at least train.batch_size when selection is enabled");
  }
  if (config.ebs_warmup_epochs < 0) {
    throw ValidationError("train.ebs_warmup_epochs", "must be >= 0");
  }
  if (config.ebs_tap_layer < 1 || config.ebs_tap_layer > 4) {
    throw ValidationError("train.ebs_tap_layer", "must lie in 1..4");
  }
  if (!(config.mixing_prob >= 0.0 && config.mixing_prob <= 1.0)) {
    throw ValidationError("train.mixing_prob", "must lie in [0, 1]");
  }
  if (config.fid_samples < 2) {
    throw ValidationError("eval.fid_samples", "needs at least 2 samples per side");
  }
  if (config.minibatches_per_scan < 1) {
    throw ValidationError("train.minibatches_per_scan", "must be positive");
  }
  make_extractor(config.fid_extractor);  // throws ValidationError on a bad spec
}

namespace {

double epoch_fid(PatchDataset& dataset, Generator& generator, const TrainConfig& config,
                 int epoch) {
  auto extractor = make_extractor(config.fid_extractor);
  Rng real_rng(mix_seed(config.seed, "eval-real"));
  VectorPatchSource real(draw_patches(dataset, config.fid_samples, real_rng));
  VectorPatchSource fake(generator.generate(
      config.fid_samples, mix_seed(config.seed, "eval-fake-" + std::to_string(epoch))));
  return compute_fid(real, fake, *extractor, config.fid_samples).value;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<EpochMetrics>& rows) {
  std::ofstream out(path);
  out << "epoch,iterations,d_loss,g_loss,fid,selections,checkpoint\n";
  for (const auto& r : rows) {
    char line[256];
    std::snprintf(line, sizeof(line), "%d,%lld,%.17g,%.17g,%.17g,%lld,", r.epoch,
                  static_cast<long long>(r.iterations), r.d_loss, r.g_loss, r.fid,
                  static_cast<long long>(r.selections));
    out << line << r.checkpoint << "\n";
  }
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<std::array<double, 3>>& rows) {
  std::ofstream out(path);
  out << "iteration,d_loss,g_loss\n";
  for (const auto& r : rows) {
    char line[128];
    std::snprintf(line, sizeof(line), "%.0f,%.17g,%.17g\n", r[0], r[1], r[2]);
    out << line;
  }
}

void write_loss_plot(const std::filesystem::path& path,
                     const std::vector<std::array<double, 3>>& rows) {
  std::vector<std::vector<double>> series(2);
  for (const auto& r : rows) {
    series[0].push_back(r[1]);
    series[1].push_back(r[2]);
  }
  write_png(path, render_series(series));
}

}  // namespace

TrainResult train_gan(PatchDataset& dataset, const TrainConfig& config) {
  validate_train_config(config);
  if (dataset.scan_ids().empty()) throw ArgumentError("training needs a non-empty dataset");
  bool persist = !config.out_dir.empty();
  if (persist) std::filesystem::create_directories(config.out_dir);

  TrainResult result;
  result.out_dir = config.out_dir;
  result.generator = build_generator(config.generator);
  result.discriminator = build_discriminator(config.discriminator);
  Generator& generator = result.generator;
  Discriminator& discriminator = result.discriminator;

  torch::optim::Adam opt_g(
      generator.module()->parameters(),
      torch::optim::AdamOptions(config.lr_generator)
          .betas({config.adam_beta1, config.adam_beta2}));
  torch::optim::Adam opt_d(
      discriminator.module()->parameters(),
      torch::optim::AdamOptions(config.lr_discriminator)
          .betas({config.adam_beta1, config.adam_beta2}));

  Rng plan_rng(mix_seed(config.seed, "epoch-plan"));
  Rng patch_rng(mix_seed(config.seed, "real-patches"));
  Rng mix_rng(mix_seed(config.seed, "style-mixing"));
  auto latent_gen = make_cpu_generator(mix_seed(config.seed, "latents"));

  LargeEbsConfig ebs;
  ebs.candidate_count = config.ebs_candidates;
  ebs.keep_count = config.batch_size;
  ebs.warmup_epochs = config.ebs_warmup_epochs;
  ebs.tap_layer = config.ebs_tap_layer;

  bool style = config.generator.family == GanFamily::Stylegan;
  int sites = style ? StyleGan3dGeneratorImpl::kSites : 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  bool capped = false;
  for (int epoch = 1; epoch <= config.epochs && !capped; ++epoch) {
    bool select_now = config.use_largeebs && epoch > config.ebs_warmup_epochs;
    auto plan = epoch_plan(dataset.scan_ids(), plan_rng, config.minibatches_per_scan);
    double d_sum = 0.0, g_sum = 0.0;
    int64_t epoch_iters = 0, epoch_selections = 0;

    for (const auto& entry : plan) {
      auto real = patches_to_tensor(
          dataset.sample_patches(entry.scan_id, config.batch_size, patch_rng));

      torch::Tensor z;
      if (select_now) {
        auto candidates = sample_latents(config.ebs_candidates, latent_gen);
        z = largeebs_select(generator, discriminator, candidates, ebs);
        ++epoch_selections;
      } else {
        z = sample_latents(config.batch_size, latent_gen);
      }

      generator.train();
      discriminator.train();

      opt_d.zero_grad();
      auto d_real = discriminator.forward(real);
      auto fake_d = generator.forward(z).detach();
      auto d_fake = discriminator.forward(fake_d);
      auto loss_d = discriminator_loss(config.loss, d_real, d_fake);
      loss_d.backward();
      opt_d.step();

      opt_g.zero_grad();
      torch::Tensor fake_g;
      if (style && config.mixing_prob > 0.0) {
        auto z2 = sample_latents(config.batch_size, latent_gen);
        std::vector<int> depths(static_cast<size_t>(config.batch_size), sites);
        std::uniform_int_distribution<int> depth_draw(1, sites - 1);
        for (auto& d : depths) {
          if (unit(mix_rng) < config.mixing_prob) d = depth_draw(mix_rng);
        }
        fake_g = generator.synthesize(generator.mixing_codes(z, z2, depths));
      } else {
        fake_g = generator.forward(z);
      }
      auto d_fake_g = discriminator.forward(fake_g);
      torch::Tensor d_real_g;
      if (config.loss == GanLoss::Relativistic) {
        torch::NoGradGuard no_grad;
        d_real_g = discriminator.forward(real);
      } else {
        d_real_g = d_real.detach();
      }
      auto loss_g = generator_loss(config.loss, d_real_g, d_fake_g);
      loss_g.backward();
      opt_g.step();

      double ld = loss_d.item<double>();
      double lg = loss_g.item<double>();
      if (!std::isfinite(ld) || !std::isfinite(lg)) {
        throw TrainingDivergedError(
            "non-finite loss at epoch " + std::to_string(epoch) + " iteration " +
            std::to_string(result.iterations + 1) + " (d=" + std::to_string(ld) +
            ", g=" + std::to_string(lg) + ")");
      }
      d_sum += ld;
      g_sum += lg;
      ++epoch_iters;
      ++result.iterations;
      if (result.iterations % config.minibatches_per_scan == 0) {
        result.loss_trace.push_back({static_cast<double>(result.iterations), ld, lg});
      }
      if (config.max_iterations > 0 && result.iterations >= config.max_iterations) {
        capped = true;
        break;
      }
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.iterations = result.iterations;
    metrics.d_loss = d_sum / static_cast<double>(epoch_iters);
    metrics.g_loss = g_sum / static_cast<double>(epoch_iters);
    metrics.selections = epoch_selections;
    result.selections += epoch_selections;
    metrics.fid = epoch_fid(dataset, generator, config, epoch);
    if (persist) {
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoint_epoch_%03d.ckpt", epoch);
      metrics.checkpoint = name;
      CheckpointMeta meta;
      meta.generator = config.generator;
      meta.discriminator = config.discriminator;
      meta.epoch = epoch;
      meta.iteration = result.iterations;
      save_checkpoint(config.out_dir / name, generator, discriminator, meta);
    }
    result.epochs.push_back(metrics);
    if (persist) {
      write_metrics_csv(config.out_dir / "metrics.csv", result.epochs);
      write_trace_csv(config.out_dir / "loss_trace.csv", result.loss_trace);
      if (config.write_images && !result.loss_trace.empty()) {
        write_loss_plot(config.out_dir / "losses.png", result.loss_trace);
      }
    }
  }

  generator.eval();
  discriminator.eval();
  return result;
}

std::vector<double> read_csv_column(const std::filesystem::path& csv,
                                    const std::string& column) {
  std::ifstream in(csv);
  if (!in) throw LoadError("cannot open csv: " + csv.string());
  std::string line;
  if (!std::getline(in, line)) throw LoadError("empty csv: " + csv.string());
  auto split = [](const std::string& text) {
    std::vector<std::string> cells;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!text.empty() && text.back() == ',') cells.push_back("");
    return cells;
  };
  auto header = split(line);
  auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) {
    throw LoadError("csv " + csv.string() + " has no column '" + column + "'");
  }
  size_t idx = static_cast<size_t>(it - header.begin());
  std::vector<double> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() <= idx) {
      throw LoadError(csv.string() + ":" + std::to_string(line_no) + ": short row");
    }
    try {
      size_t used = 0;
      values.push_back(std::stod(cells[idx], &used));
      if (used != cells[idx].size()) throw std::invalid_argument(cells[idx]);
    } catch (const std::logic_error&) {
      throw LoadError(csv.string() + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                      cells[idx] + "'");
    }
  }
  return values;
}

namespace {

// Lowest value of `column` in one run's metrics.csv plus the matching
// checkpoint path; strict comparison keeps the earliest epoch on ties.
std::pair<double, std::filesystem::path> run_minimum(const std::filesystem::path& run_dir,
                                                     const std::string& column) {
  auto csv = run_dir / "metrics.csv";
  auto values = read_csv_column(csv, column);
  if (values.empty()) throw LoadError("metrics csv has no epochs: " + csv.string());
  auto epochs = read_csv_column(csv, "epoch");
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  char name[64];
  std::snprintf(name, sizeof(name), "checkpoint_epoch_%03d.ckpt",
                static_cast<int>(epochs[best]));
  auto path = run_dir / name;
  if (!std::filesystem::exists(path)) {
    throw LoadError("best checkpoint missing: " + path.string());
  }
  return {values[best], path};
}

}  // namespace

std::filesystem::path select_best_model(const std::filesystem::path& run_dir) {
  return run_minimum(run_dir, "fid").second;
}

BestModel select_best_model(const std::vector<std::filesystem::path>& run_dirs,
                            const std::string& column) {
  if (run_dirs.empty()) throw ArgumentError("model selection needs at least one run");
  BestModel best;
  for (size_t i = 0; i < run_dirs.size(); ++i) {
    auto [value, checkpoint] = run_minimum(run_dirs[i], column);
    best.per_run_minima.push_back(value);
    if (i == 0 || value < best.min_value) {
      best.min_value = value;
      best.checkpoint = checkpoint;
      best.run_index = i;
    }
  }
  return best;
}

}  // namespace lunggan
