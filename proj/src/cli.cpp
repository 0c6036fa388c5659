#include "lunggan/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lunggan/dataset.hpp"
#include "lunggan/image_io.hpp"
#include "lunggan/interpolation.hpp"
#include "lunggan/latent_analysis.hpp"
#include "lunggan/manifest.hpp"
#include "lunggan/observer.hpp"
#include "lunggan/stats.hpp"

namespace lunggan {

namespace fs = std::filesystem;

KeyValueConfig default_config() {
  KeyValueConfig cfg;
  cfg.set("common.seed", "7");
  cfg.set("common.out_dir", "");
  cfg.set("model.family", "dcgan");
  cfg.set("model.width", "1");
  cfg.set("model.mdmin", "false");
  cfg.set("train.loss", "relativistic");
  cfg.set("train.batch_size", "48");
  cfg.set("train.epochs", "20");
  cfg.set("train.max_iterations", "0");
  cfg.set("train.lr_generator", "0.0001");
  cfg.set("train.lr_discriminator", "0.0001");
  cfg.set("train.adam_beta1", "0.5");
  cfg.set("train.adam_beta2", "0.999");
  cfg.set("train.largeebs", "false");
  cfg.set("train.ebs_candidates", "192");
  cfg.set("train.ebs_warmup_epochs", "5");
  cfg.set("train.ebs_tap_layer", "4");
  cfg.set("train.mixing_prob", "0.9");
  cfg.set("train.minibatches_per_scan", "14");
  cfg.set("data.scans", "");
  cfg.set("data.split", "");
  cfg.set("data.phantom_count", "8");
  cfg.set("eval.fid_extractor", "pool2d:8");
  cfg.set("eval.fid3d_extractor", "pool3d:4");
  cfg.set("eval.fid_samples", "10000");
  cfg.set("eval.samples", "100");
  cfg.set("eval.skeleton_threshold", "0");
  cfg.set("eval.roc_boot", "1000");
  cfg.set("sample.count", "16");
  cfg.set("interp.steps", "8");
  cfg.set("interp.spherical", "true");
  cfg.set("latent.space", "z");
  cfg.set("latent.reducer", "pca");
  cfg.set("observer.per_class", "100");
  cfg.set("compare.column", "fid");
  cfg.set("input.checkpoint", "");
  cfg.set("input.run_a", "");
  cfg.set("input.run_b", "");
  return cfg;
}

namespace {

void merge_known(KeyValueConfig& base, const KeyValueConfig& overrides) {
  for (const auto& [key, value] : overrides.entries()) {
    if (!base.has(key)) throw ValidationError(key, "unknown configuration key");
    base.set(key, value);
  }
}

KeyValueConfig parse_override_pairs(const std::vector<std::string>& pairs) {
  KeyValueConfig cfg;
  for (const auto& pair : pairs) {
    auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ValidationError(pair, "override must look like key=value");
    }
    auto strip = [](std::string s) {
      size_t b = s.find_first_not_of(" \t");
      size_t e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    cfg.set(strip(pair.substr(0, eq)), strip(pair.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace

KeyValueConfig resolve_config(const std::string& config_file,
                              const std::vector<std::string>& overrides) {
  KeyValueConfig cfg = default_config();
  if (!config_file.empty()) merge_known(cfg, KeyValueConfig::parse_file(config_file));
  merge_known(cfg, parse_override_pairs(overrides));
  return cfg;
}

TrainConfig train_config_from(const KeyValueConfig& cfg) {
  TrainConfig train;
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("common.seed", 7));
  train.seed = seed;
  train.generator.family = parse_family(cfg.get_string("model.family", "dcgan"));
  train.generator.width = cfg.get_rational("model.width", Rational{1, 1});
  train.generator.seed = mix_seed(seed, "generator-init");
  train.discriminator.use_mdmin = cfg.get_bool("model.mdmin", false);
  train.discriminator.width = train.generator.width;
  train.discriminator.seed = mix_seed(seed, "discriminator-init");
  train.loss = parse_loss(cfg.get_string("train.loss", "standard"));
  train.batch_size = cfg.get_int("train.batch_size", 16);
  train.epochs = static_cast<int>(cfg.get_int("train.epochs", 1));
  train.max_iterations = cfg.get_int("train.max_iterations", 0);
  train.lr_generator = cfg.get_double("train.lr_generator", 2e-4);
  train.lr_discriminator = cfg.get_double("train.lr_discriminator", 2e-4);
  train.adam_beta1 = cfg.get_double("train.adam_beta1", 0.5);
  train.adam_beta2 = cfg.get_double("train.adam_beta2", 0.999);
  train.use_largeebs = cfg.get_bool("train.largeebs", false);
  train.ebs_candidates = cfg.get_int("train.ebs_candidates", 192);
  train.ebs_warmup_epochs = static_cast<int>(cfg.get_int("train.ebs_warmup_epochs", 5));
  train.ebs_tap_layer = static_cast<int>(cfg.get_int("train.ebs_tap_layer", 4));
  train.mixing_prob = cfg.get_double("train.mixing_prob", 0.9);
  train.minibatches_per_scan = static_cast<int>(cfg.get_int("train.minibatches_per_scan", 14));
  train.fid_extractor = cfg.get_string("eval.fid_extractor", "pool2d:8");
  train.fid_samples = cfg.get_int("eval.fid_samples", 64);
  train.out_dir = cfg.get_string("common.out_dir", "");
  return train;
}

namespace {

std::shared_ptr<PatchDataset> open_dataset(const KeyValueConfig& cfg) {
  auto scans = cfg.get_string("data.scans", "");
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("common.seed", 7));
  if (!scans.empty()) {
    auto split = cfg.get_string("data.split", "");
    return std::make_shared<CtDirectoryDataset>(fs::path(scans),
                                                split.empty() ? fs::path() : fs::path(split));
  }
  int64_t count = cfg.get_int("data.phantom_count", 8);
  if (count < 1) throw ValidationError("data.phantom_count", "must be positive");
  return std::make_shared<PhantomDataset>(count, mix_seed(seed, "phantom-data"));
}

Checkpoint load_required_checkpoint(const KeyValueConfig& cfg) {
  auto path = cfg.get_string("input.checkpoint", "");
  if (path.empty()) {
    throw ValidationError("input.checkpoint", "a checkpoint file is required");
  }
  return load_checkpoint(path);
}

fs::path required_out_dir(const KeyValueConfig& cfg) {
  auto out = cfg.get_string("common.out_dir", "");
  if (out.empty()) throw ValidationError("common.out_dir", "an output directory is required");
  fs::create_directories(out);
  return out;
}

void finish_run(const std::string& command, const KeyValueConfig& cfg, const fs::path& out,
                std::vector<std::string> artifacts) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config = cfg;
  manifest.seed = static_cast<uint64_t>(cfg.get_int("common.seed", 7));
  manifest.artifacts = std::move(artifacts);
  write_manifest(out / "manifest.json", manifest);
  std::cout << "wrote " << (out / "manifest.json").string() << "\n";
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

GrayImage8 slice_grid(const std::vector<Patch>& patches, int columns) {
  std::vector<Image2D> tiles;
  tiles.reserve(patches.size());
  for (const auto& p : patches) tiles.push_back(central_slice(p));
  return make_grid(tiles, columns);
}

// ----- subcommand bodies (shared by the direct path and `rerun`) -----

void cmd_train(const KeyValueConfig& cfg) {
  auto out = required_out_dir(cfg);
  auto train = train_config_from(cfg);
  train.out_dir = out;
  auto dataset = open_dataset(cfg);
  auto result = train_gan(*dataset, train);
  std::vector<std::string> artifacts{"metrics.csv", "loss_trace.csv"};
  if (train.write_images) artifacts.push_back("losses.png");
  for (const auto& epoch : result.epochs) artifacts.push_back(epoch.checkpoint);
  char summary[160];
  std::snprintf(summary, sizeof(summary),
                "trained %lld iterations over %zu epochs, final fid %.6g",
                static_cast<long long>(result.iterations), result.epochs.size(),
                result.epochs.back().fid);
  std::cout << summary << "\n";
  finish_run("train", cfg, out, std::move(artifacts));
}

void cmd_sample(const KeyValueConfig& cfg) {
  auto out = required_out_dir(cfg);
  auto ck = load_required_checkpoint(cfg);
  int64_t count = cfg.get_int("sample.count", 16);
  if (count < 1) throw ValidationError("sample.count", "must be positive");
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("common.seed", 7));
  auto patches = ck.generator.generate(count, mix_seed(seed, "sample"));
  std::vector<std::string> artifacts;
  char name[64];
  for (size_t i = 0; i < patches.size(); ++i) {
    std::snprintf(name, sizeof(name), "patch_%04zu.vol", i);
    write_vol(out / name, patches[i]);
    artifacts.push_back(name);
  }
  int columns = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  write_png(out / "samples.png", slice_grid(patches, columns));
  artifacts.push_back("samples.png");
  std::cout << "sampled " << count << " patches\n";
  finish_run("sample", cfg, out, std::move(artifacts));
}

void cmd_fid(const KeyValueConfig& cfg, bool volumetric) {
  auto out = required_out_dir(cfg);
  auto ck = load_required_checkpoint(cfg);
  auto dataset = open_dataset(cfg);
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("common.seed", 7));
  int64_t n = cfg.get_int("eval.fid_samples", 64);
  auto spec = volumetric ? cfg.get_string("eval.fid3d_extractor", "pool3d:4")
                         : cfg.get_string("eval.fid_extractor", "pool2d:8");
  auto extractor = make_extractor(spec);
  Rng real_rng(mix_seed(seed, "fid-real"));
  VectorPatchSource real(draw_patches(*dataset, n, real_rng));
  GeneratorPatchSource fake(ck.generator, mix_seed(seed, "fid-fake"));
  auto fid = compute_fid(real, fake, *extractor, n);
  nlohmann::json j{{"fid", fid.value},
                   {"n_real", fid.n_real},
                   {"n_fake", fid.n_fake},
                   {"extractor", fid.extractor.name},
                   {"input_rank", fid.extractor.input_rank},
                   {"feature_dim", fid.extractor.feature_dim}};
  write_json(out / "fid.json", j);
  char line[64];
  std::snprintf(line, sizeof(line), "fid = %.17g\n", fid.value);
  std::cout << line;
  finish_run(volumetric ? "fid3d" : "fid", cfg, out, {"fid.json"});
}

void cmd_interpolate(const KeyValueConfig& cfg) {
  auto out = required_out_dir(cfg);
  auto ck = load_required_checkpoint(cfg);
  int steps = static_cast<int>(cfg.get_int("interp.steps", 8));
  bool spherical = cfg.get_bool("interp.spherical", true);
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("common.seed", 7));
  auto z = sample_latents(2, mix_seed(seed, "interpolate"));
  Eigen::VectorXd a(kLatentDim), b(kLatentDim);
  for (int64_t i = 0; i < kLatentDim; ++i) {
    a(i) = z[0][i].item<double>();
    b(i) = z[1][i].item<double>();
  }
  auto path = interpolation_path(a, b, steps, spherical);
  auto latents = torch::empty({static_cast<int64_t>(path.size()), kLatentDim}, torch::kFloat32);
  for (size_t s = 0; s < path.size(); ++s) {
    for (int64_t i = 0; i < kLatentDim; ++i) {
      latents[static_cast<int64_t>(s)][i] = static_cast<float>(path[s](i));
    }
  }
  torch::NoGradGuard no_grad;
  ck.generator.eval();
  auto patches = tensor_to_patches(ck.generator.forward(latents));
  std::vector<std::string> artifacts;
  char name[64];
  for (size_t i = 0; i < patches.size(); ++i) {
    std::snprintf(name, sizeof(name), "step_%03zu.vol", i);
    write_vol(out / name, patches[i]);
    artifacts.push_back(name);
  }
  write_png(out / "interpolation.png", slice_grid(patches, steps));
  artifacts.push_back("interpolation.png");
  std::cout << "interpolated " << steps << " steps ("
            << (spherical ? "spherical" : "linear") << ")\n";
  finish_run("interpolate", cfg, out, std::move(artifacts));
}

void cmd_skeleton_roc(const KeyValueConfig& cfg) {
  auto out = required_out_dir(cfg);
  auto ck = load_required_checkpoint(cfg);
  auto dataset = open_dataset(cfg);
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("common.seed", 7));
  int64_t n = cfg.get_int("eval.samples", 100);
  float threshold = static_cast<float>(cfg.get_double("eval.skeleton_threshold", 0.0));
  int n_boot = static_cast<int>(cfg.get_int("eval.roc_boot", 1000));
  Rng real_rng(mix_seed(seed, "roc-real"));
  auto real = draw_patches(*dataset, n, real_rng);
  auto fake = ck.generator.generate(n, mix_seed(seed, "roc-fake"));

  auto counts_of = [&](const std::vector<Patch>& patches) {
    std::vector<int> counts;
    counts.reserve(patches.size());
    for (const auto& p : patches) {
      counts.push_back(count_branch_points(skeletonize_patch(p, threshold).mask).count);
    }
    return counts;
  };
  auto real_counts = counts_of(real);
  auto fake_counts = counts_of(fake);

  Rng boot_rng(mix_seed(seed, "roc-bootstrap"));
  auto curve = branch_count_roc(real_counts, fake_counts, n_boot, boot_rng);

  std::vector<double> real_d(real_counts.begin(), real_counts.end());
  std::vector<double> fake_d(fake_counts.begin(), fake_counts.end());
  auto welch = welch_t_test(real_d, fake_d);

  std::ofstream counts_csv(out / "branch_counts.csv");
  counts_csv << "label,branch_count\n";
  for (int c : real_counts) counts_csv << "real," << c << "\n";
  for (int c : fake_counts) counts_csv << "fake," << c << "\n";

  std::ofstream roc_csv(out / "roc.csv");
  roc_csv << "threshold,tpr,fpr\n";
  for (size_t i = 0; i < curve.thresholds.size(); ++i) {
    char line[96];
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", curve.thresholds[i], curve.tpr[i],
                  curve.fpr[i]);
    roc_csv << line;
  }

  write_png(out / "roc.png", render_roc(curve));
  nlohmann::json j{{"auc", curve.auc},
                   {"auc_boot_sd", curve.auc_boot_sd},
                   {"auc_ci", {curve.auc_ci[0], curve.auc_ci[1]}},
                   {"n_boot", curve.n_boot},
                   {"n_real", real_counts.size()},
                   {"n_fake", fake_counts.size()},
                   {"real_mean", mean_of(real_d)},
                   {"fake_mean", mean_of(fake_d)},
                   {"welch_t", welch.t},
                   {"welch_p", welch.p}};
  write_json(out / "roc.json", j);
  char line[128];
  std::snprintf(line, sizeof(line), "auc = %.6g  ci95 = [%.6g, %.6g]  welch_p = %.6g\n",
                curve.auc, curve.auc_ci[0], curve.auc_ci[1], welch.p);
  std::cout << line;
  finish_run("skeleton-roc", cfg, out,
             {"branch_counts.csv", "roc.csv", "roc.png", "roc.json"});
}

void cmd_umap_export(const KeyValueConfig& cfg) {
  auto out = required_out_dir(cfg);
  auto ck = load_required_checkpoint(cfg);
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("common.seed", 7));
  int64_t n = cfg.get_int("eval.samples", 100);
  auto space = cfg.get_string("latent.space", "z");
  auto reducer = cfg.get_string("latent.reducer", "pca");
  float threshold = static_cast<float>(cfg.get_double("eval.skeleton_threshold", 0.0));
  auto embedding =
      embed_latents(ck.generator, n, mix_seed(seed, "embedding"), space, reducer);
  label_with_branch_counts(ck.generator, embedding, threshold);
  write_embedding_csv(out / "embedding.csv", embedding);

  std::vector<ScatterPoint> points;
  double saturate = 1.0;
  for (const auto& p : embedding.points) {
    if (p.branch_count) saturate = std::max(saturate, static_cast<double>(*p.branch_count));
  }
  for (const auto& p : embedding.points) {
    points.push_back(ScatterPoint{p.x, p.y, p.branch_count.has_value(),
                                  p.branch_count ? static_cast<double>(*p.branch_count) : 0.0});
  }
  write_png(out / "embedding.png", render_scatter(points, saturate));
  std::cout << "embedded " << n << " latents in space " << space << "\n";
  finish_run("umap-export", cfg, out, {"embedding.csv", "embedding.png"});
}

void cmd_observer_export(const KeyValueConfig& cfg) {
  auto out = required_out_dir(cfg);
  auto ck = load_required_checkpoint(cfg);
  auto dataset = open_dataset(cfg);
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("common.seed", 7));
  int per_class = static_cast<int>(cfg.get_int("observer.per_class", 100));
  if (per_class < 1) throw ValidationError("observer.per_class", "must be positive");
  Rng real_rng(mix_seed(seed, "observer-real"));
  auto real = draw_patches(*dataset, per_class, real_rng);
  auto fake = ck.generator.generate(per_class, mix_seed(seed, "observer-fake"));
  auto study = export_observer_study(real, fake, mix_seed(seed, "observer-shuffle"), out,
                                     per_class);
  std::vector<std::string> artifacts = study.stimulus_files;
  artifacts.push_back(study.key_file.filename().string());
  for (const auto& f : study.order_files) artifacts.push_back(f.filename().string());
  artifacts.push_back(study.manifest_file.filename().string());
  std::cout << "exported " << study.stimulus_files.size() << " stimuli\n";
  finish_run("observer-export", cfg, out, std::move(artifacts));
}

std::vector<fs::path> split_run_list(const std::string& joined) {
  std::vector<fs::path> dirs;
  std::stringstream ss(joined);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) dirs.emplace_back(item);
  }
  return dirs;
}

void cmd_compare_runs(const KeyValueConfig& cfg) {
  auto out = required_out_dir(cfg);
  auto runs_a = split_run_list(cfg.get_string("input.run_a", ""));
  auto runs_b = split_run_list(cfg.get_string("input.run_b", ""));
  if (runs_a.size() < 2 || runs_b.size() < 2) {
    throw ValidationError(runs_a.size() < 2 ? "input.run_a" : "input.run_b",
                          "each method group needs at least two run directories");
  }
  auto column = cfg.get_string("compare.column", "fid");
  auto best_a = select_best_model(runs_a, column);
  auto best_b = select_best_model(runs_b, column);
  auto welch = welch_t_test(best_a.per_run_minima, best_b.per_run_minima);
  auto names = [](const std::vector<fs::path>& dirs) {
    std::vector<std::string> out;
    for (const auto& d : dirs) out.push_back(d.string());
    return out;
  };
  nlohmann::json j{{"column", column},
                   {"runs_a", names(runs_a)},
                   {"runs_b", names(runs_b)},
                   {"minima_a", best_a.per_run_minima},
                   {"minima_b", best_b.per_run_minima},
                   {"best_a", best_a.checkpoint.string()},
                   {"best_b", best_b.checkpoint.string()},
                   {"min_a", best_a.min_value},
                   {"min_b", best_b.min_value},
                   {"mean_a", mean_of(best_a.per_run_minima)},
                   {"mean_b", mean_of(best_b.per_run_minima)},
                   {"welch_t", welch.t},
                   {"welch_df", welch.df},
                   {"welch_p", welch.p}};
  write_json(out / "compare.json", j);
  char line[200];
  std::snprintf(line, sizeof(line),
                "%s minima: group_a min %.6g mean %.6g, group_b min %.6g mean %.6g, "
                "welch_p = %.6g\n",
                column.c_str(), best_a.min_value, mean_of(best_a.per_run_minima),
                best_b.min_value, mean_of(best_b.per_run_minima), welch.p);
  std::cout << line;
  finish_run("compare-runs", cfg, out, {"compare.json"});
}

void dispatch(const std::string& command, const KeyValueConfig& cfg) {
  if (command == "train") return cmd_train(cfg);
  if (command == "sample") return cmd_sample(cfg);
  if (command == "fid") return cmd_fid(cfg, false);
  if (command == "fid3d") return cmd_fid(cfg, true);
  if (command == "interpolate") return cmd_interpolate(cfg);
  if (command == "skeleton-roc") return cmd_skeleton_roc(cfg);
  if (command == "umap-export") return cmd_umap_export(cfg);
  if (command == "observer-export") return cmd_observer_export(cfg);
  if (command == "compare-runs") return cmd_compare_runs(cfg);
  throw ArgumentError("manifest names unknown command '" + command + "'");
}

void cmd_rerun(const std::string& manifest_path, const std::string& out_override) {
  auto manifest = read_manifest(manifest_path);
  KeyValueConfig cfg = default_config();
  merge_known(cfg, manifest.config);
  if (!out_override.empty()) cfg.set("common.out_dir", out_override);
  std::cout << "replaying " << manifest.command << " (config hash "
            << manifest.config_hash().substr(0, 12) << ")\n";
  dispatch(manifest.command, cfg);
}

struct SubcommandArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::vector<std::pair<std::string, std::string>> flag_keys;  // key, value

  void push(const std::string& key, const std::string& value) {
    flag_keys.emplace_back(key, value);
  }
  KeyValueConfig resolve() const {
    KeyValueConfig cfg = default_config();
    if (!config_file.empty()) merge_known(cfg, KeyValueConfig::parse_file(config_file));
    for (const auto& [key, value] : flag_keys) cfg.set(key, value);
    merge_known(cfg, parse_override_pairs(overrides));
    return cfg;
  }
};

// Registers --config/--set plus the flags shared by every subcommand.
// Dedicated flags sit between the config file and --set in precedence.
void add_common_options(CLI::App* cmd, SubcommandArgs& args) {
  cmd->add_option("--config", args.config_file, "configuration file (key = value lines)");
  cmd->add_option("--set", args.overrides, "override a configuration key (key=value)")
      ->take_all();
  auto bind = [cmd, &args](const std::string& flag, const std::string& key,
                           const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&args, key](const std::string& v) { args.push(key, v); }, help);
  };
  bind("--seed", "common.seed", "master seed");
  bind("--out", "common.out_dir", "output directory");
}

void add_data_options(CLI::App* cmd, SubcommandArgs& args) {
  auto bind = [cmd, &args](const std::string& flag, const std::string& key,
                           const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&args, key](const std::string& v) { args.push(key, v); }, help);
  };
  bind("--scans", "data.scans", "directory of .mhd scans with companions");
  bind("--split", "data.split", "split manifest restricting the scan list");
  bind("--phantoms", "data.phantom_count", "synthetic scan count when --scans is unset");
}

void add_checkpoint_option(CLI::App* cmd, SubcommandArgs& args) {
  cmd->add_option_function<std::string>(
      "--checkpoint", [&args](const std::string& v) { args.push("input.checkpoint", v); },
      "model checkpoint to load");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"3-D adversarial synthesis of healthy lung CT patches"};
  app.require_subcommand(1);

  std::map<std::string, SubcommandArgs> args;
  std::string rerun_manifest, rerun_out;

  auto* train = app.add_subcommand("train", "train a generator on lung patches");
  {
    auto& a = args["train"];
    add_common_options(train, a);
    add_data_options(train, a);
    auto bind = [train, &a](const std::string& flag, const std::string& key,
                            const std::string& help) {
      train->add_option_function<std::string>(
          flag, [&a, key](const std::string& v) { a.push(key, v); }, help);
    };
    bind("--family", "model.family", "dcgan, stylegan or biggan");
    bind("--width", "model.width", "channel width multiplier (rational, e.g. 1/8)");
    bind("--loss", "train.loss", "standard or relativistic");
    bind("--batch-size", "train.batch_size", "samples per minibatch");
    bind("--epochs", "train.epochs", "training epochs");
    bind("--max-iterations", "train.max_iterations", "hard minibatch cap (0 = none)");
    train->add_flag_function(
        "--mdmin", [&a](int64_t) { a.push("model.mdmin", "true"); },
        "append the minibatch-similarity channel to the discriminator");
    train->add_flag_function(
        "--largeebs", [&a](int64_t) { a.push("train.largeebs", "true"); },
        "train on the most redundant samples of a larger candidate batch");
  }

  auto* sample = app.add_subcommand("sample", "generate patches from a checkpoint");
  {
    auto& a = args["sample"];
    add_common_options(sample, a);
    add_checkpoint_option(sample, a);
    sample->add_option_function<std::string>(
        "--count", [&a](const std::string& v) { a.push("sample.count", v); },
        "patches to generate");
  }

  auto* fid = app.add_subcommand("fid", "distribution distance on central slices");
  {
    auto& a = args["fid"];
    add_common_options(fid, a);
    add_data_options(fid, a);
    add_checkpoint_option(fid, a);
    fid->add_option_function<std::string>(
        "--samples", [&a](const std::string& v) { a.push("eval.fid_samples", v); },
        "samples per side");
    fid->add_option_function<std::string>(
        "--extractor", [&a](const std::string& v) { a.push("eval.fid_extractor", v); },
        "feature extractor spec");
  }

  auto* fid3d = app.add_subcommand("fid3d", "distribution distance on whole volumes");
  {
    auto& a = args["fid3d"];
    add_common_options(fid3d, a);
    add_data_options(fid3d, a);
    add_checkpoint_option(fid3d, a);
    fid3d->add_option_function<std::string>(
        "--samples", [&a](const std::string& v) { a.push("eval.fid_samples", v); },
        "samples per side");
    fid3d->add_option_function<std::string>(
        "--extractor", [&a](const std::string& v) { a.push("eval.fid3d_extractor", v); },
        "feature extractor spec");
  }

  auto* interp = app.add_subcommand("interpolate", "walk the latent space between two draws");
  {
    auto& a = args["interpolate"];
    add_common_options(interp, a);
    add_checkpoint_option(interp, a);
    interp->add_option_function<std::string>(
        "--steps", [&a](const std::string& v) { a.push("interp.steps", v); },
        "interpolation steps (inclusive)");
    interp->add_flag_function(
        "--linear", [&a](int64_t) { a.push("interp.spherical", "false"); },
        "interpolate linearly instead of along the great circle");
  }

  auto* roc = app.add_subcommand("skeleton-roc",
                                 "separate real from generated patches by vessel branching");
  {
    auto& a = args["skeleton-roc"];
    add_common_options(roc, a);
    add_data_options(roc, a);
    add_checkpoint_option(roc, a);
    roc->add_option_function<std::string>(
        "--samples", [&a](const std::string& v) { a.push("eval.samples", v); },
        "patches per class");
    roc->add_option_function<std::string>(
        "--threshold", [&a](const std::string& v) { a.push("eval.skeleton_threshold", v); },
        "vessel intensity threshold");
    roc->add_option_function<std::string>(
        "--boot", [&a](const std::string& v) { a.push("eval.roc_boot", v); },
        "bootstrap resamples for the AUC interval");
  }

  auto* umap = app.add_subcommand("umap-export", "2-D latent embedding with branch labels");
  {
    auto& a = args["umap-export"];
    add_common_options(umap, a);
    add_checkpoint_option(umap, a);
    umap->add_option_function<std::string>(
        "--samples", [&a](const std::string& v) { a.push("eval.samples", v); },
        "latents to embed");
    umap->add_option_function<std::string>(
        "--space", [&a](const std::string& v) { a.push("latent.space", v); },
        "latent space to embed: z or w");
    umap->add_option_function<std::string>(
        "--threshold", [&a](const std::string& v) { a.push("eval.skeleton_threshold", v); },
        "vessel intensity threshold");
  }

  auto* observer = app.add_subcommand("observer-export",
                                      "blinded stimulus set for a human reader study");
  {
    auto& a = args["observer-export"];
    add_common_options(observer, a);
    add_data_options(observer, a);
    add_checkpoint_option(observer, a);
    observer->add_option_function<std::string>(
        "--per-class", [&a](const std::string& v) { a.push("observer.per_class", v); },
        "stimuli per class");
  }

  auto* compare = app.add_subcommand("compare-runs",
                                     "test two runs' metric columns for a mean difference");
  {
    auto& a = args["compare-runs"];
    add_common_options(compare, a);
    auto join = [](const std::vector<std::string>& v) {
      std::string joined;
      for (const auto& item : v) {
        if (!joined.empty()) joined += ',';
        joined += item;
      }
      return joined;
    };
    compare->add_option_function<std::vector<std::string>>(
        "--run-a", [&a, join](const std::vector<std::string>& v) {
          a.push("input.run_a", join(v));
        },
        "first method group: two or more run directories");
    compare->add_option_function<std::vector<std::string>>(
        "--run-b", [&a, join](const std::vector<std::string>& v) {
          a.push("input.run_b", join(v));
        },
        "second method group: two or more run directories");
    compare->add_option_function<std::string>(
        "--column", [&a](const std::string& v) { a.push("compare.column", v); },
        "metrics column to compare");
  }

  auto* rerun = app.add_subcommand("rerun", "replay a run from its manifest");
  rerun->add_option("--manifest", rerun_manifest, "manifest.json of the original run")
      ->required();
  rerun->add_option("--out", rerun_out, "new output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rerun->parsed()) {
      cmd_rerun(rerun_manifest, rerun_out);
      return 0;
    }
    for (auto& [name, sub_args] : args) {
      if (app.get_subcommand(name)->parsed()) {
        dispatch(name, sub_args.resolve());
        return 0;
      }
    }
    std::cerr << "error: no subcommand selected\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.push_back("lunggan");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace lunggan
