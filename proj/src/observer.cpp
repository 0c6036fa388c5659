#include "lunggan/observer.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "lunggan/fid.hpp"
#include "lunggan/image_io.hpp"

namespace lunggan {

namespace fs = std::filesystem;

ObserverExport export_observer_study(const std::vector<Patch>& real,
                                     const std::vector<Patch>& fake, uint64_t seed,
                                     const fs::path& out_dir, int per_class) {
  if (per_class < 1) throw ArgumentError("observer export needs at least one item per class");
  if (static_cast<int>(real.size()) < per_class || static_cast<int>(fake.size()) < per_class) {
    throw ArgumentError("observer export needs at least " + std::to_string(per_class) +
                        " real and fake patches, got " + std::to_string(real.size()) + "/" +
                        std::to_string(fake.size()));
  }
  fs::create_directories(out_dir);
  Rng rng(seed);

  // Draw per_class source indices per class without replacement.
  auto choose = [&](size_t n) {
    std::vector<int64_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = static_cast<int64_t>(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<size_t>(per_class));
    return idx;
  };
  std::vector<int64_t> real_idx = choose(real.size());
  std::vector<int64_t> fake_idx = choose(fake.size());

  // Stimulus slot i gets a random (label, source) pair via one shuffle.
  struct Item {
    bool is_real;
    int64_t source;
  };
  std::vector<Item> items;
  items.reserve(static_cast<size_t>(2 * per_class));
  for (int64_t i : real_idx) items.push_back({true, i});
  for (int64_t i : fake_idx) items.push_back({false, i});
  std::shuffle(items.begin(), items.end(), rng);

  ObserverExport result;
  result.out_dir = out_dir;
  char name[32];
  for (size_t slot = 0; slot < items.size(); ++slot) {
    std::snprintf(name, sizeof(name), "stim_%03zu.png", slot);
    const Patch& patch = items[slot].is_real ? real[items[slot].source] : fake[items[slot].source];
    write_png(out_dir / name, to_gray8(central_slice(patch)));
    result.stimulus_files.push_back(name);
  }

  result.key_file = out_dir / "key.csv";
  {
    std::ofstream key(result.key_file);
    if (!key) throw LoadError("cannot write " + result.key_file.string());
    key << "filename,label,source_index\n";
    for (size_t slot = 0; slot < items.size(); ++slot) {
      key << result.stimulus_files[slot] << ',' << (items[slot].is_real ? "real" : "fake") << ','
          << items[slot].source << "\n";
    }
  }

  for (int order = 1; order <= 3; ++order) {
    std::vector<std::string> files = result.stimulus_files;
    std::shuffle(files.begin(), files.end(), rng);
    fs::path order_path = out_dir / ("reading_order_" + std::to_string(order) + ".csv");
    std::ofstream out(order_path);
    if (!out) throw LoadError("cannot write " + order_path.string());
    for (const auto& f : files) out << f << "\n";
    result.order_files.push_back(order_path);
  }

  result.manifest_file = out_dir / "observer_manifest.json";
  {
    nlohmann::json j;
    j["seed"] = seed;
    j["per_class"] = per_class;
    j["stimulus_count"] = result.stimulus_files.size();
    j["key_file"] = result.key_file.filename().string();
    j["reading_orders"] = nlohmann::json::array();
    for (const auto& f : result.order_files) j["reading_orders"].push_back(f.filename().string());
    std::ofstream out(result.manifest_file);
    if (!out) throw LoadError("cannot write " + result.manifest_file.string());
    out << j.dump(2) << "\n";
  }
  return result;
}

}  // namespace lunggan
