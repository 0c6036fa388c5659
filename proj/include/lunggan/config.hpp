#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "lunggan/common.hpp"

namespace lunggan {

// Flat dotted-key/value configuration ("train.batch_size = 48"). Lines
// starting with '#' and blank lines are ignored. Typed getters raise
// ValidationError naming the offending key.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse_file(const std::filesystem::path& path);
  static KeyValueConfig parse_text(const std::string& text, const std::string& origin = "<text>");

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  // Keys present in `overrides` replace values here.
  void merge_over(const KeyValueConfig& overrides);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  Rational get_rational(const std::string& key, Rational fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  // Canonical "key = value" lines, sorted by key.
  std::string canonical_text() const;

 private:
  std::optional<std::string> lookup(const std::string& key) const;
  std::map<std::string, std::string> entries_;
};

}  // namespace lunggan
