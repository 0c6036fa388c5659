#include "lunggan/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace lunggan {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (char c : key) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_') return false;
  }
  return true;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path.string());
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text, const std::string& origin) {
  KeyValueConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw LoadError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (!valid_key(key)) {
      throw LoadError(origin + ":" + std::to_string(line_no) + ": malformed key '" + key + "'");
    }
    config.entries_[key] = value;
  }
  return config;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ValidationError(key, "malformed key");
  entries_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

void KeyValueConfig::merge_over(const KeyValueConfig& overrides) {
  for (const auto& [k, v] : overrides.entries_) entries_[k] = v;
}

std::optional<std::string> KeyValueConfig::lookup(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return lookup(key).value_or(fallback);
}

std::string KeyValueConfig::require_string(const std::string& key) const {
  auto v = lookup(key);
  if (!v || v->empty()) throw ValidationError(key, "required value is missing");
  return *v;
}

int64_t KeyValueConfig::get_int(const std::string& key, int64_t fallback) const {
  auto v = lookup(key);
  if (!v) return fallback;
  try {
    size_t pos = 0;
    int64_t parsed = std::stoll(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return parsed;
  } catch (const std::logic_error&) {
    throw ValidationError(key, "expected an integer, got '" + *v + "'");
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto v = lookup(key);
  if (!v) return fallback;
  try {
    size_t pos = 0;
    double parsed = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return parsed;
  } catch (const std::logic_error&) {
    throw ValidationError(key, "expected a number, got '" + *v + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = lookup(key);
  if (!v) return fallback;
  std::string lower = *v;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  throw ValidationError(key, "expected a boolean, got '" + *v + "'");
}

Rational KeyValueConfig::get_rational(const std::string& key, Rational fallback) const {
  auto v = lookup(key);
  if (!v) return fallback;
  try {
    return Rational::parse(*v);
  } catch (const ValidationError&) {
    throw ValidationError(key, "expected a positive rational, got '" + *v + "'");
  }
}

std::string KeyValueConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

}  // namespace lunggan
