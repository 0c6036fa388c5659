#include "lunggan/common.hpp"

#include <cctype>
#include <numeric>

namespace lunggan {

uint64_t mix_seed(uint64_t seed, const std::string& tag) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return seed ^ h;
}

Rational Rational::parse(const std::string& text) {
  auto bad = [&]() {
    return ValidationError("width_multiplier",
                           "expected a positive rational like '1', '1/8' or '3/4', got '" + text + "'");
  };
  if (text.empty()) throw bad();
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '/') throw bad();
  }
  auto parse_part = [&](const std::string& part) {
    size_t pos = 0;
    int64_t parsed = std::stoll(part, &pos);
    if (pos != part.size()) throw bad();
    return parsed;
  };
  int64_t num = 0, den = 1;
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      num = parse_part(text);
    } else {
      if (slash == 0 || slash + 1 >= text.size()) throw bad();
      num = parse_part(text.substr(0, slash));
      den = parse_part(text.substr(slash + 1));
    }
  } catch (const std::logic_error&) {
    throw bad();
  }
  if (num <= 0 || den <= 0) throw bad();
  int64_t g = std::gcd(num, den);
  return Rational{num / g, den / g};
}

int64_t Rational::scale(int64_t channels) const {
  int64_t scaled_num = channels * num;
  if (scaled_num % den != 0) {
    throw ValidationError("width_multiplier",
                          "multiplier " + str() + " does not scale channel count " +
                              std::to_string(channels) + " to an integer");
  }
  int64_t scaled = scaled_num / den;
  if (scaled < 1) {
    throw ValidationError("width_multiplier",
                          "multiplier " + str() + " scales channel count " +
                              std::to_string(channels) + " below 1");
  }
  return scaled;
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

}  // namespace lunggan
