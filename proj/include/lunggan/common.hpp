#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace lunggan {

inline constexpr const char* kVersion = "0.1.0";

// Fixed patch geometry: depth x height x width voxels.
inline constexpr int64_t kPatchDepth = 32;
inline constexpr int64_t kPatchHeight = 64;
inline constexpr int64_t kPatchWidth = 64;
inline constexpr int64_t kPatchVoxels = kPatchDepth * kPatchHeight * kPatchWidth;

inline constexpr int64_t kLatentDim = 512;

// Intensity window in Hounsfield units mapped linearly onto [-1, 1].
inline constexpr float kHuWindowLow = -1000.0f;
inline constexpr float kHuWindowHigh = 400.0f;

// Nodules whose median radiologist malignancy score reaches this value
// exclude the whole scan from training.
inline constexpr double kMalignancyExclusionThreshold = 4.0;

inline constexpr int kMinibatchesPerScan = 14;

using Rng = std::mt19937_64;

// Derives an independent stream seed by folding a purpose tag (FNV-1a) into
// a master seed, so subsystems never share random streams.
uint64_t mix_seed(uint64_t seed, const std::string& tag);

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A required input could not be read (missing file, bad magic, parse failure).
struct LoadError : Error {
  using Error::Error;
};

// Inputs were readable but mutually inconsistent (e.g. mask/volume shape mismatch).
struct IntegrityError : Error {
  using Error::Error;
};

// A configuration value is out of its legal domain; carries the offending key.
struct ValidationError : Error {
  explicit ValidationError(const std::string& key_, const std::string& msg)
      : Error("config key '" + key_ + "': " + msg), key(key_) {}
  std::string key;
};

// An operation received arguments that violate its contract.
struct ArgumentError : Error {
  using Error::Error;
};

struct UnsupportedOperationError : Error {
  using Error::Error;
};

// Patch rejection sampling could not find any admissible center.
struct SamplingError : Error {
  using Error::Error;
};

// Rejection sampling ran out of retry budget before filling the request.
struct PartialYieldError : SamplingError {
  PartialYieldError(int64_t accepted_, int64_t requested_)
      : SamplingError("patch sampling accepted " + std::to_string(accepted_) +
                      " of " + std::to_string(requested_) +
                      " requested patches before exhausting the retry budget"),
        accepted(accepted_),
        requested(requested_) {}
  int64_t accepted;
  int64_t requested;
};

// A numerical routine failed to converge or produced an invalid result.
struct NumericalError : Error {
  using Error::Error;
};

// Training hit a non-finite loss; message carries a diagnostic snapshot.
struct TrainingDivergedError : Error {
  using Error::Error;
};

// Exact rational scale factor for channel widths; avoids float rounding when
// deciding whether a scaled channel count is integral.
struct Rational {
  int64_t num = 1;
  int64_t den = 1;

  static Rational parse(const std::string& text);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  // Scales a channel count, requiring an exact positive integer result.
  int64_t scale(int64_t channels) const;
  std::string str() const;
  bool operator==(const Rational&) const = default;
};

}  // namespace lunggan
