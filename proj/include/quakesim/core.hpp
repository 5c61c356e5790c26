#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace quakesim {

enum class ErrorCode {
  InvalidArgument,
  DuplicateGenerator,
  OutOfWindow,
  InvalidRadius,
  ZeroAreaRegion,
  ZeroSpread,
  IsolatedPoints,
  SimulationSetupError,
  ZeroIntensityAtEvent,
  InvalidSite,
  FitDiverged,
  EmptyGrid,
  InvalidPga,
  InvalidDistance,
  RadiusOverflow,
  SignificanceUnreachable,
  MissingCost,
  ImputationImpossible,
  UnknownCategory,
  InvalidDpm,
  InvalidTerms,
  MissingExposure,
  TooFewExceedances,
  BelowThresholdReturn,
  BelowThresholdPml,
  InsufficientYears,
  LabelMismatch,
  ParseError,
  NotFound,
  Conflict,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DuplicateGenerator: return "DuplicateGenerator";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::InvalidRadius: return "InvalidRadius";
    case ErrorCode::ZeroAreaRegion: return "ZeroAreaRegion";
    case ErrorCode::ZeroSpread: return "ZeroSpread";
    case ErrorCode::IsolatedPoints: return "IsolatedPoints";
    case ErrorCode::SimulationSetupError: return "SimulationSetupError";
    case ErrorCode::ZeroIntensityAtEvent: return "ZeroIntensityAtEvent";
    case ErrorCode::InvalidSite: return "InvalidSite";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::InvalidPga: return "InvalidPga";
    case ErrorCode::InvalidDistance: return "InvalidDistance";
    case ErrorCode::RadiusOverflow: return "RadiusOverflow";
    case ErrorCode::SignificanceUnreachable: return "SignificanceUnreachable";
    case ErrorCode::MissingCost: return "MissingCost";
    case ErrorCode::ImputationImpossible: return "ImputationImpossible";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::InvalidDpm: return "InvalidDpm";
    case ErrorCode::InvalidTerms: return "InvalidTerms";
    case ErrorCode::MissingExposure: return "MissingExposure";
    case ErrorCode::TooFewExceedances: return "TooFewExceedances";
    case ErrorCode::BelowThresholdReturn: return "BelowThresholdReturn";
    case ErrorCode::BelowThresholdPml: return "BelowThresholdPml";
    case ErrorCode::InsufficientYears: return "InsufficientYears";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code plus
/// free-form details (offending index, missing key, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string details = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message),
        details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::string details_;
};

inline void require(bool cond, ErrorCode code, const std::string& message,
                    const std::string& details = {}) {
  if (!cond) throw Error(code, message, details);
}

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEarthRadiusKm = 6371.0;

// ---------------------------------------------------------------------------
// Money

/// CAD amount held as integer cents.
class Cents {
 public:
  constexpr Cents() = default;
  constexpr explicit Cents(std::int64_t v) : v_(v) {}

  static Cents from_dollars(double dollars) {
    return Cents(static_cast<std::int64_t>(std::llround(dollars * 100.0)));
  }

  constexpr std::int64_t value() const { return v_; }
  constexpr double dollars() const { return static_cast<double>(v_) / 100.0; }

  constexpr Cents& operator+=(Cents o) { v_ += o.v_; return *this; }
  constexpr Cents& operator-=(Cents o) { v_ -= o.v_; return *this; }
  friend constexpr Cents operator+(Cents a, Cents b) { return Cents(a.v_ + b.v_); }
  friend constexpr Cents operator-(Cents a, Cents b) { return Cents(a.v_ - b.v_); }
  friend constexpr auto operator<=>(Cents, Cents) = default;

  std::string to_string() const { return std::to_string(v_); }

 private:
  std::int64_t v_ = 0;
};

// ---------------------------------------------------------------------------
// Random streams

/// SplitMix64 finalizer, used both as a hash for stream keys and as the
/// state transition of Rng.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Small counter-style generator. A stream is fully determined by its key,
/// so any (seed, year, event, ...) tuple maps to an independent substream
/// regardless of evaluation order.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : state_(mix64(seed)) {}

  template <typename... Keys>
  static Rng keyed(std::uint64_t seed, Keys... keys) {
    std::uint64_t h = mix64(seed);
    ((h = mix64(h ^ mix64(static_cast<std::uint64_t>(keys) + 0x632be59bd9b4e019ULL))), ...);
    return Rng(h);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean = 0.0, double sd = 1.0) {
    if (sd == 0.0) return mean;
    std::normal_distribution<double> d(mean, sd);
    return d(*this);
  }

  std::int64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::int64_t> d(mean);
    return d(*this);
  }

 private:
  std::uint64_t state_;
};

/// Purposes used as the last component of keyed streams.
enum class StreamPurpose : std::uint64_t {
  Count = 1,
  Location = 2,
  Pga = 3,
  Damage = 4,
  CostUncertainty = 5,
  Exposure = 6,
  Test = 7,
};

/// Sequential compensated summation.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace quakesim
