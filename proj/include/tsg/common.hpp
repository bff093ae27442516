#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsg {

/// Error classes map one-to-one onto the C API status codes and the CLI
/// exit codes (validation = 2, numeric = 3, budget = 4).
enum class ErrorKind { validation, config, numeric, io, budget };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

/// Self-contained counter-free PRNG (xoshiro256++ seeded via splitmix64).
/// The standard <random> distributions are implementation-defined, so all
/// stochastic code draws from this generator to keep runs reproducible
/// byte-for-byte across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform draw in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal via the polar method.
  double normal();
  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi);

  /// Deterministic seed derivation for per-candidate / per-start streams.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

private:
  std::uint64_t state_[4];
};

/// FNV-1a over raw bytes; used for cache keys and seed salting.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t fnv1a(double v, std::uint64_t h);
std::uint64_t fnv1a(const std::vector<double>& v, std::uint64_t h);

/// Piecewise-linear time series; a single sample behaves as a constant.
/// Evaluation clamps outside the sampled range.
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;

  TimeSeries() = default;
  explicit TimeSeries(double constant) : times{0.0}, values{constant} {}
  TimeSeries(std::vector<double> t, std::vector<double> v);

  double eval(double t) const;
  double min_value() const;
  bool empty() const { return values.empty(); }
};

std::string format_double(double v);  // shortest round-trip representation

}  // namespace tsg
