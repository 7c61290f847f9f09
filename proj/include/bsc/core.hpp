#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bsc {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

struct DbValue {
  double value = 0.0;
};

double db_to_linear(DbValue x);
DbValue linear_to_db(double x);

enum class Modulation { ook, bpsk };

std::string_view to_string(Modulation m);
Modulation parse_modulation(std::string_view s);

// Error taxonomy shared by every module. The CLI maps each to an exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Seed {
  std::uint64_t master = 1;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

class Rng {
 public:
  explicit Rng(std::uint64_t state) : engine_(state) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return normal_(engine_); }
  // Circular complex Gaussian with E|z|^2 = total_variance.
  Complex complex_normal(double total_variance);
  int bit() { return static_cast<int>(engine_() >> 63); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// The only way randomness enters the library: the stream is a pure function
// of (master seed, label, trial), so execution order cannot change results.
Rng derive_trial_rng(Seed seed, std::string_view stream, std::uint64_t trial);

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace bsc
