#include "bsc/core.hpp"

#include <cmath>

namespace bsc {

double db_to_linear(DbValue x) { return std::pow(10.0, x.value / 10.0); }

DbValue linear_to_db(double x) {
  if (!(x > 0.0)) throw NumericError("linear_to_db: non-positive argument");
  return {10.0 * std::log10(x)};
}

std::string_view to_string(Modulation m) { return m == Modulation::ook ? "ook" : "bpsk"; }

Modulation parse_modulation(std::string_view s) {
  if (s == "ook" || s == "OOK") return Modulation::ook;
  if (s == "bpsk" || s == "BPSK") return Modulation::bpsk;
  throw ConfigError("unknown modulation '" + std::string(s) + "'");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Complex Rng::complex_normal(double total_variance) {
  const double s = std::sqrt(total_variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

Rng derive_trial_rng(Seed seed, std::string_view stream, std::uint64_t trial) {
  std::uint64_t k = splitmix64(seed.master);
  k = splitmix64(k ^ fnv1a64(stream));
  k = splitmix64(k ^ trial);
  return Rng(k);
}

}  // namespace bsc
