#include "bsc/txchain.hpp"

#include <cmath>

namespace bsc {

Complex reflection_coeff(Complex z_load, Complex z_antenna) {
  const Complex den = z_load + z_antenna;
  if (std::abs(den) < 1e-12 * (std::abs(z_load) + std::abs(z_antenna) + 1e-300))
    throw NumericError("reflection_coeff: Z_L + Z_a is zero");
  return (z_load - std::conj(z_antenna)) / den;
}

Alphabet ideal_alphabet(Modulation scheme) {
  if (scheme == Modulation::ook) return {Complex(0.0, 0.0), Complex(1.0, 0.0)};
  return {Complex(-1.0, 0.0), Complex(1.0, 0.0)};
}

AlphabetResult symbol_alphabet(const TagLoads& loads, Modulation scheme) {
  if (!(loads.z_antenna.real() > 0.0)) throw ConfigError("tag loads: Re(Z_a) must be positive");
  const Complex xi1 = reflection_coeff(loads.z_load_1, loads.z_antenna);
  const Complex xi2 = reflection_coeff(loads.z_load_2, loads.z_antenna);
  AlphabetResult out;
  out.points = {loads.structural_mode - xi1, loads.structural_mode - xi2};
  if (scheme == Modulation::bpsk && std::abs(xi1 + xi2) > 1e-3 * std::max(std::abs(xi1), std::abs(xi2))) {
    const double deg = std::abs(std::arg(xi1 / xi2)) * 180.0 / kPi;
    out.warning = "BPSK reflection coefficients are not antipodal (separation " + std::to_string(deg) + " deg)";
  }
  return out;
}

std::vector<Complex> alternating_pilots(int n) {
  std::vector<Complex> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = (i % 2 == 0) ? 1.0 : -1.0;
  return p;
}

std::vector<Complex> preamble_sequence(int n) {
  // Fixed maximal-length sequence from a 7-bit LFSR (x^7 + x^6 + 1).
  std::vector<Complex> p(static_cast<std::size_t>(n));
  unsigned state = 0x5b;
  for (int i = 0; i < n; ++i) {
    const unsigned bit = ((state >> 6) ^ (state >> 5)) & 1u;
    state = ((state << 1) | bit) & 0x7fu;
    p[static_cast<std::size_t>(i)] = bit ? 1.0 : -1.0;
  }
  return p;
}

SymbolFrame assemble_frame(const FrameLayout& layout, const std::vector<std::uint8_t>& bits, const Alphabet& alphabet,
                           const std::vector<Complex>& pilot_pattern) {
  if (static_cast<int>(bits.size()) != layout.payload_count())
    throw ConfigError("assemble_frame: expected " + std::to_string(layout.payload_count()) + " bits, got " +
                      std::to_string(bits.size()));
  if (static_cast<int>(pilot_pattern.size()) != layout.pilot_N)
    throw ConfigError("assemble_frame: pilot pattern length must equal N");
  Complex mean(0.0, 0.0);
  for (const Complex& x : pilot_pattern) mean += x;
  if (std::abs(mean) > 1e-12 * static_cast<double>(pilot_pattern.size()))
    throw ConfigError("assemble_frame: pilot block must have zero mean (use an even N with antipodal pilots)");
  const IndexSets idx = pilot_index_set(layout);
  SymbolFrame f;
  f.symbols.assign(static_cast<std::size_t>(layout.frame_symbols()), Complex(0.0, 0.0));
  const auto pre = preamble_sequence(layout.tau_sync);
  for (int i = 0; i < layout.tau_sync; ++i) f.symbols[static_cast<std::size_t>(i)] = pre[static_cast<std::size_t>(i)];
  for (std::size_t k = 0; k < idx.pilots.size(); ++k)
    f.symbols[static_cast<std::size_t>(idx.pilots[k])] = pilot_pattern[k % pilot_pattern.size()];
  for (std::size_t k = 0; k < idx.payload.size(); ++k)
    f.symbols[static_cast<std::size_t>(idx.payload[k])] = alphabet[bits[k] ? 1 : 0];
  f.pilot_indices = idx.pilots;
  f.payload_indices = idx.payload;
  f.payload_bits = bits;
  return f;
}

std::vector<Complex> synthesize_baseband(const std::vector<Complex>& symbols, int samples_per_symbol) {
  if (samples_per_symbol < 1) throw ConfigError("synthesize_baseband: samples per symbol must be >= 1");
  std::vector<Complex> out;
  out.reserve(symbols.size() * static_cast<std::size_t>(samples_per_symbol));
  for (const Complex& s : symbols)
    for (int k = 0; k < samples_per_symbol; ++k) out.push_back(s);
  return out;
}

}  // namespace bsc
