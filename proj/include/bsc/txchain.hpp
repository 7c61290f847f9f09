#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bsc/core.hpp"
#include "bsc/frame.hpp"

namespace bsc {

struct TagLoads {
  Complex z_antenna{50.0, 0.0};
  Complex z_load_1{0.0, 0.0};
  Complex z_load_2{1e9, 0.0};
  Complex structural_mode{0.0, 0.0};  // A_s
};

using Alphabet = std::array<Complex, 2>;  // point for bit 0, point for bit 1

Complex reflection_coeff(Complex z_load, Complex z_antenna);

struct AlphabetResult {
  Alphabet points;
  std::string warning;  // non-empty when BPSK loads are not antipodal
};

Alphabet ideal_alphabet(Modulation scheme);
AlphabetResult symbol_alphabet(const TagLoads& loads, Modulation scheme);

struct SymbolFrame {
  std::vector<Complex> symbols;
  std::vector<int> pilot_indices;
  std::vector<int> payload_indices;
  std::vector<std::uint8_t> payload_bits;
};

std::vector<Complex> alternating_pilots(int n);
std::vector<Complex> preamble_sequence(int n);

// `pilot_pattern` is one block; it is repeated for every block of the layout.
SymbolFrame assemble_frame(const FrameLayout& layout, const std::vector<std::uint8_t>& bits, const Alphabet& alphabet,
                           const std::vector<Complex>& pilot_pattern);

std::vector<Complex> synthesize_baseband(const std::vector<Complex>& symbols, int samples_per_symbol);

}  // namespace bsc
