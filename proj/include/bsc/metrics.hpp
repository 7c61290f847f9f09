#pragma once

#include <cstdint>
#include <vector>

#include "bsc/core.hpp"

namespace bsc {

// Percent.
double evm_rms(const std::vector<Complex>& equalized, const std::vector<Complex>& reference);

struct MseDecomposition {
  double total = 0.0;  // magnitude_term + phase_term
  double magnitude_term = 0.0;
  double phase_term = 0.0;
};

MseDecomposition mse_decompose(Complex h_hat, Complex h_true);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t total, double z = 1.959963984540054);

struct BerCount {
  std::uint64_t errors = 0;
  std::uint64_t total = 0;
  double ber = 0.0;
  WilsonInterval ci;
};

BerCount ber_count(const std::vector<std::uint8_t>& decoded, const std::vector<std::uint8_t>& reference);

}  // namespace bsc
