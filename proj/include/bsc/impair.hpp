#pragma once

#include <vector>

#include "bsc/core.hpp"

namespace bsc {

struct ImpairmentConfig {
  Complex dc_offset{0.0, 0.0};  // d0, added before the CFO rotation
  double cfo_hz = 0.0;
  double initial_phase = 0.0;  // Φ0
  double noise_sigma2 = 0.0;   // total complex variance per sample
  double sample_period = 1e-6; // T_s

  void validate() const;
};

std::vector<Complex> apply_channel(const std::vector<Complex>& samples, Complex h_eq);

// y[n] = (x[n] + d0) e^{j(2π Δf n T_s + Φ0)} + w[n]; x already carries h_eq.
std::vector<Complex> apply_impairments(const std::vector<Complex>& samples, const ImpairmentConfig& cfg, Rng& rng);

}  // namespace bsc
