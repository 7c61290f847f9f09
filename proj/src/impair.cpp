#include "bsc/impair.hpp"

#include <cmath>

namespace bsc {

void ImpairmentConfig::validate() const {
  if (!is_finite(dc_offset)) throw ConfigError("impairments: dc offset must be finite");
  if (!(noise_sigma2 >= 0.0) || !std::isfinite(noise_sigma2)) throw ConfigError("impairments: noise variance must be >= 0");
  if (!(sample_period > 0.0)) throw ConfigError("impairments: sample period must be positive");
  if (!(std::abs(cfo_hz) * sample_period < 0.5)) throw ConfigError("impairments: |cfo| * T_s must be below 0.5");
}

std::vector<Complex> apply_channel(const std::vector<Complex>& samples, Complex h_eq) {
  std::vector<Complex> out(samples.size());
  for (std::size_t n = 0; n < samples.size(); ++n) out[n] = h_eq * samples[n];
  return out;
}

std::vector<Complex> apply_impairments(const std::vector<Complex>& samples, const ImpairmentConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<Complex> out(samples.size());
  const bool rotate = cfg.cfo_hz != 0.0 || cfg.initial_phase != 0.0;
  const double step = 2.0 * kPi * cfg.cfo_hz * cfg.sample_period;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    Complex y = samples[n] + cfg.dc_offset;
    if (rotate) y *= std::polar(1.0, step * static_cast<double>(n) + cfg.initial_phase);
    if (cfg.noise_sigma2 > 0.0) y += rng.complex_normal(cfg.noise_sigma2);
    out[n] = y;
  }
  return out;
}

}  // namespace bsc
