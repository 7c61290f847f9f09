#include "bsc/metrics.hpp"

#include <cmath>

namespace bsc {

double evm_rms(const std::vector<Complex>& equalized, const std::vector<Complex>& reference) {
  if (equalized.size() != reference.size()) throw ConfigError("evm: length mismatch");
  double err = 0.0, ref = 0.0;
  for (std::size_t n = 0; n < reference.size(); ++n) {
    err += std::norm(equalized[n] - reference[n]);
    ref += std::norm(reference[n]);
  }
  if (!(ref > 0.0)) throw NumericError("evm: reference power is zero");
  return 100.0 * std::sqrt(err / ref);
}

MseDecomposition mse_decompose(Complex h_hat, Complex h_true) {
  // Both terms are formed from d = ĥ - h so that small errors keep full
  // relative precision.
  const Complex d = h_hat - h_true;
  const double r_hat = std::abs(h_hat);
  const double r = std::abs(h_true);
  MseDecomposition m;
  if (r_hat + r > 0.0) {
    const double diff_sq = std::real(d * std::conj(h_hat + h_true));  // r̂² - r²
    const double dr = diff_sq / (r_hat + r);
    m.magnitude_term = dr * dr;
  }
  const Complex dh = d * std::conj(h_true);
  const double dpsi = std::atan2(dh.imag(), r * r + dh.real());  // principal value in (-π, π]
  const double s = std::sin(0.5 * dpsi);
  m.phase_term = 4.0 * r_hat * r * s * s;
  m.total = m.magnitude_term + m.phase_term;
  return m;
}

WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t total, double z) {
  if (total == 0) return {0.0, 1.0};
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

BerCount ber_count(const std::vector<std::uint8_t>& decoded, const std::vector<std::uint8_t>& reference) {
  if (decoded.size() != reference.size()) throw ConfigError("ber_count: length mismatch");
  BerCount b;
  b.total = reference.size();
  for (std::size_t i = 0; i < reference.size(); ++i) b.errors += (decoded[i] != 0) != (reference[i] != 0);
  b.ber = b.total ? static_cast<double>(b.errors) / static_cast<double>(b.total) : 0.0;
  b.ci = wilson_interval(b.errors, b.total);
  return b;
}

}  // namespace bsc
