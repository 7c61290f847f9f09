#include "bsc/analytic.hpp"

#include <cmath>

#include "bsc/special.hpp"

namespace bsc {

double q_chiani(double x) {
  if (x < 0.0) throw NumericError("q_chiani: negative argument");
  return std::exp(-0.5 * x * x) / 12.0 + 0.25 * std::exp(-2.0 * x * x / 3.0);
}

double conditional_ber(Modulation scheme, double gamma) {
  return scheme == Modulation::ook ? q_function(std::sqrt(gamma / 2.0)) : q_function(std::sqrt(2.0 * gamma));
}

double laplace_r2(double s, const ChannelParams& p) {
  if (s < 0.0) throw NumericError("laplace_r2: s must be >= 0");
  const auto q = envelope_quadrature(p);
  return q->expect([s](double r) { return std::exp(-s * r * r); });
}

double laplace_r2_monte_carlo(double s, const ChannelParams& p, std::uint64_t samples, Seed seed,
                              double* standard_error) {
  Rng rng = derive_trial_rng(seed, "laplace_r2", 0);
  double sum = 0.0, sum2 = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double v = std::exp(-s * std::norm(sample_h_eq(p, rng)));
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  if (standard_error) *standard_error = std::sqrt(std::max(sum2 / n - mean * mean, 0.0) / n);
  return mean;
}

double avg_ber_quadrature(Modulation scheme, const ChannelParams& p, double es_over_n0) {
  if (!(es_over_n0 >= 0.0)) throw NumericError("avg_ber_quadrature: Es/N0 must be >= 0");
  const auto q = envelope_quadrature(p);
  return q->expect([&](double r) { return conditional_ber(scheme, es_over_n0 * r * r); });
}

double avg_ber_chiani_laplace(Modulation scheme, const ChannelParams& p, double es_over_n0) {
  // Q(sqrt(c γ)) <= e^{-cγ/2}/12 + e^{-2cγ/3}/4 with c = 1/2 (OOK) or 2 (BPSK).
  const double c = scheme == Modulation::ook ? 0.5 : 2.0;
  return laplace_r2(c * es_over_n0 / 2.0, p) / 12.0 + 0.25 * laplace_r2(2.0 * c * es_over_n0 / 3.0, p);
}

std::array<double, 3> ook_closed_b() { return {1.0, 0.5, 0.0}; }

double ook_closed_a1(OokRowConvention c) {
  switch (c) {
    case OokRowConvention::a1_is_1: return 1.0;
    case OokRowConvention::a1_is_half: return 0.5;
    case OokRowConvention::a1_is_0: return 0.0;
  }
  return 1.0;
}

OokRowConvention default_ook_convention() { return OokRowConvention::a1_is_0; }

double avg_ber_ook_closed(double gamma_eff, OokRowConvention c) {
  if (!(gamma_eff > 0.0)) throw NumericError("avg_ber_ook_closed: gamma_eff must be positive");
  return meijer_g_3_0_1_3(gamma_eff / 4.0, ook_closed_a1(c), ook_closed_b()).value / 12.0;
}

double avg_ber_bpsk_closed(double gamma_eff) {
  if (!(gamma_eff > 0.0)) throw NumericError("avg_ber_bpsk_closed: gamma_eff must be positive");
  const std::array<double, 3> b = {1.0, 1.0, 1.0};
  return meijer_g_3_0_1_3(gamma_eff, 1.0, b).value / 12.0 +
         0.25 * meijer_g_3_0_1_3(4.0 * gamma_eff / 3.0, 1.0, b).value;
}

double effective_snr_with_ce(double gamma_eff, double sigma_e2, double sigma_h2) {
  return gamma_eff / (1.0 + gamma_eff * sigma_e2 / sigma_h2);
}

double effective_snr_training(double gamma_eff, double tau_e, double alpha) {
  if (tau_e <= 0.0) return 0.0;
  return gamma_eff * tau_e / (tau_e + alpha);
}

double effective_snr_ls(double gamma_eff, double gamma_e, double s0, double s1, double s2, double sigma_h2) {
  const double delta = s0 * s2 - s1 * s1;
  if (!(delta > 1e-9 * s0 * s2) || !(delta > 0.0)) throw NumericError("effective_snr_ls: non-identifiable pilot design");
  if (std::isinf(gamma_e)) return gamma_eff;
  return effective_snr_with_ce(gamma_eff, s2 / (gamma_e * delta), sigma_h2);
}

double effective_snr_lmmse(double gamma_eff, double b00, double b01, double b11, double sigma_h2) {
  const double delta_b = b00 * b11 - b01 * b01;
  if (!(delta_b > 0.0)) throw NumericError("effective_snr_lmmse: non-positive posterior determinant");
  return effective_snr_with_ce(gamma_eff, b11 / delta_b, sigma_h2);
}

}  // namespace bsc
