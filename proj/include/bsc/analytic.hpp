#pragma once

#include <array>
#include <cstdint>

#include "bsc/core.hpp"
#include "bsc/fading.hpp"

namespace bsc {

double q_chiani(double x);

// Conditional bit error probability at instantaneous SNR gamma.
double conditional_ber(Modulation scheme, double gamma);

// E[exp(-s r²)] against the envelope law.
double laplace_r2(double s, const ChannelParams& p);
double laplace_r2_monte_carlo(double s, const ChannelParams& p, std::uint64_t samples, Seed seed,
                              double* standard_error = nullptr);

// Ground-truth average BER: the conditional law averaged over the envelope.
double avg_ber_quadrature(Modulation scheme, const ChannelParams& p, double es_over_n0);

// The exponential-fit route: conditional Q replaced by the two-term Chiani
// bound and averaged exactly through the Laplace transform of r².
double avg_ber_chiani_laplace(Modulation scheme, const ChannelParams& p, double es_over_n0);

// Which entry of the printed OOK parameter row is the upper parameter a1.
enum class OokRowConvention { a1_is_1, a1_is_half, a1_is_0 };

std::array<double, 3> ook_closed_b();
double ook_closed_a1(OokRowConvention c);
OokRowConvention default_ook_convention();

double avg_ber_ook_closed(double gamma_eff, OokRowConvention c = default_ook_convention());
double avg_ber_bpsk_closed(double gamma_eff);

double effective_snr_with_ce(double gamma_eff, double sigma_e2, double sigma_h2);
// Training-time form: γ̄ τ/(τ + α).
double effective_snr_training(double gamma_eff, double tau_e, double alpha);

// gamma_e is the pilot SNR (unit-energy pilots over σ_w²).
double effective_snr_ls(double gamma_eff, double gamma_e, double s0, double s1, double s2, double sigma_h2);
double effective_snr_lmmse(double gamma_eff, double b00, double b01, double b11, double sigma_h2);

}  // namespace bsc
