#pragma once

#include <string>
#include <vector>

#include "bsc/core.hpp"
#include "bsc/fading.hpp"

namespace bsc {

enum class Placement { single_burst, per_slot };

struct FrameLayout {
  int tau_sync = 8;  // preamble length, symbols
  int tau_c = 0;     // frame length, symbols; 0 means "exactly what the layout needs"
  double tau_s = 2e-6;
  int slots_K = 1;
  int slot_len_M = 64;
  int pilot_N = 4;
  Placement placement = Placement::per_slot;

  int beta() const { return placement == Placement::single_burst ? 1 : slots_K; }
  int pilot_count() const { return beta() * pilot_N; }
  int payload_count() const { return slots_K * slot_len_M; }
  int used_symbols() const { return tau_sync + pilot_count() + payload_count(); }
  int frame_symbols() const { return tau_c > 0 ? tau_c : used_symbols(); }
  void validate() const;
};

struct IndexSets {
  std::vector<int> pilots;   // absolute symbol positions within the frame
  std::vector<int> payload;
  std::vector<int> pilot_block_start;  // first pilot position of each block
};

IndexSets pilot_index_set(const FrameLayout& layout);

double crlb_mse(double tau_e, double p0, double n0);

struct AllocationProblem {
  double p0 = 1.0;
  double n0 = 1.0;
  double sigma_h2 = 1.0;   // E|h_eq|²
  double gamma_eff = 10.0; // linear
  double ber_target = 1e-2;
  double rate_min = 0.0;   // bits/s/Hz
  Modulation scheme = Modulation::bpsk;
  // Shape of the fading law used to turn the BER target into an SNR threshold.
  ChannelParams channel = ChannelParams::unit_power(0.0, 0.0);

  double alpha() const { return gamma_eff * n0 / (p0 * sigma_h2); }
};

double spectral_efficiency(double tau_e, const AllocationProblem& prob, double tau_c);

// Inverse of avg_ber_quadrature in γ̄_eff for the channel shape in `channel`.
double snr_threshold_for_ber(double ber_target, Modulation scheme, const ChannelParams& channel);

struct AllocationResult {
  double tau_hat = 0.0;   // unconstrained stationary point, seconds
  double tau_min = 0.0;
  double tau_max = 0.0;
  double tau_star = 0.0;  // clipped
  double gamma_tar = 0.0;
  double rate_at_star = 0.0;
  bool clipped_low = false;
  bool clipped_high = false;
  int evaluations = 0;
};

AllocationResult optimize_training(const AllocationProblem& prob, const FrameLayout& layout);

int quantize_pilot_length(double tau_e_star, const FrameLayout& layout, double tau_max_seconds = INFINITY,
                          double tau_min_seconds = 0.0);

}  // namespace bsc
