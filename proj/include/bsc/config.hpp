#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bsc/core.hpp"
#include "bsc/fading.hpp"
#include "bsc/frame.hpp"
#include "bsc/rxchain.hpp"
#include "bsc/txchain.hpp"

namespace bsc {

inline constexpr int kSchemaVersion = 1;

enum class PriorMode { truth, calibrated };

struct EstimationConfig {
  std::vector<Method> methods = {Method::perfect_csi, Method::reference, Method::ls_lifted, Method::lmmse_lifted};
  IndexOrigin origin = IndexOrigin::pilot_start;
  double phase_slope_std = 0.0;  // rad/symbol, drawn per frame
  PriorMode prior_mode = PriorMode::truth;
  int calibration_trials = 500;
};

struct ImpairmentSettings {
  bool full_chain = false;  // CFO/DC stages on
  Complex dc_offset{0.0, 0.0};
  double cfo_hz = 0.0;
  double initial_phase = 0.0;
  int cfo_window = 1024;
};

// Inputs of the pilot-length optimizer; channel power and γ̄_eff come from the
// channel section and the first sweep point.
struct AllocationSettings {
  double p0 = 1.0;  // W
  double n0 = NAN;  // W/Hz; NaN means p0·σ_h²·τ_s/γ̄_eff, i.e. α = τ_s
  double ber_target = 1e-3;
  double rate_min = 0.0;  // bits/s/Hz
};

struct ExperimentConfig {
  std::string name = "experiment";
  Seed seed;
  Modulation scheme = Modulation::bpsk;
  ChannelParams channel = ChannelParams::unit_power(0.0, 0.0);
  FrameLayout layout;
  int samples_per_symbol = 8;
  bool use_tag_loads = false;
  TagLoads tag_loads;
  EstimationConfig estimation;
  ImpairmentSettings impairments;
  AllocationSettings allocation;
  std::vector<double> snr_db = {10.0};  // γ̄_eff grid
  std::vector<double> k_db;             // optional; each entry sets both hops, unit power
  std::uint64_t trials = 10000;
  bool parallel = true;

  void validate() const;
};

// JSON text <-> config. Unknown keys are rejected so typos cannot silently
// fall back to defaults.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace bsc
