#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsc/config.hpp"
#include "bsc/metrics.hpp"
#include "bsc/rxchain.hpp"

namespace bsc {

struct GridPoint {
  std::size_t index = 0;
  double snr_db = 0.0;  // γ̄_eff
  double k_db = NAN;    // NaN when the channel comes straight from the config
  ChannelParams channel;
  double es_over_n0 = 0.0;
  double noise_sigma2 = 0.0;  // symbol-level σ_w²
};

std::vector<GridPoint> grid_points(const ExperimentConfig& cfg);

struct MethodRecord {
  std::uint32_t bit_errors = 0;
  std::uint32_t bits = 0;
  bool flagged = false;  // deep fade or non-identifiable pilots
  double sq_error = 0.0;
  double mag_term = 0.0;
  double phase_term = 0.0;
  double predicted_var = 0.0;
  double evm_err = 0.0;  // Σ|z - x|² over the payload
  double evm_ref = 0.0;  // Σ|x|²
  Complex h_hat{0.0, 0.0};
  double phi1_hat = 0.0;
};

struct TrialRecord {
  Complex h_true{0.0, 0.0};
  std::vector<MethodRecord> methods;  // parallel to cfg.estimation.methods
  double cfo_error_hz = 0.0;
  Complex dc_residual{0.0, 0.0};
  std::vector<std::uint8_t> tx_bits;  // only kept when requested
  std::vector<std::vector<std::uint8_t>> rx_bits;
};

struct TrialOptions {
  bool pilots_only = false;  // skip payload synthesis (estimator MSE studies)
  bool keep_bits = false;
  const std::vector<std::uint8_t>* payload = nullptr;  // fixed bits instead of random ones
};

// LMMSE prior for a grid point, from ground truth or a calibration run.
Prior make_prior(const ExperimentConfig& cfg, const GridPoint& pt);

TrialRecord run_trial(const ExperimentConfig& cfg, const GridPoint& pt, const Prior& prior, std::uint64_t trial,
                      const TrialOptions& opt = {});

struct MethodSummary {
  Method method = Method::perfect_csi;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
  std::uint64_t frames = 0;
  std::uint64_t flagged = 0;
  double sum_sq_error = 0.0;
  double sum_mag = 0.0;
  double sum_phase = 0.0;
  double sum_predicted_var = 0.0;
  double sum_evm_err = 0.0;
  double sum_evm_ref = 0.0;

  double ber() const { return bits ? static_cast<double>(bit_errors) / static_cast<double>(bits) : 0.0; }
  WilsonInterval ber_ci() const { return wilson_interval(bit_errors, bits); }
  std::uint64_t estimated_frames() const { return frames - flagged; }
  double mse() const;
  double mse_magnitude() const;
  double mse_phase() const;
  double mean_predicted_var() const;
  double evm_percent() const;
};

// Partial aggregate over the contiguous trial range [first_trial, first_trial + count).
struct Batch {
  std::uint64_t first_trial = 0;
  std::uint64_t count = 0;
  std::vector<MethodSummary> methods;
  double sum_cfo_sq = 0.0;
  double sum_dc_sq = 0.0;

  void add(const TrialRecord& r);
};

Batch make_batch(const ExperimentConfig& cfg, std::uint64_t first_trial);
// Folds batches in trial order whatever order they arrive in, so totals are
// reproducible bit for bit.
Batch merge_batches(std::vector<Batch> batches);

struct PointResult {
  GridPoint point;
  std::uint64_t trials = 0;
  std::vector<MethodSummary> methods;
  double cfo_rms_hz = 0.0;
  double dc_residual_rms = 0.0;
  double ber_quadrature = NAN;
  double ber_closed_form = NAN;
};

struct SweepResult {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> method_names;
  std::vector<PointResult> points;
};

enum class SweepKind { ber, mse };

PointResult run_point(const ExperimentConfig& cfg, const GridPoint& pt, SweepKind kind);
SweepResult ber_sweep(const ExperimentConfig& cfg);
SweepResult mse_sweep(const ExperimentConfig& cfg);

std::string sweep_to_csv(const SweepResult& r, SweepKind kind);
std::string point_to_json(const ExperimentConfig& cfg, const PointResult& p);

// Closed-form fidelity table over the config grid: quadrature, Chiani + Laplace
// and Meijer-G values per point (all three OOK parameter-row readings for OOK).
std::string analytic_ber_csv(const ExperimentConfig& cfg);

// Pilot-length optimization for the config's layout, channel and allocation
// section at the first sweep SNR. Throws InfeasibleError naming the violated
// constraint.
std::string allocation_report(const ExperimentConfig& cfg);

struct ImageRoundtrip {
  std::vector<std::vector<std::uint8_t>> recovered;  // per method
  std::vector<BerCount> ber;                          // per method
  std::uint64_t frames = 0;
  std::uint64_t pad_bits = 0;
  std::uint64_t flagged_frames = 0;
};

// Uses the first grid point of the config.
ImageRoundtrip image_roundtrip(const ExperimentConfig& cfg, const std::vector<std::uint8_t>& payload);

struct Pnm {
  std::string header;  // magic, dimensions and maxval, including the final whitespace byte
  std::vector<std::uint8_t> pixels;
};

// Binary P5/P6 with maxval < 256. Returns false when the input is not such a file.
bool parse_pnm(const std::vector<std::uint8_t>& bytes, Pnm& out);

std::string format_number(double v);  // 9 significant digits
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace bsc
