#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bsc/core.hpp"
#include "bsc/frame.hpp"
#include "bsc/txchain.hpp"

namespace bsc {

struct PilotStats {
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  Complex t0{0.0, 0.0};
  Complex t1{0.0, 0.0};

  double delta() const { return s0 * s2 - s1 * s1; }
};

// `reference` is the no-estimation receiver: it divides by a single raw pilot
// sample, which is the phase/amplitude reference CFO correction leaves behind.
enum class Method { ls_lifted, ls_ordinary, lmmse_lifted, lmmse_ordinary, perfect_csi, reference };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

struct ChannelEstimate {
  Complex h_hat{0.0, 0.0};
  std::optional<double> phi1_hat;
  double predicted_var = 0.0;
  Method method = Method::ls_lifted;
};

struct Prior {
  Complex mu_h{0.0, 0.0};
  double sigma_h2 = 1.0;
  Complex mu_phi{0.0, 0.0};  // prior mean of the slope coefficient θ1
  double sigma_phi2 = 1e-6;  // prior variance of θ1

  void validate() const;
};

enum class IndexOrigin { pilot_start, centered, payload_center };

std::string_view to_string(IndexOrigin o);
IndexOrigin parse_index_origin(std::string_view s);

// Symbol position that index n = 0 refers to.
double index_origin_position(const IndexSets& sets, IndexOrigin origin);
std::vector<double> relative_pilot_indices(const IndexSets& sets, IndexOrigin origin);

struct CfoEstimate {
  double delta_f_hz = 0.0;
  double magnitude = 0.0;  // |mean u[n]|
  bool low_confidence = false;
};

CfoEstimate estimate_cfo(const std::vector<Complex>& samples, std::size_t n0, std::size_t window,
                         double sample_period);
std::vector<Complex> correct_cfo(const std::vector<Complex>& samples, double delta_f_hat, std::size_t n0,
                                 double sample_period);

std::vector<Complex> matched_filter_downsample(const std::vector<Complex>& samples, int samples_per_symbol);

Complex estimate_dc(const std::vector<Complex>& symbols, const std::vector<int>& pilot_indices);
std::vector<Complex> remove_dc(const std::vector<Complex>& symbols, Complex dc_hat);

PilotStats pilot_stats(const std::vector<Complex>& received, const std::vector<Complex>& known,
                       const std::vector<double>& indices);

// noise_sigma2 only feeds predicted_var; pass NaN when it is unknown.
ChannelEstimate ls_estimate(const PilotStats& st, double noise_sigma2 = NAN);
ChannelEstimate ls_ordinary(const PilotStats& st, double noise_sigma2 = NAN);
ChannelEstimate lmmse_estimate(const PilotStats& st, const Prior& prior, double noise_sigma2);
ChannelEstimate lmmse_ordinary(const PilotStats& st, const Prior& prior, double noise_sigma2);

struct EqualizationError : NumericError {
  using NumericError::NumericError;
};

// Throws EqualizationError when |ĥ| < floor.
std::vector<Complex> zf_equalize(const std::vector<Complex>& payload, const ChannelEstimate& est, double floor);

// Decision along the segment between the two alphabet points: threshold at
// the midpoint, ties go to bit 0. For the ideal alphabets this is Re(z) > 1/2
// (OOK) and Re(z) > 0 (BPSK).
std::vector<std::uint8_t> demodulate(const std::vector<Complex>& equalized, const Alphabet& alphabet);

// Residual power of the two-parameter fit with k - 2 degrees of freedom.
double estimate_noise_variance(const std::vector<Complex>& received, const std::vector<Complex>& known,
                               const std::vector<double>& indices);

}  // namespace bsc
