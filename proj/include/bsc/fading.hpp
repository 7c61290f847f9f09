#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "bsc/core.hpp"

namespace bsc {

struct HopParams {
  double k = 0.0;       // linear Rician K-factor
  double sigma2 = 1.0;  // total diffuse power (σ²/2 per real dimension)
  double los_phase = 0.0;

  Complex los() const { return std::polar(std::sqrt(k * sigma2), los_phase); }
};

struct ChannelParams {
  double k_tt = 0.0;
  double k_tr = 0.0;
  double sigma2_tt = 1.0;
  double sigma2_tr = 1.0;
  double los_phase_tt = 0.0;
  double los_phase_tr = 0.0;

  HopParams forward() const { return {k_tt, sigma2_tt, los_phase_tt}; }
  HopParams backscatter() const { return {k_tr, sigma2_tr, los_phase_tr}; }

  // Both hops with K-factor k and σ² = 1/(1+k), so E|h_eq|² = 1.
  static ChannelParams unit_power(double k_tt, double k_tr);

  void validate() const;
  bool operator==(const ChannelParams&) const = default;
};

Complex sample_hop(const HopParams& hop, Rng& rng);
Complex sample_h_eq(const ChannelParams& p, Rng& rng);

Complex mean_h_eq(const ChannelParams& p);  // V_tt V_tr
double mean_square_gain(const ChannelParams& p);
double variance_h_eq(const ChannelParams& p);  // E|h|² - |E h|²
double avg_effective_snr(const ChannelParams& p, double es_over_n0);

// Double-series density of r = |h_eq|. Coefficients that depend only on the
// channel are computed once; operator() is safe to call concurrently.
class EnvelopePdf {
 public:
  static constexpr int kMaxTermCap = 1280;

  // term_cap is the starting truncation of each series index; it doubles up
  // to kMaxTermCap where the tail needs more terms.
  explicit EnvelopePdf(const ChannelParams& p, int term_cap = 80);

  double operator()(double r) const;
  // Radius beyond which the remaining probability mass is negligible (< 1e-13).
  double r_max() const { return r_max_; }
  const ChannelParams& params() const { return p_; }

 private:
  ChannelParams p_;
  int cap_;
  double s1_, s2_;  // per-dimension standard deviations of the two hops
  std::vector<double> log_fact_sq_;
  double r_max_ = 0.0;
};

double envelope_pdf(double r, const ChannelParams& p);
double snr_pdf(double gamma, const ChannelParams& p, double es_over_n0);

// Expectations E[f(r)] against the envelope law as a fixed weighted node set.
// Panels are geometric towards r = 0 and refined until a Kronrod/Gauss pair
// agrees on the density and on r² times the density.
class EnvelopeQuadrature {
 public:
  explicit EnvelopeQuadrature(const ChannelParams& p);

  template <class F>
  double expect(F&& f) const {
    if (degenerate_) return f(degenerate_r_);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(nodes_[i]);
    return acc;
  }

  const EnvelopePdf& pdf() const { return *pdf_; }
  std::size_t size() const { return nodes_.size(); }
  bool degenerate() const { return degenerate_; }

 private:
  std::unique_ptr<EnvelopePdf> pdf_;
  std::vector<double> nodes_;
  std::vector<double> weights_;  // quadrature weight times density
  bool degenerate_ = false;      // both hops deterministic
  double degenerate_r_ = 0.0;
};

// Shared, thread-safe cache keyed by channel parameters.
std::shared_ptr<const EnvelopeQuadrature> envelope_quadrature(const ChannelParams& p);

// CDF of r on a grid with cubic Hermite interpolation (density as slope).
class EnvelopeCdf {
 public:
  explicit EnvelopeCdf(const ChannelParams& p, int intervals = 512);
  double operator()(double r) const;

 private:
  double h_;
  std::vector<double> cdf_, pdf_;
};

}  // namespace bsc
