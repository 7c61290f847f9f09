#include "bsc/frame.hpp"

#include <cmath>
#include <string>

#include "bsc/analytic.hpp"

namespace bsc {

void FrameLayout::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("layout: " + what);
  };
  check(tau_sync >= 0, "tau_sync must be >= 0");
  check(slots_K >= 1, "slots_K must be >= 1");
  check(slot_len_M >= 1, "slot_len_M must be >= 1");
  check(pilot_N >= 1, "pilot_N must be >= 1");
  check(tau_s > 0.0 && std::isfinite(tau_s), "tau_s must be positive");
  check(tau_c == 0 || used_symbols() <= tau_c,
        "frame does not fit: tau_sync + beta*N + K*M = " + std::to_string(used_symbols()) + " > tau_c = " +
            std::to_string(tau_c));
}

IndexSets pilot_index_set(const FrameLayout& layout) {
  layout.validate();
  IndexSets s;
  int pos = layout.tau_sync;
  auto pilot_block = [&] {
    s.pilot_block_start.push_back(pos);
    for (int n = 0; n < layout.pilot_N; ++n) s.pilots.push_back(pos++);
  };
  if (layout.placement == Placement::single_burst) {
    pilot_block();
    for (int k = 0; k < layout.payload_count(); ++k) s.payload.push_back(pos++);
  } else {
    for (int k = 0; k < layout.slots_K; ++k) {
      pilot_block();
      for (int m = 0; m < layout.slot_len_M; ++m) s.payload.push_back(pos++);
    }
  }
  return s;
}

double crlb_mse(double tau_e, double p0, double n0) {
  if (!(tau_e > 0.0 && p0 > 0.0 && n0 > 0.0)) throw NumericError("crlb_mse: arguments must be positive");
  return n0 / (p0 * tau_e);
}

double spectral_efficiency(double tau_e, const AllocationProblem& prob, double tau_c) {
  if (tau_e <= 0.0 || tau_e >= tau_c) return 0.0;
  const double g = effective_snr_training(prob.gamma_eff, tau_e, prob.alpha());
  return (1.0 - tau_e / tau_c) * std::log2(1.0 + g);
}

double snr_threshold_for_ber(double ber_target, Modulation scheme, const ChannelParams& channel) {
  if (!(ber_target > 0.0 && ber_target < 0.5)) throw InfeasibleError("snr-threshold: BER target must lie in (0, 0.5)");
  const double gain = mean_square_gain(channel);
  auto ber_at = [&](double gamma) { return avg_ber_quadrature(scheme, channel, gamma / gain); };
  double lo = 1e-8, hi = 1e12;
  if (ber_at(hi) > ber_target)
    throw InfeasibleError("snr-threshold: BER target below what the search bracket reaches");
  if (ber_at(lo) < ber_target) return lo;
  // Bisect in log(γ); BER is monotone in γ.
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (ber_at(mid) > ber_target) lo = mid; else hi = mid;
    if (hi / lo - 1.0 < 1e-14) break;
  }
  return hi;
}

AllocationResult optimize_training(const AllocationProblem& prob, const FrameLayout& layout) {
  layout.validate();
  if (!(prob.p0 > 0.0 && prob.n0 > 0.0 && prob.sigma_h2 > 0.0 && prob.gamma_eff > 0.0))
    throw ConfigError("allocation: p0, n0, sigma_h2 and gamma_eff must be positive");
  AllocationResult res;
  const double tau_s = layout.tau_s;
  const double tau_c = layout.frame_symbols() * tau_s;
  const double tau_sync = layout.tau_sync * tau_s;
  const double alpha = prob.alpha();

  res.gamma_tar = snr_threshold_for_ber(prob.ber_target, prob.scheme, prob.channel);
  if (res.gamma_tar >= prob.gamma_eff)
    throw InfeasibleError("snr-threshold: target SNR " + std::to_string(res.gamma_tar) +
                          " is not below the average effective SNR " + std::to_string(prob.gamma_eff));
  res.tau_min = std::max(tau_s, alpha * res.gamma_tar / (prob.gamma_eff - res.gamma_tar));
  const double rate_ref = std::log2(1.0 + prob.gamma_eff);
  res.tau_max = std::min(tau_c - tau_sync, tau_c * (1.0 - prob.rate_min / rate_ref));
  if (res.tau_min > res.tau_max)
    throw InfeasibleError("training-window: tau_min " + std::to_string(res.tau_min) + " s exceeds tau_max " +
                          std::to_string(res.tau_max) + " s");

  // The objective is unimodal on (0, tau_c).
  const double tol = std::min(tau_s / 10.0, tau_c * 1e-7);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = tau_c;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = spectral_efficiency(x1, prob, tau_c), f2 = spectral_efficiency(x2, prob, tau_c);
  res.evaluations = 2;
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = spectral_efficiency(x2, prob, tau_c);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = spectral_efficiency(x1, prob, tau_c);
    }
    ++res.evaluations;
  }
  res.tau_hat = 0.5 * (lo + hi);
  res.tau_star = std::min(std::max(res.tau_hat, res.tau_min), res.tau_max);
  res.clipped_low = res.tau_hat < res.tau_min;
  res.clipped_high = res.tau_hat > res.tau_max;
  res.rate_at_star = spectral_efficiency(res.tau_star, prob, tau_c);
  return res;
}

int quantize_pilot_length(double tau_e_star, const FrameLayout& layout, double tau_max_seconds,
                          double tau_min_seconds) {
  if (!(tau_e_star >= 0.0)) throw NumericError("quantize_pilot_length: tau_e* must be >= 0");
  const double unit = layout.beta() * layout.tau_s;
  const double budget = std::min((layout.frame_symbols() - layout.tau_sync) * layout.tau_s, tau_max_seconds);
  // Guard against ceil(k + 1e-16) = k + 1 when tau_e* is an exact multiple.
  const double ratio = tau_e_star / unit;
  const double near = std::round(ratio);
  int n = std::abs(ratio - near) < 1e-9 ? static_cast<int>(near) : static_cast<int>(std::ceil(ratio));
  n = std::max(n, 1);
  if (n * unit > budget * (1.0 + 1e-12)) {
    // Tight budget: largest n that still fits.
    n = static_cast<int>(std::floor(budget / unit * (1.0 + 1e-12)));
    if (n < 1) throw InfeasibleError("frame-budget: no positive pilot length fits the frame");
    if (n * unit < tau_min_seconds * (1.0 - 1e-12))
      throw InfeasibleError("frame-budget: largest pilot length that fits violates the BER constraint");
  }
  return n;
}

}  // namespace bsc
