#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "bsc/analytic.hpp"
#include "bsc/frame.hpp"

using namespace bsc;

namespace {

// Brute-force maximizer of the training objective on a uniform grid.
double grid_argmax(const AllocationProblem& prob, double tau_c, int points) {
  double best = -1.0, arg = 0.0;
  for (int i = 1; i < points; ++i) {
    const double t = tau_c * i / points;
    const double g = prob.gamma_eff * t / (t + prob.alpha());
    const double r = (1.0 - t / tau_c) * std::log2(1.0 + g);
    if (r > best) {
      best = r;
      arg = t;
    }
  }
  return arg;
}

}  // namespace

TEST_SUITE("frame") {

TEST_CASE("index sets for per-slot pilots") {
  FrameLayout l;
  l.tau_sync = 3;
  l.slots_K = 2;
  l.slot_len_M = 4;
  l.pilot_N = 2;
  l.placement = Placement::per_slot;
  const IndexSets s = pilot_index_set(l);
  CHECK(s.pilots == std::vector<int>{3, 4, 9, 10});
  CHECK(s.payload == std::vector<int>{5, 6, 7, 8, 11, 12, 13, 14});
  CHECK(s.pilot_block_start == std::vector<int>{3, 9});
  CHECK(l.beta() == 2);
  CHECK(l.used_symbols() == 15);
}

TEST_CASE("index sets for a single burst") {
  FrameLayout l;
  l.tau_sync = 1;
  l.slots_K = 3;
  l.slot_len_M = 2;
  l.pilot_N = 4;
  l.placement = Placement::single_burst;
  const IndexSets s = pilot_index_set(l);
  CHECK(s.pilots == std::vector<int>{1, 2, 3, 4});
  CHECK(s.payload == std::vector<int>{5, 6, 7, 8, 9, 10});
  CHECK(l.beta() == 1);
}

TEST_CASE("layout validation") {
  FrameLayout l;
  l.tau_c = 10;
  CHECK_THROWS_AS(l.validate(), ConfigError);
  l = FrameLayout{};
  l.pilot_N = 0;
  CHECK_THROWS_AS(l.validate(), ConfigError);
  l = FrameLayout{};
  l.tau_s = 0.0;
  CHECK_THROWS_AS(l.validate(), ConfigError);
}

TEST_CASE("CRLB") {
  CHECK(crlb_mse(1e-3, 2.0, 1e-6) == doctest::Approx(5e-4));
  CHECK_THROWS_AS(crlb_mse(0.0, 1.0, 1.0), NumericError);
}

TEST_CASE("golden-section maximizer agrees with a dense grid") {
  std::mt19937_64 eng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FrameLayout l;
  l.tau_sync = 0;
  l.tau_s = 1e-6;
  l.slots_K = 1;
  l.slot_len_M = 1;
  l.pilot_N = 1;
  for (int trial = 0; trial < 25; ++trial) {
    l.tau_c = 200 + static_cast<int>(u(eng) * 2000);
    AllocationProblem prob;
    prob.gamma_eff = std::pow(10.0, 1.0 + 2.5 * u(eng));
    prob.sigma_h2 = 0.5 + u(eng);
    prob.n0 = prob.p0 * prob.sigma_h2 * l.tau_s * (1.0 + 50.0 * u(eng)) / prob.gamma_eff;
    prob.ber_target = 0.2;
    const double tau_c = l.tau_c * l.tau_s;
    const AllocationResult r = optimize_training(prob, l);
    const double grid = grid_argmax(prob, tau_c, 10000);
    CAPTURE(trial);
    CHECK(std::abs(r.tau_hat - grid) <= tau_c / 10000.0 + l.tau_s / 10.0);
    CHECK(r.tau_star >= r.tau_min);
    CHECK(r.tau_star <= r.tau_max);
  }
}

TEST_CASE("SNR threshold inverts the average BER") {
  const ChannelParams p = ChannelParams::unit_power(5.0, 5.0);
  for (Modulation m : {Modulation::ook, Modulation::bpsk}) {
    const double g = snr_threshold_for_ber(1e-3, m, p);
    CHECK(avg_ber_quadrature(m, p, g / mean_square_gain(p)) == doctest::Approx(1e-3).epsilon(1e-9));
  }
  CHECK_THROWS_AS(snr_threshold_for_ber(0.7, Modulation::bpsk, p), InfeasibleError);
}

TEST_CASE("clipping to the feasible window") {
  FrameLayout l;
  l.tau_sync = 10;
  l.tau_s = 1e-6;
  l.tau_c = 1000;
  l.slots_K = 1;
  l.slot_len_M = 1;
  l.pilot_N = 1;
  AllocationProblem prob;
  prob.gamma_eff = 1000.0;
  prob.ber_target = 1e-2;
  prob.channel = ChannelParams::unit_power(10.0, 10.0);
  // α = 300 µs puts the unconstrained optimum near 114 µs; a 9 bit/s/Hz
  // floor caps training at τc(1 - 9/log2(1001)) ≈ 97 µs.
  prob.n0 = prob.p0 * 3e-4 / prob.gamma_eff;
  prob.rate_min = 9.0;
  const AllocationResult r = optimize_training(prob, l);
  CHECK(r.clipped_high);
  CHECK(r.tau_star == doctest::Approx(r.tau_max));
  CHECK(r.tau_max == doctest::Approx(1e-3 * (1.0 - 9.0 / std::log2(1001.0))));

  prob.rate_min = 9.966;
  try {
    optimize_training(prob, l);
    FAIL("expected an infeasible window");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("training-window") != std::string::npos);
  }
  prob.rate_min = 0.0;
  prob.gamma_eff = 5.0;
  try {
    optimize_training(prob, l);
    FAIL("expected an unreachable SNR target");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("snr-threshold") != std::string::npos);
  }
}

TEST_CASE("pilot-length quantization") {
  FrameLayout l;
  l.tau_sync = 4;
  l.tau_s = 1e-6;
  l.slots_K = 4;
  l.slot_len_M = 10;
  l.pilot_N = 1;
  l.placement = Placement::per_slot;
  l.tau_c = 100;
  // β = 4 blocks, so each pilot symbol costs 4 τ_s.
  CHECK(quantize_pilot_length(4e-6, l) == 1);
  CHECK(quantize_pilot_length(4.01e-6, l) == 2);
  CHECK(quantize_pilot_length(12e-6, l) == 3);
  CHECK(quantize_pilot_length(0.0, l) == 1);
  // Budget (τc - τsync) = 96 µs caps N at 24.
  CHECK(quantize_pilot_length(200e-6, l) == 24);
  CHECK(quantize_pilot_length(200e-6, l, 50e-6) == 12);
  CHECK_THROWS_AS(quantize_pilot_length(200e-6, l, 50e-6, 49.5e-6), InfeasibleError);
  CHECK_THROWS_AS(quantize_pilot_length(1e-6, l, 2e-6), InfeasibleError);
  for (double t : {3e-6, 17e-6, 33e-6}) {
    const int n = quantize_pilot_length(t, l);
    CHECK(n * 4e-6 >= t - 1e-15);
    CHECK((n - 1) * 4e-6 < t);
  }
}

}
