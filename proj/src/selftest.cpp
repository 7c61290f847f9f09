#include "bsc/selftest.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bsc/analytic.hpp"
#include "bsc/config.hpp"
#include "bsc/fading.hpp"
#include "bsc/frame.hpp"
#include "bsc/harness.hpp"
#include "bsc/impair.hpp"
#include "bsc/metrics.hpp"
#include "bsc/rxchain.hpp"
#include "bsc/special.hpp"
#include "bsc/txchain.hpp"

namespace bsc {

namespace {

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(b), 1e-300); }

bool db_roundtrip() {
  for (double x : {-30.0, -3.0, 0.0, 3.0, 17.5, 40.0})
    if (!close(linear_to_db(db_to_linear({x})).value, x, 1e-12) && x != 0.0) return false;
  return db_to_linear({0.0}) == 1.0 && close(db_to_linear({10.0}), 10.0, 1e-15);
}

bool rng_determinism() {
  Seed s{1};
  Rng a = derive_trial_rng(s, "selftest", 0), b = derive_trial_rng(s, "selftest", 0);
  Rng c = derive_trial_rng(s, "selftest", 1);
  bool same = true, differ = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal(), y = b.normal(), z = c.normal();
    same = same && x == y;
    differ = differ || x != z;
  }
  return same && differ;
}

bool envelope_normalized() {
  for (double k : {0.0, 10.0}) {
    const ChannelParams p = ChannelParams::unit_power(k, k);
    const auto q = envelope_quadrature(p);
    const double norm = q->expect([](double) { return 1.0; });
    const double m2 = q->expect([](double r) { return r * r; });
    if (!close(norm, 1.0, 1e-8) || !close(m2, mean_square_gain(p), 1e-6)) return false;
  }
  return true;
}

bool bessel_matches_std() {
  for (double x : {1e-3, 0.5, 2.0, 7.5, 40.0})
    if (!close(bessel_k0(x), std::cyl_bessel_k(0.0, x), 1e-11) || !close(bessel_k1(x), std::cyl_bessel_k(1.0, x), 1e-11))
      return false;
  return true;
}

bool meijer_oracle() {
  for (double z : {0.1, 1.0, 10.0}) {
    const double g = meijer_g_3_0_1_3(z, 1.0, {1.0, 1.0, 1.0}).value;
    if (!close(g, 2.0 * z * bessel_k0(2.0 * std::sqrt(z)), 1e-8)) return false;
  }
  return true;
}

bool matched_load_absorbs() {
  return std::abs(reflection_coeff({50.0, 0.0}, {50.0, 0.0})) < 1e-15 &&
         close(std::abs(reflection_coeff({0.0, 0.0}, {50.0, 0.0})), 1.0, 1e-15);
}

bool pilots_zero_mean() {
  FrameLayout l;
  l.placement = Placement::per_slot;
  l.slots_K = 3;
  l.slot_len_M = 10;
  l.pilot_N = 4;
  const std::vector<std::uint8_t> bits(static_cast<std::size_t>(l.payload_count()), 1);
  const SymbolFrame f = assemble_frame(l, bits, ideal_alphabet(Modulation::ook), alternating_pilots(l.pilot_N));
  Complex sum{0.0, 0.0};
  for (int i : f.pilot_indices) sum += f.symbols[static_cast<std::size_t>(i)];
  return std::abs(sum) < 1e-15 && static_cast<int>(f.pilot_indices.size()) == l.pilot_count();
}

bool dc_estimate_exact() {
  const std::vector<Complex> pil = alternating_pilots(8);
  std::vector<Complex> sym;
  std::vector<int> idx;
  const Complex dc(0.3, 0.1);
  for (int i = 0; i < 8; ++i) {
    sym.push_back(pil[static_cast<std::size_t>(i)] + dc);
    idx.push_back(i);
  }
  return std::abs(estimate_dc(sym, idx) - dc) < 1e-15;
}

bool lifted_ls_exact() {
  const Complex h(0.7, -0.4);
  const double phi = 0.01;
  const std::vector<Complex> x = alternating_pilots(16);
  std::vector<Complex> y;
  std::vector<double> n;
  for (int i = 0; i < 16; ++i) {
    n.push_back(i);
    // The lifted model is the first-order expansion e^{jφn} ≈ 1 + jφn.
    y.push_back(h * Complex(1.0, phi * i) * x[static_cast<std::size_t>(i)]);
  }
  const ChannelEstimate e = ls_estimate(pilot_stats(y, x, n));
  return std::abs(e.h_hat - h) < 1e-12 && e.phi1_hat && std::abs(*e.phi1_hat - phi) < 1e-12;
}

bool zf_inverts() {
  const Complex h(0.2, 0.9);
  std::vector<Complex> payload = {h * 1.0, h * -1.0, h * Complex(0.5, 0.5)};
  ChannelEstimate e;
  e.h_hat = h;
  const std::vector<Complex> z = zf_equalize(payload, e, 1e-9);
  return std::abs(z[0] - 1.0) < 1e-15 && std::abs(z[1] + 1.0) < 1e-15 && std::abs(z[2] - Complex(0.5, 0.5)) < 1e-15;
}

bool mse_identity() {
  Rng rng = derive_trial_rng(Seed{7}, "selftest/mse", 0);
  for (int i = 0; i < 1000; ++i) {
    const Complex h = rng.complex_normal(1.0), hh = rng.complex_normal(1.0);
    const MseDecomposition d = mse_decompose(hh, h);
    if (!close(d.total, std::norm(hh - h), 1e-12)) return false;
  }
  return true;
}

bool clean_chain() {
  for (Modulation m : {Modulation::ook, Modulation::bpsk}) {
    ExperimentConfig c;
    c.scheme = m;
    c.snr_db = {300.0};
    c.trials = 8;
    c.parallel = false;
    c.samples_per_symbol = 4;
    c.estimation.methods = {Method::perfect_csi, Method::ls_lifted, Method::lmmse_lifted};
    const GridPoint pt = grid_points(c).front();
    const PointResult r = run_point(c, pt, SweepKind::ber);
    for (const MethodSummary& s : r.methods)
      if (s.bit_errors != 0 || s.bits == 0 || !(s.evm_percent() < 1e-10)) return false;
  }
  return true;
}

bool optimizer_in_bounds() {
  AllocationProblem prob;
  prob.gamma_eff = 1000.0;
  prob.ber_target = 1e-2;
  FrameLayout l;
  prob.n0 = prob.p0 * prob.sigma_h2 * l.tau_s / prob.gamma_eff;
  l.slots_K = 4;
  l.slot_len_M = 200;
  l.pilot_N = 8;
  l.tau_c = 1024;
  const AllocationResult a = optimize_training(prob, l);
  return a.tau_star >= a.tau_min - 1e-15 && a.tau_star <= a.tau_max + 1e-15 && a.tau_min <= a.tau_max;
}

bool config_roundtrip() {
  ExperimentConfig c;
  c.name = "roundtrip";
  c.snr_db = {0.0, 5.0};
  const ExperimentConfig d = parse_config(config_to_json(c));
  return config_to_json(d) == config_to_json(c) && config_hash(d) == config_hash(c);
}

}  // namespace

int run_selftest(std::ostream& log) {
  const std::vector<std::pair<const char*, std::function<bool()>>> checks = {
      {"db_roundtrip", db_roundtrip},
      {"rng_determinism", rng_determinism},
      {"envelope_normalized", envelope_normalized},
      {"bessel_matches_std", bessel_matches_std},
      {"meijer_k0_oracle", meijer_oracle},
      {"matched_load_absorbs", matched_load_absorbs},
      {"pilots_zero_mean", pilots_zero_mean},
      {"dc_estimate_exact", dc_estimate_exact},
      {"lifted_ls_exact", lifted_ls_exact},
      {"zf_inverts", zf_inverts},
      {"mse_identity", mse_identity},
      {"clean_chain", clean_chain},
      {"optimizer_in_bounds", optimizer_in_bounds},
      {"config_roundtrip", config_roundtrip},
  };
  int failures = 0;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    std::string why;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      why = std::string(" (") + e.what() + ")";
    }
    log << (ok ? "PASS " : "FAIL ") << name << why << '\n';
    failures += ok ? 0 : 1;
  }
  return failures;
}

}  // namespace bsc
