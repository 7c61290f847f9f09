#include "bsc/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "bsc/analytic.hpp"
#include "bsc/impair.hpp"
#include "bsc/txchain.hpp"

namespace bsc {

namespace {

constexpr std::uint64_t kChunk = 256;

std::string point_label(const char* prefix, const GridPoint& pt) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s/snr=%.9g/k=%.9g", prefix, pt.snr_db, pt.k_db);
  return buf;
}

Alphabet alphabet_for(const ExperimentConfig& cfg) {
  return cfg.use_tag_loads ? symbol_alphabet(cfg.tag_loads, cfg.scheme).points : ideal_alphabet(cfg.scheme);
}

struct TrialSetup {
  IndexSets sets;
  double origin = 0.0;
  std::vector<double> rel;
  std::vector<Complex> pilot_block;
  std::vector<Complex> pilot_symbols;  // known pilot symbol at every pilot position
  Alphabet alphabet;
};

TrialSetup setup_for(const ExperimentConfig& cfg) {
  TrialSetup s;
  s.sets = pilot_index_set(cfg.layout);
  s.origin = index_origin_position(s.sets, cfg.estimation.origin);
  s.rel = relative_pilot_indices(s.sets, cfg.estimation.origin);
  s.pilot_block = alternating_pilots(cfg.layout.pilot_N);
  s.pilot_symbols.resize(s.sets.pilots.size());
  for (std::size_t k = 0; k < s.pilot_symbols.size(); ++k) s.pilot_symbols[k] = s.pilot_block[k % s.pilot_block.size()];
  s.alphabet = alphabet_for(cfg);
  return s;
}

TrialRecord run_trial_impl(const ExperimentConfig& cfg, const GridPoint& pt, const Prior& prior, std::uint64_t trial,
                           const TrialOptions& opt, const TrialSetup& su, const char* prefix) {
  const FrameLayout& L = cfg.layout;
  const int sps = cfg.samples_per_symbol;
  const double sigma_w2 = pt.noise_sigma2;
  const bool full_chain = cfg.impairments.full_chain;
  const bool pilots_only = opt.pilots_only && !full_chain;

  Rng rng = derive_trial_rng(cfg.seed, point_label(prefix, pt), trial);
  TrialRecord rec;
  const Complex h = sample_h_eq(pt.channel, rng);
  const double phi1 = cfg.estimation.phase_slope_std > 0.0 ? cfg.estimation.phase_slope_std * rng.normal() : 0.0;
  auto slope = [&](double pos) { return phi1 == 0.0 ? Complex(1.0, 0.0) : std::polar(1.0, phi1 * (pos - su.origin)); };

  std::vector<Complex> yp(su.sets.pilots.size());
  std::vector<Complex> rx;
  Complex ref_sample;
  Complex rot(1.0, 0.0);

  if (pilots_only) {
    // Same law as the sample-level path after the matched filter: symbol noise
    // σ_w², raw-sample noise sps·σ_w².
    for (std::size_t k = 0; k < yp.size(); ++k)
      yp[k] = h * slope(su.sets.pilots[k]) * su.pilot_symbols[k] + rng.complex_normal(sigma_w2);
    ref_sample = h * slope(su.sets.pilots[0]) * su.pilot_symbols[0] + rng.complex_normal(sps * sigma_w2);
  } else {
    if (opt.payload) {
      rec.tx_bits = *opt.payload;
    } else {
      rec.tx_bits.resize(static_cast<std::size_t>(L.payload_count()));
      for (auto& b : rec.tx_bits) b = static_cast<std::uint8_t>(rng.bit());
    }
    SymbolFrame frame = assemble_frame(L, rec.tx_bits, su.alphabet, su.pilot_block);
    for (std::size_t k = 0; k < frame.symbols.size(); ++k) frame.symbols[k] *= h * slope(static_cast<double>(k));
    const std::vector<Complex> samples = synthesize_baseband(frame.symbols, sps);

    ImpairmentConfig ic;
    ic.noise_sigma2 = sps * sigma_w2;
    ic.sample_period = L.tau_s / sps;
    if (full_chain) {
      ic.dc_offset = cfg.impairments.dc_offset;
      ic.cfo_hz = cfg.impairments.cfo_hz;
      ic.initial_phase = cfg.impairments.initial_phase;
    }
    std::vector<Complex> y = apply_impairments(samples, ic, rng);
    if (full_chain) {
      const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(cfg.impairments.cfo_window), y.size() - 1);
      const CfoEstimate c = estimate_cfo(y, 0, window, ic.sample_period);
      rec.cfo_error_hz = c.delta_f_hz - ic.cfo_hz;
      const double phi0_hat = std::arg(y[0]);
      y = correct_cfo(y, c.delta_f_hz, 0, ic.sample_period);
      rot = std::polar(1.0, ic.initial_phase - phi0_hat);
    }
    ref_sample = y[static_cast<std::size_t>(su.sets.pilots[0]) * static_cast<std::size_t>(sps)];
    rx = matched_filter_downsample(y, sps);
    if (full_chain) {
      const Complex dc = estimate_dc(rx, su.sets.pilots);
      rx = remove_dc(rx, dc);
      rec.dc_residual = dc - cfg.impairments.dc_offset * rot;
    }
    for (std::size_t k = 0; k < yp.size(); ++k) yp[k] = rx[static_cast<std::size_t>(su.sets.pilots[k])];
  }

  rec.h_true = h * rot;
  const PilotStats st = pilot_stats(yp, su.pilot_symbols, su.rel);
  const double floor = 1e-6 * std::sqrt(mean_square_gain(pt.channel));

  std::vector<Complex> payload_rx, payload_ref;
  if (!pilots_only) {
    payload_rx.reserve(su.sets.payload.size());
    payload_ref.reserve(su.sets.payload.size());
    for (std::size_t k = 0; k < su.sets.payload.size(); ++k) {
      payload_rx.push_back(rx[static_cast<std::size_t>(su.sets.payload[k])]);
      payload_ref.push_back(su.alphabet[rec.tx_bits[k] ? 1 : 0]);
    }
  }

  for (Method m : cfg.estimation.methods) {
    MethodRecord mr;
    ChannelEstimate est;
    bool ok = true;
    try {
      switch (m) {
        case Method::perfect_csi:
          est.h_hat = rec.h_true;
          est.method = m;
          break;
        case Method::reference:
          est.h_hat = ref_sample / su.pilot_symbols[0];
          est.predicted_var = sps * sigma_w2;
          est.method = m;
          break;
        case Method::ls_lifted: est = ls_estimate(st, sigma_w2); break;
        case Method::ls_ordinary: est = ls_ordinary(st, sigma_w2); break;
        case Method::lmmse_lifted: est = lmmse_estimate(st, prior, sigma_w2); break;
        case Method::lmmse_ordinary: est = lmmse_ordinary(st, prior, sigma_w2); break;
      }
    } catch (const NumericError&) {
      ok = false;
    }
    if (ok) {
      const MseDecomposition d = mse_decompose(est.h_hat, rec.h_true);
      mr.sq_error = d.total;
      mr.mag_term = d.magnitude_term;
      mr.phase_term = d.phase_term;
      mr.predicted_var = est.predicted_var;
      mr.h_hat = est.h_hat;
      mr.phi1_hat = est.phi1_hat.value_or(0.0);
    }
    if (!pilots_only) {
      std::vector<std::uint8_t> bits(payload_rx.size(), 0);
      if (ok) {
        try {
          const std::vector<Complex> z = zf_equalize(payload_rx, est, floor);
          bits = demodulate(z, su.alphabet);
          for (std::size_t k = 0; k < z.size(); ++k) {
            mr.evm_err += std::norm(z[k] - payload_ref[k]);
            mr.evm_ref += std::norm(payload_ref[k]);
          }
        } catch (const EqualizationError&) {
          ok = false;
        }
      }
      mr.bits = static_cast<std::uint32_t>(bits.size());
      for (std::size_t k = 0; k < bits.size(); ++k) mr.bit_errors += (bits[k] != 0) != (rec.tx_bits[k] != 0);
      if (opt.keep_bits) rec.rx_bits.push_back(std::move(bits));
    }
    mr.flagged = !ok;
    rec.methods.push_back(mr);
  }
  if (!opt.keep_bits) rec.tx_bits.clear();
  return rec;
}

}  // namespace

std::vector<GridPoint> grid_points(const ExperimentConfig& cfg) {
  std::vector<GridPoint> pts;
  std::vector<double> ks = cfg.k_db;
  if (ks.empty()) ks.push_back(NAN);
  for (double k : ks) {
    ChannelParams ch = cfg.channel;
    if (!std::isnan(k)) {
      const double kl = db_to_linear({k});
      ch = ChannelParams::unit_power(kl, kl);
      ch.los_phase_tt = cfg.channel.los_phase_tt;
      ch.los_phase_tr = cfg.channel.los_phase_tr;
    }
    for (double s : cfg.snr_db) {
      GridPoint p;
      p.index = pts.size();
      p.snr_db = s;
      p.k_db = k;
      p.channel = ch;
      p.es_over_n0 = db_to_linear({s}) / mean_square_gain(ch);
      p.noise_sigma2 = 1.0 / p.es_over_n0;
      pts.push_back(p);
    }
  }
  return pts;
}

Prior make_prior(const ExperimentConfig& cfg, const GridPoint& pt) {
  const double e = mean_square_gain(pt.channel);
  const double slope_var = std::max(cfg.estimation.phase_slope_std * cfg.estimation.phase_slope_std * e, 1e-20 * e);
  Prior p;
  if (cfg.estimation.prior_mode == PriorMode::truth) {
    if (cfg.impairments.full_chain) {
      // The phase reference taken during CFO correction randomizes the mean.
      p.mu_h = 0.0;
      p.sigma_h2 = e;
    } else {
      p.mu_h = mean_h_eq(pt.channel);
      p.sigma_h2 = std::max(variance_h_eq(pt.channel), 1e-12 * e);
    }
    p.mu_phi = 0.0;
    p.sigma_phi2 = slope_var;
    return p;
  }

  // Calibration: sample statistics of lifted-LS estimates on separate frames,
  // with the known estimator noise removed from the spread.
  ExperimentConfig c = cfg;
  c.estimation.methods = {Method::ls_lifted};
  const TrialSetup su = setup_for(c);
  const PilotStats geom = pilot_stats(su.pilot_symbols, su.pilot_symbols, su.rel);
  const double delta = geom.delta();
  if (!(delta > 0.0)) throw ConfigError("calibrated prior needs an identifiable pilot design");
  TrialOptions opt;
  opt.pilots_only = true;
  const int n = cfg.estimation.calibration_trials;
  Complex sum_h(0.0, 0.0);
  double sum_h2 = 0.0, sum_t2 = 0.0;
  int used = 0;
  for (int t = 0; t < n; ++t) {
    const TrialRecord r = run_trial_impl(c, pt, Prior{}, static_cast<std::uint64_t>(t), opt, su, "calibration");
    const MethodRecord& m = r.methods[0];
    if (m.flagged) continue;
    const Complex theta1 = Complex(0.0, m.phi1_hat) * m.h_hat;
    sum_h += m.h_hat;
    sum_h2 += std::norm(m.h_hat);
    sum_t2 += std::norm(theta1);
    ++used;
  }
  if (used < 2) throw NumericError("prior calibration: too few usable frames");
  const Complex mean = sum_h / static_cast<double>(used);
  const double var = (sum_h2 - used * std::norm(mean)) / (used - 1);
  p.mu_h = mean;
  p.sigma_h2 = std::max(var - pt.noise_sigma2 * geom.s2 / delta, 0.01 * var);
  p.mu_phi = 0.0;
  p.sigma_phi2 = std::max(sum_t2 / used - pt.noise_sigma2 * geom.s0 / delta, slope_var);
  return p;
}

TrialRecord run_trial(const ExperimentConfig& cfg, const GridPoint& pt, const Prior& prior, std::uint64_t trial,
                      const TrialOptions& opt) {
  const TrialSetup su = setup_for(cfg);
  return run_trial_impl(cfg, pt, prior, trial, opt, su, "trial");
}

}  // namespace bsc

namespace bsc {

double MethodSummary::mse() const {
  const auto n = estimated_frames();
  return n ? sum_sq_error / static_cast<double>(n) : NAN;
}
double MethodSummary::mse_magnitude() const {
  const auto n = estimated_frames();
  return n ? sum_mag / static_cast<double>(n) : NAN;
}
double MethodSummary::mse_phase() const {
  const auto n = estimated_frames();
  return n ? sum_phase / static_cast<double>(n) : NAN;
}
double MethodSummary::mean_predicted_var() const {
  const auto n = estimated_frames();
  return n ? sum_predicted_var / static_cast<double>(n) : NAN;
}
double MethodSummary::evm_percent() const {
  return sum_evm_ref > 0.0 ? 100.0 * std::sqrt(sum_evm_err / sum_evm_ref) : NAN;
}

void Batch::add(const TrialRecord& r) {
  ++count;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const MethodRecord& m = r.methods[i];
    MethodSummary& s = methods[i];
    ++s.frames;
    s.bit_errors += m.bit_errors;
    s.bits += m.bits;
    if (m.flagged) {
      ++s.flagged;
      continue;
    }
    s.sum_sq_error += m.sq_error;
    s.sum_mag += m.mag_term;
    s.sum_phase += m.phase_term;
    s.sum_predicted_var += m.predicted_var;
    s.sum_evm_err += m.evm_err;
    s.sum_evm_ref += m.evm_ref;
  }
  sum_cfo_sq += r.cfo_error_hz * r.cfo_error_hz;
  sum_dc_sq += std::norm(r.dc_residual);
}

Batch make_batch(const ExperimentConfig& cfg, std::uint64_t first_trial) {
  Batch b;
  b.first_trial = first_trial;
  for (Method m : cfg.estimation.methods) {
    MethodSummary s;
    s.method = m;
    b.methods.push_back(s);
  }
  return b;
}

Batch merge_batches(std::vector<Batch> batches) {
  if (batches.empty()) return {};
  std::sort(batches.begin(), batches.end(),
            [](const Batch& a, const Batch& b) { return a.first_trial < b.first_trial; });
  Batch out = batches.front();
  for (std::size_t k = 1; k < batches.size(); ++k) {
    const Batch& b = batches[k];
    if (b.methods.size() != out.methods.size()) throw NumericError("merge_batches: method lists differ");
    out.count += b.count;
    out.sum_cfo_sq += b.sum_cfo_sq;
    out.sum_dc_sq += b.sum_dc_sq;
    for (std::size_t i = 0; i < out.methods.size(); ++i) {
      MethodSummary& o = out.methods[i];
      const MethodSummary& s = b.methods[i];
      o.bit_errors += s.bit_errors;
      o.bits += s.bits;
      o.frames += s.frames;
      o.flagged += s.flagged;
      o.sum_sq_error += s.sum_sq_error;
      o.sum_mag += s.sum_mag;
      o.sum_phase += s.sum_phase;
      o.sum_predicted_var += s.sum_predicted_var;
      o.sum_evm_err += s.sum_evm_err;
      o.sum_evm_ref += s.sum_evm_ref;
    }
  }
  return out;
}

PointResult run_point(const ExperimentConfig& cfg, const GridPoint& pt, SweepKind kind) {
  cfg.validate();
  const TrialSetup su = setup_for(cfg);
  const Prior prior = make_prior(cfg, pt);
  TrialOptions opt;
  opt.pilots_only = kind == SweepKind::mse;

  // Chunk boundaries depend only on the trial count, never on the thread
  // count, so serial and parallel runs fold identical partial sums.
  const std::uint64_t chunks = (cfg.trials + kChunk - 1) / kChunk;
  std::vector<Batch> batches(chunks);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    try {
      const std::uint64_t first = static_cast<std::uint64_t>(c) * kChunk;
      const std::uint64_t last = std::min(cfg.trials, first + kChunk);
      Batch b = make_batch(cfg, first);
      for (std::uint64_t t = first; t < last; ++t) b.add(run_trial_impl(cfg, pt, prior, t, opt, su, "trial"));
      batches[static_cast<std::size_t>(c)] = std::move(b);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  const Batch total = merge_batches(std::move(batches));

  PointResult r;
  r.point = pt;
  r.trials = total.count;
  r.methods = total.methods;
  r.cfo_rms_hz = std::sqrt(total.sum_cfo_sq / static_cast<double>(total.count));
  r.dc_residual_rms = std::sqrt(total.sum_dc_sq / static_cast<double>(total.count));
  if (kind == SweepKind::ber) {
    try {
      r.ber_quadrature = avg_ber_quadrature(cfg.scheme, pt.channel, pt.es_over_n0);
    } catch (const NumericError&) {
    }
    try {
      const double g = db_to_linear({pt.snr_db});
      r.ber_closed_form = cfg.scheme == Modulation::ook ? avg_ber_ook_closed(g) : avg_ber_bpsk_closed(g);
    } catch (const NumericError&) {
    }
  }
  return r;
}

namespace {

SweepResult sweep(const ExperimentConfig& cfg, SweepKind kind) {
  cfg.validate();
  SweepResult out;
  out.config_hash = config_hash(cfg);
  out.seed = cfg.seed.master;
  for (Method m : cfg.estimation.methods) out.method_names.emplace_back(to_string(m));
  for (const GridPoint& pt : grid_points(cfg)) out.points.push_back(run_point(cfg, pt, kind));
  return out;
}

}  // namespace

SweepResult ber_sweep(const ExperimentConfig& cfg) { return sweep(cfg, SweepKind::ber); }
SweepResult mse_sweep(const ExperimentConfig& cfg) { return sweep(cfg, SweepKind::mse); }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string sweep_to_csv(const SweepResult& r, SweepKind kind) {
  std::ostringstream os;
  os << "point,snr_db,k_db,es_over_n0,trials";
  if (kind == SweepKind::ber) os << ",ber_quadrature,ber_closed_form,cfo_rms_hz,dc_residual_rms";
  for (const std::string& m : r.method_names) {
    if (kind == SweepKind::ber)
      os << ',' << m << "_ber," << m << "_ber_lo," << m << "_ber_hi," << m << "_errors," << m << "_bits," << m
         << "_flagged," << m << "_evm_pct," << m << "_mse";
    else
      os << ',' << m << "_mse," << m << "_mse_magnitude," << m << "_mse_phase," << m << "_predicted_var," << m
         << "_flagged";
  }
  os << ",config_hash,seed\n";
  for (const PointResult& p : r.points) {
    os << p.point.index << ',' << format_number(p.point.snr_db) << ',' << format_number(p.point.k_db) << ','
       << format_number(p.point.es_over_n0) << ',' << p.trials;
    if (kind == SweepKind::ber)
      os << ',' << format_number(p.ber_quadrature) << ',' << format_number(p.ber_closed_form) << ','
         << format_number(p.cfo_rms_hz) << ',' << format_number(p.dc_residual_rms);
    for (const MethodSummary& m : p.methods) {
      if (kind == SweepKind::ber) {
        const WilsonInterval ci = m.ber_ci();
        os << ',' << format_number(m.ber()) << ',' << format_number(ci.lo) << ',' << format_number(ci.hi) << ','
           << m.bit_errors << ',' << m.bits << ',' << m.flagged << ',' << format_number(m.evm_percent()) << ','
           << format_number(m.mse());
      } else {
        os << ',' << format_number(m.mse()) << ',' << format_number(m.mse_magnitude()) << ','
           << format_number(m.mse_phase()) << ',' << format_number(m.mean_predicted_var()) << ',' << m.flagged;
      }
    }
    os << ',' << r.config_hash << ',' << r.seed << '\n';
  }
  return os.str();
}

std::string point_to_json(const ExperimentConfig& cfg, const PointResult& p) {
  using nlohmann::ordered_json;
  auto num = [](double v) -> ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return ordered_json(std::stod(format_number(v)));
  };
  ordered_json j;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed.master;
  j["scheme"] = std::string(to_string(cfg.scheme));
  j["trials"] = p.trials;
  j["snr_db"] = num(p.point.snr_db);
  j["k_db"] = num(p.point.k_db);
  j["es_over_n0"] = num(p.point.es_over_n0);
  j["ber_quadrature"] = num(p.ber_quadrature);
  j["ber_closed_form"] = num(p.ber_closed_form);
  j["cfo_rms_hz"] = num(p.cfo_rms_hz);
  j["dc_residual_rms"] = num(p.dc_residual_rms);
  ordered_json ms = ordered_json::array();
  for (const MethodSummary& m : p.methods) {
    const WilsonInterval ci = m.ber_ci();
    ms.push_back({{"method", std::string(to_string(m.method))},
                  {"ber", num(m.ber())},
                  {"ber_ci95", {num(ci.lo), num(ci.hi)}},
                  {"bit_errors", m.bit_errors},
                  {"bits", m.bits},
                  {"flagged_frames", m.flagged},
                  {"evm_pct", num(m.evm_percent())},
                  {"mse", num(m.mse())},
                  {"mse_magnitude", num(m.mse_magnitude())},
                  {"mse_phase", num(m.mse_phase())},
                  {"predicted_var", num(m.mean_predicted_var())}});
  }
  j["methods"] = ms;
  return j.dump(2) + "\n";
}

std::string analytic_ber_csv(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool ook = cfg.scheme == Modulation::ook;
  const std::string hash = config_hash(cfg);
  auto guarded = [](auto&& fn) {
    try {
      return fn();
    } catch (const NumericError&) {
      return static_cast<double>(NAN);
    }
  };
  std::ostringstream os;
  os << "point,snr_db,k_db,es_over_n0,ber_quadrature,ber_chiani_laplace,ber_closed_form";
  if (ook) os << ",ber_closed_a1_1,ber_closed_a1_half,ber_closed_a1_0";
  os << ",closed_over_quadrature,chiani_over_quadrature,config_hash,seed\n";
  for (const GridPoint& pt : grid_points(cfg)) {
    const double g = db_to_linear({pt.snr_db});
    const double quad = avg_ber_quadrature(cfg.scheme, pt.channel, pt.es_over_n0);
    const double chiani = avg_ber_chiani_laplace(cfg.scheme, pt.channel, pt.es_over_n0);
    const double closed = guarded([&] { return ook ? avg_ber_ook_closed(g) : avg_ber_bpsk_closed(g); });
    os << pt.index << ',' << format_number(pt.snr_db) << ',' << format_number(pt.k_db) << ','
       << format_number(pt.es_over_n0) << ',' << format_number(quad) << ',' << format_number(chiani) << ','
       << format_number(closed);
    if (ook)
      for (OokRowConvention c : {OokRowConvention::a1_is_1, OokRowConvention::a1_is_half, OokRowConvention::a1_is_0})
        os << ',' << format_number(guarded([&] { return avg_ber_ook_closed(g, c); }));
    os << ',' << format_number(closed / quad) << ',' << format_number(chiani / quad) << ',' << hash << ','
       << cfg.seed.master << '\n';
  }
  return os.str();
}

std::string allocation_report(const ExperimentConfig& cfg) {
  cfg.validate();
  using nlohmann::ordered_json;
  auto num = [](double v) -> ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return ordered_json(std::stod(format_number(v)));
  };
  AllocationProblem prob;
  prob.p0 = cfg.allocation.p0;
  prob.sigma_h2 = mean_square_gain(cfg.channel);
  prob.gamma_eff = db_to_linear({cfg.snr_db.front()});
  prob.n0 = std::isnan(cfg.allocation.n0) ? prob.p0 * prob.sigma_h2 * cfg.layout.tau_s / prob.gamma_eff
                                          : cfg.allocation.n0;
  prob.ber_target = cfg.allocation.ber_target;
  prob.rate_min = cfg.allocation.rate_min;
  prob.scheme = cfg.scheme;
  prob.channel = cfg.channel;

  const FrameLayout& layout = cfg.layout;
  const AllocationResult a = optimize_training(prob, layout);
  const int n_star = quantize_pilot_length(a.tau_star, layout, a.tau_max, a.tau_min);
  const double tau_s = layout.tau_s;
  const double tau_c = layout.frame_symbols() * tau_s;
  const double tau_sync = layout.tau_sync * tau_s;
  const double tau_e = layout.beta() * n_star * tau_s;
  const double tau_d = tau_c - tau_sync - tau_e;
  // Finite-difference slope of R on both sides of the stationary point.
  const double step = std::max(tau_s, 1e-3 * a.tau_hat);
  const double slope_lo = (spectral_efficiency(a.tau_hat, prob, tau_c) -
                           spectral_efficiency(std::max(a.tau_hat - step, 0.0), prob, tau_c)) / step;
  const double slope_hi = (spectral_efficiency(a.tau_hat + step, prob, tau_c) -
                           spectral_efficiency(a.tau_hat, prob, tau_c)) / step;

  ordered_json j;
  j["config_hash"] = config_hash(cfg);
  j["scheme"] = std::string(to_string(cfg.scheme));
  j["gamma_eff_db"] = num(cfg.snr_db.front());
  j["n0"] = num(prob.n0);
  j["alpha_s"] = num(prob.alpha());
  j["gamma_tar"] = num(a.gamma_tar);
  j["tau_c_s"] = num(tau_c);
  j["tau_sync_s"] = num(tau_sync);
  j["tau_hat_s"] = num(a.tau_hat);
  j["tau_min_s"] = num(a.tau_min);
  j["tau_max_s"] = num(a.tau_max);
  j["tau_star_s"] = num(a.tau_star);
  j["clipped_low"] = a.clipped_low;
  j["clipped_high"] = a.clipped_high;
  j["dR_dtau_below"] = num(slope_lo);
  j["dR_dtau_above"] = num(slope_hi);
  j["beta"] = layout.beta();
  j["pilot_N_star"] = n_star;
  j["tau_e_realized_s"] = num(tau_e);
  j["rho_star"] = num(tau_e / tau_c);
  j["tau_d_star_s"] = num(tau_d);
  j["rate_at_tau_star"] = num(a.rate_at_star);
  j["rate_realized"] = num(spectral_efficiency(tau_e, prob, tau_c));
  j["golden_evaluations"] = a.evaluations;
  return j.dump(2) + "\n";
}

ImageRoundtrip image_roundtrip(const ExperimentConfig& cfg, const std::vector<std::uint8_t>& payload) {
  cfg.validate();
  const GridPoint pt = grid_points(cfg).front();
  const TrialSetup su = setup_for(cfg);
  const Prior prior = make_prior(cfg, pt);
  const std::size_t per_frame = static_cast<std::size_t>(cfg.layout.payload_count());
  const std::size_t nbits = payload.size() * 8;
  ImageRoundtrip out;
  out.frames = (nbits + per_frame - 1) / per_frame;
  out.pad_bits = out.frames * per_frame - nbits;

  std::vector<std::uint8_t> bits(out.frames * per_frame, 0);
  for (std::size_t i = 0; i < nbits; ++i) bits[i] = (payload[i / 8] >> (7 - i % 8)) & 1u;

  const std::size_t nm = cfg.estimation.methods.size();
  std::vector<std::vector<std::uint8_t>> rx(nm, std::vector<std::uint8_t>(bits.size(), 0));
  std::vector<std::uint8_t> flagged(out.frames, 0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
  for (std::int64_t f = 0; f < static_cast<std::int64_t>(out.frames); ++f) {
    try {
      const auto fi = static_cast<std::size_t>(f);
      std::vector<std::uint8_t> frame_bits(bits.begin() + static_cast<std::ptrdiff_t>(fi * per_frame),
                                           bits.begin() + static_cast<std::ptrdiff_t>((fi + 1) * per_frame));
      TrialOptions opt;
      opt.keep_bits = true;
      opt.payload = &frame_bits;
      const TrialRecord r = run_trial_impl(cfg, pt, prior, fi, opt, su, "image");
      for (std::size_t m = 0; m < nm; ++m) {
        std::copy(r.rx_bits[m].begin(), r.rx_bits[m].end(), rx[m].begin() + static_cast<std::ptrdiff_t>(fi * per_frame));
        if (r.methods[m].flagged) flagged[fi] = 1;
      }
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  for (std::uint8_t f : flagged) out.flagged_frames += f;

  const std::vector<std::uint8_t> ref(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(nbits));
  for (std::size_t m = 0; m < nm; ++m) {
    std::vector<std::uint8_t> got(rx[m].begin(), rx[m].begin() + static_cast<std::ptrdiff_t>(nbits));
    out.ber.push_back(ber_count(got, ref));
    std::vector<std::uint8_t> bytes(payload.size(), 0);
    for (std::size_t i = 0; i < nbits; ++i)
      if (got[i]) bytes[i / 8] = static_cast<std::uint8_t>(bytes[i / 8] | (1u << (7 - i % 8)));
    out.recovered.push_back(std::move(bytes));
  }
  return out;
}

bool parse_pnm(const std::vector<std::uint8_t>& bytes, Pnm& out) {
  if (bytes.size() < 3 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) return false;
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](long& v) {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) return false;
    v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1'000'000) return false;
    }
    return true;
  };
  long w, h, maxval;
  if (!read_int(w) || !read_int(h) || !read_int(maxval)) return false;
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) return false;
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) return false;
  ++pos;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * (bytes[1] == '6' ? 3u : 1u);
  if (bytes.size() - pos < n) return false;
  out.header.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(pos));
  out.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return true;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + tmp.string() + "'");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      f.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ConfigError("write failed for '" + path + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot move output into place at '" + path + "'");
  }
}

}  // namespace bsc
