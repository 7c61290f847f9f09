#include "bsc/rxchain.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace bsc {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ls_lifted: return "ls";
    case Method::ls_ordinary: return "ls_ordinary";
    case Method::lmmse_lifted: return "lmmse";
    case Method::lmmse_ordinary: return "lmmse_ordinary";
    case Method::perfect_csi: return "perfect";
    case Method::reference: return "no_ce";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  for (Method m : {Method::ls_lifted, Method::ls_ordinary, Method::lmmse_lifted, Method::lmmse_ordinary,
                   Method::perfect_csi, Method::reference})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown estimator '" + std::string(s) + "'");
}

void Prior::validate() const {
  if (!(sigma_h2 > 0.0) || !(sigma_phi2 > 0.0)) throw ConfigError("prior: variances must be strictly positive");
  if (!is_finite(mu_h) || !is_finite(mu_phi)) throw ConfigError("prior: means must be finite");
}

std::string_view to_string(IndexOrigin o) {
  switch (o) {
    case IndexOrigin::pilot_start: return "pilot_start";
    case IndexOrigin::centered: return "centered";
    case IndexOrigin::payload_center: return "payload_center";
  }
  return "?";
}

IndexOrigin parse_index_origin(std::string_view s) {
  for (IndexOrigin o : {IndexOrigin::pilot_start, IndexOrigin::centered, IndexOrigin::payload_center})
    if (s == to_string(o)) return o;
  throw ConfigError("unknown index origin '" + std::string(s) + "'");
}

namespace {

double mean_of(const std::vector<int>& v) {
  if (v.empty()) throw ConfigError("index set is empty");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double index_origin_position(const IndexSets& sets, IndexOrigin origin) {
  switch (origin) {
    case IndexOrigin::pilot_start: return sets.pilot_block_start.empty() ? 0.0 : sets.pilot_block_start.front();
    case IndexOrigin::centered: return mean_of(sets.pilots);
    case IndexOrigin::payload_center: return mean_of(sets.payload);
  }
  return 0.0;
}

std::vector<double> relative_pilot_indices(const IndexSets& sets, IndexOrigin origin) {
  const double o = index_origin_position(sets, origin);
  std::vector<double> n(sets.pilots.size());
  for (std::size_t k = 0; k < n.size(); ++k) n[k] = sets.pilots[k] - o;
  return n;
}

CfoEstimate estimate_cfo(const std::vector<Complex>& samples, std::size_t n0, std::size_t window,
                         double sample_period) {
  if (window < 2) throw ConfigError("estimate_cfo: window must be >= 2");
  if (n0 + window >= samples.size())
    throw ConfigError("estimate_cfo: window exceeds the record");
  Complex acc(0.0, 0.0);
  double power = 0.0;
  for (std::size_t n = n0 + 1; n <= n0 + window; ++n) {
    acc += samples[n] * std::conj(samples[n - 1]);
    power += std::abs(samples[n]) * std::abs(samples[n - 1]);
  }
  acc /= static_cast<double>(window);
  power /= static_cast<double>(window);
  CfoEstimate e;
  e.magnitude = std::abs(acc);
  e.low_confidence = !(e.magnitude > 1e-12) || e.magnitude < 1e-3 * power;
  e.delta_f_hz = e.magnitude > 0.0 ? std::arg(acc) / (2.0 * kPi * sample_period) : 0.0;
  return e;
}

std::vector<Complex> correct_cfo(const std::vector<Complex>& samples, double delta_f_hat, std::size_t n0,
                                 double sample_period) {
  if (n0 >= samples.size()) throw ConfigError("correct_cfo: reference index outside the record");
  const double phi0 = std::arg(samples[n0]);
  const double step = 2.0 * kPi * delta_f_hat * sample_period;
  std::vector<Complex> out(samples.size());
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double k = static_cast<double>(n) - static_cast<double>(n0);
    out[n] = samples[n] * std::polar(1.0, -(step * k + phi0));
  }
  return out;
}

std::vector<Complex> matched_filter_downsample(const std::vector<Complex>& samples, int samples_per_symbol) {
  if (samples_per_symbol < 1) throw ConfigError("matched filter: samples per symbol must be >= 1");
  const auto sps = static_cast<std::size_t>(samples_per_symbol);
  if (samples.size() % sps != 0) throw ConfigError("matched filter: record length is not a multiple of sps");
  std::vector<Complex> out(samples.size() / sps);
  for (std::size_t k = 0; k < out.size(); ++k) {
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < sps; ++j) acc += samples[k * sps + j];
    out[k] = acc / static_cast<double>(sps);
  }
  return out;
}

Complex estimate_dc(const std::vector<Complex>& symbols, const std::vector<int>& pilot_indices) {
  if (pilot_indices.empty()) throw ConfigError("estimate_dc: empty pilot set");
  Complex acc(0.0, 0.0);
  for (int i : pilot_indices) acc += symbols.at(static_cast<std::size_t>(i));
  return acc / static_cast<double>(pilot_indices.size());
}

std::vector<Complex> remove_dc(const std::vector<Complex>& symbols, Complex dc_hat) {
  std::vector<Complex> out(symbols.size());
  for (std::size_t n = 0; n < symbols.size(); ++n) out[n] = symbols[n] - dc_hat;
  return out;
}

PilotStats pilot_stats(const std::vector<Complex>& received, const std::vector<Complex>& known,
                       const std::vector<double>& indices) {
  if (received.size() != known.size() || known.size() != indices.size())
    throw ConfigError("pilot_stats: length mismatch");
  PilotStats st;
  for (std::size_t k = 0; k < known.size(); ++k) {
    const double e = std::norm(known[k]);
    const double n = indices[k];
    const Complex mf = std::conj(known[k]) * received[k];
    st.s0 += e;
    st.s1 += n * e;
    st.s2 += n * n * e;
    st.t0 += mf;
    st.t1 += n * mf;
  }
  return st;
}

namespace {

void require_identifiable(const PilotStats& st) {
  const double d = st.delta();
  if (!(d > 1e-9 * st.s0 * st.s2) || !(d > 0.0))
    throw NumericError("lifted estimate: pilot design is not identifiable (delta = " + std::to_string(d) + ")");
}

}  // namespace

ChannelEstimate ls_estimate(const PilotStats& st, double noise_sigma2) {
  require_identifiable(st);
  const double d = st.delta();
  ChannelEstimate e;
  e.method = Method::ls_lifted;
  e.h_hat = (st.s2 * st.t0 - st.s1 * st.t1) / d;
  const Complex theta1 = (st.s0 * st.t1 - st.s1 * st.t0) / d;
  e.phi1_hat = std::abs(e.h_hat) > 0.0 ? std::imag(theta1 / e.h_hat) : 0.0;
  e.predicted_var = noise_sigma2 * st.s2 / d;
  return e;
}

ChannelEstimate ls_ordinary(const PilotStats& st, double noise_sigma2) {
  if (!(st.s0 > 0.0)) throw NumericError("ordinary LS: no pilot energy");
  ChannelEstimate e;
  e.method = Method::ls_ordinary;
  e.h_hat = st.t0 / st.s0;
  e.predicted_var = noise_sigma2 / st.s0;
  return e;
}

ChannelEstimate lmmse_estimate(const PilotStats& st, const Prior& prior, double noise_sigma2) {
  prior.validate();
  if (!(noise_sigma2 > 0.0)) throw NumericError("LMMSE: noise variance must be positive");
  const double iw = 1.0 / noise_sigma2;
  const double b00 = 1.0 / prior.sigma_h2 + iw * st.s0;
  const double b01 = iw * st.s1;
  const double b11 = 1.0 / prior.sigma_phi2 + iw * st.s2;
  const Complex a0 = iw * st.t0 + prior.mu_h / prior.sigma_h2;
  const Complex a1 = iw * st.t1 + prior.mu_phi / prior.sigma_phi2;
  const double db = b00 * b11 - b01 * b01;
  if (!(db > 0.0)) throw NumericError("LMMSE: posterior determinant is not positive");
  ChannelEstimate e;
  e.method = Method::lmmse_lifted;
  e.h_hat = (b11 * a0 - b01 * a1) / db;
  const Complex theta1 = (b00 * a1 - b01 * a0) / db;
  e.phi1_hat = std::abs(e.h_hat) > 0.0 ? std::imag(theta1 / e.h_hat) : 0.0;
  e.predicted_var = b11 / db;
  return e;
}

ChannelEstimate lmmse_ordinary(const PilotStats& st, const Prior& prior, double noise_sigma2) {
  prior.validate();
  if (!(noise_sigma2 >= 0.0)) throw NumericError("LMMSE: noise variance must be >= 0");
  const double den = prior.sigma_h2 * st.s0 + noise_sigma2;
  if (!(den > 0.0)) throw NumericError("ordinary LMMSE: no pilot energy and no noise");
  ChannelEstimate e;
  e.method = Method::lmmse_ordinary;
  e.h_hat = (prior.sigma_h2 * st.t0 + noise_sigma2 * prior.mu_h) / den;
  e.predicted_var = prior.sigma_h2 * noise_sigma2 / den;
  return e;
}

std::vector<Complex> zf_equalize(const std::vector<Complex>& payload, const ChannelEstimate& est, double floor) {
  if (!(std::abs(est.h_hat) >= floor) || !is_finite(est.h_hat))
    throw EqualizationError("zf: channel estimate below the deep-fade floor");
  const Complex p = 1.0 / est.h_hat;
  std::vector<Complex> out(payload.size());
  for (std::size_t n = 0; n < payload.size(); ++n) out[n] = p * payload[n];
  return out;
}

std::vector<std::uint8_t> demodulate(const std::vector<Complex>& equalized, const Alphabet& alphabet) {
  const Complex d = alphabet[1] - alphabet[0];
  const double dd = std::norm(d);
  if (!(dd > 0.0)) throw ConfigError("demodulate: alphabet points coincide");
  std::vector<std::uint8_t> bits(equalized.size());
  for (std::size_t n = 0; n < equalized.size(); ++n) {
    const double t = std::real((equalized[n] - alphabet[0]) * std::conj(d)) / dd;
    bits[n] = t > 0.5 ? 1 : 0;
  }
  return bits;
}

double estimate_noise_variance(const std::vector<Complex>& received, const std::vector<Complex>& known,
                               const std::vector<double>& indices) {
  if (received.size() < 5) throw ConfigError("estimate_noise_variance: need at least 5 pilots");
  const PilotStats st = pilot_stats(received, known, indices);
  require_identifiable(st);
  const double d = st.delta();
  const Complex th0 = (st.s2 * st.t0 - st.s1 * st.t1) / d;
  const Complex th1 = (st.s0 * st.t1 - st.s1 * st.t0) / d;
  double rss = 0.0;
  for (std::size_t k = 0; k < received.size(); ++k)
    rss += std::norm(received[k] - (th0 + th1 * indices[k]) * known[k]);
  return rss / static_cast<double>(received.size() - 2);
}

}  // namespace bsc
