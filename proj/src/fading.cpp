#include "bsc/fading.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bsc/special.hpp"

namespace bsc {

ChannelParams ChannelParams::unit_power(double k_tt, double k_tr) {
  ChannelParams p;
  p.k_tt = k_tt;
  p.k_tr = k_tr;
  p.sigma2_tt = 1.0 / (1.0 + k_tt);
  p.sigma2_tr = 1.0 / (1.0 + k_tr);
  return p;
}

void ChannelParams::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("channel: ") + what);
  };
  check(std::isfinite(k_tt) && k_tt >= 0.0, "k_tt must be finite and >= 0");
  check(std::isfinite(k_tr) && k_tr >= 0.0, "k_tr must be finite and >= 0");
  check(std::isfinite(sigma2_tt) && sigma2_tt >= 0.0, "sigma2_tt must be finite and >= 0");
  check(std::isfinite(sigma2_tr) && sigma2_tr >= 0.0, "sigma2_tr must be finite and >= 0");
  check(std::isfinite(los_phase_tt) && std::isfinite(los_phase_tr), "LoS phases must be finite");
}

Complex sample_hop(const HopParams& hop, Rng& rng) { return hop.los() + rng.complex_normal(hop.sigma2); }

Complex sample_h_eq(const ChannelParams& p, Rng& rng) {
  const Complex a = sample_hop(p.forward(), rng);
  const Complex b = sample_hop(p.backscatter(), rng);
  return a * b;
}

Complex mean_h_eq(const ChannelParams& p) { return p.forward().los() * p.backscatter().los(); }

double mean_square_gain(const ChannelParams& p) {
  return (1.0 + p.k_tt) * (1.0 + p.k_tr) * p.sigma2_tt * p.sigma2_tr;
}

double variance_h_eq(const ChannelParams& p) { return mean_square_gain(p) - std::norm(mean_h_eq(p)); }

double avg_effective_snr(const ChannelParams& p, double es_over_n0) { return mean_square_gain(p) * es_over_n0; }

EnvelopePdf::EnvelopePdf(const ChannelParams& p, int term_cap) : p_(p), cap_(term_cap) {
  p.validate();
  if (!(p.sigma2_tt > 0.0 && p.sigma2_tr > 0.0))
    throw NumericError("envelope_pdf: diffuse power must be positive on both hops");
  // The series is written for the per-real-dimension variance σ²/2.
  s1_ = std::sqrt(p.sigma2_tt / 2.0);
  s2_ = std::sqrt(p.sigma2_tr / 2.0);
  if (cap_ < 1 || cap_ > kMaxTermCap) throw ConfigError("envelope_pdf: term cap out of range");
  log_fact_sq_.resize(static_cast<std::size_t>(kMaxTermCap) + 1);
  for (int i = 0; i <= kMaxTermCap; ++i) log_fact_sq_[static_cast<std::size_t>(i)] = 2.0 * std::lgamma(i + 1.0);

  const double rms = std::sqrt(mean_square_gain(p));
  double r = rms;
  while ((*this)(r) * r > 1e-15) r *= 1.1;
  r_max_ = r;
}

double EnvelopePdf::operator()(double r) const {
  if (!(r > 0.0)) return 0.0;
  const double x = r / (s1_ * s2_);
  const double base = std::log(r / (s1_ * s1_ * s2_ * s2_)) - p_.k_tt - p_.k_tr;
  const bool has_i = p_.k_tt > 0.0;
  const bool has_l = p_.k_tr > 0.0;
  if (!has_i && !has_l) return std::exp(base + log_bessel_k_sequence(0, x)[0]);

  const double log_ratio = std::log(s1_ / s2_);
  const double ci = has_i ? std::log(r * p_.k_tt / (2.0 * s1_ * s1_)) + log_ratio : 0.0;
  const double cl = has_l ? std::log(r * p_.k_tr / (2.0 * s2_ * s2_)) - log_ratio : 0.0;

  // Far in the tail with one small diffuse power, K_n(x) decays slowly in n
  // and the sum needs more terms; the cap doubles before giving up.
  for (int cap = cap_; cap <= kMaxTermCap; cap *= 2) {
    const int imax = has_i ? cap : 0;
    const int lmax = has_l ? cap : 0;
    const std::vector<double> log_k = log_bessel_k_sequence(std::max(imax, lmax), x);
    double total = 0.0;
    double prev_shell = INFINITY;
    for (int n = 0; n <= imax + lmax; ++n) {
      double shell = 0.0;
      for (int i = std::max(0, n - lmax); i <= std::min(n, imax); ++i) {
        const int l = n - i;
        const double lt = base - log_fact_sq_[static_cast<std::size_t>(i)] -
                          log_fact_sq_[static_cast<std::size_t>(l)] + i * ci + l * cl +
                          log_k[static_cast<std::size_t>(std::abs(i - l))];
        shell += std::exp(lt);
      }
      total += shell;
      if (n > 3 && shell <= prev_shell && shell < 1e-13 * total) return total;
      prev_shell = shell;
    }
  }
  throw NumericError("envelope_pdf: series did not converge within the term cap (r = " + std::to_string(r) + ")");
}

double envelope_pdf(double r, const ChannelParams& p) { return EnvelopePdf(p)(r); }

double snr_pdf(double gamma, const ChannelParams& p, double es_over_n0) {
  if (!(gamma > 0.0)) return 0.0;
  const double r = std::sqrt(gamma / es_over_n0);
  return 0.5 * envelope_pdf(r, p) / std::sqrt(es_over_n0 * gamma);
}

namespace {

struct Panel {
  double a, b;
};

}  // namespace

EnvelopeQuadrature::EnvelopeQuadrature(const ChannelParams& p) {
  p.validate();
  if (p.sigma2_tt == 0.0 && p.sigma2_tr == 0.0) {
    degenerate_ = true;
    degenerate_r_ = std::abs(mean_h_eq(p));
    return;
  }
  pdf_ = std::make_unique<EnvelopePdf>(p);
  using boost::math::quadrature::gauss_kronrod;
  using GK = gauss_kronrod<double, 15>;
  const auto& xk = GK::abscissa();
  const auto& wk = GK::weights();
  // Gauss 7-point weights live on the odd Kronrod abscissae.
  static const std::vector<double> gauss7_weights = {0.417959183673469387755102040816, 0.381830050505118944950369775489,
                                                     0.279705391489276667901467771424, 0.129484966168869693270611432679};

  const double m2 = mean_square_gain(p);
  const double r_max = pdf_->r_max();
  std::vector<Panel> stack;
  constexpr int kGeometric = 48;
  double lo = 0.0;
  for (int k = kGeometric; k >= 0; --k) {
    const double hi = r_max * std::ldexp(1.0, -k);
    stack.push_back({lo, hi});
    lo = hi;
  }
  std::reverse(stack.begin(), stack.end());

  const auto& dens = *pdf_;
  while (!stack.empty()) {
    const Panel pan = stack.back();
    stack.pop_back();
    const double c = 0.5 * (pan.a + pan.b);
    const double h = 0.5 * (pan.b - pan.a);
    // Kronrod nodes are stored for the non-negative half: index 0 is the centre.
    std::vector<double> rs, ws;
    double k0 = 0.0, k2 = 0.0, g0 = 0.0, g2 = 0.0;
    for (std::size_t j = 0; j < xk.size(); ++j) {
      for (int sgn : {1, -1}) {
        if (j == 0 && sgn < 0) continue;
        const double r = c + sgn * h * xk[j];
        const double f = dens(r);
        rs.push_back(r);
        ws.push_back(h * wk[j] * f);
        k0 += h * wk[j] * f;
        k2 += h * wk[j] * f * r * r;
        if (j % 2 == 0) {
          const double w = gauss7_weights[j / 2];
          g0 += h * w * f;
          g2 += h * w * f * r * r;
        }
      }
    }
    const bool ok = std::abs(k0 - g0) <= 1e-15 + 1e-12 * std::abs(k0) &&
                    std::abs(k2 - g2) <= 1e-15 * m2 + 1e-12 * std::abs(k2);
    if (ok || h < 1e-14 * r_max) {
      nodes_.insert(nodes_.end(), rs.begin(), rs.end());
      weights_.insert(weights_.end(), ws.begin(), ws.end());
    } else {
      stack.push_back({c, pan.b});
      stack.push_back({pan.a, c});
    }
  }
}

std::shared_ptr<const EnvelopeQuadrature> envelope_quadrature(const ChannelParams& p) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, double, double>, std::shared_ptr<const EnvelopeQuadrature>> cache;
  // The envelope law ignores LoS phases.
  const auto key = std::make_tuple(p.k_tt, p.k_tr, p.sigma2_tt, p.sigma2_tr);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto q = std::make_shared<const EnvelopeQuadrature>(p);
  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() > 256) cache.clear();
  return cache.emplace(key, std::move(q)).first->second;
}

EnvelopeCdf::EnvelopeCdf(const ChannelParams& p, int intervals) {
  EnvelopePdf dens(p);
  const double r_max = dens.r_max();
  h_ = r_max / intervals;
  cdf_.assign(static_cast<std::size_t>(intervals) + 1, 0.0);
  pdf_.assign(static_cast<std::size_t>(intervals) + 1, 0.0);
  using boost::math::quadrature::gauss_kronrod;
  for (int k = 0; k < intervals; ++k) {
    const double a = k * h_;
    const double piece = gauss_kronrod<double, 15>::integrate([&](double r) { return dens(r); }, a, a + h_, 0);
    cdf_[static_cast<std::size_t>(k) + 1] = cdf_[static_cast<std::size_t>(k)] + piece;
    pdf_[static_cast<std::size_t>(k) + 1] = dens(a + h_);
  }
}

double EnvelopeCdf::operator()(double r) const {
  if (r <= 0.0) return 0.0;
  const double u = r / h_;
  const auto k = static_cast<std::size_t>(u);
  if (k + 1 >= cdf_.size()) return 1.0;
  const double t = u - static_cast<double>(k);
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * cdf_[k] + h10 * h_ * pdf_[k] + h01 * cdf_[k + 1] + h11 * h_ * pdf_[k + 1];
}

}  // namespace bsc
