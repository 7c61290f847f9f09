#include <doctest.h>

#include <cmath>

#include "bsc/fading.hpp"
#include "oracles.hpp"

using namespace bsc;

TEST_SUITE("fading") {

TEST_CASE("double-Rayleigh density matches the Bessel closed form") {
  ChannelParams p;
  p.sigma2_tt = 0.7;
  p.sigma2_tr = 2.3;
  for (double r : {0.01, 0.2, 0.8, 1.3, 2.5, 5.0}) {
    CAPTURE(r);
    CHECK(envelope_pdf(r, p) == doctest::Approx(oracle::double_rayleigh_pdf(r, 0.7, 2.3)).epsilon(1e-10));
  }
}

TEST_CASE("Rician-product density matches the Mellin convolution of two Rice laws") {
  struct Case { double k1, s1, k2, s2; };
  for (Case c : {Case{5.0, 0.4, 2.0, 1.1}, Case{10.0, 1.0 / 11.0, 10.0, 1.0 / 11.0}, Case{0.0, 1.0, 25.0, 0.05}}) {
    ChannelParams p;
    p.k_tt = c.k1;
    p.sigma2_tt = c.s1;
    p.k_tr = c.k2;
    p.sigma2_tr = c.s2;
    p.los_phase_tt = 0.4;  // the envelope law does not see LoS phases
    const double rms = std::sqrt(mean_square_gain(p));
    for (double f : {0.1, 0.5, 0.9, 1.0, 1.2, 1.8}) {
      const double r = f * rms;
      CAPTURE(c.k1);
      CAPTURE(r);
      CHECK(envelope_pdf(r, p) == doctest::Approx(oracle::product_pdf(r, c.k1, c.s1, c.k2, c.s2)).epsilon(1e-7));
    }
  }
}

TEST_CASE("density normalization and second moment") {
  for (double k : {0.0, 1.0, 5.0, 10.0, 25.0}) {
    for (double scale : {1.0, 0.3}) {
      ChannelParams p = ChannelParams::unit_power(k, 0.5 * k);
      p.sigma2_tt *= scale;
      const auto q = envelope_quadrature(p);
      CAPTURE(k);
      CHECK(std::abs(q->expect([](double) { return 1.0; }) - 1.0) < 1e-8);
      CHECK(q->expect([](double r) { return r * r; }) == doctest::Approx(mean_square_gain(p)).epsilon(1e-6));
    }
  }
}

TEST_CASE("second moment formula") {
  ChannelParams p;
  p.k_tt = 3.0;
  p.sigma2_tt = 0.5;
  p.k_tr = 1.0;
  p.sigma2_tr = 2.0;
  CHECK(mean_square_gain(p) == doctest::Approx(4.0 * 0.5 * 2.0 * 2.0));
  CHECK(std::abs(mean_h_eq(p)) == doctest::Approx(std::sqrt(1.5) * std::sqrt(2.0)));
  CHECK(variance_h_eq(p) == doctest::Approx(8.0 - 3.0));
  CHECK(avg_effective_snr(ChannelParams::unit_power(7.0, 2.0), 10.0) == doctest::Approx(10.0));
  CHECK(avg_effective_snr(p, 2.0) == doctest::Approx(16.0));
}

TEST_CASE("samples follow the envelope CDF (KS at 1%)") {
  for (double k : {0.0, 5.0}) {
    const ChannelParams p = ChannelParams::unit_power(k, k);
    const EnvelopeCdf cdf(p);
    // Library sampler and independent sampler both against the tabulated CDF.
    oracle::ProductSampler ind(11, k, p.sigma2_tt, k, p.sigma2_tr);
    const int n = 20000;
    const auto v = oracle::sorted_envelopes(ind, n);
    std::vector<double> w(n);
    Rng rng = derive_trial_rng(Seed{5}, "ks", 0);
    for (auto& x : w) x = std::abs(sample_h_eq(p, rng));
    std::sort(w.begin(), w.end());
    double d1 = 0.0, d2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f1 = cdf(v[i]), f2 = cdf(w[i]);
      d1 = std::max({d1, std::abs(f1 - double(i) / n), std::abs(f1 - double(i + 1) / n)});
      d2 = std::max({d2, std::abs(f2 - double(i) / n), std::abs(f2 - double(i + 1) / n)});
    }
    CAPTURE(k);
    CHECK(d1 < oracle::ks_critical_1pct(n));
    CHECK(d2 < oracle::ks_critical_1pct(n));
  }
}

TEST_CASE("SNR density is the change of variables of the envelope density") {
  const ChannelParams p = ChannelParams::unit_power(4.0, 1.0);
  const double es = 20.0;
  auto dens = [&](double u) {
    const double g = std::exp(u);
    return g * snr_pdf(g, p, es);
  };
  CHECK(oracle::simpson(dens, -25.0, 7.0, 20000) == doctest::Approx(1.0).epsilon(1e-6));
  auto mean = [&](double u) {
    const double g = std::exp(u);
    return g * g * snr_pdf(g, p, es);
  };
  CHECK(oracle::simpson(mean, -25.0, 7.0, 20000) == doctest::Approx(avg_effective_snr(p, es)).epsilon(1e-6));
  const double r = 0.8;
  CHECK(snr_pdf(es * r * r, p, es) == doctest::Approx(envelope_pdf(r, p) / (2.0 * es * r)).epsilon(1e-12));
  CHECK(snr_pdf(0.0, p, es) == 0.0);
}

TEST_CASE("deterministic channel collapses to a point mass") {
  ChannelParams p;
  p.k_tt = 1.0;
  p.k_tr = 1.0;
  p.sigma2_tt = 0.0;
  p.sigma2_tr = 0.0;
  const auto q = envelope_quadrature(p);
  CHECK(q->degenerate());
  CHECK(q->expect([](double r) { return r; }) == 0.0);
  CHECK_THROWS_AS(EnvelopePdf{p}, NumericError);
}

TEST_CASE("invalid channel parameters are rejected") {
  ChannelParams p;
  p.k_tt = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ChannelParams{};
  p.sigma2_tr = NAN;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

}
