#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bsc/core.hpp"
#include "bsc/special.hpp"
#include "oracles.hpp"

using namespace bsc;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_SUITE("special") {

TEST_CASE("K0 and K1 against std::cyl_bessel_k") {
  for (double x : {1e-4, 0.01, 0.1, 0.5, 1.0, 1.99, 2.0, 2.01, 3.0, 5.0, 8.0, 15.0, 30.0, 60.0, 200.0}) {
    CAPTURE(x);
    CHECK(rel(bessel_k0(x), std::cyl_bessel_k(0.0, x)) < 1e-11);
    CHECK(rel(bessel_k1(x), std::cyl_bessel_k(1.0, x)) < 1e-11);
  }
  CHECK_THROWS_AS(bessel_k0(0.0), NumericError);
  CHECK_THROWS_AS(bessel_k1(-1.0), NumericError);
}

TEST_CASE("Kn by upward recurrence") {
  for (double x : {0.3, 2.5, 12.0})
    for (int n = 0; n <= 25; ++n) {
      CAPTURE(x);
      CAPTURE(n);
      CHECK(rel(bessel_kn(n, x), std::cyl_bessel_k(static_cast<double>(n), x)) < 1e-9);
    }
  CHECK(bessel_kn(-3, 1.5) == doctest::Approx(bessel_kn(3, 1.5)).epsilon(1e-15));
}

TEST_CASE("log K sequence stays finite where K_n overflows") {
  const auto seq = log_bessel_k_sequence(160, 0.05);
  REQUIRE(seq.size() == 161);
  for (double v : seq) CHECK(std::isfinite(v));
  // log K_n(x) ~ lgamma(n) + n log(2/x) - log 2 for n >> x.
  const double approx = std::lgamma(160.0) + 160.0 * std::log(2.0 / 0.05) - std::log(2.0);
  CHECK(std::abs(seq[160] - approx) < 1e-2);
  CHECK(std::abs(seq[40] - std::log(std::cyl_bessel_k(40.0, 0.05))) < 1e-9 * std::abs(seq[40]));
}

TEST_CASE("Q function") {
  CHECK(q_function(0.0) == 0.5);
  CHECK(q_function(1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-14));
  CHECK(q_function(5.0) == doctest::Approx(2.866515718791939e-7).epsilon(1e-12));
  CHECK(q_function(-1.0) == doctest::Approx(1.0 - 0.15865525393145705).epsilon(1e-14));
}

TEST_CASE("complex log-gamma") {
  for (double x : {0.1, 0.3, 1.0, 2.5, 10.0, 50.0, 170.5}) {
    CAPTURE(x);
    CHECK(std::abs(lgamma_complex({x, 0.0}).real() - std::lgamma(x)) < 1e-12 * std::max(1.0, std::abs(std::lgamma(x))));
  }
  // Γ(z+1) = z Γ(z) and Γ(z)Γ(1-z) = π/sin(πz), compared through exp to
  // sidestep the branch of the logarithm.
  for (std::complex<double> z : {std::complex<double>(0.3, 0.7), {2.2, -3.1}, {-1.4, 0.6}, {5.0, 12.0}}) {
    CAPTURE(z);
    const auto lhs = std::exp(lgamma_complex(z + 1.0) - lgamma_complex(z));
    CHECK(std::abs(lhs - z) < 1e-11 * std::abs(z));
    const auto refl = std::exp(lgamma_complex(z) + lgamma_complex(1.0 - z));
    const auto expect = std::numbers::pi / std::sin(std::numbers::pi * z);
    CHECK(std::abs(refl - expect) < 1e-10 * std::abs(expect));
  }
}

TEST_CASE("Meijer G reduces to Bessel-K forms when a1 cancels a lower parameter") {
  for (double z : {1e-3, 0.1, 1.0, 7.0, 50.0, 400.0}) {
    CAPTURE(z);
    const double s = std::sqrt(z);
    // G(z | 1; 1,1,1) = 2 z K0(2√z)
    CHECK(rel(meijer_g_3_0_1_3(z, 1.0, {1.0, 1.0, 1.0}).value, 2.0 * z * std::cyl_bessel_k(0.0, 2.0 * s)) < 1e-9);
    // G(z | 1; 1,½,0) = 2 z^{1/4} K_{1/2}(2√z) = √π e^{-2√z}
    CHECK(rel(meijer_g_3_0_1_3(z, 1.0, {1.0, 0.5, 0.0}).value, std::sqrt(std::numbers::pi) * std::exp(-2.0 * s)) < 1e-9);
    // G(z | 1; 1,1,0) = 2 √z K1(2√z)
    CHECK(rel(meijer_g_3_0_1_3(z, 1.0, {1.0, 1.0, 0.0}).value, 2.0 * s * std::cyl_bessel_k(1.0, 2.0 * s)) < 1e-9);
  }
}

TEST_CASE("Meijer G Mellin moment with three distinct lower parameters") {
  // ∫ z^{s-1} G(z | a; b) dz = Γ(b1+s)Γ(b2+s)Γ(b3+s)/Γ(a+s); checked at s = 1.
  const double a = 2.0;
  const std::array<double, 3> b = {1.0, 0.75, 0.5};
  auto integrand = [&](double u) {
    const double z = std::exp(u);
    return z * meijer_g_3_0_1_3(z, a, b).value;
  };
  const double got = oracle::simpson(integrand, -30.0, 7.0, 740);
  const double expect = std::tgamma(2.0) * std::tgamma(1.75) * std::tgamma(1.5) / std::tgamma(3.0);
  CHECK(rel(got, expect) < 1e-7);
}

TEST_CASE("Meijer G does not depend on the contour abscissa") {
  for (double z : {0.01, 1.0, 100.0, 1e4}) {
    const MeijerResult base = meijer_g_3_0_1_3(z, 0.0, {1.0, 0.5, 0.0});
    MeijerOptions moved;
    moved.abscissa = base.abscissa - 0.37;
    const MeijerResult other = meijer_g_3_0_1_3(z, 0.0, {1.0, 0.5, 0.0}, moved);
    CAPTURE(z);
    CHECK(rel(other.value, base.value) < 1e-8);
  }
  CHECK_THROWS_AS(meijer_g_3_0_1_3(0.0, 1.0, {1.0, 1.0, 1.0}), NumericError);
  CHECK_THROWS_AS(meijer_g_3_0_1_3(-2.0, 1.0, {1.0, 1.0, 1.0}), NumericError);
}

TEST_CASE("Meijer G survives an abscissa on a pole") {
  MeijerOptions on_pole;
  on_pole.abscissa = 0.0;  // Γ(0 - s) has its pole here
  const double g = meijer_g_3_0_1_3(2.0, 1.0, {1.0, 1.0, 0.0}, on_pole).value;
  CHECK(rel(g, 2.0 * std::sqrt(2.0) * std::cyl_bessel_k(1.0, 2.0 * std::sqrt(2.0))) < 1e-9);
}

}
