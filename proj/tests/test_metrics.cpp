#include <doctest.h>

#include <cmath>
#include <random>

#include "bsc/metrics.hpp"

using namespace bsc;

TEST_SUITE("metrics") {

TEST_CASE("EVM") {
  const std::vector<Complex> ref = {{1.0, 0.0}, {-1.0, 0.0}};
  CHECK(evm_rms(ref, ref) == 0.0);
  CHECK(evm_rms({{1.1, 0.0}, {-1.1, 0.0}}, ref) == doctest::Approx(10.0));
  // Scaling both sequences leaves the percentage unchanged.
  const std::vector<Complex> eq = {{0.9, 0.2}, {-1.3, -0.1}};
  std::vector<Complex> eq2, ref2;
  for (int k = 0; k < 2; ++k) {
    eq2.push_back(eq[k] * Complex(0.0, 3.0));
    ref2.push_back(ref[k] * Complex(0.0, 3.0));
  }
  CHECK(evm_rms(eq2, ref2) == doctest::Approx(evm_rms(eq, ref)).epsilon(1e-14));
  CHECK_THROWS_AS(evm_rms(eq, {ref[0]}), ConfigError);
  CHECK_THROWS_AS(evm_rms(eq, {Complex(0, 0), Complex(0, 0)}), NumericError);
}

TEST_CASE("MSE decomposes into magnitude and phase terms") {
  std::mt19937_64 eng(1);
  std::normal_distribution<double> n;
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Complex h(n(eng), n(eng)), e(0.1 * n(eng), 0.1 * n(eng));
    const MseDecomposition m = mse_decompose(h + e, h);
    worst = std::max(worst, std::abs(m.total - std::norm(e)) / std::norm(e));
    CHECK(m.magnitude_term >= 0.0);
    CHECK(m.phase_term >= 0.0);
  }
  CHECK(worst < 1e-10);
  const MseDecomposition pure_phase = mse_decompose(std::polar(2.0, 0.3), std::polar(2.0, 0.0));
  CHECK(pure_phase.magnitude_term < 1e-28);
  const MseDecomposition pure_mag = mse_decompose({3.0, 0.0}, {2.0, 0.0});
  CHECK(pure_mag.phase_term == 0.0);
  CHECK(pure_mag.magnitude_term == doctest::Approx(1.0));
}

TEST_CASE("Wilson interval") {
  // Reference values from the closed form at 95%.
  const WilsonInterval a = wilson_interval(10, 100);
  CHECK(a.lo == doctest::Approx(0.05522914).epsilon(1e-6));
  CHECK(a.hi == doctest::Approx(0.17436566).epsilon(1e-6));
  const WilsonInterval z = wilson_interval(0, 1000);
  CHECK(z.lo < 1e-15);
  CHECK(z.hi == doctest::Approx(0.0038267).epsilon(1e-4));
  const WilsonInterval e = wilson_interval(0, 0);
  CHECK(e.lo == 0.0);
  CHECK(e.hi == 1.0);
}

TEST_CASE("bit error counting") {
  const BerCount b = ber_count({0, 1, 1, 0, 1}, {0, 1, 0, 0, 0});
  CHECK(b.errors == 2);
  CHECK(b.total == 5);
  CHECK(b.ber == doctest::Approx(0.4));
  CHECK(b.ci.lo < 0.4);
  CHECK(b.ci.hi > 0.4);
  CHECK_THROWS_AS(ber_count({0}, {0, 1}), ConfigError);
}

}
