#include <doctest.h>

#include <cmath>

#include "bsc/txchain.hpp"

using namespace bsc;

TEST_SUITE("txchain") {

TEST_CASE("reflection coefficients") {
  const Complex za(50.0, 0.0);
  CHECK(std::abs(reflection_coeff(za, za)) < 1e-15);
  CHECK(reflection_coeff({0.0, 0.0}, za) == Complex(-1.0, 0.0));
  CHECK(std::abs(reflection_coeff({1e12, 0.0}, za) - Complex(1.0, 0.0)) < 1e-9);
  // Conjugate match with a complex antenna impedance absorbs everything.
  const Complex zc(30.0, 20.0);
  CHECK(std::abs(reflection_coeff(std::conj(zc), zc)) < 1e-15);
  // Passive loads never reflect more than they receive.
  for (double x : {-200.0, -10.0, 0.0, 10.0, 200.0})
    for (double rl : {0.0, 5.0, 50.0, 500.0}) CHECK(std::abs(reflection_coeff({rl, x}, za)) <= 1.0 + 1e-12);
  CHECK_THROWS_AS(reflection_coeff({-50.0, 0.0}, za), NumericError);
}

TEST_CASE("alphabets") {
  const Alphabet ook = ideal_alphabet(Modulation::ook), bpsk = ideal_alphabet(Modulation::bpsk);
  CHECK(ook[0] == Complex(0.0, 0.0));
  CHECK(ook[1] == Complex(1.0, 0.0));
  CHECK(bpsk[0] == Complex(-1.0, 0.0));
  CHECK(bpsk[1] == Complex(1.0, 0.0));

  TagLoads loads;  // short and open
  const AlphabetResult r = symbol_alphabet(loads, Modulation::bpsk);
  CHECK(r.warning.empty());
  CHECK(std::abs(r.points[0] + r.points[1]) < 1e-6);
  loads.z_load_2 = {50.0, 0.0};  // matched: absorbs, not antipodal
  CHECK_FALSE(symbol_alphabet(loads, Modulation::bpsk).warning.empty());
  CHECK(symbol_alphabet(loads, Modulation::ook).warning.empty());
  loads.z_antenna = {0.0, 10.0};
  CHECK_THROWS_AS(symbol_alphabet(loads, Modulation::ook), ConfigError);
}

TEST_CASE("pilot and preamble sequences") {
  const auto p = alternating_pilots(6);
  CHECK(p == std::vector<Complex>{1.0, -1.0, 1.0, -1.0, 1.0, -1.0});
  const auto pre = preamble_sequence(127);
  int ones = 0;
  for (const Complex& x : pre) {
    CHECK(std::abs(std::abs(x.real()) - 1.0) < 1e-15);
    ones += x.real() > 0;
  }
  CHECK(ones == 64);  // one period of a 7-bit m-sequence
}

TEST_CASE("frame assembly") {
  FrameLayout l;
  l.tau_sync = 2;
  l.slots_K = 2;
  l.slot_len_M = 3;
  l.pilot_N = 2;
  l.placement = Placement::per_slot;
  const std::vector<std::uint8_t> bits = {1, 0, 1, 1, 0, 0};
  const SymbolFrame f = assemble_frame(l, bits, ideal_alphabet(Modulation::bpsk), alternating_pilots(2));
  REQUIRE(f.symbols.size() == 12);
  CHECK(f.symbols[2] == Complex(1.0, 0.0));
  CHECK(f.symbols[3] == Complex(-1.0, 0.0));
  CHECK(f.symbols[4] == Complex(1.0, 0.0));
  CHECK(f.symbols[5] == Complex(-1.0, 0.0));
  CHECK(f.symbols[6] == Complex(1.0, 0.0));
  CHECK(f.symbols[7] == Complex(1.0, 0.0));
  CHECK(f.symbols[8] == Complex(-1.0, 0.0));
  CHECK(f.symbols[10] == Complex(-1.0, 0.0));
  CHECK(f.payload_bits == bits);

  l.tau_c = 20;  // idle tail stays silent
  const SymbolFrame g = assemble_frame(l, bits, ideal_alphabet(Modulation::ook), alternating_pilots(2));
  REQUIRE(g.symbols.size() == 20);
  CHECK(g.symbols[19] == Complex(0.0, 0.0));

  CHECK_THROWS_AS(assemble_frame(l, {1, 0}, ideal_alphabet(Modulation::ook), alternating_pilots(2)), ConfigError);
  CHECK_THROWS_AS(assemble_frame(l, bits, ideal_alphabet(Modulation::ook), {1.0, 1.0}), ConfigError);
  l.pilot_N = 3;
  CHECK_THROWS_AS(assemble_frame(l, bits, ideal_alphabet(Modulation::ook), alternating_pilots(3)), ConfigError);
}

TEST_CASE("rectangular pulse synthesis") {
  const std::vector<Complex> s = {{1.0, 2.0}, {-3.0, 0.5}};
  const auto x = synthesize_baseband(s, 3);
  REQUIRE(x.size() == 6);
  for (int k = 0; k < 6; ++k) CHECK(x[k] == s[k / 3]);
  CHECK(synthesize_baseband(s, 1) == s);
  CHECK_THROWS_AS(synthesize_baseband(s, 0), ConfigError);
}

}
