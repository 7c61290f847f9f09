#include <doctest.h>

#include <cmath>
#include <string>

#include "bsc/config.hpp"

using namespace bsc;

namespace {

const char* kExample = R"({
  "schema_version": 1,
  "name": "example",
  "seed": 5,
  "scheme": "ook",
  "trials": 300,
  "samples_per_symbol": 4,
  "channel": {"k_db": 7},
  "layout": {"tau_sync": 4, "slots_K": 2, "slot_len_M": 16, "pilot_N": 6, "placement": "per_slot"},
  "estimation": {"methods": ["perfect", "ls", "lmmse"], "index_origin": "centered", "phase_slope_std": 1e-4},
  "impairments": {"full_chain": true, "dc_offset": [0.5, -0.25], "cfo_hz": 1000, "cfo_window": 64},
  "allocation": {"p0": 2, "n0": null, "ber_target": 0.01},
  "sweep": {"snr_db": [5, 10]}
})";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parse a full config") {
  const ExperimentConfig c = parse_config(kExample);
  CHECK(c.name == "example");
  CHECK(c.seed.master == 5);
  CHECK(c.scheme == Modulation::ook);
  CHECK(c.trials == 300);
  CHECK(c.channel.k_tt == doctest::Approx(std::pow(10.0, 0.7)));
  CHECK(c.channel.sigma2_tt == doctest::Approx(1.0 / (1.0 + std::pow(10.0, 0.7))));
  CHECK(c.layout.placement == Placement::per_slot);
  CHECK(c.layout.pilot_N == 6);
  CHECK(c.estimation.methods == std::vector<Method>{Method::perfect_csi, Method::ls_lifted, Method::lmmse_lifted});
  CHECK(c.estimation.origin == IndexOrigin::centered);
  CHECK(c.impairments.full_chain);
  CHECK(c.impairments.dc_offset == Complex(0.5, -0.25));
  CHECK(std::isnan(c.allocation.n0));
  CHECK(c.allocation.p0 == 2.0);
  CHECK(c.snr_db == std::vector<double>{5.0, 10.0});
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("round trip through JSON keeps the hash") {
  const ExperimentConfig c = parse_config(kExample);
  const ExperimentConfig d = parse_config(config_to_json(c));
  CHECK(config_to_json(d) == config_to_json(c));
  CHECK(config_hash(d) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
}

TEST_CASE("hash ignores the execution mode and tracks everything else") {
  ExperimentConfig c = parse_config(kExample);
  const std::string h = config_hash(c);
  c.parallel = !c.parallel;
  CHECK(config_hash(c) == h);
  c.seed.master = 6;
  CHECK(config_hash(c) != h);
  c = parse_config(kExample);
  c.snr_db.push_back(15.0);
  CHECK(config_hash(c) != h);
}

TEST_CASE("unknown keys and bad values are rejected") {
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "trails": 10})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "layout": {"pilotN": 4}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "scheme": "qam"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "trials": "many"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "layout": {"placement": "scattered"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "channel": {"k_db": 3, "k_tt": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "estimation": {"methods": ["ml"]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.snr_db.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.allocation.ber_target = 0.6;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.samples_per_symbol = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.estimation.methods.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

}
