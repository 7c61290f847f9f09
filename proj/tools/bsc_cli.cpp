// Command-line front end for the backscatter link simulator.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 infeasible
// allocation problem, 3 numeric failure. Errors are a single line on stderr:
//   error: <config|infeasible|numeric>: <reason>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsc/config.hpp"
#include "bsc/harness.hpp"
#include "bsc/selftest.hpp"

namespace {

using namespace bsc;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string image;
  bool serial = false;
  int verbose = 0;
};

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

ExperimentConfig load(const Options& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = load_config(o.config);
  if (o.seed) cfg.seed.master = *o.seed;
  if (o.serial) cfg.parallel = false;
  cfg.validate();
  return cfg;
}

void emit(const Options& o, const std::string& content) {
  if (o.out.empty() || o.out == "-") {
    std::cout << content;
  } else {
    write_file_atomic(o.out, content);
  }
}

void note(const Options& o, const std::string& msg) {
  if (o.verbose > 0) std::cerr << msg << '\n';
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open image '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Deterministic 64x48 RGB test card used when no image is given.
std::vector<std::uint8_t> test_card() {
  const int w = 64, h = 48;
  std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const bool check = ((x / 8) + (y / 8)) % 2 == 0;
      out.push_back(static_cast<std::uint8_t>(x * 4));
      out.push_back(static_cast<std::uint8_t>(y * 5));
      out.push_back(check ? 220 : 30);
    }
  return out;
}

int cmd_sim(const Options& o) {
  const ExperimentConfig cfg = load(o);
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed.master;
  j["points"] = nlohmann::ordered_json::array();
  for (const GridPoint& pt : grid_points(cfg)) {
    note(o, "sim: point " + std::to_string(pt.index) + " snr_db=" + format_number(pt.snr_db));
    j["points"].push_back(nlohmann::ordered_json::parse(point_to_json(cfg, run_point(cfg, pt, SweepKind::ber))));
  }
  emit(o, j.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const Options& o, SweepKind kind) {
  const ExperimentConfig cfg = load(o);
  note(o, std::string(kind == SweepKind::ber ? "ber" : "mse") + "-sweep: " + std::to_string(grid_points(cfg).size()) +
              " points x " + std::to_string(cfg.trials) + " trials");
  const SweepResult r = kind == SweepKind::ber ? ber_sweep(cfg) : mse_sweep(cfg);
  emit(o, sweep_to_csv(r, kind));
  return 0;
}

int cmd_optimize(const Options& o) {
  emit(o, allocation_report(load(o)));
  return 0;
}

int cmd_analytic(const Options& o) {
  emit(o, analytic_ber_csv(load(o)));
  return 0;
}

int cmd_image(const Options& o) {
  const ExperimentConfig cfg = load(o);
  if (o.out.empty()) throw ConfigError("image-demo needs --out <directory>");
  const std::vector<std::uint8_t> raw = o.image.empty() ? test_card() : read_bytes(o.image);
  Pnm pnm;
  const bool is_pnm = parse_pnm(raw, pnm);
  const std::vector<std::uint8_t>& payload = is_pnm ? pnm.pixels : raw;
  note(o, "image-demo: " + std::to_string(payload.size()) + " payload bytes");
  const ImageRoundtrip r = image_roundtrip(cfg, payload);

  namespace fs = std::filesystem;
  fs::create_directories(o.out);
  const std::string ext = is_pnm ? (pnm.header[1] == '5' ? ".pgm" : ".ppm") : ".bin";
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed.master;
  j["snr_db"] = std::stod(format_number(cfg.snr_db.front()));
  j["payload_bytes"] = payload.size();
  j["frames"] = r.frames;
  j["pad_bits"] = r.pad_bits;
  j["flagged_frames"] = r.flagged_frames;
  j["methods"] = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < cfg.estimation.methods.size(); ++m) {
    const std::string name(to_string(cfg.estimation.methods[m]));
    std::string content = is_pnm ? pnm.header : std::string();
    content.append(r.recovered[m].begin(), r.recovered[m].end());
    const std::string file = "recovered_" + name + ext;
    write_file_atomic((fs::path(o.out) / file).string(), content);
    j["methods"].push_back({{"method", name},
                            {"file", file},
                            {"bit_errors", r.ber[m].errors},
                            {"bits", r.ber[m].total},
                            {"ber", std::stod(format_number(r.ber[m].ber))},
                            {"bit_exact", r.ber[m].errors == 0}});
  }
  write_file_atomic((fs::path(o.out) / "report.json").string(), j.dump(2) + "\n");
  return 0;
}

int cmd_selftest(const Options& o) {
  std::ostringstream log;
  const int failures = run_selftest(log);
  emit(o, log.str());
  if (failures > 0) {
    std::cerr << "error: numeric: selftest failed " << failures << " check(s)\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backscatter link simulator: Monte Carlo sweeps, estimators, analytic BER and frame allocation"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("-c,--config", o.config, "JSON experiment config");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", o.out, "output path ('-' or omitted: stdout)");
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_flag("--serial", o.serial, "run the serial reference path");
    sub->add_flag("-v,--verbose", o.verbose, "progress on stderr");
  };

  auto* sim = app.add_subcommand("sim", "per-point JSON report over the config grid");
  auto* ber = app.add_subcommand("ber-sweep", "BER curve CSV");
  auto* mse = app.add_subcommand("mse-sweep", "estimator MSE curve CSV");
  auto* opt = app.add_subcommand("optimize-frame", "pilot-length allocation report (JSON)");
  auto* ana = app.add_subcommand("analytic-ber", "quadrature vs closed-form BER table (CSV)");
  auto* img = app.add_subcommand("image-demo", "send an image (PGM/PPM or raw bytes) through the link");
  auto* self = app.add_subcommand("selftest", "run the built-in invariant checks");
  for (auto* s : {sim, ber, mse, opt, ana}) add_common(s, true);
  add_common(img, false);
  img->add_option("--image", o.image, "input image; a built-in test card when omitted")->check(CLI::ExistingFile);
  self->add_option("-o,--out", o.out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: config: " << one_line(e.what()) << '\n' << app.help();
    return 1;
  }

  try {
    if (*sim) return cmd_sim(o);
    if (*ber) return cmd_sweep(o, SweepKind::ber);
    if (*mse) return cmd_sweep(o, SweepKind::mse);
    if (*opt) return cmd_optimize(o);
    if (*ana) return cmd_analytic(o);
    if (*img) return cmd_image(o);
    if (*self) return cmd_selftest(o);
  } catch (const InfeasibleError& e) {
    std::cerr << "error: infeasible: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "error: numeric: " << one_line(e.what()) << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: numeric: " << one_line(e.what()) << '\n';
    return 3;
  }
  return 1;
}
