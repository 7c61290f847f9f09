#include "bsc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bsc {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Complex read_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(where + ": expected a number or [re, im]");
}

json write_complex(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace

void ExperimentConfig::validate() const {
  channel.validate();
  layout.validate();
  if (samples_per_symbol < 1) throw ConfigError("samples_per_symbol must be >= 1");
  if (trials == 0) throw ConfigError("trials must be >= 1");
  if (snr_db.empty()) throw ConfigError("sweep.snr_db must not be empty");
  for (double s : snr_db)
    if (!std::isfinite(s)) throw ConfigError("sweep.snr_db entries must be finite");
  for (double k : k_db)
    if (!std::isfinite(k)) throw ConfigError("sweep.k_db entries must be finite");
  if (estimation.methods.empty()) throw ConfigError("estimation.methods must not be empty");
  if (!(estimation.phase_slope_std >= 0.0)) throw ConfigError("estimation.phase_slope_std must be >= 0");
  if (!(allocation.p0 > 0.0) || !(std::isnan(allocation.n0) || allocation.n0 > 0.0)) throw ConfigError("allocation: p0 and n0 must be positive");
  if (!(allocation.ber_target > 0.0 && allocation.ber_target < 0.5))
    throw ConfigError("allocation.ber_target must be in (0, 0.5)");
  if (!(allocation.rate_min >= 0.0)) throw ConfigError("allocation.rate_min must be >= 0");
  if (estimation.calibration_trials < 2) throw ConfigError("estimation.calibration_trials must be >= 2");
  if (impairments.full_chain) {
    const int samples = layout.frame_symbols() * samples_per_symbol;
    if (impairments.cfo_window < 2 || impairments.cfo_window >= samples)
      throw ConfigError("impairments.cfo_window must be in [2, frame samples)");
    const double ts = layout.tau_s / samples_per_symbol;
    if (!(std::abs(impairments.cfo_hz) * ts < 0.5)) throw ConfigError("impairments: |cfo| * T_s must be below 0.5");
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j, "config", {"schema_version", "name", "seed", "scheme", "trials", "parallel", "samples_per_symbol",
                          "channel", "layout", "tag_loads", "estimation", "impairments", "allocation", "sweep"});
  int version = kSchemaVersion;
  read(j, "schema_version", version, "config");
  if (version != kSchemaVersion) throw ConfigError("config: unsupported schema_version " + std::to_string(version));

  ExperimentConfig c;
  read(j, "name", c.name, "config");
  read(j, "seed", c.seed.master, "config");
  if (j.contains("scheme")) c.scheme = parse_modulation(j.at("scheme").get<std::string>());
  read(j, "trials", c.trials, "config");
  read(j, "parallel", c.parallel, "config");
  read(j, "samples_per_symbol", c.samples_per_symbol, "config");

  if (j.contains("channel")) {
    const json& ch = j["channel"];
    only_keys(ch, "channel", {"k_tt", "k_tr", "k_db", "sigma2_tt", "sigma2_tr", "los_phase_tt", "los_phase_tr", "unit_power"});
    bool unit_power = true;
    read(ch, "unit_power", unit_power, "channel");
    ChannelParams p;
    if (ch.contains("k_db")) {
      if (ch.contains("k_tt") || ch.contains("k_tr")) throw ConfigError("channel: give k_db or k_tt/k_tr, not both");
      p.k_tt = p.k_tr = db_to_linear({ch["k_db"].get<double>()});
    }
    read(ch, "k_tt", p.k_tt, "channel");
    read(ch, "k_tr", p.k_tr, "channel");
    if (unit_power) {
      if (ch.contains("sigma2_tt") || ch.contains("sigma2_tr"))
        throw ConfigError("channel: sigma2 values conflict with unit_power = true");
      p.sigma2_tt = 1.0 / (1.0 + p.k_tt);
      p.sigma2_tr = 1.0 / (1.0 + p.k_tr);
    } else {
      read(ch, "sigma2_tt", p.sigma2_tt, "channel");
      read(ch, "sigma2_tr", p.sigma2_tr, "channel");
    }
    read(ch, "los_phase_tt", p.los_phase_tt, "channel");
    read(ch, "los_phase_tr", p.los_phase_tr, "channel");
    c.channel = p;
  }

  if (j.contains("layout")) {
    const json& l = j["layout"];
    only_keys(l, "layout", {"tau_sync", "tau_c", "tau_s", "slots_K", "slot_len_M", "pilot_N", "placement"});
    read(l, "tau_sync", c.layout.tau_sync, "layout");
    read(l, "tau_c", c.layout.tau_c, "layout");
    read(l, "tau_s", c.layout.tau_s, "layout");
    read(l, "slots_K", c.layout.slots_K, "layout");
    read(l, "slot_len_M", c.layout.slot_len_M, "layout");
    read(l, "pilot_N", c.layout.pilot_N, "layout");
    if (l.contains("placement")) {
      const std::string s = l["placement"].get<std::string>();
      if (s == "single_burst") c.layout.placement = Placement::single_burst;
      else if (s == "per_slot") c.layout.placement = Placement::per_slot;
      else throw ConfigError("layout.placement: expected single_burst or per_slot");
    }
  }

  if (j.contains("tag_loads")) {
    const json& t = j["tag_loads"];
    only_keys(t, "tag_loads", {"z_antenna", "z_load_1", "z_load_2", "structural_mode"});
    c.use_tag_loads = true;
    if (t.contains("z_antenna")) c.tag_loads.z_antenna = read_complex(t["z_antenna"], "tag_loads.z_antenna");
    if (t.contains("z_load_1")) c.tag_loads.z_load_1 = read_complex(t["z_load_1"], "tag_loads.z_load_1");
    if (t.contains("z_load_2")) c.tag_loads.z_load_2 = read_complex(t["z_load_2"], "tag_loads.z_load_2");
    if (t.contains("structural_mode"))
      c.tag_loads.structural_mode = read_complex(t["structural_mode"], "tag_loads.structural_mode");
  }

  if (j.contains("estimation")) {
    const json& e = j["estimation"];
    only_keys(e, "estimation", {"methods", "index_origin", "phase_slope_std", "prior", "calibration_trials"});
    if (e.contains("methods")) {
      c.estimation.methods.clear();
      for (const auto& m : e["methods"]) c.estimation.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (e.contains("index_origin")) c.estimation.origin = parse_index_origin(e["index_origin"].get<std::string>());
    read(e, "phase_slope_std", c.estimation.phase_slope_std, "estimation");
    if (e.contains("prior")) {
      const std::string s = e["prior"].get<std::string>();
      if (s == "truth") c.estimation.prior_mode = PriorMode::truth;
      else if (s == "calibrated") c.estimation.prior_mode = PriorMode::calibrated;
      else throw ConfigError("estimation.prior: expected truth or calibrated");
    }
    read(e, "calibration_trials", c.estimation.calibration_trials, "estimation");
  }

  if (j.contains("impairments")) {
    const json& im = j["impairments"];
    only_keys(im, "impairments", {"full_chain", "dc_offset", "cfo_hz", "initial_phase", "cfo_window"});
    read(im, "full_chain", c.impairments.full_chain, "impairments");
    if (im.contains("dc_offset")) c.impairments.dc_offset = read_complex(im["dc_offset"], "impairments.dc_offset");
    read(im, "cfo_hz", c.impairments.cfo_hz, "impairments");
    read(im, "initial_phase", c.impairments.initial_phase, "impairments");
    read(im, "cfo_window", c.impairments.cfo_window, "impairments");
  }

  if (j.contains("allocation")) {
    const json& a = j["allocation"];
    only_keys(a, "allocation", {"p0", "n0", "ber_target", "rate_min"});
    read(a, "p0", c.allocation.p0, "allocation");
    if (a.contains("n0") && !a["n0"].is_null()) read(a, "n0", c.allocation.n0, "allocation");
    read(a, "ber_target", c.allocation.ber_target, "allocation");
    read(a, "rate_min", c.allocation.rate_min, "allocation");
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    only_keys(s, "sweep", {"snr_db", "k_db"});
    read(s, "snr_db", c.snr_db, "sweep");
    read(s, "k_db", c.k_db, "sweep");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = c.name;
  j["seed"] = c.seed.master;
  j["scheme"] = std::string(to_string(c.scheme));
  j["trials"] = c.trials;
  j["parallel"] = c.parallel;
  j["samples_per_symbol"] = c.samples_per_symbol;
  j["channel"] = {{"unit_power", false},
                  {"k_tt", c.channel.k_tt},
                  {"k_tr", c.channel.k_tr},
                  {"sigma2_tt", c.channel.sigma2_tt},
                  {"sigma2_tr", c.channel.sigma2_tr},
                  {"los_phase_tt", c.channel.los_phase_tt},
                  {"los_phase_tr", c.channel.los_phase_tr}};
  j["layout"] = {{"tau_sync", c.layout.tau_sync},
                 {"tau_c", c.layout.tau_c},
                 {"tau_s", c.layout.tau_s},
                 {"slots_K", c.layout.slots_K},
                 {"slot_len_M", c.layout.slot_len_M},
                 {"pilot_N", c.layout.pilot_N},
                 {"placement", c.layout.placement == Placement::single_burst ? "single_burst" : "per_slot"}};
  if (c.use_tag_loads)
    j["tag_loads"] = {{"z_antenna", write_complex(c.tag_loads.z_antenna)},
                      {"z_load_1", write_complex(c.tag_loads.z_load_1)},
                      {"z_load_2", write_complex(c.tag_loads.z_load_2)},
                      {"structural_mode", write_complex(c.tag_loads.structural_mode)}};
  json methods = json::array();
  for (Method m : c.estimation.methods) methods.push_back(std::string(to_string(m)));
  j["estimation"] = {{"methods", methods},
                     {"index_origin", std::string(to_string(c.estimation.origin))},
                     {"phase_slope_std", c.estimation.phase_slope_std},
                     {"prior", c.estimation.prior_mode == PriorMode::truth ? "truth" : "calibrated"},
                     {"calibration_trials", c.estimation.calibration_trials}};
  j["impairments"] = {{"full_chain", c.impairments.full_chain},
                      {"dc_offset", write_complex(c.impairments.dc_offset)},
                      {"cfo_hz", c.impairments.cfo_hz},
                      {"initial_phase", c.impairments.initial_phase},
                      {"cfo_window", c.impairments.cfo_window}};
  j["allocation"] = {{"p0", c.allocation.p0},
                     {"n0", std::isnan(c.allocation.n0) ? json(nullptr) : json(c.allocation.n0)},
                     {"ber_target", c.allocation.ber_target},
                     {"rate_min", c.allocation.rate_min}};
  j["sweep"] = {{"snr_db", c.snr_db}, {"k_db", c.k_db}};
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.parallel = true;  // execution mode does not change results
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config_to_json(c))));
  return buf;
}

}  // namespace bsc
