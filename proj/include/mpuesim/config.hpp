#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mpuesim/rng.hpp"

namespace mpuesim {

enum class UeModel { isotropic, mpue_a3, mpue_a1 };

inline const char* to_string(UeModel m) {
  switch (m) {
    case UeModel::isotropic: return "isotropic";
    case UeModel::mpue_a3: return "mpue_a3";
    case UeModel::mpue_a1: return "mpue_a1";
  }
  return "?";
}

inline UeModel ue_model_from_string(const std::string& s) {
  if (s == "isotropic") return UeModel::isotropic;
  if (s == "mpue_a3") return UeModel::mpue_a3;
  if (s == "mpue_a1") return UeModel::mpue_a1;
  throw std::invalid_argument("unknown ue_model: " + s);
}

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config error [" + field + "]: " + what), field(field) {}
  std::string field;
};

// Full parameter set of a run. Values not found in the config document keep
// the defaults below; see docs/config.md for the schema.
struct ScenarioConfig {
  // Network and deployment
  double carrier_frequency_ghz = 28.0;
  double bandwidth_mhz = 100.0;
  int n_sites = 7;
  double inter_site_distance_m = 200.0;
  double tx_power_dbm = 40.0;
  double bs_height_m = 10.0;
  double ue_height_m = 1.5;

  // UE population and motion
  int n_ues = 420;
  double ue_speed_kmh = 30.0;

  // Timing
  double time_step_ms = 10.0;
  double ssb_period_ms = 20.0;
  int omega = 2;
  double sim_duration_s = 60.0;

  // Measurement pipeline
  int n_l1 = 2;
  double p_thr_dbm = -100.0;
  int n_str = 2;
  double k_cell = 4.0;  // L3 IIR filter coefficient for cell quality
  double k_beam = 4.0;  // L3 IIR filter coefficient for beam measurements

  // Scheduling / interference
  int k_b = 4;

  // UE model
  UeModel ue_model = UeModel::isotropic;
  double o_p_db = 0.0;

  // Handover
  double o_a3_db = 2.0;
  double t_ttt_ms = 80.0;
  int n_prep = 4;
  double t_hof_ms = 200.0;
  double ho_interruption_ms = 50.0;

  // Beam management
  int n_rep = 4;
  double o_b_db = 1.0;
  double l2_alpha = 0.5;

  // Failure models
  double gamma_out_db = -8.0;
  double gamma_in_db = -6.0;
  double rlq_alpha = 0.1;
  double rlm_alpha = 0.1;
  int c_bfi_max = 3;
  double t_bfd_ms = 60.0;
  int n_rach = 4;
  double t_rach_ms = 20.0;
  double t_rlf_ms = 1000.0;
  double reestablish_delay_ms = 200.0;

  // KPI
  double t_fh_ms = 1000.0;

  // Channel
  double noise_figure_db = 9.0;
  double shadow_sigma_db = 4.0;
  double shadow_decorr_m = 13.0;
  double rician_k_db = 10.0;
  bool fast_fading = true;
  bool shadow_fading = true;

  std::uint64_t rng_seed = 1;

  int steps() const {
    return static_cast<int>(sim_duration_s * 1000.0 / time_step_ms + 0.5);
  }
  double speed_mps() const { return ue_speed_kmh / 3.6; }
};

namespace detail {

struct FieldDesc {
  enum class Kind { real, integer, boolean, u64, model } kind;
  void* ptr(ScenarioConfig& c) const { return getter(c); }
  void* (*getter)(ScenarioConfig&);
};

inline std::map<std::string, FieldDesc>& field_table() {
  static std::map<std::string, FieldDesc> t = [] {
    std::map<std::string, FieldDesc> m;
    auto real = [&m](const std::string& k, void* (*g)(ScenarioConfig&)) {
      m[k] = {FieldDesc::Kind::real, g};
    };
    auto integer = [&m](const std::string& k, void* (*g)(ScenarioConfig&)) {
      m[k] = {FieldDesc::Kind::integer, g};
    };
    auto boolean = [&m](const std::string& k, void* (*g)(ScenarioConfig&)) {
      m[k] = {FieldDesc::Kind::boolean, g};
    };
#define MPUESIM_REAL(name) real(#name, +[](ScenarioConfig& c) -> void* { return &c.name; })
#define MPUESIM_INT(name) integer(#name, +[](ScenarioConfig& c) -> void* { return &c.name; })
#define MPUESIM_BOOL(name) boolean(#name, +[](ScenarioConfig& c) -> void* { return &c.name; })
    MPUESIM_REAL(carrier_frequency_ghz);
    MPUESIM_REAL(bandwidth_mhz);
    MPUESIM_INT(n_sites);
    MPUESIM_REAL(inter_site_distance_m);
    MPUESIM_REAL(tx_power_dbm);
    MPUESIM_REAL(bs_height_m);
    MPUESIM_REAL(ue_height_m);
    MPUESIM_INT(n_ues);
    MPUESIM_REAL(ue_speed_kmh);
    MPUESIM_REAL(time_step_ms);
    MPUESIM_REAL(ssb_period_ms);
    MPUESIM_INT(omega);
    MPUESIM_REAL(sim_duration_s);
    MPUESIM_INT(n_l1);
    MPUESIM_REAL(p_thr_dbm);
    MPUESIM_INT(n_str);
    MPUESIM_REAL(k_cell);
    MPUESIM_REAL(k_beam);
    MPUESIM_INT(k_b);
    MPUESIM_REAL(o_p_db);
    MPUESIM_REAL(o_a3_db);
    MPUESIM_REAL(t_ttt_ms);
    MPUESIM_INT(n_prep);
    MPUESIM_REAL(t_hof_ms);
    MPUESIM_REAL(ho_interruption_ms);
    MPUESIM_INT(n_rep);
    MPUESIM_REAL(o_b_db);
    MPUESIM_REAL(l2_alpha);
    MPUESIM_REAL(gamma_out_db);
    MPUESIM_REAL(gamma_in_db);
    MPUESIM_REAL(rlq_alpha);
    MPUESIM_REAL(rlm_alpha);
    MPUESIM_INT(c_bfi_max);
    MPUESIM_REAL(t_bfd_ms);
    MPUESIM_INT(n_rach);
    MPUESIM_REAL(t_rach_ms);
    MPUESIM_REAL(t_rlf_ms);
    MPUESIM_REAL(reestablish_delay_ms);
    MPUESIM_REAL(t_fh_ms);
    MPUESIM_REAL(noise_figure_db);
    MPUESIM_REAL(shadow_sigma_db);
    MPUESIM_REAL(shadow_decorr_m);
    MPUESIM_REAL(rician_k_db);
    MPUESIM_BOOL(fast_fading);
    MPUESIM_BOOL(shadow_fading);
#undef MPUESIM_REAL
#undef MPUESIM_INT
#undef MPUESIM_BOOL
    m["rng_seed"] = {FieldDesc::Kind::u64,
                     +[](ScenarioConfig& c) -> void* { return &c.rng_seed; }};
    m["ue_model"] = {FieldDesc::Kind::model,
                     +[](ScenarioConfig& c) -> void* { return &c.ue_model; }};
    return m;
  }();
  return t;
}

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

inline void set_config_field(ScenarioConfig& cfg, const std::string& key,
                             const std::string& value) {
  auto& table = detail::field_table();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown key");
  const auto& fd = it->second;
  try {
    switch (fd.kind) {
      case detail::FieldDesc::Kind::real: {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        *static_cast<double*>(fd.ptr(cfg)) = v;
        break;
      }
      case detail::FieldDesc::Kind::integer: {
        size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        *static_cast<int*>(fd.ptr(cfg)) = v;
        break;
      }
      case detail::FieldDesc::Kind::u64: {
        size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        *static_cast<std::uint64_t*>(fd.ptr(cfg)) = v;
        break;
      }
      case detail::FieldDesc::Kind::boolean: {
        bool v;
        if (value == "true" || value == "1")
          v = true;
        else if (value == "false" || value == "0")
          v = false;
        else
          throw std::invalid_argument("expected true/false");
        *static_cast<bool*>(fd.ptr(cfg)) = v;
        break;
      }
      case detail::FieldDesc::Kind::model:
        *static_cast<UeModel*>(fd.ptr(cfg)) = ue_model_from_string(value);
        break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, std::string("bad value '") + value + "': " + e.what());
  }
}

inline void validate_config(const ScenarioConfig& c) {
  auto positive = [](const char* name, double v) {
    if (!(v > 0)) throw ConfigError(name, "must be > 0");
  };
  positive("carrier_frequency_ghz", c.carrier_frequency_ghz);
  positive("bandwidth_mhz", c.bandwidth_mhz);
  positive("inter_site_distance_m", c.inter_site_distance_m);
  positive("time_step_ms", c.time_step_ms);
  positive("ssb_period_ms", c.ssb_period_ms);
  positive("sim_duration_s", c.sim_duration_s);
  positive("t_ttt_ms", c.t_ttt_ms);
  positive("t_hof_ms", c.t_hof_ms);
  positive("ho_interruption_ms", c.ho_interruption_ms);
  positive("t_bfd_ms", c.t_bfd_ms);
  positive("t_rach_ms", c.t_rach_ms);
  positive("t_rlf_ms", c.t_rlf_ms);
  positive("reestablish_delay_ms", c.reestablish_delay_ms);
  positive("t_fh_ms", c.t_fh_ms);
  if (c.n_sites != 7) throw ConfigError("n_sites", "only the 7-site hexagon is supported");
  if (c.n_ues < 1) throw ConfigError("n_ues", "must be >= 1");
  if (c.ue_speed_kmh < 0) throw ConfigError("ue_speed_kmh", "must be >= 0");
  if (c.omega < 1) throw ConfigError("omega", "must be >= 1");
  if (c.ssb_period_ms != c.omega * c.time_step_ms)
    throw ConfigError("ssb_period_ms", "must equal omega * time_step_ms");
  if (c.n_l1 < 1) throw ConfigError("n_l1", "must be >= 1");
  if (c.k_b < 1 || c.k_b > 12) throw ConfigError("k_b", "must be in 1..12");
  if (c.n_str < 1) throw ConfigError("n_str", "must be >= 1");
  if (c.n_rep < 1 || c.n_rep > 12) throw ConfigError("n_rep", "must be in 1..12");
  if (c.n_prep < 1 || c.n_prep > 12) throw ConfigError("n_prep", "must be in 1..12");
  if (!(c.gamma_in_db > c.gamma_out_db))
    throw ConfigError("gamma_in_db", "must be > gamma_out_db");
  if (!(c.l2_alpha > 0 && c.l2_alpha <= 1)) throw ConfigError("l2_alpha", "must be in (0,1]");
  if (!(c.rlq_alpha > 0 && c.rlq_alpha <= 1)) throw ConfigError("rlq_alpha", "must be in (0,1]");
  if (!(c.rlm_alpha > 0 && c.rlm_alpha <= 1)) throw ConfigError("rlm_alpha", "must be in (0,1]");
  if (c.c_bfi_max < 1) throw ConfigError("c_bfi_max", "must be >= 1");
  if (c.n_rach < 1) throw ConfigError("n_rach", "must be >= 1");
  if (c.k_cell < 0) throw ConfigError("k_cell", "must be >= 0");
  if (c.k_beam < 0) throw ConfigError("k_beam", "must be >= 0");
  if (c.shadow_sigma_db < 0) throw ConfigError("shadow_sigma_db", "must be >= 0");
  if (!(c.shadow_decorr_m > 0)) throw ConfigError("shadow_decorr_m", "must be > 0");
  if (c.tx_power_dbm > 100) throw ConfigError("tx_power_dbm", "implausibly large");
}

// Parses a flat key = value document ('#' starts a comment). Unknown keys
// are rejected; omitted keys keep their defaults; the result is validated.
inline ScenarioConfig load_config(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    std::string key = detail::trim(stripped.substr(0, eq));
    std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    set_config_field(cfg, key, value);
  }
  validate_config(cfg);
  return cfg;
}

// Canonical serialization, used both for dumping configs and for hashing.
inline std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out.precision(17);
#define MPUESIM_EMIT(name) out << #name << " = " << c.name << "\n"
  MPUESIM_EMIT(carrier_frequency_ghz);
  MPUESIM_EMIT(bandwidth_mhz);
  MPUESIM_EMIT(n_sites);
  MPUESIM_EMIT(inter_site_distance_m);
  MPUESIM_EMIT(tx_power_dbm);
  MPUESIM_EMIT(bs_height_m);
  MPUESIM_EMIT(ue_height_m);
  MPUESIM_EMIT(n_ues);
  MPUESIM_EMIT(ue_speed_kmh);
  MPUESIM_EMIT(time_step_ms);
  MPUESIM_EMIT(ssb_period_ms);
  MPUESIM_EMIT(omega);
  MPUESIM_EMIT(sim_duration_s);
  MPUESIM_EMIT(n_l1);
  MPUESIM_EMIT(p_thr_dbm);
  MPUESIM_EMIT(n_str);
  MPUESIM_EMIT(k_cell);
  MPUESIM_EMIT(k_beam);
  MPUESIM_EMIT(k_b);
  out << "ue_model = " << to_string(c.ue_model) << "\n";
  MPUESIM_EMIT(o_p_db);
  MPUESIM_EMIT(o_a3_db);
  MPUESIM_EMIT(t_ttt_ms);
  MPUESIM_EMIT(n_prep);
  MPUESIM_EMIT(t_hof_ms);
  MPUESIM_EMIT(ho_interruption_ms);
  MPUESIM_EMIT(n_rep);
  MPUESIM_EMIT(o_b_db);
  MPUESIM_EMIT(l2_alpha);
  MPUESIM_EMIT(gamma_out_db);
  MPUESIM_EMIT(gamma_in_db);
  MPUESIM_EMIT(rlq_alpha);
  MPUESIM_EMIT(rlm_alpha);
  MPUESIM_EMIT(c_bfi_max);
  MPUESIM_EMIT(t_bfd_ms);
  MPUESIM_EMIT(n_rach);
  MPUESIM_EMIT(t_rach_ms);
  MPUESIM_EMIT(t_rlf_ms);
  MPUESIM_EMIT(reestablish_delay_ms);
  MPUESIM_EMIT(t_fh_ms);
  MPUESIM_EMIT(noise_figure_db);
  MPUESIM_EMIT(shadow_sigma_db);
  MPUESIM_EMIT(shadow_decorr_m);
  MPUESIM_EMIT(rician_k_db);
  out << "fast_fading = " << (c.fast_fading ? "true" : "false") << "\n";
  out << "shadow_fading = " << (c.shadow_fading ? "true" : "false") << "\n";
  MPUESIM_EMIT(rng_seed);
#undef MPUESIM_EMIT
  return out.str();
}

inline std::uint64_t config_hash(const ScenarioConfig& c) {
  return detail::fnv1a(serialize_config(c));
}

}  // namespace mpuesim
