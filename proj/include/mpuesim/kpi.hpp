#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpuesim/config.hpp"
#include "mpuesim/events.hpp"

namespace mpuesim {

struct KpiCounters {
  long n_success = 0;
  long n_hof = 0;
  long n_rlf_timer = 0;
  long n_rlf_bfr = 0;
  long n_pingpong = 0;
  long n_shortstay = 0;
  long n_beam_switch = 0;
  long n_panel_switch = 0;
  long n_bfd = 0;
  long n_bfr_ok = 0;
  long n_reestablish = 0;
  double outage_ms = 0.0;

  long n_rlf() const { return n_rlf_timer + n_rlf_bfr; }
  long n_failure() const { return n_hof + n_rlf(); }
  long attempts() const { return n_success + n_failure(); }
  long n_fast_ho() const { return n_pingpong + n_shortstay; }

  KpiCounters& operator+=(const KpiCounters& o) {
    n_success += o.n_success;
    n_hof += o.n_hof;
    n_rlf_timer += o.n_rlf_timer;
    n_rlf_bfr += o.n_rlf_bfr;
    n_pingpong += o.n_pingpong;
    n_shortstay += o.n_shortstay;
    n_beam_switch += o.n_beam_switch;
    n_panel_switch += o.n_panel_switch;
    n_bfd += o.n_bfd;
    n_bfr_ok += o.n_bfr_ok;
    n_reestablish += o.n_reestablish;
    outage_ms += o.outage_ms;
    return *this;
  }

  bool counters_equal(const KpiCounters& o) const {
    return n_success == o.n_success && n_hof == o.n_hof && n_rlf_timer == o.n_rlf_timer &&
           n_rlf_bfr == o.n_rlf_bfr && n_pingpong == o.n_pingpong &&
           n_shortstay == o.n_shortstay && n_reestablish == o.n_reestablish;
  }
};

enum class FastHoClass { none, ping_pong, short_stay };

// Per-UE fast-HO classification over the handover history. A successful HO
// is a ping-pong when it returns to the origin of its predecessor within
// t_fh, a short-stay when it lands on a third cell within t_fh. Each HO is
// classified at most once (against its immediate predecessor); a connection
// re-establishment breaks the chain.
class FastHoClassifier {
 public:
  FastHoClass on_success(double t_ms, int from_cell, int to_cell, double t_fh_ms) {
    FastHoClass result = FastHoClass::none;
    if (has_prev_ && t_ms - prev_t_ms_ < t_fh_ms)
      result = (to_cell == prev_from_) ? FastHoClass::ping_pong : FastHoClass::short_stay;
    has_prev_ = true;
    prev_t_ms_ = t_ms;
    prev_from_ = from_cell;
    return result;
  }

  void on_reestablish() { has_prev_ = false; }

 private:
  bool has_prev_ = false;
  double prev_t_ms_ = 0.0;
  int prev_from_ = -1;
};

// A UE-step contributes outage when any of the conditions holds; the flags
// are ORed so overlapping causes are never double counted.
inline bool outage_flag(bool serving_sinr_below_out, bool reestablishing,
                        bool ho_interruption) {
  return serving_sinr_below_out || reestablishing || ho_interruption;
}

struct KpiReport {
  KpiCounters counters;
  int n_ues = 0;
  double sim_time_s = 0.0;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string scheme;
  int k_b = 0;
  double o_a3_db = 0.0;
  double t_ttt_ms = 0.0;

  // Percentages of total HO attempts; empty when there were no attempts.
  std::optional<double> pct_success() const { return pct(counters.n_success); }
  std::optional<double> pct_fast_ho() const { return pct(counters.n_fast_ho()); }
  std::optional<double> pct_failure() const { return pct(counters.n_failure()); }

  double outage_pct() const {
    const double total_ms = n_ues * sim_time_s * 1000.0;
    return total_ms > 0 ? counters.outage_ms / total_ms * 100.0 : 0.0;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["scheme"] = scheme;
    j["k_b"] = k_b;
    j["o_a3_db"] = o_a3_db;
    j["t_ttt_ms"] = t_ttt_ms;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    j["n_ues"] = n_ues;
    j["sim_time_s"] = sim_time_s;
    nlohmann::ordered_json c;
    c["success"] = counters.n_success;
    c["hof"] = counters.n_hof;
    c["rlf_timer"] = counters.n_rlf_timer;
    c["rlf_bfr"] = counters.n_rlf_bfr;
    c["ping_pong"] = counters.n_pingpong;
    c["short_stay"] = counters.n_shortstay;
    c["beam_switch"] = counters.n_beam_switch;
    c["panel_switch"] = counters.n_panel_switch;
    c["bfd"] = counters.n_bfd;
    c["bfr_ok"] = counters.n_bfr_ok;
    c["reestablish"] = counters.n_reestablish;
    c["attempts"] = counters.attempts();
    c["outage_ms"] = counters.outage_ms;
    j["counters"] = c;
    auto pct_or_null = [](std::optional<double> v) {
      return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    j["pct_success"] = pct_or_null(pct_success());
    j["pct_fast_ho"] = pct_or_null(pct_fast_ho());
    j["pct_failure"] = pct_or_null(pct_failure());
    j["outage_pct"] = outage_pct();
    return j;
  }

  static std::string csv_header() {
    return "scheme,k_b,o_a3,t_ttt,pct_success,pct_fast_ho,pct_failure,outage_pct";
  }

  std::string csv_row() const {
    auto fmt = [](std::optional<double> v) {
      if (!v) return std::string("NA");
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", *v);
      return std::string(buf);
    };
    std::ostringstream out;
    out << scheme << ',' << k_b << ',' << o_a3_db << ',' << t_ttt_ms << ','
        << fmt(pct_success()) << ',' << fmt(pct_fast_ho()) << ',' << fmt(pct_failure()) << ','
        << fmt(outage_pct());
    return out.str();
  }

 private:
  std::optional<double> pct(long count) const {
    const long a = counters.attempts();
    if (a == 0) return std::nullopt;
    return 100.0 * count / a;
  }
};

// Independent single-pass reconstruction of the KPI counters from an event
// log; the audit oracle behind the `replay` subcommand.
inline KpiCounters replay_events(const std::vector<Event>& events, double t_fh_ms) {
  KpiCounters k;
  std::map<int, FastHoClassifier> classifiers;
  for (const auto& e : events) {
    switch (e.type) {
      case EventType::ho_success: {
        ++k.n_success;
        // Event timestamps are seconds with microsecond precision; rounding
        // recovers the engine's millisecond clock exactly, so window
        // comparisons at the t_fh boundary match the live classification.
        const double t_ms = std::round(e.t_s * 1e6) / 1000.0;
        const auto cls = classifiers[e.ue].on_success(t_ms, e.from_cell, e.cell, t_fh_ms);
        if (cls == FastHoClass::ping_pong) ++k.n_pingpong;
        if (cls == FastHoClass::short_stay) ++k.n_shortstay;
        break;
      }
      case EventType::hof: ++k.n_hof; break;
      case EventType::rlf_timer: ++k.n_rlf_timer; break;
      case EventType::rlf_bfr: ++k.n_rlf_bfr; break;
      case EventType::bfd: ++k.n_bfd; break;
      case EventType::bfr_ok: ++k.n_bfr_ok; break;
      case EventType::beam_switch: ++k.n_beam_switch; break;
      case EventType::panel_switch: ++k.n_panel_switch; break;
      case EventType::reestablished:
        ++k.n_reestablish;
        classifiers[e.ue].on_reestablish();
        break;
      default: break;
    }
  }
  return k;
}

}  // namespace mpuesim
