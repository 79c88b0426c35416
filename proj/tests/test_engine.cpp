#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <string>

#include "mpuesim/engine.hpp"

using namespace mpuesim;

namespace {

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

bool events_identical(const std::vector<Event>& a, const std::vector<Event>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].t_s != b[i].t_s || a[i].ue != b[i].ue || a[i].type != b[i].type ||
        a[i].cell != b[i].cell || a[i].beam != b[i].beam || a[i].panel != b[i].panel ||
        a[i].from_cell != b[i].from_cell)
      return false;
  }
  return true;
}

} // namespace

TEST_CASE("step and SSB cadence shows up in the traces", "[engine]") {
  ScenarioConfig cfg;
  cfg.n_ues = 1;
  cfg.sim_duration_s = 10.0;
  cfg.ue_model = UeModel::mpue_a3;
  RunOptions opt;
  opt.trace_motion = true;
  opt.trace_meas = true;
  opt.trace_links = true;
  const auto r = run_simulation(cfg, opt);
  CHECK(count_lines(r.motion_trace) == 1000);          // one row per 10 ms step
  CHECK(count_lines(r.meas_trace) == 500 * 21);        // one row per cell per SSB
  CHECK(count_lines(r.links_trace) <= 1000);           // reestablishing rows omitted
  CHECK(count_lines(r.links_trace) > 0);
  CHECK(r.report.sim_time_s == Catch::Approx(10.0));
  // first and last motion timestamps
  CHECK(r.motion_trace.substr(0, 6) == "0.000,");
  CHECK(r.motion_trace.find("9.990,0,") != std::string::npos);
}

TEST_CASE("identical seeds give byte-identical reports and event logs", "[engine]") {
  ScenarioConfig cfg;
  cfg.n_ues = 5;
  cfg.sim_duration_s = 10.0;
  cfg.ue_model = UeModel::mpue_a1;
  cfg.rng_seed = 11;
  RunOptions opt;
  opt.collect_events = true;
  const auto a = run_simulation(cfg, opt);
  const auto b = run_simulation(cfg, opt);
  CHECK(a.report.to_json().dump() == b.report.to_json().dump());
  CHECK(events_identical(a.events, b.events));

  ScenarioConfig other = cfg;
  other.rng_seed = 12;
  const auto c = run_simulation(other, opt);
  CHECK(a.report.to_json().dump() != c.report.to_json().dump());
}

TEST_CASE("parallelism does not change the output", "[engine]") {
  ScenarioConfig cfg;
  cfg.n_ues = 6;
  cfg.sim_duration_s = 8.0;
  cfg.ue_model = UeModel::mpue_a3;
  cfg.rng_seed = 3;
  RunOptions serial;
  serial.collect_events = true;
  serial.trace_motion = true;
  RunOptions parallel = serial;
  parallel.parallelism = 4;
  const auto a = run_simulation(cfg, serial);
  const auto b = run_simulation(cfg, parallel);
  CHECK(a.report.to_json().dump() == b.report.to_json().dump());
  CHECK(events_identical(a.events, b.events));
  CHECK(a.motion_trace == b.motion_trace);
}

TEST_CASE("replayed event log reproduces the engine's counters", "[engine]") {
  ScenarioConfig cfg;
  cfg.n_ues = 20;
  cfg.sim_duration_s = 10.0;
  cfg.ue_model = UeModel::mpue_a3;
  cfg.k_b = 4;
  cfg.rng_seed = 7;
  RunOptions opt;
  opt.collect_events = true;
  const auto r = run_simulation(cfg, opt);
  REQUIRE(r.report.counters.attempts() > 0); // the scenario must exercise mobility
  const auto replayed = replay_events(r.events, cfg.t_fh_ms);
  CHECK(replayed.counters_equal(r.report.counters));
  CHECK(replayed.n_beam_switch == r.report.counters.n_beam_switch);
  CHECK(replayed.n_panel_switch == r.report.counters.n_panel_switch);
  CHECK(replayed.n_bfd == r.report.counters.n_bfd);
  CHECK(replayed.n_bfr_ok == r.report.counters.n_bfr_ok);
  // attempts identity: every attempt resolves exactly one way
  const auto& k = r.report.counters;
  CHECK(k.attempts() == k.n_success + k.n_hof + k.n_rlf_timer + k.n_rlf_bfr);
  CHECK(k.n_fast_ho() <= k.n_success);
  // events arrive sorted by time
  CHECK(std::is_sorted(r.events.begin(), r.events.end(),
                       [](const Event& a, const Event& b) { return a.t_s < b.t_s; }));
}

TEST_CASE("sweep grids have the expected shape and are parallelism-invariant",
          "[engine]") {
  ScenarioConfig base;
  base.n_ues = 2;
  base.sim_duration_s = 2.0;

  SweepSpec tiny;
  tiny.o_a3_db = {2.0};
  tiny.t_ttt_ms = {80.0};
  tiny.k_b = {4};
  tiny.schemes = {UeModel::mpue_a3, UeModel::mpue_a1};
  tiny.seeds = {1, 2};
  CHECK(SweepSpec{}.n_points() == 216);
  CHECK(tiny.n_points() == 2);

  const auto rows1 = run_sweep(base, tiny, 1);
  const auto rows2 = run_sweep(base, tiny, 2);
  REQUIRE(rows1.size() == 2);
  REQUIRE(rows2.size() == 2);
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].csv_row() == rows2[i].csv_row());
    CHECK(rows1[i].error.empty());
  }
  // deterministic ordering: scheme-major, then k_b, o_a3, t_ttt
  CHECK(rows1[0].scheme == "mpue_a3");
  CHECK(rows1[1].scheme == "mpue_a1");

  SweepSpec restricted;
  restricted.k_b = {4};
  restricted.schemes = {UeModel::mpue_a3, UeModel::mpue_a1};
  CHECK(restricted.n_points() == 48);
}

TEST_CASE("a sweep point that cannot run is reported, not fatal", "[engine]") {
  ScenarioConfig base;
  base.n_ues = 1;
  base.sim_duration_s = 1.0;
  SweepSpec bad;
  bad.o_a3_db = {2.0};
  bad.t_ttt_ms = {80.0};
  bad.k_b = {13}; // invalid: rejected by validation
  bad.schemes = {UeModel::isotropic};
  bad.seeds = {1};
  const auto rows = run_sweep(base, bad, 1);
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].error.empty());
  CHECK(rows[0].csv_row().find("NA,NA,NA,NA") != std::string::npos);
}

TEST_CASE("outage accounting stays within physical bounds", "[engine]") {
  ScenarioConfig cfg;
  cfg.n_ues = 4;
  cfg.sim_duration_s = 5.0;
  cfg.ue_model = UeModel::isotropic;
  const auto r = run_simulation(cfg);
  CHECK(r.report.counters.outage_ms >= 0.0);
  CHECK(r.report.counters.outage_ms <= cfg.n_ues * cfg.sim_duration_s * 1000.0);
  CHECK(r.report.outage_pct() >= 0.0);
  CHECK(r.report.outage_pct() <= 100.0);
}
