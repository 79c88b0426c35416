#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "mpuesim/kpi.hpp"

using namespace mpuesim;

TEST_CASE("fast-HO classification against the immediate predecessor", "[kpi]") {
  const double t_fh = 1000.0;
  SECTION("ping-pong: return to the predecessor's origin inside the window") {
    FastHoClassifier c;
    CHECK(c.on_success(100.0, 1, 2, t_fh) == FastHoClass::none);
    CHECK(c.on_success(600.0, 2, 1, t_fh) == FastHoClass::ping_pong);
  }
  SECTION("short-stay: onward to a third cell inside the window") {
    FastHoClassifier c;
    CHECK(c.on_success(100.0, 1, 2, t_fh) == FastHoClass::none);
    CHECK(c.on_success(600.0, 2, 3, t_fh) == FastHoClass::short_stay);
  }
  SECTION("window boundary is strict") {
    FastHoClassifier c;
    CHECK(c.on_success(100.0, 1, 2, t_fh) == FastHoClass::none);
    CHECK(c.on_success(1100.0, 2, 1, t_fh) == FastHoClass::none); // exactly t_fh later
  }
  SECTION("each HO is judged against its immediate predecessor only") {
    FastHoClassifier c;
    CHECK(c.on_success(0.0, 1, 2, t_fh) == FastHoClass::none);
    CHECK(c.on_success(500.0, 2, 3, t_fh) == FastHoClass::short_stay);
    // relative to the 500 ms HO (origin cell 2): a return to 2 is a ping-pong
    CHECK(c.on_success(900.0, 3, 2, t_fh) == FastHoClass::ping_pong);
  }
  SECTION("re-establishment breaks the chain") {
    FastHoClassifier c;
    CHECK(c.on_success(100.0, 1, 2, t_fh) == FastHoClass::none);
    c.on_reestablish();
    CHECK(c.on_success(200.0, 2, 1, t_fh) == FastHoClass::none);
  }
}

TEST_CASE("outage flag ORs the three causes", "[kpi]") {
  CHECK_FALSE(outage_flag(false, false, false));
  CHECK(outage_flag(true, false, false));
  CHECK(outage_flag(false, true, false));
  CHECK(outage_flag(false, false, true));
  CHECK(outage_flag(true, true, true)); // overlap counts once
}

TEST_CASE("counter arithmetic and identities", "[kpi]") {
  KpiCounters k;
  k.n_success = 7;
  k.n_hof = 2;
  k.n_rlf_timer = 1;
  k.n_rlf_bfr = 1;
  k.n_pingpong = 2;
  k.n_shortstay = 1;
  CHECK(k.n_rlf() == 2);
  CHECK(k.n_failure() == 4);
  CHECK(k.attempts() == 11);
  CHECK(k.n_fast_ho() == 3);
  KpiCounters sum = k;
  sum += k;
  CHECK(sum.attempts() == 22);
  CHECK(sum.counters_equal(sum));
  CHECK_FALSE(sum.counters_equal(k));
}

TEST_CASE("report percentages and NA handling", "[kpi]") {
  KpiReport r;
  r.scheme = "mpue_a3";
  r.k_b = 4;
  r.o_a3_db = 2.0;
  r.t_ttt_ms = 80.0;
  r.n_ues = 10;
  r.sim_time_s = 10.0;
  SECTION("zero attempts: percentages are NA / null") {
    CHECK_FALSE(r.pct_failure().has_value());
    const auto j = r.to_json();
    CHECK(j["pct_success"].is_null());
    CHECK(j["pct_fast_ho"].is_null());
    CHECK(j["pct_failure"].is_null());
    CHECK(j["outage_pct"].get<double>() == 0.0);
    const auto row = r.csv_row();
    CHECK(row.find("NA,NA,NA") != std::string::npos);
  }
  SECTION("percentages are fractions of total attempts") {
    r.counters.n_success = 8;
    r.counters.n_hof = 1;
    r.counters.n_rlf_timer = 1;
    r.counters.n_pingpong = 2;
    r.counters.outage_ms = 5000.0; // of 10 UEs * 10 s
    CHECK(*r.pct_success() == Catch::Approx(80.0));
    CHECK(*r.pct_fast_ho() == Catch::Approx(20.0));
    CHECK(*r.pct_failure() == Catch::Approx(20.0));
    CHECK(r.outage_pct() == Catch::Approx(5.0));
    // percentages of the same denominator: success + failure = 100
    CHECK(*r.pct_success() + *r.pct_failure() == Catch::Approx(100.0));
    const auto j = r.to_json();
    CHECK(j["counters"]["attempts"].get<long>() == 10);
    CHECK(j["scheme"].get<std::string>() == "mpue_a3");
  }
  SECTION("csv header matches the row shape") {
    CHECK(KpiReport::csv_header() ==
          "scheme,k_b,o_a3,t_ttt,pct_success,pct_fast_ho,pct_failure,outage_pct");
    std::stringstream row(r.csv_row());
    std::string field;
    int n = 0;
    while (std::getline(row, field, ',')) ++n;
    CHECK(n == 8);
  }
}

TEST_CASE("event log round-trips through jsonl", "[kpi]") {
  std::vector<Event> events;
  events.push_back({1.23, 4, EventType::ho_success, 7, 3, 1, 2});
  events.push_back({2.5, 0, EventType::rlf_timer, 5, -1, -1, -1});
  std::stringstream s;
  write_events_jsonl(s, events);
  const auto back = read_events_jsonl(s);
  REQUIRE(back.size() == 2);
  CHECK(back[0].t_s == Catch::Approx(1.23));
  CHECK(back[0].ue == 4);
  CHECK(back[0].type == EventType::ho_success);
  CHECK(back[0].cell == 7);
  CHECK(back[0].from_cell == 2);
  CHECK(back[1].type == EventType::rlf_timer);
  CHECK_THROWS_AS(event_type_from_string("nonsense"), std::invalid_argument);
}

TEST_CASE("replay honors the fast-HO window boundary despite second/ms round-trips",
          "[kpi]") {
  // Timestamps are stored in seconds (now_ms * 1e-3), which is inexact in
  // binary; two HOs exactly t_fh apart must still classify as none, exactly
  // as the live millisecond-clock classifier decides.
  for (double start_ms : {230.0, 410.0, 12570.0}) {
    std::vector<Event> ev;
    Event a;
    a.t_s = start_ms * 1e-3;
    a.ue = 0;
    a.type = EventType::ho_success;
    a.cell = 2;
    a.from_cell = 1;
    Event b = a;
    b.t_s = (start_ms + 1000.0) * 1e-3; // gap of exactly t_fh
    b.cell = 1;
    b.from_cell = 2;
    ev.push_back(a);
    ev.push_back(b);
    const auto k = replay_events(ev, 1000.0);
    CHECK(k.n_success == 2);
    CHECK(k.n_fast_ho() == 0);
  }
}

TEST_CASE("replay reconstructs counters from a hand-built event log", "[kpi]") {
  const double t_fh = 1000.0;
  std::vector<Event> ev;
  auto add = [&](double t, int ue, EventType ty, int cell, int from) {
    Event e;
    e.t_s = t;
    e.ue = ue;
    e.type = ty;
    e.cell = cell;
    e.from_cell = from;
    ev.push_back(e);
  };
  // UE 0: HO 1->2, ping-pong back 2->1, then an HOF
  add(1.0, 0, EventType::ho_success, 2, 1);
  add(1.5, 0, EventType::ho_success, 1, 2);
  add(3.0, 0, EventType::hof, 4, 1);
  // UE 1: HO, re-establishment breaks the chain, HO again: no fast HO
  add(2.0, 1, EventType::ho_success, 5, 3);
  add(2.2, 1, EventType::rlf_timer, 5, -1);
  add(2.4, 1, EventType::reestablished, 3, -1);
  add(2.6, 1, EventType::ho_success, 5, 3);
  // UE 1: short-stay onward within the window
  add(3.0, 1, EventType::ho_success, 6, 5);
  // non-KPI noise must be ignored
  add(0.5, 0, EventType::report, 1, -1);
  add(0.6, 0, EventType::ho_cmd, 2, 1);
  add(0.7, 1, EventType::beam_switch, 3, -1);

  const auto k = replay_events(ev, t_fh);
  CHECK(k.n_success == 5);
  CHECK(k.n_hof == 1);
  CHECK(k.n_rlf_timer == 1);
  CHECK(k.n_rlf_bfr == 0);
  CHECK(k.n_pingpong == 1);
  CHECK(k.n_shortstay == 1);
  CHECK(k.n_reestablish == 1);
  CHECK(k.n_beam_switch == 1);
  CHECK(k.attempts() == 7);

  // per-UE classification is independent: interleaving order by time only
  std::stable_sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.t_s < b.t_s; });
  CHECK(replay_events(ev, t_fh).counters_equal(k));
}
