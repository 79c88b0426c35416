#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mpuesim/config.hpp"
#include "mpuesim/deployment.hpp"
#include "mpuesim/events.hpp"
#include "mpuesim/kpi.hpp"
#include "mpuesim/measurement.hpp"
#include "mpuesim/mobility.hpp"
#include "mpuesim/procedures.hpp"
#include "mpuesim/radio.hpp"

namespace mpuesim {

struct UeInit {
  MotionState motion;
  int serving_cell = 0;
  int serving_beam = 0;
};

// Fading- and shadow-free RSRP, used for the initial attachment decision at
// drop time and as a geometry oracle in tests.
inline double geometric_rsrp_dbm(const ScenarioConfig& cfg, const Deployment& dep, Vec2 pos,
                                 double heading_deg, int cell, int beam, int panel) {
  const Cell& c = dep.cells[cell];
  const Beam& bm = c.beams[beam];
  const Vec2 d = pos - c.site_pos;
  const double d2d = std::max(d.norm(), 1e-3);
  const double dh = cfg.bs_height_m - cfg.ue_height_m;
  const double d3d = std::sqrt(d2d * d2d + dh * dh);
  const double az_to_ue = rad2deg(std::atan2(d.y, d.x));
  const double dphi_tx = wrap_deg(az_to_ue - (c.boresight_deg + bm.phi_deg));
  const double dtheta_tx = rad2deg(std::atan2(d2d, -dh)) - bm.theta_deg;
  double v = cfg.tx_power_dbm + tx_beam_gain(bm, dphi_tx, dtheta_tx) -
             path_loss_db(d3d, d2d, cfg.carrier_frequency_ghz);
  if (cfg.ue_model != UeModel::isotropic) {
    const PanelOrientation p = panel_orientation(static_cast<PanelId>(panel));
    const double az_to_bs = wrap_deg(az_to_ue + 180.0);
    const double dphi_rx = wrap_deg(az_to_bs - (heading_deg + p.azimuth_offset_deg));
    const double dtheta_rx = rad2deg(std::atan2(d2d, dh)) - p.elevation_boresight_deg;
    v += rx_panel_gain(dphi_rx, dtheta_rx);
  }
  return v;
}

// Drops n_ues uniformly over the region with uniformly random headings.
// The first waypoint is the boundary point along the initial heading, so
// the spawned heading is honored until the first waypoint redraw. Initial
// attachment is to the strongest fading-free RSRP over all (cell, beam).
inline std::vector<UeInit> spawn_ues(const ScenarioConfig& cfg, const Deployment& dep) {
  std::vector<UeInit> ues(cfg.n_ues);
  for (int u = 0; u < cfg.n_ues; ++u) {
    Substream rng(cfg.rng_seed, "drop", u);
    UeInit& ue = ues[u];
    ue.motion.position = dep.region.random_point(rng);
    ue.motion.heading_deg = wrap_deg(rng.uniform(0.0, 360.0));
    ue.motion.speed_mps = cfg.speed_mps();
    const Vec2 dir = heading_unit(ue.motion.heading_deg);
    const double t = dep.region.ray_to_boundary(ue.motion.position, dir);
    ue.motion.waypoint = ue.motion.position + dir * t;
    const int n_panels = cfg.ue_model == UeModel::isotropic ? 1 : 3;
    double best = -1e300;
    for (int c = 0; c < static_cast<int>(dep.cells.size()); ++c)
      for (int b = 0; b < kBeamsPerCell; ++b)
        for (int p = 0; p < n_panels; ++p) {
          const double v =
              geometric_rsrp_dbm(cfg, dep, ue.motion.position, ue.motion.heading_deg, c, b, p);
          if (v > best) {
            best = v;
            ue.serving_cell = c;
            ue.serving_beam = b;
          }
        }
  }
  return ues;
}

struct RunOptions {
  int parallelism = 1;
  bool collect_events = false;
  bool trace_motion = false;
  bool trace_links = false;
  bool trace_meas = false;
};

struct UeRunResult {
  KpiCounters counters;
  std::vector<Event> events;
  std::string motion_trace;
  std::string links_trace;
  std::string meas_trace;
};

struct RunResult {
  KpiReport report;
  std::vector<Event> events;
  std::string motion_trace;
  std::string links_trace;
  std::string meas_trace;
};

namespace detail {

// Simulates one UE over the full run. UEs do not interact (interference is
// the analytical co-scheduling expectation), so each UE advances
// independently on its own random substreams.
class UeSimulator {
 public:
  UeSimulator(const ScenarioConfig& cfg, const Deployment& dep, int ue_index,
              const UeInit& init, const RunOptions& opt)
      : cfg_(cfg), dep_(dep), ue_(ue_index), opt_(opt),
        motion_(init.motion),
        motion_rng_(cfg.rng_seed, "motion", ue_index),
        links_(cfg, dep, ue_index, cfg.rng_seed),
        meas_(cfg, static_cast<int>(dep.cells.size())),
        sinr_(static_cast<int>(dep.cells.size()), cfg.k_b,
              thermal_noise_dbm(cfg.bandwidth_mhz, cfg.noise_figure_db)),
        serving_cell_(init.serving_cell), serving_beam_(init.serving_beam),
        ttt_(static_cast<int>(dep.cells.size())),
        rlq_avg_(cfg.rlq_alpha), rlm_avg_(cfg.rlm_alpha) {
    n_cells_ = static_cast<int>(dep.cells.size());
    scratch_base_.assign(n_cells_ * kBeamsPerCell, 0.0);
    scratch_rxg_.assign(3 * n_cells_, 0.0);
    l3_scratch_.assign(n_cells_, 0.0);
  }

  UeRunResult run() {
    const int steps = cfg_.steps();
    const double dt = cfg_.time_step_ms;
    for (int n = 0; n < steps; ++n) {
      const double now = n * dt;
      current_step_ = n;
      if (n > 0) motion_ = step_position(motion_, dt * 1e-3, dep_.region, motion_rng_);
      links_.set_position(motion_.position, motion_.heading_deg, n);
      if (opt_.trace_motion) trace_motion(now);

      const bool is_ssb = (n % cfg_.omega) == 0;
      if (is_ssb) ssb_instant(n, now);
      step_state_machines(now, dt);
      accrue_kpis(dt);
      if (opt_.trace_links) trace_links(now);
    }
    UeRunResult r;
    r.counters = counters_;
    r.events = std::move(events_);
    r.motion_trace = std::move(motion_trace_);
    r.links_trace = std::move(links_trace_);
    r.meas_trace = std::move(meas_trace_);
    return r;
  }

 private:
  enum class ConnState { connected, executing, reestablishing };

  void ssb_instant(int n, double now) {
    const long ssb_index = n / cfg_.omega;
    const int n_panels = links_.n_panels();
    for (int c = 0; c < n_cells_; ++c) {
      for (int p = 0; p < n_panels; ++p) scratch_rxg_[p * n_cells_ + c] = links_.rx_gain_db(p, c);
      for (int b = 0; b < kBeamsPerCell; ++b)
        scratch_base_[c * kBeamsPerCell + b] = links_.link_db(c, b);
    }
    scratch_step_ = n;
    meas_.ssb_update(ssb_index, [&](int c, int b, int p) {
      return scratch_base_[c * kBeamsPerCell + b] + scratch_rxg_[p * n_cells_ + c];
    });

    if (n == 0) {
      // Initial attachment: strongest raw measurement at t = 0.
      attach_strongest(now, /*emit=*/false);
    }

    if (state_ == ConnState::connected && cfg_.ue_model != UeModel::isotropic) {
      const int p = meas_.select_serving_panel(serving_cell_, serving_beam_, serving_panel_,
                                               cfg_.o_p_db);
      if (p != serving_panel_) {
        serving_panel_ = p;
        ++counters_.n_panel_switch;
        emit(now, EventType::panel_switch, serving_cell_, serving_beam_, p);
      }
    } else if (state_ == ConnState::executing && links_.n_panels() > 1) {
      serving_panel_ = best_panel_for(exec_->target_cell(), exec_->target_beam());
    }
    rebuild_sinr_lattice(n);

    if (state_ == ConnState::connected) {
      beam_management(now);
      evaluate_a3(now, n);
    }
    if (opt_.trace_meas) trace_meas(now);
  }

  void beam_management(double now) {
    std::array<std::pair<int, double>, kBeamsPerCell> ranked;
    for (int b = 0; b < kBeamsPerCell; ++b)
      ranked[b] = {b, meas_.l1(serving_cell_, b, serving_panel_)};
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    const int n_rep = std::min(cfg_.n_rep, kBeamsPerCell);
    l2_.update(ranked.data(), n_rep, cfg_.l2_alpha, serving_beam_,
               meas_.l1(serving_cell_, serving_beam_, serving_panel_));
    const int nb = l2_.switch_decision(serving_beam_, cfg_.o_b_db);
    if (nb >= 0) {
      serving_beam_ = nb;
      ++counters_.n_beam_switch;
      emit(now, EventType::beam_switch, serving_cell_, nb, serving_panel_);
    }
  }

  void evaluate_a3(double now, int n) {
    for (int c = 0; c < n_cells_; ++c) l3_scratch_[c] = meas_.l3_cell(c);
    const int target =
        ttt_.update(l3_scratch_.data(), n_cells_, serving_cell_, cfg_.o_a3_db, cfg_.t_ttt_ms, now);
    if (target < 0) return;

    emit(now, EventType::report, target, -1, -1, serving_cell_);
    std::array<double, kBeamsPerCell> l3b;
    for (int b = 0; b < kBeamsPerCell; ++b) l3b[b] = meas_.l3_beam(target, b);
    prepared_ = prepare_handover(l3b.data(), kBeamsPerCell, cfg_.n_prep);
    int tb = prepared_[0];
    for (int b : prepared_)
      if (meas_.l1_beam(target, b) > meas_.l1_beam(target, tb)) tb = b;
    emit(now, EventType::ho_cmd, target, tb, -1, serving_cell_);

    ho_from_cell_ = serving_cell_;
    exec_ = HoExecution(target, tb, now);
    state_ = ConnState::executing;
    if (links_.n_panels() > 1) serving_panel_ = best_panel_for(target, tb);
    reset_serving_machines();
    rebuild_sinr_lattice(n);
  }

  void step_state_machines(double now, double dt) {
    last_serving_sinr_db_ = 0.0;
    switch (state_) {
      case ConnState::executing: {
        const int tc = exec_->target_cell();
        const int tb = exec_->target_beam();
        point_update_link(tc, tb);
        const double g = sinr_.sinr_db(tc, tb);
        const auto r = exec_->update(g, cfg_.gamma_out_db, cfg_.t_hof_ms,
                                     cfg_.ho_interruption_ms, dt, now);
        if (r == HoExecution::Result::success) {
          serving_cell_ = tc;
          serving_beam_ = tb;
          state_ = ConnState::connected;
          exec_.reset();
          ++counters_.n_success;
          emit(now, EventType::ho_success, tc, tb, serving_panel_, ho_from_cell_);
          classify_fast_ho(now, ho_from_cell_, tc);
        } else if (r == HoExecution::Result::failure) {
          ++counters_.n_hof;
          emit(now, EventType::hof, tc, tb, -1, ho_from_cell_);
          exec_.reset();
          begin_reestablish(now);
        }
        break;
      }
      case ConnState::connected: {
        point_update_link(serving_cell_, serving_beam_);
        const double g0 = sinr_.sinr_db(serving_cell_, serving_beam_);
        last_serving_sinr_db_ = g0;
        const double rlq = rlq_avg_.update(g0);
        const double rlm_metric = rlm_avg_.update(g0);

        if (bfr_) {
          advance_bfr(now);
        } else {
          const bool out_of_sync = rlq < cfg_.gamma_out_db;
          if (bfd_.update(out_of_sync, now, cfg_.t_bfd_ms, cfg_.c_bfi_max)) {
            int tb = 0;
            for (int b = 1; b < kBeamsPerCell; ++b)
              if (meas_.l1(serving_cell_, b, serving_panel_) >
                  meas_.l1(serving_cell_, tb, serving_panel_))
                tb = b;
            ++counters_.n_bfd;
            emit(now, EventType::bfd, serving_cell_, tb, serving_panel_);
            bfr_ = BfrProcedure(tb, now);
            advance_bfr(now);
          }
        }
        if (state_ == ConnState::connected) {
          if (rlm_.update(rlm_metric, cfg_.gamma_out_db, cfg_.gamma_in_db, cfg_.t_rlf_ms, now)) {
            ++counters_.n_rlf_timer;
            emit(now, EventType::rlf_timer, serving_cell_, serving_beam_);
            begin_reestablish(now);
          }
        }
        break;
      }
      case ConnState::reestablishing: {
        if (now >= reestablish_until_ms_) {
          attach_strongest(now, /*emit=*/true);
        }
        break;
      }
    }
  }

  void advance_bfr(double now) {
    const int tb = bfr_->target_beam();
    point_update_link(serving_cell_, tb);
    const double g = sinr_.sinr_db(serving_cell_, tb);
    const auto r = bfr_->update(g, cfg_.gamma_out_db, cfg_.n_rach, cfg_.t_rach_ms, now);
    if (r == BfrProcedure::Result::recovered) {
      serving_beam_ = tb;
      ++counters_.n_bfr_ok;
      emit(now, EventType::bfr_ok, serving_cell_, tb, serving_panel_);
      bfr_.reset();
      bfd_.reset();
    } else if (r == BfrProcedure::Result::failed) {
      ++counters_.n_rlf_bfr;
      emit(now, EventType::rlf_bfr, serving_cell_, tb);
      bfr_.reset();
      begin_reestablish(now);
    }
  }

  void begin_reestablish(double now) {
    state_ = ConnState::reestablishing;
    reestablish_until_ms_ = now + cfg_.reestablish_delay_ms;
    reset_serving_machines();
  }

  // Attaches to the strongest current L1 beam measurement (best-panel
  // projection) and clears every mobility state machine.
  void attach_strongest(double now, bool emit_event) {
    int bc = 0, bb = 0;
    double best = -1e300;
    for (int c = 0; c < n_cells_; ++c)
      for (int b = 0; b < kBeamsPerCell; ++b)
        if (meas_.l1_beam(c, b) > best) {
          best = meas_.l1_beam(c, b);
          bc = c;
          bb = b;
        }
    serving_cell_ = bc;
    serving_beam_ = bb;
    serving_panel_ = links_.n_panels() > 1 ? meas_.best_panel(bc) : 0;
    state_ = ConnState::connected;
    reset_serving_machines();
    if (emit_event) {
      ++counters_.n_reestablish;
      emit(now, EventType::reestablished, bc, bb, serving_panel_);
      fast_ho_.on_reestablish();
    }
    rebuild_sinr_lattice(current_step_);
  }

  void reset_serving_machines() {
    ttt_.reset();
    bfd_.reset();
    rlm_.reset();
    l2_.reset();
    rlq_avg_.reset();
    rlm_avg_.reset();
    bfr_.reset();
  }

  void classify_fast_ho(double now, int from_cell, int to_cell) {
    const auto cls = fast_ho_.on_success(now, from_cell, to_cell, cfg_.t_fh_ms);
    if (cls == FastHoClass::ping_pong) ++counters_.n_pingpong;
    if (cls == FastHoClass::short_stay) ++counters_.n_shortstay;
  }

  void accrue_kpis(double dt) {
    const bool low = state_ == ConnState::connected && last_serving_sinr_db_ < cfg_.gamma_out_db;
    if (outage_flag(low, state_ == ConnState::reestablishing, state_ == ConnState::executing))
      counters_.outage_ms += dt;
  }

  int best_panel_for(int cell, int beam) const {
    int best = 0;
    for (int p = 1; p < meas_.n_panels(); ++p)
      if (meas_.l1(cell, beam, p) > meas_.l1(cell, beam, best)) best = p;
    return best;
  }

  // Full recomputation of the linear power lattice at the current panel.
  void rebuild_sinr_lattice(int step) {
    const bool fresh = scratch_step_ == step;
    for (int c = 0; c < n_cells_; ++c) {
      const double rxg =
          fresh ? scratch_rxg_[serving_panel_ * n_cells_ + c] : links_.rx_gain_db(serving_panel_, c);
      for (int b = 0; b < kBeamsPerCell; ++b) {
        const double base =
            fresh ? scratch_base_[c * kBeamsPerCell + b] : links_.link_db(c, b);
        sinr_.set(c, b, base + rxg);
      }
    }
  }

  // Refreshes a single link with the current step's channel realization.
  void point_update_link(int cell, int beam) {
    sinr_.set(cell, beam, links_.link_db(cell, beam) + links_.rx_gain_db(serving_panel_, cell));
  }

  void emit(double now_ms, EventType type, int cell, int beam = -1, int panel = -1,
            int from_cell = -1) {
    if (!opt_.collect_events) return;
    events_.push_back({now_ms * 1e-3, ue_, type, cell, beam, panel, from_cell});
  }

  void trace_motion(double now) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.3f,%d,%.3f,%.3f,%.3f\n", now * 1e-3, ue_,
                  motion_.position.x, motion_.position.y, motion_.heading_deg);
    motion_trace_ += buf;
  }

  void trace_links(double now) {
    if (state_ == ConnState::reestablishing) return;
    const int c = state_ == ConnState::executing ? exec_->target_cell() : serving_cell_;
    const int b = state_ == ConnState::executing ? exec_->target_beam() : serving_beam_;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.3f,%d,%d,%d,%d,%.3f,%.3f\n", now * 1e-3, ue_, c, b,
                  serving_panel_, linear_to_db(sinr_.p_lin(c, b)), sinr_.sinr_db(c, b));
    links_trace_ += buf;
  }

  void trace_meas(double now) {
    char buf[96];
    for (int c = 0; c < n_cells_; ++c) {
      std::snprintf(buf, sizeof buf, "%.3f,%d,%d,%.3f\n", now * 1e-3, ue_, c, meas_.l3_cell(c));
      meas_trace_ += buf;
    }
  }

  const ScenarioConfig& cfg_;
  const Deployment& dep_;
  int ue_;
  RunOptions opt_;
  int n_cells_ = 0;

  MotionState motion_;
  Substream motion_rng_;
  LinkComputer links_;
  MeasurementLattice meas_;
  SinrLattice sinr_;

  ConnState state_ = ConnState::connected;
  int serving_cell_ = 0;
  int serving_beam_ = 0;
  int serving_panel_ = 0;

  TttTracker ttt_;
  L2BeamFilter l2_;
  BfdMachine bfd_;
  RlmMachine rlm_;
  SinrAverager rlq_avg_;
  SinrAverager rlm_avg_;
  std::optional<HoExecution> exec_;
  std::optional<BfrProcedure> bfr_;
  std::vector<int> prepared_;
  int ho_from_cell_ = -1;
  double reestablish_until_ms_ = 0.0;
  double last_serving_sinr_db_ = 0.0;
  FastHoClassifier fast_ho_;

  std::vector<double> scratch_base_;
  std::vector<double> scratch_rxg_;
  std::vector<double> l3_scratch_;
  int scratch_step_ = -1;
  int current_step_ = 0;

  KpiCounters counters_;
  std::vector<Event> events_;
  std::string motion_trace_;
  std::string links_trace_;
  std::string meas_trace_;
};

}  // namespace detail

// Runs the full scenario. UEs are independent, so they may be simulated on
// parallel workers; results are merged in UE index order, making the output
// identical for any parallelism degree.
inline RunResult run_simulation(const ScenarioConfig& cfg, const RunOptions& opt = {}) {
  validate_config(cfg);
  const Deployment dep = build_deployment(cfg);
  const std::vector<UeInit> inits = spawn_ues(cfg, dep);

  std::vector<UeRunResult> per_ue(cfg.n_ues);
  const int workers = std::max(1, opt.parallelism);
  if (workers == 1) {
    for (int u = 0; u < cfg.n_ues; ++u)
      per_ue[u] = detail::UeSimulator(cfg, dep, u, inits[u], opt).run();
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const int u = next.fetch_add(1);
          if (u >= cfg.n_ues) return;
          per_ue[u] = detail::UeSimulator(cfg, dep, u, inits[u], opt).run();
        }
      });
    for (auto& t : pool) t.join();
  }

  RunResult result;
  for (int u = 0; u < cfg.n_ues; ++u) {
    result.report.counters += per_ue[u].counters;
    result.motion_trace += per_ue[u].motion_trace;
    result.links_trace += per_ue[u].links_trace;
    result.meas_trace += per_ue[u].meas_trace;
    result.events.insert(result.events.end(), per_ue[u].events.begin(), per_ue[u].events.end());
  }
  std::stable_sort(result.events.begin(), result.events.end(),
                   [](const Event& a, const Event& b) {
                     return a.t_s != b.t_s ? a.t_s < b.t_s : a.ue < b.ue;
                   });
  result.report.n_ues = cfg.n_ues;
  result.report.sim_time_s = cfg.steps() * cfg.time_step_ms * 1e-3;
  result.report.config_hash = config_hash(cfg);
  result.report.seed = cfg.rng_seed;
  result.report.scheme = to_string(cfg.ue_model);
  result.report.k_b = cfg.k_b;
  result.report.o_a3_db = cfg.o_a3_db;
  result.report.t_ttt_ms = cfg.t_ttt_ms;
  return result;
}

struct SweepSpec {
  std::vector<double> o_a3_db = {1, 2, 3, 4, 5, 6};
  std::vector<double> t_ttt_ms = {80, 160, 240, 320};
  std::vector<int> k_b = {1, 2, 4};
  std::vector<UeModel> schemes = {UeModel::isotropic, UeModel::mpue_a3, UeModel::mpue_a1};
  std::vector<std::uint64_t> seeds = {1, 2, 3};

  std::size_t n_points() const {
    return o_a3_db.size() * t_ttt_ms.size() * k_b.size() * schemes.size();
  }
};

struct SweepRow {
  std::string scheme;
  int k_b = 0;
  double o_a3_db = 0.0;
  double t_ttt_ms = 0.0;
  std::optional<double> pct_success;
  std::optional<double> pct_fast_ho;
  std::optional<double> pct_failure;
  double outage_pct = 0.0;
  std::string error; // nonempty when every seed of the point failed

  std::string csv_row() const {
    auto fmt = [](std::optional<double> v) {
      if (!v) return std::string("NA");
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", *v);
      return std::string(buf);
    };
    std::ostringstream out;
    out << scheme << ',' << k_b << ',' << o_a3_db << ',' << t_ttt_ms << ',';
    if (!error.empty())
      out << "NA,NA,NA,NA";
    else
      out << fmt(pct_success) << ',' << fmt(pct_fast_ho) << ',' << fmt(pct_failure) << ','
          << fmt(outage_pct);
    return out.str();
  }
};

// Cartesian sweep in deterministic (scheme, k_b, o_a3, t_ttt) order with
// per-point mean aggregation over seeds. Points run on parallel workers;
// the output is independent of the parallelism degree.
inline std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec,
                                       int parallelism = 1) {
  struct Task {
    ScenarioConfig cfg;
    std::size_t point;
  };
  std::vector<Task> tasks;
  std::vector<SweepRow> rows;
  for (UeModel scheme : spec.schemes)
    for (int kb : spec.k_b)
      for (double o : spec.o_a3_db)
        for (double ttt : spec.t_ttt_ms) {
          SweepRow row;
          row.scheme = to_string(scheme);
          row.k_b = kb;
          row.o_a3_db = o;
          row.t_ttt_ms = ttt;
          const std::size_t point = rows.size();
          rows.push_back(row);
          for (std::uint64_t seed : spec.seeds) {
            ScenarioConfig cfg = base;
            cfg.ue_model = scheme;
            cfg.k_b = kb;
            cfg.o_a3_db = o;
            cfg.t_ttt_ms = ttt;
            cfg.rng_seed = seed;
            tasks.push_back({cfg, point});
          }
        }

  std::vector<std::optional<KpiReport>> reports(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        reports[i] = run_simulation(tasks[i].cfg).report;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int workers = std::max(1, parallelism);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<int> n_ok(rows.size(), 0);
  std::vector<int> n_pct(rows.size(), 0);
  std::vector<std::array<double, 4>> acc(rows.size(), {0, 0, 0, 0});
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::size_t p = tasks[i].point;
    if (!reports[i]) {
      if (rows[p].error.empty() && !errors[i].empty()) rows[p].error = errors[i];
      continue;
    }
    ++n_ok[p];
    acc[p][3] += reports[i]->outage_pct();
    if (reports[i]->pct_success()) {
      ++n_pct[p];
      acc[p][0] += *reports[i]->pct_success();
      acc[p][1] += *reports[i]->pct_fast_ho();
      acc[p][2] += *reports[i]->pct_failure();
    }
  }
  for (std::size_t p = 0; p < rows.size(); ++p) {
    if (n_ok[p] == 0) continue; // keep the recorded error, do not abort the sweep
    rows[p].error.clear();
    rows[p].outage_pct = acc[p][3] / n_ok[p];
    if (n_pct[p] > 0) {
      rows[p].pct_success = acc[p][0] / n_pct[p];
      rows[p].pct_fast_ho = acc[p][1] / n_pct[p];
      rows[p].pct_failure = acc[p][2] / n_pct[p];
    }
  }
  return rows;
}

}  // namespace mpuesim
