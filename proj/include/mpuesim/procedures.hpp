#pragma once

#include <array>
#include <vector>

#include "mpuesim/config.hpp"
#include "mpuesim/radio.hpp"

namespace mpuesim {

// A3 time-to-trigger tracking, one independent timer per neighbor cell.
// The entering condition must hold at every sampled instant of the TTT
// window; any interruption resets that neighbor's timer.
class TttTracker {
 public:
  explicit TttTracker(int n_cells = 0) : start_ms_(n_cells, -1.0) {}

  void reset() { std::fill(start_ms_.begin(), start_ms_.end(), -1.0); }

  // Evaluates the entering condition over all neighbors at a measurement
  // instant. Returns the strongest neighbor whose TTT expired, or -1.
  int update(const double* l3_cell, int n_cells, int serving, double o_a3_db,
             double t_ttt_ms, double now_ms) {
    int fired = -1;
    for (int c = 0; c < n_cells; ++c) {
      if (c == serving) continue;
      const bool cond = l3_cell[serving] + o_a3_db < l3_cell[c];
      if (!cond) {
        start_ms_[c] = -1.0;
        continue;
      }
      if (start_ms_[c] < 0) start_ms_[c] = now_ms;
      if (now_ms - start_ms_[c] >= t_ttt_ms) {
        if (fired < 0 || l3_cell[c] > l3_cell[fired]) fired = c;
      }
    }
    return fired;
  }

  double start_time(int cell) const { return start_ms_[cell]; }

 private:
  std::vector<double> start_ms_;
};

// CFRA preparation: the n_prep beams with the highest reported L3 beam
// measurements; lower beam index wins ties.
inline std::vector<int> prepare_handover(const double* l3_beams, int n_beams, int n_prep) {
  std::vector<int> order(n_beams);
  for (int b = 0; b < n_beams; ++b) order[b] = b;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return l3_beams[a] > l3_beams[b]; });
  order.resize(std::min(n_prep, n_beams));
  return order;
}

// Random access toward the target cell under the HOF timer. Access
// completes after a continuous in-sync window of length access_ms; the
// attempt fails when the HOF timer expires first.
class HoExecution {
 public:
  enum class Result { pending, success, failure };

  HoExecution() = default;
  HoExecution(int target_cell, int target_beam, double start_ms)
      : target_cell_(target_cell), target_beam_(target_beam), start_ms_(start_ms) {}

  Result update(double gamma_db, double gamma_out_db, double t_hof_ms, double access_ms,
                double dt_ms, double now_ms) {
    if (gamma_db >= gamma_out_db)
      good_ms_ += dt_ms;
    else
      good_ms_ = 0.0;
    if (good_ms_ >= access_ms) return Result::success;
    if (now_ms - start_ms_ >= t_hof_ms) return Result::failure;
    return Result::pending;
  }

  int target_cell() const { return target_cell_; }
  int target_beam() const { return target_beam_; }
  double start_ms() const { return start_ms_; }

 private:
  int target_cell_ = -1;
  int target_beam_ = -1;
  double start_ms_ = 0.0;
  double good_ms_ = 0.0;
};

// Beam failure detection: BFI counter plus supervision timer.
class BfdMachine {
 public:
  void reset() {
    c_bfi_ = 0;
    expiry_ms_ = -1.0;
  }

  // Returns true when the counter reaches c_bfi_max (beam failure).
  bool update(bool out_of_sync, double now_ms, double t_bfd_ms, int c_bfi_max) {
    if (expiry_ms_ >= 0 && now_ms >= expiry_ms_) {
      c_bfi_ = 0;
      expiry_ms_ = -1.0;
    }
    if (out_of_sync) {
      ++c_bfi_;
      expiry_ms_ = now_ms + t_bfd_ms;
      if (c_bfi_ >= c_bfi_max) {
        reset();
        return true;
      }
    }
    return false;
  }

  int counter() const { return c_bfi_; }

 private:
  int c_bfi_ = 0;
  double expiry_ms_ = -1.0;
};

// Beam failure recovery: up to n_rach access attempts on the chosen beam at
// t_rach intervals; an attempt succeeds when the instantaneous SINR of that
// beam is above gamma_out at the attempt instant.
class BfrProcedure {
 public:
  enum class Result { pending, recovered, failed };

  BfrProcedure() = default;
  BfrProcedure(int target_beam, double start_ms)
      : target_beam_(target_beam), next_attempt_ms_(start_ms) {}

  Result update(double gamma_db, double gamma_out_db, int n_rach, double t_rach_ms,
                double now_ms) {
    if (now_ms + 1e-9 < next_attempt_ms_) return Result::pending;
    ++attempts_;
    if (gamma_db >= gamma_out_db) return Result::recovered;
    if (attempts_ >= n_rach) return Result::failed;
    next_attempt_ms_ += t_rach_ms;
    return Result::pending;
  }

  int target_beam() const { return target_beam_; }
  int attempts() const { return attempts_; }

 private:
  int target_beam_ = -1;
  double next_attempt_ms_ = 0.0;
  int attempts_ = 0;
};

// Radio link monitoring with the gamma_out / gamma_in hysteresis band.
class RlmMachine {
 public:
  void reset() { timer_start_ms_ = -1.0; }

  // Returns true on RLF timer expiry.
  bool update(double rlm_sinr_db, double gamma_out_db, double gamma_in_db, double t_rlf_ms,
              double now_ms) {
    if (timer_start_ms_ < 0) {
      if (rlm_sinr_db < gamma_out_db) timer_start_ms_ = now_ms;
      return false;
    }
    if (rlm_sinr_db > gamma_in_db) {
      timer_start_ms_ = -1.0;
      return false;
    }
    return now_ms - timer_start_ms_ >= t_rlf_ms;
  }

  bool running() const { return timer_start_ms_ >= 0; }

 private:
  double timer_start_ms_ = -1.0;
};

// Network-side L2 IIR filtering of the reported L1 beam measurements and
// the beam-switch decision. Beams absent from a report keep their last L2
// value; a switch needs strict exceedance of the serving L2 by o_b.
class L2BeamFilter {
 public:
  void reset() {
    has_.fill(0);
  }

  void update(const std::pair<int, double>* reports, int n_reports, double alpha,
              int serving_beam, double serving_l1) {
    if (!has_[serving_beam]) {
      value_[serving_beam] = serving_l1;
      has_[serving_beam] = 1;
    }
    for (int i = 0; i < n_reports; ++i) {
      const auto [b, l1] = reports[i];
      if (!has_[b]) {
        value_[b] = l1;
        has_[b] = 1;
      } else {
        value_[b] = alpha * l1 + (1.0 - alpha) * value_[b];
      }
    }
  }

  // Returns the beam to switch to, or -1 to stay.
  int switch_decision(int serving_beam, double o_b_db) const {
    int best = -1;
    double best_v = value_[serving_beam] + o_b_db;
    for (int b = 0; b < kBeamsPerCell; ++b) {
      if (b == serving_beam || !has_[b]) continue;
      if (value_[b] > best_v) {
        best_v = value_[b];
        best = b;
      }
    }
    return best;
  }

  bool has(int beam) const { return has_[beam]; }
  double value(int beam) const { return value_[beam]; }

 private:
  std::array<double, kBeamsPerCell> value_{};
  std::array<char, kBeamsPerCell> has_{};
};

// First-order IIR smoothing of instantaneous SINR for the RLQ/RLM metrics.
class SinrAverager {
 public:
  explicit SinrAverager(double alpha = 0.1) : alpha_(alpha) {}

  void reset() { init_ = false; }

  double update(double sinr_db) {
    value_ = init_ ? alpha_ * sinr_db + (1.0 - alpha_) * value_ : sinr_db;
    init_ = true;
    return value_;
  }

  double value() const { return value_; }

 private:
  double alpha_ = 0.1;
  double value_ = 0.0;
  bool init_ = false;
};

}  // namespace mpuesim
