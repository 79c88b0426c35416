#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mpuesim/config.hpp"
#include "mpuesim/radio.hpp"

namespace mpuesim {

// Moving-average L1 filter, applied in the dB domain.
inline double l1_filter(const double* history, int n) {
  if (n < 1) throw std::invalid_argument("l1_filter: empty history");
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += history[i];
  return acc / n;
}

inline double l3_forgetting_factor(double k) { return std::pow(0.5, k / 4.0); }

// First-order IIR used for both L3 cell quality and L3 beam measurements.
inline double l3_iir(double prev, double current, double alpha) {
  return alpha * current + (1.0 - alpha) * prev;
}

// Cell quality from per-beam L1 values: average (dB domain) of the n_str
// strongest beams above p_thr; all of them if fewer qualify; the single
// strongest beam if none qualifies.
inline double derive_cell_quality(const double* l1_beams, int n_beams, double p_thr_dbm,
                                  int n_str) {
  std::array<double, kBeamsPerCell> above{};
  int n_above = 0;
  double best = l1_beams[0];
  for (int b = 0; b < n_beams; ++b) {
    best = std::max(best, l1_beams[b]);
    if (l1_beams[b] > p_thr_dbm) above[n_above++] = l1_beams[b];
  }
  if (n_above == 0) return best;
  const int take = std::min(n_str, n_above);
  std::partial_sort(above.begin(), above.begin() + take, above.begin() + n_above,
                    std::greater<double>());
  double acc = 0.0;
  for (int i = 0; i < take; ++i) acc += above[i];
  return acc / take;
}

// Round-robin scan order for MPUE-A1: P2 first (motion direction), then P1,
// then P3, repeating every third SSB.
inline PanelId a1_scan_panel(long ssb_index) {
  static constexpr PanelId order[3] = {PanelId::P2, PanelId::P1, PanelId::P3};
  return order[ssb_index % 3];
}

// Per-UE raw/L1/L3 measurement state over all (cell, beam, panel) tuples.
// Raw ring buffers refresh per scheme (all panels for MPUE-A3, one per SSB
// for MPUE-A1); stale panels keep their last values in downstream filtering.
class MeasurementLattice {
 public:
  MeasurementLattice() = default;

  MeasurementLattice(const ScenarioConfig& cfg, int n_cells)
      : n_cells_(n_cells), n_panels_(cfg.ue_model == UeModel::isotropic ? 1 : 3),
        n_l1_(cfg.n_l1), p_thr_(cfg.p_thr_dbm), n_str_(cfg.n_str),
        alpha_cell_(l3_forgetting_factor(cfg.k_cell)),
        alpha_beam_(l3_forgetting_factor(cfg.k_beam)), scheme_(cfg.ue_model) {
    const int links = n_cells_ * kBeamsPerCell * n_panels_;
    ring_.assign(links * n_l1_, 0.0);
    ring_filled_.assign(links, 0);
    l1_.assign(links, -1e9);
    l1_beam_.assign(n_cells_ * kBeamsPerCell, -1e9);
    l3_beam_.assign(n_cells_ * kBeamsPerCell, 0.0);
    l3_beam_init_.assign(n_cells_ * kBeamsPerCell, 0);
    l3_cell_.assign(n_cells_, 0.0);
    l3_cell_init_.assign(n_cells_, 0);
    best_panel_.assign(n_cells_, 0);
  }

  // One SSB instant: scan raw RSRPs (provider signature double(c, b, p)),
  // update L1 for the scanned panels, project the best panel per cell, and
  // run cell-quality derivation plus L3 filtering.
  template <class RawFn>
  void ssb_update(long ssb_index, RawFn&& raw) {
    const int p_lo = (scheme_ == UeModel::mpue_a1) ? static_cast<int>(a1_scan_panel(ssb_index)) : 0;
    const int p_hi = (scheme_ == UeModel::mpue_a1) ? p_lo + 1 : n_panels_;
    for (int c = 0; c < n_cells_; ++c) {
      for (int b = 0; b < kBeamsPerCell; ++b) {
        for (int p = p_lo; p < p_hi; ++p) {
          const int l = link_index(c, b, p);
          push_raw(l, raw(c, b, p));
          l1_[l] = l1_filter(&ring_[l * n_l1_], n_l1_);
        }
      }
    }
    // The L3 stage starts only once every panel has been scanned: under the
    // round-robin scheme the first full sweep takes 3 SSB periods, and cell
    // qualities derived from a partial sweep would poison the IIR memory.
    const bool l3_active = scheme_ != UeModel::mpue_a1 || ssb_index >= 2;
    for (int c = 0; c < n_cells_; ++c) {
      best_panel_[c] = select_best_panel(c);
      for (int b = 0; b < kBeamsPerCell; ++b) {
        const double v = l1_[link_index(c, b, best_panel_[c])];
        l1_beam_[c * kBeamsPerCell + b] = v;
        if (!l3_active) continue;
        double& l3b = l3_beam_[c * kBeamsPerCell + b];
        if (!l3_beam_init_[c * kBeamsPerCell + b]) {
          l3b = v;
          l3_beam_init_[c * kBeamsPerCell + b] = 1;
        } else {
          l3b = l3_iir(l3b, v, alpha_beam_);
        }
      }
      if (!l3_active) continue;
      const double q =
          derive_cell_quality(&l1_beam_[c * kBeamsPerCell], kBeamsPerCell, p_thr_, n_str_);
      if (!l3_cell_init_[c]) {
        l3_cell_[c] = q;
        l3_cell_init_[c] = 1;
      } else {
        l3_cell_[c] = l3_iir(l3_cell_[c], q, alpha_cell_);
      }
    }
  }

  // Panel holding the strongest L1 beam-panel measurement of the cell;
  // lowest panel index wins exact ties.
  int select_best_panel(int cell) const {
    int best_p = 0;
    double best_v = -1e300;
    for (int p = 0; p < n_panels_; ++p)
      for (int b = 0; b < kBeamsPerCell; ++b) {
        const double v = l1_[link_index(cell, b, p)];
        if (v > best_v) {
          best_v = v;
          best_p = p;
        }
      }
    return best_p;
  }

  // Serving-panel selection with hysteresis: switch away from the incumbent
  // panel only on strict exceedance by o_p.
  int select_serving_panel(int serving_cell, int serving_beam, int current_panel,
                           double o_p_db) const {
    int best = current_panel;
    double best_v = l1_[link_index(serving_cell, serving_beam, current_panel)] + o_p_db;
    for (int p = 0; p < n_panels_; ++p) {
      if (p == current_panel) continue;
      const double v = l1_[link_index(serving_cell, serving_beam, p)];
      if (v > best_v) {
        best_v = v;
        best = p;
      }
    }
    return best;
  }

  double l1(int c, int b, int p) const { return l1_[link_index(c, b, p)]; }
  double l1_beam(int c, int b) const { return l1_beam_[c * kBeamsPerCell + b]; }
  double l3_beam(int c, int b) const { return l3_beam_[c * kBeamsPerCell + b]; }
  double l3_cell(int c) const { return l3_cell_[c]; }
  int best_panel(int c) const { return best_panel_[c]; }
  int n_panels() const { return n_panels_; }
  int n_cells() const { return n_cells_; }

 private:
  int link_index(int c, int b, int p) const {
    return (c * kBeamsPerCell + b) * n_panels_ + p;
  }

  // Window kept in ascending time order so the dB average always sums in a
  // canonical order, independent of how many samples have arrived.
  void push_raw(int link, double value) {
    double* ring = &ring_[link * n_l1_];
    if (!ring_filled_[link]) {
      for (int i = 0; i < n_l1_; ++i) ring[i] = value; // bootstrap: replicate
      ring_filled_[link] = 1;
      return;
    }
    for (int i = 0; i + 1 < n_l1_; ++i) ring[i] = ring[i + 1];
    ring[n_l1_ - 1] = value;
  }

  int n_cells_ = 0;
  int n_panels_ = 1;
  int n_l1_ = 1;
  double p_thr_ = -1e9;
  int n_str_ = 1;
  double alpha_cell_ = 1.0;
  double alpha_beam_ = 1.0;
  UeModel scheme_ = UeModel::isotropic;

  std::vector<double> ring_;
  std::vector<char> ring_filled_;
  std::vector<double> l1_;
  std::vector<double> l1_beam_;
  std::vector<double> l3_beam_;
  std::vector<char> l3_beam_init_;
  std::vector<double> l3_cell_;
  std::vector<char> l3_cell_init_;
  std::vector<int> best_panel_;
};

}  // namespace mpuesim
