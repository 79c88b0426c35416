#pragma once

#include <cassert>
#include <vector>

#include "mpuesim/antenna.hpp"
#include "mpuesim/channel.hpp"
#include "mpuesim/config.hpp"
#include "mpuesim/deployment.hpp"
#include "mpuesim/mobility.hpp"

namespace mpuesim {

inline constexpr int kBeamsPerCell = 12;

// Instantaneous received powers of every (cell, beam) link at one UE panel,
// in linear mW, with per-cell totals maintained for the interference sums.
//
// Expected interference under uniform random co-scheduling of k_b of the 12
// beams: every other cell contributes k_b/12 of its total received power,
// the serving cell contributes (k_b-1)/11 of its non-serving total.
class SinrLattice {
 public:
  SinrLattice() = default;
  SinrLattice(int n_cells, int k_b, double noise_dbm)
      : n_cells_(n_cells), k_b_(k_b), noise_lin_(db_to_linear(noise_dbm)),
        p_lin_(n_cells * kBeamsPerCell, 0.0), tot_(n_cells, 0.0) {}

  void set(int cell, int beam, double p_dbm) {
    double& slot = p_lin_[cell * kBeamsPerCell + beam];
    const double v = db_to_linear(p_dbm);
    tot_[cell] += v - slot;
    tot_all_ += v - slot;
    slot = v;
  }

  double p_lin(int cell, int beam) const { return p_lin_[cell * kBeamsPerCell + beam]; }
  double cell_total_lin(int cell) const { return tot_[cell]; }

  double interference_lin(int cell, int beam) const {
    const double s = p_lin(cell, beam);
    const double intra = (k_b_ - 1) / 11.0 * (tot_[cell] - s);
    const double inter = k_b_ / 12.0 * (tot_all_ - tot_[cell]);
    return intra + inter;
  }

  double sinr_db(int cell, int beam) const {
    const double s = p_lin(cell, beam);
    return linear_to_db(s / (interference_lin(cell, beam) + noise_lin_));
  }

  int n_cells() const { return n_cells_; }
  int k_b() const { return k_b_; }
  double noise_lin() const { return noise_lin_; }

 private:
  int n_cells_ = 0;
  int k_b_ = 1;
  double noise_lin_ = 0.0;
  double tot_all_ = 0.0;
  std::vector<double> p_lin_;
  std::vector<double> tot_;
};

// Sampling counterpart of SinrLattice::interference_lin: draws explicit
// random k_b-subsets of scheduled beams per cell and averages. Validation
// only; the simulator runs on the analytical expectation.
inline double monte_carlo_interference_lin(const SinrLattice& lat, int cell, int beam,
                                           int n_draws, Substream& rng) {
  double acc = 0.0;
  const int k_b = lat.k_b();
  for (int d = 0; d < n_draws; ++d) {
    double inter = 0.0;
    for (int c = 0; c < lat.n_cells(); ++c) {
      // Partial Fisher-Yates over the candidate beam set.
      int pool[kBeamsPerCell];
      int pool_size = 0;
      int picks = k_b;
      if (c == cell) {
        // Serving beam is always scheduled; co-schedule k_b - 1 others.
        picks = k_b - 1;
        for (int b = 0; b < kBeamsPerCell; ++b)
          if (b != beam) pool[pool_size++] = b;
      } else {
        for (int b = 0; b < kBeamsPerCell; ++b) pool[pool_size++] = b;
      }
      for (int i = 0; i < picks; ++i) {
        const int j = i + static_cast<int>(rng.next_u64() % (pool_size - i));
        std::swap(pool[i], pool[j]);
        inter += lat.p_lin(c, pool[i]);
      }
    }
    acc += inter;
  }
  return acc / n_draws;
}

// Per-UE link budget evaluator. Geometry, shadow fading, and per-link fast
// fading are cached and advanced lazily so the serving link can be refreshed
// every step while the full lattice refreshes only at SSB instants.
class LinkComputer {
 public:
  LinkComputer() = default;

  LinkComputer(const ScenarioConfig& cfg, const Deployment& dep, int ue_index,
               std::uint64_t seed)
      : cfg_(&cfg), dep_(&dep), fparams_(FadingParams::from_config(cfg)) {
    const int n_cells = static_cast<int>(dep.cells.size());
    const int n_sites = static_cast<int>(dep.sites.size());
    geo_.resize(n_cells);
    fading_.resize(n_cells * kBeamsPerCell);
    fading_rng_.resize(n_cells * kBeamsPerCell);
    shadow_.resize(n_sites);
    shadow_rng_.resize(n_sites);
    shadow_step_.assign(n_sites, 0);
    for (int s = 0; s < n_sites; ++s) {
      shadow_rng_[s] = Substream(seed, "shadow", static_cast<std::uint64_t>(ue_index) * 64 + s);
      shadow_[s] = ShadowProcess(cfg.shadow_sigma_db, cfg.shadow_decorr_m, shadow_rng_[s]);
    }
    for (int l = 0; l < n_cells * kBeamsPerCell; ++l) {
      fading_rng_[l] =
          Substream(seed, "fading", static_cast<std::uint64_t>(ue_index) * 512 + l);
      fading_[l].init(fparams_, fading_rng_[l]);
    }
    step_dist_m_ = cfg.speed_mps() * cfg.time_step_ms * 1e-3;
  }

  void set_position(Vec2 pos, double heading_deg, long step) {
    pos_ = pos;
    heading_deg_ = heading_deg;
    step_ = step;
  }

  int n_panels() const { return cfg_->ue_model == UeModel::isotropic ? 1 : 3; }

  // Tx power + Tx beam gain - path loss + shadow fading + fast fading;
  // everything except the Rx panel gain.
  double link_db(int cell, int beam) {
    const CellGeo& g = cell_geo(cell);
    const Cell& c = dep_->cells[cell];
    const Beam& bm = c.beams[beam];
    const double dphi = wrap_deg(g.az_to_ue - (c.boresight_deg + bm.phi_deg));
    const double dtheta = g.theta_to_ue - bm.theta_deg;
    double v = cfg_->tx_power_dbm + tx_beam_gain(bm, dphi, dtheta) - g.path_loss_db +
               g.shadow_db;
    if (cfg_->fast_fading) {
      const int l = cell * kBeamsPerCell + beam;
      fading_[l].advance_to(step_, fparams_, fading_rng_[l]);
      v += fading_[l].gain_db(fparams_, g.p_los);
    }
    return v;
  }

  double rx_gain_db(int panel, int cell) {
    if (cfg_->ue_model == UeModel::isotropic) return rx_isotropic_gain();
    const CellGeo& g = cell_geo(cell);
    const PanelOrientation p = panel_orientation(static_cast<PanelId>(panel));
    const double dphi = wrap_deg(g.az_to_bs - (heading_deg_ + p.azimuth_offset_deg));
    const double dtheta = g.theta_to_bs - p.elevation_boresight_deg;
    return rx_panel_gain(dphi, dtheta);
  }

  double rsrp_dbm(int cell, int beam, int panel) {
    return link_db(cell, beam) + rx_gain_db(panel, cell);
  }

  const ScenarioConfig& config() const { return *cfg_; }
  const Deployment& deployment() const { return *dep_; }

 private:
  struct CellGeo {
    long step = -1;
    double path_loss_db = 0.0;
    double p_los = 1.0;
    double shadow_db = 0.0;
    double az_to_ue = 0.0;   // from the site toward the UE
    double theta_to_ue = 0.0;
    double az_to_bs = 0.0;   // from the UE toward the site
    double theta_to_bs = 0.0;
  };

  const CellGeo& cell_geo(int cell) {
    CellGeo& g = geo_[cell];
    if (g.step == step_) return g;
    const Cell& c = dep_->cells[cell];
    const Vec2 d = pos_ - c.site_pos;
    const double d2d = std::max(d.norm(), 1e-3);
    const double dh = cfg_->bs_height_m - cfg_->ue_height_m;
    const double d3d = std::sqrt(d2d * d2d + dh * dh);
    g.path_loss_db = path_loss_db(d3d, d2d, cfg_->carrier_frequency_ghz);
    g.p_los = los_probability(d2d);
    g.az_to_ue = rad2deg(std::atan2(d.y, d.x));
    g.theta_to_ue = rad2deg(std::atan2(d2d, -dh));
    g.az_to_bs = wrap_deg(g.az_to_ue + 180.0);
    g.theta_to_bs = rad2deg(std::atan2(d2d, dh));
    if (cfg_->shadow_fading) {
      const int s = c.site;
      if (shadow_step_[s] < step_) {
        const double moved = step_dist_m_ * (step_ - shadow_step_[s]);
        shadow_[s].advance(moved, shadow_rng_[s]);
        shadow_step_[s] = step_;
      }
      g.shadow_db = shadow_[s].value_db();
    } else {
      g.shadow_db = 0.0;
    }
    g.step = step_;
    return g;
  }

  const ScenarioConfig* cfg_ = nullptr;
  const Deployment* dep_ = nullptr;
  FadingParams fparams_;
  Vec2 pos_;
  double heading_deg_ = 0.0;
  long step_ = 0;
  double step_dist_m_ = 0.0;
  std::vector<CellGeo> geo_;
  std::vector<FadingProcess> fading_;
  std::vector<Substream> fading_rng_;
  std::vector<ShadowProcess> shadow_;
  std::vector<Substream> shadow_rng_;
  std::vector<long> shadow_step_;
};

}  // namespace mpuesim
