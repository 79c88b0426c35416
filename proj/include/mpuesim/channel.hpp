#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "mpuesim/config.hpp"
#include "mpuesim/rng.hpp"

namespace mpuesim {

inline double db_to_linear(double db) { return std::exp(db * 0.23025850929940457); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// UMi street-canyon style distance laws.
inline double path_loss_los_db(double d3d_m, double f_ghz) {
  if (!(d3d_m > 0)) throw std::invalid_argument("path_loss: nonpositive distance");
  return 32.4 + 21.0 * std::log10(d3d_m) + 20.0 * std::log10(f_ghz);
}

inline double path_loss_nlos_db(double d3d_m, double f_ghz) {
  if (!(d3d_m > 0)) throw std::invalid_argument("path_loss: nonpositive distance");
  return 22.4 + 35.3 * std::log10(d3d_m) + 21.3 * std::log10(f_ghz);
}

inline double los_probability(double d2d_m) {
  if (d2d_m <= 18.0) return 1.0;
  const double e = std::exp(-d2d_m / 36.0);
  return (18.0 / d2d_m) * (1.0 - e) + e;
}

// Soft-LOS blend of the LOS and NLOS laws in the linear power domain.
inline double path_loss_db(double d3d_m, double d2d_m, double f_ghz) {
  const double p = los_probability(d2d_m);
  const double lin = p * db_to_linear(-path_loss_los_db(d3d_m, f_ghz)) +
                     (1.0 - p) * db_to_linear(-path_loss_nlos_db(d3d_m, f_ghz));
  return -linear_to_db(lin);
}

inline double thermal_noise_dbm(double bandwidth_mhz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_mhz * 1e6) + noise_figure_db;
}

// Log-normal shadow fading with exponential spatial correlation over the
// distance traveled; one independent process per BS site.
class ShadowProcess {
 public:
  ShadowProcess() = default;
  ShadowProcess(double sigma_db, double decorr_m, Substream& rng)
      : sigma_(sigma_db), decorr_(decorr_m), value_(sigma_db * rng.normal()) {}

  void advance(double distance_m, Substream& rng) {
    const double rho = std::exp(-distance_m / decorr_);
    value_ = rho * value_ + std::sqrt(1.0 - rho * rho) * sigma_ * rng.normal();
  }

  double value_db() const { return value_; }

 private:
  double sigma_ = 0.0;
  double decorr_ = 1.0;
  double value_ = 0.0;
};

// Temporally correlated soft-LOS Rician fading per link. The scattered
// component is a unit-variance complex AR(1) process with exponential
// autocorrelation derived from the Doppler coherence time, which composes
// exactly over multi-step advances so links can be updated lazily at
// different rates.
//
// The specular (Rician) component exists only to the extent the link is
// line-of-sight: the effective K factor of a link is the configured K
// scaled by the LOS probability at the link's 2D distance, so short links
// see mild Rician fading while cell-edge NLOS-dominated links approach
// Rayleigh. Marginal power is unit-mean at every distance.
struct FadingParams {
  double k_lin = 0.0;          // configured Rician K under full LOS, linear
  double rho_step = 0.0;       // one-step correlation of the scattered part

  static FadingParams from_config(const ScenarioConfig& cfg) {
    FadingParams p;
    p.k_lin = db_to_linear(cfg.rician_k_db);
    const double lambda_m = 299792458.0 / (cfg.carrier_frequency_ghz * 1e9);
    const double doppler_hz = cfg.speed_mps() / lambda_m;
    if (doppler_hz > 1e-9) {
      const double coherence_s = 0.423 / doppler_hz;
      p.rho_step = std::exp(-(cfg.time_step_ms * 1e-3) / coherence_s);
    } else {
      p.rho_step = 1.0; // static UE: frozen fading realization
    }
    return p;
  }
};

class FadingProcess {
 public:
  FadingProcess() = default;

  void init(const FadingParams& /*p*/, Substream& rng) {
    constexpr double s = 0.70710678118654752; // sqrt(1/2): unit complex variance
    scatter_ = {s * rng.normal(), s * rng.normal()};
    last_step_ = 0;
  }

  // Advances the scattered component to the given step index in one shot.
  void advance_to(long step, const FadingParams& p, Substream& rng) {
    if (step <= last_step_) return;
    const long k = step - last_step_;
    const double rho_k = (k == 1) ? p.rho_step : std::pow(p.rho_step, double(k));
    const double s = std::sqrt((1.0 - rho_k * rho_k) / 2.0);
    scatter_ = scatter_ * rho_k + std::complex<double>{s * rng.normal(), s * rng.normal()};
    last_step_ = step;
  }

  // Instantaneous power gain for a link with LOS probability p_los.
  double power_gain(const FadingParams& p, double p_los) const {
    const double k_eff = p.k_lin * p_los;
    const double los_amp = std::sqrt(k_eff / (k_eff + 1.0));
    const double scatter_amp = std::sqrt(1.0 / (k_eff + 1.0));
    return std::norm(std::complex<double>{los_amp, 0.0} + scatter_ * scatter_amp);
  }

  double gain_db(const FadingParams& p, double p_los) const {
    return linear_to_db(power_gain(p, p_los));
  }

 private:
  std::complex<double> scatter_{0.0, 0.0};
  long last_step_ = 0;
};

}  // namespace mpuesim
