#pragma once

#include <algorithm>
#include <cmath>

#include "mpuesim/deployment.hpp"

namespace mpuesim {

// Parabolic main lobe with a sidelobe floor. delta angles are measured
// from the beam center; the 3 dB points sit at half the full HPBW.
inline double tx_beam_gain(const Beam& beam, double delta_phi_deg, double delta_theta_deg) {
  const double ap = delta_phi_deg / beam.phi_3db_deg;
  const double at = delta_theta_deg / beam.theta_3db_deg;
  const double attenuation = std::min(12.0 * (ap * ap + at * at), 30.0);
  return beam.peak_gain_db - attenuation;
}

// Directional UE panel: 5 dBi boresight, 90 degree HPBW in both planes,
// 25 dB backward attenuation (floor at -20 dBi).
inline double rx_panel_gain(double delta_phi_deg, double delta_theta_deg) {
  const double ap = delta_phi_deg / 90.0;
  const double at = delta_theta_deg / 90.0;
  const double attenuation = std::min(12.0 * (ap * ap + at * at), 25.0);
  return 5.0 - attenuation;
}

inline double rx_isotropic_gain() { return 0.0; }

}  // namespace mpuesim
