#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "mpuesim/deployment.hpp"
#include "mpuesim/rng.hpp"

namespace mpuesim {

enum class PanelId { P1 = 0, P2 = 1, P3 = 2 };

// Edge-design panels on a screen held parallel to the ground: boresights
// are pure azimuth rotations of the heading, P2 along the motion direction.
struct PanelOrientation {
  PanelId id = PanelId::P2;
  double azimuth_offset_deg = 0.0;
  double elevation_boresight_deg = 90.0;
};

inline PanelOrientation panel_orientation(PanelId id) {
  switch (id) {
    case PanelId::P1: return {PanelId::P1, -90.0, 90.0};
    case PanelId::P2: return {PanelId::P2, 0.0, 90.0};
    case PanelId::P3: return {PanelId::P3, 90.0, 90.0};
  }
  return {};
}

struct MotionState {
  Vec2 position;
  double heading_deg = 0.0;
  double speed_mps = 0.0;
  std::optional<Vec2> waypoint;
};

inline Vec2 heading_unit(double heading_deg) {
  const double r = deg2rad(heading_deg);
  return {std::cos(r), std::sin(r)};
}

// Advances the position by speed * dt along the current heading. Reaching
// the waypoint draws a new uniform waypoint and re-aims the heading; the
// residual step distance is spent on the new leg. Without a waypoint the
// UE travels straight and reflects specularly off the region boundary.
inline MotionState step_position(MotionState m, double dt_s, const HexRegion& region,
                                 Substream& rng) {
  double remaining = m.speed_mps * dt_s;
  int guard = 0;
  while (remaining > 0 && ++guard < 64) {
    const Vec2 dir = heading_unit(m.heading_deg);
    if (m.waypoint) {
      const Vec2 to_wp = *m.waypoint - m.position;
      const double dist_wp = to_wp.norm();
      if (dist_wp > remaining + 1e-12) {
        m.position = m.position + dir * remaining;
        remaining = 0;
      } else {
        m.position = *m.waypoint;
        remaining -= dist_wp;
        const Vec2 wp = region.random_point(rng);
        m.waypoint = wp;
        m.heading_deg = rad2deg(std::atan2(wp.y - m.position.y, wp.x - m.position.x));
      }
    } else {
      Vec2 next = m.position + dir * remaining;
      remaining = 0;
      int edge = region.violated_edge(next);
      int bounce_guard = 0;
      Vec2 d = dir;
      while (edge >= 0 && ++bounce_guard < 8) {
        next = region.reflect_point(next, edge);
        d = HexRegion::reflect_direction(d, region.edge_normal(edge));
        edge = region.violated_edge(next);
      }
      m.position = next;
      m.heading_deg = rad2deg(std::atan2(d.y, d.x));
    }
  }
  return m;
}

// Panel boresight direction in the ground frame.
inline std::pair<double, double> panel_boresight(const MotionState& m,
                                                 const PanelOrientation& panel) {
  return {wrap_deg(m.heading_deg + panel.azimuth_offset_deg), panel.elevation_boresight_deg};
}

struct AngularOffset {
  double delta_theta_deg = 0.0; // elevation offset from boresight (zenith convention)
  double delta_phi_deg = 0.0;   // azimuth offset, wrapped to (-180, 180]
};

// Target direction expressed in a boresight frame. Heights are absolute;
// theta follows the zenith-0 convention, boresight elevation included.
inline AngularOffset angular_offsets(Vec2 from_pos, double from_height_m,
                                     double boresight_az_deg, double boresight_theta_deg,
                                     Vec2 target_pos, double target_height_m) {
  const Vec2 d = target_pos - from_pos;
  const double d2d = d.norm();
  const double dh = target_height_m - from_height_m;
  if (d2d < 1e-12 && std::abs(dh) < 1e-12)
    throw std::invalid_argument("angular_offsets: coincident positions");
  const double az = rad2deg(std::atan2(d.y, d.x));
  const double theta = rad2deg(std::atan2(d2d, dh)); // 0 = zenith, 90 = horizon
  return {theta - boresight_theta_deg, wrap_deg(az - boresight_az_deg)};
}

}  // namespace mpuesim
