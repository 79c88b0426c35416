#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "mpuesim/config.hpp"
#include "mpuesim/rng.hpp"

namespace mpuesim {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Wraps an angle in degrees to (-180, 180].
inline double wrap_deg(double a) {
  a = std::fmod(a, 360.0);
  if (a > 180.0) a -= 360.0;
  if (a <= -180.0) a += 360.0;
  return a;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

// Regular hexagon centered at the origin with vertices on the site ring
// axes; used as the simulation region boundary.
class HexRegion {
 public:
  HexRegion() = default;
  explicit HexRegion(double circumradius) : radius_(circumradius) {
    apothem_ = radius_ * std::sqrt(3.0) / 2.0;
    for (int k = 0; k < 6; ++k) {
      const double a = deg2rad(30.0 + 60.0 * k);
      normals_[k] = {std::cos(a), std::sin(a)};
    }
  }

  double circumradius() const { return radius_; }
  double apothem() const { return apothem_; }

  bool contains(Vec2 p, double tol = 1e-9) const {
    for (const auto& n : normals_)
      if (p.dot(n) > apothem_ + tol) return false;
    return true;
  }

  // Index of the most-violated edge, or -1 if p is inside.
  int violated_edge(Vec2 p) const {
    int worst = -1;
    double worst_excess = 1e-12;
    for (int k = 0; k < 6; ++k) {
      const double excess = p.dot(normals_[k]) - apothem_;
      if (excess > worst_excess) {
        worst_excess = excess;
        worst = k;
      }
    }
    return worst;
  }

  Vec2 edge_normal(int k) const { return normals_[k]; }

  // Specular reflection of a point that crossed edge k back into the
  // half-plane of that edge.
  Vec2 reflect_point(Vec2 p, int k) const {
    const Vec2 n = normals_[k];
    const double excess = p.dot(n) - apothem_;
    return p - n * (2.0 * excess);
  }

  static Vec2 reflect_direction(Vec2 dir, Vec2 n) { return dir - n * (2.0 * dir.dot(n)); }

  Vec2 random_point(Substream& rng) const {
    // Rejection sampling from the bounding box.
    for (;;) {
      Vec2 p{rng.uniform(-radius_, radius_), rng.uniform(-radius_, radius_)};
      if (contains(p)) return p;
    }
  }

  // Distance along unit direction dir from p to the region boundary.
  double ray_to_boundary(Vec2 p, Vec2 dir) const {
    double t_min = 1e300;
    for (const auto& n : normals_) {
      const double denom = dir.dot(n);
      if (denom <= 1e-12) continue;
      const double t = (apothem_ - p.dot(n)) / denom;
      if (t >= 0 && t < t_min) t_min = t;
    }
    return t_min;
  }

 private:
  double radius_ = 0.0;
  double apothem_ = 0.0;
  std::array<Vec2, 6> normals_{};
};

struct Beam {
  int index = 0;           // 1-based, matching the grid-of-beams numbering
  double theta_deg = 90.0; // elevation boresight, zenith = 0
  double phi_deg = 0.0;    // azimuth relative to the sector boresight
  int rows = 0;            // Tx panel rows (vertical)
  int cols = 0;            // Tx panel columns (horizontal)
  double peak_gain_db = 0.0;
  double theta_3db_deg = 0.0; // full HPBW in elevation
  double phi_3db_deg = 0.0;   // full HPBW in azimuth
  bool far_tier() const { return index <= 8; }
};

struct Cell {
  int index = 0;
  int site = 0;
  Vec2 site_pos;
  double boresight_deg = 0.0;
  std::array<Beam, 12> beams;
};

struct Deployment {
  std::vector<Vec2> sites;
  std::vector<Cell> cells;
  HexRegion region;
};

namespace detail {

inline Beam make_beam(int b) {
  Beam beam;
  beam.index = b;
  if (b <= 8) {
    beam.theta_deg = 90.0;
    beam.phi_deg = -52.5 + 15.0 * (b - 1);
    beam.rows = 16;
    beam.cols = 8;
  } else {
    beam.theta_deg = 97.0;
    beam.phi_deg = -45.0 + 30.0 * (b - 9);
    beam.rows = 8;
    beam.cols = 4;
  }
  // Uniform array rule of thumb: HPBW ~ 102 deg / N at half-wavelength
  // spacing, scaled inversely with spacing. Element gain 8 dBi.
  beam.peak_gain_db = 10.0 * std::log10(double(beam.rows * beam.cols)) + 8.0;
  beam.theta_3db_deg = 102.0 * (0.5 / 0.7) / beam.rows;
  beam.phi_3db_deg = 102.0 / beam.cols;
  return beam;
}

}  // namespace detail

// 1 center site + 6 ring sites at the inter-site distance; 3 sectors per
// site with boresights 0/120/240 degrees; 12 beams per sector.
inline Deployment build_deployment(const ScenarioConfig& cfg) {
  Deployment d;
  const double isd = cfg.inter_site_distance_m;
  d.sites.push_back({0.0, 0.0});
  for (int k = 0; k < 6; ++k) {
    const double a = deg2rad(60.0 * k);
    d.sites.push_back({isd * std::cos(a), isd * std::sin(a)});
  }
  int cell_index = 0;
  for (int s = 0; s < static_cast<int>(d.sites.size()); ++s) {
    for (int sector = 0; sector < 3; ++sector) {
      Cell cell;
      cell.index = cell_index++;
      cell.site = s;
      cell.site_pos = d.sites[s];
      cell.boresight_deg = 120.0 * sector;
      for (int b = 1; b <= 12; ++b) cell.beams[b - 1] = detail::make_beam(b);
      d.cells.push_back(cell);
    }
  }
  d.region = HexRegion(isd * 1.5);
  return d;
}

}  // namespace mpuesim
