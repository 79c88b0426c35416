#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mpuesim/measurement.hpp"
#include "mpuesim/rng.hpp"
#include "reference_models.hpp"

using namespace mpuesim;

namespace {

// Pre-drawn raw RSRP tensor so the production lattice and the reference
// pipeline consume byte-identical inputs.
struct RawTrace {
  int n_cells, n_panels;
  std::vector<std::vector<double>> per_ssb; // [ssb][(c*12+b)*n_panels+p]

  RawTrace(int cells, int panels, int n_ssb, std::uint64_t seed) : n_cells(cells), n_panels(panels) {
    Substream rng(seed, "rawtrace");
    per_ssb.resize(n_ssb);
    for (auto& v : per_ssb) {
      v.resize(static_cast<std::size_t>(cells) * kBeamsPerCell * panels);
      for (auto& x : v) x = rng.uniform(-110.0, -50.0);
    }
  }
  auto at(long m) const {
    return [this, m](int c, int b, int p) {
      return per_ssb[m][(static_cast<std::size_t>(c) * kBeamsPerCell + b) * n_panels + p];
    };
  }
};

} // namespace

TEST_CASE("filter primitives", "[measurement]") {
  const double h3[3] = {-60.0, -62.0, -64.0};
  CHECK(l1_filter(h3, 3) == Catch::Approx(-62.0));
  CHECK_THROWS_AS(l1_filter(h3, 0), std::invalid_argument);
  CHECK(l3_forgetting_factor(4.0) == Catch::Approx(0.5));
  CHECK(l3_forgetting_factor(0.0) == Catch::Approx(1.0));
  CHECK(l3_iir(-70.0, -60.0, 0.5) == Catch::Approx(-65.0));
  CHECK(l3_iir(-70.0, -60.0, 1.0) == Catch::Approx(-60.0)); // no memory
}

TEST_CASE("cell quality derivation", "[measurement]") {
  double beams[kBeamsPerCell];
  for (int b = 0; b < kBeamsPerCell; ++b) beams[b] = -120.0;
  SECTION("no beam above threshold: strongest beam") {
    beams[5] = -101.0;
    CHECK(derive_cell_quality(beams, kBeamsPerCell, -100.0, 2) == Catch::Approx(-101.0));
  }
  SECTION("fewer than n_str above: average of all qualifying") {
    beams[2] = -90.0;
    CHECK(derive_cell_quality(beams, kBeamsPerCell, -100.0, 2) == Catch::Approx(-90.0));
  }
  SECTION("more than n_str above: average of the n_str strongest") {
    beams[1] = -95.0;
    beams[4] = -80.0;
    beams[9] = -85.0;
    CHECK(derive_cell_quality(beams, kBeamsPerCell, -100.0, 2) == Catch::Approx(-82.5));
  }
  SECTION("threshold is a strict bound") {
    beams[0] = -100.0; // exactly at threshold: not counted
    beams[3] = -99.0;
    CHECK(derive_cell_quality(beams, kBeamsPerCell, -100.0, 2) == Catch::Approx(-99.0));
  }
}

TEST_CASE("serving-panel hysteresis", "[measurement]") {
  ScenarioConfig cfg;
  cfg.ue_model = UeModel::mpue_a3;
  MeasurementLattice lat(cfg, 1);
  // panel 0 at -70, panel 1 at -68, panel 2 at -75 on (cell 0, beam 0)
  lat.ssb_update(0, [](int, int b, int p) {
    if (b != 0) return -120.0;
    return p == 0 ? -70.0 : p == 1 ? -68.0 : -75.0;
  });
  // 2 dB advantage does not beat a 3 dB hysteresis margin
  CHECK(lat.select_serving_panel(0, 0, 0, 3.0) == 0);
  // but beats a 1.5 dB margin
  CHECK(lat.select_serving_panel(0, 0, 0, 1.5) == 1);
  // best panel (no hysteresis) is panel 1
  CHECK(lat.select_best_panel(0) == 1);
}

TEST_CASE("measurement pipeline matches the brute-force reference bit for bit",
          "[measurement]") {
  for (auto scheme : {UeModel::isotropic, UeModel::mpue_a3, UeModel::mpue_a1}) {
    ScenarioConfig cfg;
    cfg.ue_model = scheme;
    const int n_cells = 4;
    const int n_panels = scheme == UeModel::isotropic ? 1 : 3;
    for (std::uint64_t trace = 0; trace < 5; ++trace) {
      RawTrace raw(n_cells, n_panels, 200, 1000 + trace);
      MeasurementLattice lat(cfg, n_cells);
      refmodel::MeasurementReference ref(cfg, n_cells);
      for (long m = 0; m < 200; ++m) {
        lat.ssb_update(m, raw.at(m));
        ref.ssb_update(m, raw.at(m));
        for (int c = 0; c < n_cells; ++c) {
          REQUIRE(lat.best_panel(c) == ref.best_panel(c));
          REQUIRE(lat.l3_cell(c) == ref.l3_cell(c)); // exact, not approximate
          for (int b = 0; b < kBeamsPerCell; ++b) {
            REQUIRE(lat.l1_beam(c, b) == ref.l1_beam(c, b));
            REQUIRE(lat.l3_beam(c, b) == ref.l3_beam(c, b));
            for (int p = 0; p < n_panels; ++p)
              REQUIRE(lat.l1(c, b, p) == ref.l1(c, b, p));
          }
        }
      }
    }
  }
}

TEST_CASE("pipeline equivalence holds for longer averaging windows", "[measurement]") {
  ScenarioConfig cfg;
  cfg.ue_model = UeModel::mpue_a3;
  cfg.n_l1 = 5;
  const int n_cells = 3;
  RawTrace raw(n_cells, 3, 120, 77);
  MeasurementLattice lat(cfg, n_cells);
  refmodel::MeasurementReference ref(cfg, n_cells);
  for (long m = 0; m < 120; ++m) {
    lat.ssb_update(m, raw.at(m));
    ref.ssb_update(m, raw.at(m));
    for (int c = 0; c < n_cells; ++c) {
      REQUIRE(lat.l3_cell(c) == ref.l3_cell(c));
      for (int b = 0; b < kBeamsPerCell; ++b)
        for (int p = 0; p < 3; ++p) REQUIRE(lat.l1(c, b, p) == ref.l1(c, b, p));
    }
  }
}

TEST_CASE("frozen channel: round-robin scanning converges to full scanning exactly",
          "[measurement]") {
  // With time-invariant raw RSRPs the single-panel-per-SSB scheme must report
  // identical L3 cell qualities to the all-panel scheme once every panel has
  // been visited (from the third SSB on).
  ScenarioConfig a3;
  a3.ue_model = UeModel::mpue_a3;
  ScenarioConfig a1 = a3;
  a1.ue_model = UeModel::mpue_a1;
  const int n_cells = 6;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    RawTrace frozen(n_cells, 3, 1, 500 + rep);
    MeasurementLattice lat3(a3, n_cells), lat1(a1, n_cells);
    for (long m = 0; m < 12; ++m) {
      lat3.ssb_update(m, frozen.at(0));
      lat1.ssb_update(m, frozen.at(0));
      if (m < 2) continue;
      for (int c = 0; c < n_cells; ++c) {
        REQUIRE(lat1.l3_cell(c) == lat3.l3_cell(c)); // exact equality
        REQUIRE(lat1.best_panel(c) == lat3.best_panel(c));
        for (int b = 0; b < kBeamsPerCell; ++b)
          REQUIRE(lat1.l3_beam(c, b) == lat3.l3_beam(c, b));
      }
    }
  }
}

TEST_CASE("L1 and L3 outputs stay inside the raw sample envelope", "[measurement]") {
  ScenarioConfig cfg;
  cfg.ue_model = UeModel::mpue_a3;
  const int n_cells = 2;
  RawTrace raw(n_cells, 3, 100, 9);
  MeasurementLattice lat(cfg, n_cells);
  for (long m = 0; m < 100; ++m) {
    lat.ssb_update(m, raw.at(m));
    for (int c = 0; c < n_cells; ++c) {
      // every filtered value is a convex combination of raws in [-110, -50]
      CHECK(lat.l3_cell(c) <= -50.0);
      CHECK(lat.l3_cell(c) >= -110.0);
      for (int b = 0; b < kBeamsPerCell; ++b) {
        CHECK(lat.l1_beam(c, b) <= -50.0);
        CHECK(lat.l1_beam(c, b) >= -110.0);
      }
    }
  }
}
