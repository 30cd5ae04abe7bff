#include <cmath>
#include <vector>

#include "doctest.h"
#include "wgqed/correlation.hpp"
#include "wgqed/error.hpp"

using namespace wgqed;

namespace {

double breakdown_sum(const G1Result& r) {
  double s = 0.0;
  for (const auto& c : r.breakdown) s += c.value;
  return s;
}

}  // namespace

TEST_CASE("spontaneous G1") {
  SystemParams p;
  p.gamma = 0.7;
  CHECK(g1_spontaneous(SpaceTimePoint(1.0, 1.0), p).value == doctest::Approx(0.49));
  CHECK(g1_spontaneous(SpaceTimePoint(-1.0, 0.5), p).value == 0.0);
  const auto r = g1_spontaneous(SpaceTimePoint(-1.0, 2.0), p);
  CHECK(r.value == doctest::Approx(0.49 * std::exp(-1.4)));
  REQUIRE(r.breakdown.size() == 1);
  CHECK(r.breakdown[0].name == "spont");
}

TEST_CASE("plane-wave G1 through a ground-state atom") {
  const SystemParams p;
  const double late = 80.0;
  const double density = plane_wave_density(50.0, p);
  CHECK(g1_pulse(SpaceTimePoint(1.0, late), PlaneWave{50.0}, p).value < 1e-20);
  CHECK(g1_pulse(SpaceTimePoint(1.0, late), PlaneWave{51.0}, p).value ==
        doctest::Approx(0.5 * density));
  for (double w0 : {48.0, 50.3, 53.0}) {
    const double sum = g1_pulse(SpaceTimePoint(1.0, late), PlaneWave{w0}, p).value +
                       g1_pulse(SpaceTimePoint(-1.0, late), PlaneWave{w0}, p).value;
    CHECK(sum == doctest::Approx(density));
  }
}

TEST_CASE("two-excitation G1 channels") {
  SystemParams p;
  p.lambda_rabi = 0.3;
  for (double x : {1.0, -1.0}) {
    for (double tau : {-0.5, 0.0, 0.4, 3.1, 17.0}) {
      for (double w0 : {45.0, 50.0, 50.9}) {
        const auto r = g1_two_excitation(SpaceTimePoint(x, 1.0 + tau), w0, p);
        CHECK(r.value >= 0.0);
        CHECK(std::abs(r.value - breakdown_sum(r)) <= 1e-10);
      }
    }
  }
  CHECK(g1_two_excitation(SpaceTimePoint(2.0, 1.0), 50.0, p).value == 1.0);
  CHECK(g1_two_excitation(SpaceTimePoint(-2.0, 1.0), 50.0, p).value == 0.0);
}

TEST_CASE("two-excitation G1 without Rabi splitting") {
  SystemParams p;
  p.lambda_rabi = 0.0;
  for (double w0 : {50.0, 51.5}) {
    const auto r = g1_two_excitation(SpaceTimePoint(-1.0, 7.0), w0, p);
    CHECK(r.breakdown[1].value == 0.0);
    CHECK(r.value == doctest::Approx(std::norm(reflection_amplitude(w0, p))));
  }
}

TEST_CASE("two-excitation G1 periods") {
  SystemParams p;
  p.lambda_rabi = 0.8;
  const double root = std::sqrt(p.lambda_rabi);
  for (double tau : {0.3, 1.7}) {
    const double back = g1_two_excitation(SpaceTimePoint(-1.0, 1.0 + tau), 50.6, p).value;
    const double back_shift =
        g1_two_excitation(SpaceTimePoint(-1.0, 1.0 + tau + kPi / (2.0 * root)), 50.6, p).value;
    CHECK(back_shift == doctest::Approx(back).epsilon(1e-12));
    const double fwd = g1_two_excitation(SpaceTimePoint(1.0, 1.0 + tau), 50.6, p).value;
    const double fwd_shift =
        g1_two_excitation(SpaceTimePoint(1.0, 1.0 + tau + kPi / root), 50.6, p).value;
    CHECK(fwd_shift == doctest::Approx(fwd).epsilon(1e-12));
  }
}

TEST_CASE("time-averaged spectrum") {
  SystemParams p;
  p.lambda_rabi = 6.25;  // 2 sqrt(Lambda) = 5 Gamma
  CHECK(g1_av_spectrum(55.0, Side::positive, p) ==
        doctest::Approx(1.0 + 5.0 / 16.0 + 5.0 / 16.0 / 101.0).epsilon(1e-14));
  CHECK(g1_av_spectrum(1e6, Side::positive, p) == doctest::Approx(1.0));
  CHECK(g1_av_spectrum(1e6, Side::negative, p) < 1e-9);
  for (double w0 : {44.0, 45.0, 48.2, 50.0, 53.3, 55.0}) {
    for (Side side : {Side::positive, Side::negative}) {
      CHECK(g1_av_numeric(w0, side, p) == doctest::Approx(g1_av_spectrum(w0, side, p)).epsilon(1e-12));
    }
  }
  p.lambda_rabi = 0.0;
  CHECK_THROWS_AS(g1_av_numeric(50.0, Side::positive, p), DomainError);
}

TEST_CASE("geometry helpers and detector validation") {
  CHECK(parse_geometry("+-") == Geometry::pm);
  CHECK(parse_geometry("mm") == Geometry::mm);
  CHECK_FALSE(parse_geometry("+").has_value());
  CHECK(to_string(Geometry::mp) == "-+");

  CHECK(geometry_of({1.0, -2.0}) == Geometry::pm);
  CHECK(geometry_of({-1.0, 2.0}) == Geometry::mp);
  CHECK_THROWS_AS(validate_detectors({2.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(validate_detectors({1.0, -1.0}), ConfigError);
  CHECK_THROWS_AS(validate_detectors({0.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(validate_detectors({1.0, 2.0, -0.1}), ConfigError);

  SystemParams p;
  p.gamma = 2.0;
  DetectorConfig c{-1.0, 3.0, 0.25};
  const auto [t1, t2] = detection_times(c, p);
  CHECK(t1 == doctest::Approx(1.5));
  CHECK(t2 == doctest::Approx(3.75));
  c.x1 = 1.0;
  const auto [u1, u2] = detection_times(c, p);
  CHECK(u1 == doctest::Approx(1.0));
  CHECK(u2 == doctest::Approx(3.25));
}

TEST_CASE("resonant g2 closed forms") {
  const SystemParams p;
  for (int i = 0; i <= 60; ++i) {
    const double dT = 0.1 * i;
    const auto pp = g2({1.0, 2.0, dT}, 50.0, p);
    CHECK(std::abs(pp.full - 4.0 * std::exp(-2.0 * dT)) <= 1e-12);
    CHECK(std::abs(pp.path1 + pp.path2 - 2.0 * std::exp(-2.0 * dT)) <= 1e-12);
    const auto pm = g2({1.0, -2.0, dT}, 50.0, p);
    CHECK(std::abs(pm.full - std::pow(1.0 - 2.0 * std::exp(-dT), 2)) <= 1e-12);
  }
}

TEST_CASE("g2 decomposition invariants") {
  SystemParams p;
  p.lambda_rabi = 0.25;
  for (auto geom : {DetectorConfig{1.0, 2.0}, DetectorConfig{-1.0, -2.0},
                    DetectorConfig{1.0, -2.0}, DetectorConfig{-1.0, 2.0}}) {
    for (double w0 : {47.0, 49.5, 50.0, 50.5, 53.0}) {
      for (double dT : {0.0, 0.3, 1.0, 4.0}) {
        geom.delta_T = dT;
        const auto d = g2(geom, w0, p);
        CHECK(std::abs(d.full - (d.path1 + d.path2 + d.interference)) <= 1e-10);
        CHECK(d.full >= 0.0);
        CHECK(d.path1 >= 0.0);
        CHECK(d.path2 >= 0.0);
        CHECK(std::abs(d.interference) <= 2.0 * std::sqrt(d.path1 * d.path2) + 1e-14);
      }
    }
  }
}

TEST_CASE("off-resonant interference dies out") {
  const SystemParams p;
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.05 * i);
  const auto sweep = g2_sweep({1.0, 2.0}, grid, 51.0, p);
  double peak = 0.0;
  for (const auto& d : sweep) peak = std::max(peak, std::abs(d.interference));
  CHECK(std::abs(sweep.back().interference) < 1e-6 * peak);
}

TEST_CASE("g2 sweep") {
  const SystemParams p;
  const std::vector<double> zero{0.0};
  const auto single = g2_sweep({1.0, 2.0}, zero, 50.0, p);
  REQUIRE(single.size() == 1);
  CHECK(single[0].full == doctest::Approx(4.0));
  CHECK(g2_sweep({1.0, 2.0}, {}, 50.0, p).empty());

  std::vector<double> grid;
  for (int i = 0; i < 400; ++i) grid.push_back(6.0 * i / 399.0);
  const auto curve = g2_sweep({1.0, 2.0}, grid, 50.0, p);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].full < curve[i - 1].full);

  const std::vector<double> bad{0.0, 1.0, 0.5};
  CHECK_THROWS_AS(g2_sweep({1.0, 2.0}, bad, 50.0, p), ConfigError);
}

TEST_CASE("first-click offset only for x1 < 0") {
  SystemParams p;
  p.gamma = 0.5;
  CHECK(g2({-1.0, -2.0}, 50.0, p).delta_t1 == doctest::Approx(2.0));
  CHECK(g2({1.0, 2.0}, 50.0, p).delta_t1 == 0.0);
  DetectorConfig c{-1.0, 2.0};
  c.delta_t1 = 0.7;
  CHECK(g2(c, 50.0, p).delta_t1 == doctest::Approx(0.7));
}
