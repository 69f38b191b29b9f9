#include <cmath>

#include "doctest.h"
#include "llc/geoloc.h"
#include "support/synthetic.h"

using namespace llc;
using namespace llc::testsupport;

namespace {

// Small hand-built map: three sector areas side by side in a band, plus a
// far detached area for beam 0 (a reflection).
FingerprintMap tiny_map(bool with_far_area = false)
{
  WedgeSpec spec;
  spec.n_beams = 3;
  spec.total_deg = 7.5;
  spec.start_deg = -3.75;
  spec.r_min = 140.0;
  spec.r_max = 160.0;
  spec.radial_steps = 4;
  spec.angular_steps = 3;
  std::vector<SurveyPoint> survey = make_wedge_survey(spec);
  if (with_far_area) {
    // A second cluster of beam 0 much farther out.
    const LatLon bs = wedge_bs();
    for (int i = 0; i < 4; ++i) {
      const GeoPoint p = polar(320.0 + 4.0 * i, beam_azimuth_rad(spec, 0));
      const LatLon ll = unproject(p, bs);
      survey.push_back({ll.lat, ll.lon, 0, -95.0, ta_from_distance(320.0 + 4.0 * i, 3)});
    }
  }
  FingerprintParams params;
  params.gap_threshold_m = 30.0;
  params.adjacency_distance_m = 5.0;
  params.mu = 3;
  return build_fingerprint(survey, wedge_bs(), params);
}

CsiSample sample(int beam, double rsrp = -90.0)
{
  CsiSample s;
  s.rnti = Rnti{0x46};
  s.beam_idx = beam;
  s.rsrp_dbm = rsrp;
  return s;
}

}  // namespace

TEST_CASE("ta step matches the physical-constant formula")
{
  // c * 16 * 64 * T_c / 2^mu / 2 with T_c = 1/(480000*4096) s.
  const double oracle_mu3 = 299792458.0 * 1024.0 / (480000.0 * 4096.0) / 8.0 / 2.0;
  CHECK(ta_step_m(3) == doctest::Approx(oracle_mu3));
  CHECK(ta_step_m(3) == doctest::Approx(9.77).epsilon(0.002));
  CHECK(ta_step_m(0) == doctest::Approx(8.0 * ta_step_m(3)));
}

TEST_CASE("ta_to_distance_range")
{
  const DistanceRange one = ta_to_distance_range({1, 3});
  CHECK(one.d_lo == doctest::Approx(0.0));
  CHECK(one.d_hi == doctest::Approx(9.77).epsilon(0.002));

  const DistanceRange zero = ta_to_distance_range({0, 3});
  CHECK(zero.d_lo == 0.0);
  CHECK(zero.d_hi == 0.0);

  const DistanceRange four = ta_to_distance_range({4, 3});
  CHECK(four.d_lo == doctest::Approx(29.31).epsilon(0.002));
  CHECK(four.d_hi == doctest::Approx(39.08).epsilon(0.002));

  CHECK_THROWS_AS(ta_to_distance_range({4000, 3}), geo_error);
}

TEST_CASE("ta ranges tile the half line")
{
  for (int mu : {0, 3}) {
    for (int ta = 1; ta < 200; ++ta) {
      const DistanceRange a = ta_to_distance_range({ta, mu});
      const DistanceRange b = ta_to_distance_range({ta + 1, mu});
      CHECK(a.d_hi == doctest::Approx(b.d_lo));
    }
  }
}

TEST_CASE("projection round-trip stays sub-centimeter inside a cell")
{
  const LatLon bs = wedge_bs();
  for (double r : {50.0, 200.0, 800.0}) {
    for (double az = 0.0; az < 6.28; az += 0.7) {
      const GeoPoint p = polar(r, az);
      const GeoPoint back = project(unproject(p, bs), bs);
      CHECK(distance(p, back) < 0.01);
    }
  }
}

TEST_CASE("convex hull and centroid basics")
{
  std::vector<GeoPoint> square = {{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {0.5, 0.5}};
  const auto hull = convex_hull(square);
  CHECK(hull.size() == 4);
  const GeoPoint c = polygon_centroid(hull);
  CHECK(c.x == doctest::Approx(1.0));
  CHECK(c.y == doctest::Approx(1.0));
}

TEST_CASE("bisector of a symmetric survey is the axis of symmetry")
{
  std::vector<SurveyPoint> survey;
  const LatLon bs = wedge_bs();
  for (int i = 0; i < 10; ++i) {
    const double x = 100.0 + 5.0 * i;
    for (double y : {-8.0, 0.0, 8.0}) {
      const LatLon ll = unproject({x, y}, bs);
      survey.push_back({ll.lat, ll.lon, 4, -85.0, ta_from_distance(std::hypot(x, y), 3)});
    }
  }
  const FingerprintMap map = build_fingerprint(survey, bs);
  REQUIRE(map.areas.size() == 1);
  CHECK(map.areas[0].bisector.x == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(map.areas[0].bisector.y == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("one beam with two distant clusters becomes two areas")
{
  const FingerprintMap map = tiny_map(true);
  CHECK(map.areas_of_beam(0).size() == 2);
  CHECK(map.areas_of_beam(1).size() == 1);
}

TEST_CASE("synthetic 48-beam wedge builds one area per beam with chain adjacency")
{
  WedgeSpec spec;
  const FingerprintMap map = build_fingerprint(make_wedge_survey(spec), wedge_bs(),
                                               FingerprintParams{30.0, 5.0, 3, 3});
  CHECK(map.areas.size() == 48);
  for (int b = 0; b < 48; ++b) {
    CHECK(map.areas_of_beam(b).size() == 1);
  }
  // Neighbouring sectors share an edge.
  for (int b = 0; b + 1 < 48; ++b) {
    const int a0 = map.areas_of_beam(b)[0];
    const int a1 = map.areas_of_beam(b + 1)[0];
    CHECK(map.adjacent(a0, a1));
  }
  // Far-apart sectors are not adjacent.
  CHECK(!map.adjacent(map.areas_of_beam(0)[0], map.areas_of_beam(10)[0]));
}

TEST_CASE("adjacency is symmetric and irreflexive")
{
  const FingerprintMap map = tiny_map();
  for (const auto& [a, b] : map.adjacency) {
    CHECK(a < b);
    CHECK(map.adjacent(a, b));
    CHECK(map.adjacent(b, a));
  }
  for (size_t i = 0; i < map.areas.size(); ++i) {
    CHECK(!map.adjacent(static_cast<int>(i), static_cast<int>(i)));
  }
}

TEST_CASE("insufficient survey is rejected")
{
  CHECK_THROWS_AS(build_fingerprint({}, wedge_bs()), geo_error);
  std::vector<SurveyPoint> two = {{42.3401, -71.09, 0, -80.0, 3},
                                  {42.3402, -71.09, 0, -80.0, 3}};
  CHECK_THROWS_AS(build_fingerprint(two, wedge_bs()), geo_error);
}

TEST_CASE("localization returns the annulus midpoint on the bisector")
{
  // One beam straight along +x.
  std::vector<SurveyPoint> survey;
  const LatLon bs = wedge_bs();
  for (int i = 0; i < 40; ++i) {
    const double x = 5.0 + 1.0 * i;
    for (double y : {-2.0, 0.0, 2.0}) {
      const LatLon ll = unproject({x, y}, bs);
      survey.push_back({ll.lat, ll.lon, 7, -85.0, ta_from_distance(std::hypot(x, y), 3)});
    }
  }
  const FingerprintMap map = build_fingerprint(survey, bs);

  const LocalizeEstimate est = localize_ssb_ra(7, {2, 3}, map);
  CHECK(est.point.x == doctest::Approx(14.655).epsilon(0.002));
  CHECK(est.point.y == doctest::Approx(0.0).epsilon(0.01));
  CHECK(!est.clamped);

  const LocalizeEstimate origin = localize_ssb_ra(7, {0, 3}, map);
  CHECK(origin.point.x == doctest::Approx(0.0));
  CHECK(origin.point.y == doctest::Approx(0.0));

  CHECK_THROWS_AS(localize_ssb_ra(9, {2, 3}, map), geo_error);

  // Beyond the surveyed extent the estimate clamps to the far edge.
  const LocalizeEstimate far = localize_ssb_ra(7, {30, 3}, map);
  CHECK(far.clamped);
  CHECK(std::hypot(far.point.x, far.point.y) <= 45.0);
}

TEST_CASE("multi-area beams select by ta histogram likelihood")
{
  const FingerprintMap map = tiny_map(true);
  // Near band sits at 140..160 m (TA 15..17); far cluster at 320..332 m
  // (TA 33..35).
  const int near_ta = ta_from_distance(150.0, 3);
  const int far_ta = ta_from_distance(326.0, 3);

  const LocalizeEstimate near_est = localize_ssb_ra(0, {near_ta, 3}, map);
  CHECK(std::hypot(near_est.point.x, near_est.point.y) < 200.0);

  const LocalizeEstimate far_est = localize_ssb_ra(0, {far_ta, 3}, map);
  CHECK(std::hypot(far_est.point.x, far_est.point.y) > 300.0);
}

TEST_CASE("localize output stays on the bisector within the annulus")
{
  WedgeSpec spec;
  const FingerprintMap map = build_fingerprint(make_wedge_survey(spec), wedge_bs(),
                                               FingerprintParams{30.0, 5.0, 3, 3});
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    const int beam = static_cast<int>(rng.next_below(48));
    const int ta = 5 + static_cast<int>(rng.next_below(42));
    const LocalizeEstimate est = localize_ssb_ra(beam, {ta, 3}, map);
    const BeamArea& area = map.areas[static_cast<size_t>(est.area_index)];
    const double r = std::hypot(est.point.x, est.point.y);
    if (r > 1e-9) {
      const double dot = (est.point.x * area.bisector.x + est.point.y * area.bisector.y) / r;
      CHECK(dot == doctest::Approx(1.0).epsilon(1e-9));
    }
    const DistanceRange range = ta_to_distance_range({ta, 3});
    if (!est.clamped) {
      CHECK(r >= range.d_lo - 1e-9);
      CHECK(r <= range.d_hi + 1e-9);
    }
  }
}

TEST_CASE("beam_to_path single stable run gives a single centroid")
{
  const FingerprintMap map = tiny_map();
  std::vector<CsiSample> reports(100, sample(1));
  TrackerParams params;
  params.p_thres_db = 15.0;
  params.c_thres = 3;
  params.rsrp_base_dbm = -90.0;
  const auto path = beam_to_path(reports, params, map);
  REQUIRE(path.size() == 1);
  const GeoPoint c = map.areas[static_cast<size_t>(map.areas_of_beam(1)[0])].centroid;
  CHECK(path[0].x == doctest::Approx(c.x));
  CHECK(path[0].y == doctest::Approx(c.y));
}

TEST_CASE("beam_to_path flicker trace interpolates between two centroids")
{
  const FingerprintMap map = tiny_map();
  std::vector<CsiSample> reports;
  for (int i = 0; i < 10; ++i) reports.push_back(sample(0));
  for (int i = 0; i < 3; ++i) {
    reports.push_back(sample(0));
    reports.push_back(sample(1));
  }
  for (int i = 0; i < 10; ++i) reports.push_back(sample(1));
  TrackerParams params;
  params.c_thres = 3;
  params.rsrp_base_dbm = -90.0;
  const auto path = beam_to_path(reports, params, map);

  const GeoPoint c0 = map.areas[static_cast<size_t>(map.areas_of_beam(0)[0])].centroid;
  const GeoPoint c1 = map.areas[static_cast<size_t>(map.areas_of_beam(1)[0])].centroid;
  REQUIRE(path.size() >= 2);
  CHECK(path.front().x == doctest::Approx(c0.x));
  CHECK(path.front().y == doctest::Approx(c0.y));
  CHECK(path.back().x == doctest::Approx(c1.x));
  CHECK(path.back().y == doctest::Approx(c1.y));
  // 1 m interpolation spacing between consecutive points.
  for (size_t i = 1; i + 1 < path.size(); ++i) {
    CHECK(distance(path[i - 1], path[i]) == doctest::Approx(1.0).epsilon(0.01));
  }
  // The flicker itself never appends: every path point lies on the segment
  // between the two centroids.
  for (const GeoPoint& p : path) {
    CHECK(point_segment_distance(p, c0, c1) < 1e-6);
  }
}

TEST_CASE("beam_to_path is invariant to power-filtered outliers")
{
  const FingerprintMap map = tiny_map();
  std::vector<CsiSample> clean;
  for (int i = 0; i < 12; ++i) clean.push_back(sample(0));
  for (int i = 0; i < 12; ++i) clean.push_back(sample(1));
  TrackerParams params;
  params.c_thres = 3;
  params.p_thres_db = 15.0;
  params.rsrp_base_dbm = -90.0;
  const auto base_path = beam_to_path(clean, params, map);

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<CsiSample> noisy = clean;
    const size_t pos = rng.next_below(noisy.size() + 1);
    noisy.insert(noisy.begin() + static_cast<int64_t>(pos), sample(2, -90.0 - 30.0));
    const auto noisy_path = beam_to_path(noisy, params, map);
    REQUIRE(noisy_path.size() == base_path.size());
    for (size_t i = 0; i < base_path.size(); ++i) {
      CHECK(distance(noisy_path[i], base_path[i]) < 1e-9);
    }
  }
}

TEST_CASE("beam_to_path discards impossible transitions in strict mode")
{
  WedgeSpec spec;
  const FingerprintMap map = build_fingerprint(make_wedge_survey(spec), wedge_bs(),
                                               FingerprintParams{30.0, 5.0, 3, 3});
  std::vector<CsiSample> reports;
  for (int i = 0; i < 20; ++i) reports.push_back(sample(0));
  for (int i = 0; i < 20; ++i) reports.push_back(sample(10));  // not contiguous with 0
  TrackerParams params;
  params.c_thres = 3;
  params.rsrp_base_dbm = -90.0;
  const auto strict_path = beam_to_path(reports, params, map);
  const GeoPoint c0 = map.areas[static_cast<size_t>(map.areas_of_beam(0)[0])].centroid;
  REQUIRE(strict_path.size() == 1);
  CHECK(distance(strict_path[0], c0) < 1e-9);

  // The relaxed mode re-anchors on a long stable run.
  TrackerParams relaxed = params;
  relaxed.strict_literal = false;
  const auto relaxed_path = beam_to_path(reports, relaxed, map);
  const GeoPoint c10 = map.areas[static_cast<size_t>(map.areas_of_beam(10)[0])].centroid;
  CHECK(relaxed_path.size() > 1);
  CHECK(distance(relaxed_path.back(), c10) < 1e-9);
}

TEST_CASE("beam_to_path empty results raise")
{
  const FingerprintMap map = tiny_map();
  TrackerParams params;
  params.rsrp_base_dbm = -90.0;
  CHECK_THROWS_AS(beam_to_path({}, params, map), geo_error);

  // All reports power-filtered away.
  std::vector<CsiSample> faint(20, sample(0, -140.0));
  CHECK_THROWS_AS(beam_to_path(faint, params, map), geo_error);

  // Stable run below the run-length threshold.
  std::vector<CsiSample> short_run(3, sample(0));
  CHECK_THROWS_AS(beam_to_path(short_run, params, map), geo_error);
}

TEST_CASE("path deviation oracle values")
{
  const std::vector<GeoPoint> line = {{0, 0}, {10, 0}, {20, 0}};
  CHECK(path_max_deviation(line, line) == doctest::Approx(0.0));

  std::vector<GeoPoint> offset;
  for (const GeoPoint& p : line) {
    offset.push_back({p.x, p.y + 5.0});
  }
  CHECK(path_max_deviation(offset, line) == doctest::Approx(5.0));

  const std::vector<GeoPoint> point_on = {{7.5, 0.0}};
  CHECK(path_max_deviation(point_on, line) == doctest::Approx(0.0));
}

TEST_CASE("ecdf basics")
{
  Ecdf e({5.0, 15.0, 25.0});
  CHECK(e(20.0) == doctest::Approx(2.0 / 3.0));
  CHECK(e(4.9) == doctest::Approx(0.0));
  CHECK(e(25.0) == doctest::Approx(1.0));
  CHECK(e(100.0) == doctest::Approx(1.0));
  CHECK(e(5.0) == doctest::Approx(1.0 / 3.0));  // right-continuous at the atoms
}
