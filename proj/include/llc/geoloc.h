#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "llc/core.h"

namespace llc {

enum class geo_err { insufficient_survey, unknown_beam, empty_path, bad_input };

class geo_error : public std::runtime_error {
public:
  geo_error(geo_err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  geo_err code() const { return code_; }

private:
  geo_err code_;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

// Local planar frame centered at the BS: x east, y north, meters.
struct GeoPoint {
  double x = 0.0;
  double y = 0.0;
};

GeoPoint project(const LatLon& p, const LatLon& origin);
LatLon unproject(const GeoPoint& p, const LatLon& origin);

double distance(const GeoPoint& a, const GeoPoint& b);

// Distance covered by one timing-advance increment at the given numerology.
double ta_step_m(int mu);

struct TimingAdvance {
  int ta = 0;  // 0..3846
  int mu = 3;
};

struct DistanceRange {
  double d_lo = 0.0;
  double d_hi = 0.0;
};

DistanceRange ta_to_distance_range(const TimingAdvance& ta);

struct SurveyPoint {
  double lat = 0.0;
  double lon = 0.0;
  int beam_idx = 0;
  double rsrp_dbm = 0.0;
  int ta = 0;
};

struct BeamArea {
  int beam_idx = 0;
  std::vector<GeoPoint> polygon;  // convex hull, counter-clockwise
  GeoPoint centroid;
  GeoPoint bisector;  // unit direction of the ray from the BS through the centroid
  std::map<int, int> ta_histogram;
  int point_count = 0;
};

struct FingerprintParams {
  double gap_threshold_m = 30.0;      // spatial gap splitting a beam into areas
  double adjacency_distance_m = 5.0;  // hull distance below which areas are adjacent
  int min_points_per_area = 3;
  int mu = 3;
};

struct FingerprintMap {
  LatLon bs_location;
  FingerprintParams params;
  std::vector<BeamArea> areas;
  std::set<std::pair<int, int>> adjacency;  // area-index pairs, first < second

  bool adjacent(int a, int b) const;
  std::vector<int> areas_of_beam(int beam_idx) const;
};

FingerprintMap build_fingerprint(std::vector<SurveyPoint> survey, const LatLon& bs_latlon,
                                 const FingerprintParams& params = {});

struct LocalizeEstimate {
  GeoPoint point;
  int area_index = -1;
  bool clamped = false;  // annulus fell beyond the surveyed extent of the area
};

LocalizeEstimate localize_ssb_ra(int beam_idx, const TimingAdvance& ta, const FingerprintMap& map);

struct CsiSample {
  double t_ms = 0.0;
  Rnti rnti;
  int beam_idx = 0;
  double rsrp_dbm = 0.0;
};

struct TrackerParams {
  std::optional<double> rsrp_base_dbm;  // default: median of the first 10 reports
  double p_thres_db = 15.0;
  int c_thres = 3;
  bool strict_literal = true;  // count resets only when a point is appended
  double interpolation_step_m = 1.0;
};

// Run-length beam filtering over power-filtered CSI reports, appending the
// centroid of each sufficiently stable, map-contiguous beam run, then linear
// interpolation along the appended centroids.
std::vector<GeoPoint> beam_to_path(const std::vector<CsiSample>& reports,
                                   const TrackerParams& params, const FingerprintMap& map);

// Directed Hausdorff distance from the estimate points to the ground-truth
// polyline.
double path_max_deviation(const std::vector<GeoPoint>& estimate,
                          const std::vector<GeoPoint>& ground_truth);

class Ecdf {
public:
  explicit Ecdf(std::vector<double> values);

  double operator()(double threshold) const;
  const std::vector<double>& sorted_values() const { return values_; }

private:
  std::vector<double> values_;
};

// Geometry helpers shared with tests.
std::vector<GeoPoint> convex_hull(std::vector<GeoPoint> pts);
GeoPoint polygon_centroid(const std::vector<GeoPoint>& poly);
double point_segment_distance(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b);
double hull_distance(const std::vector<GeoPoint>& a, const std::vector<GeoPoint>& b);
bool point_in_convex_polygon(const GeoPoint& p, const std::vector<GeoPoint>& poly);

}  // namespace llc
