#include "llc/geoloc.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace llc {

namespace {

constexpr double kEarthRadiusM = 6371000.0;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
constexpr int kTaMax = 3846;
// Laplace smoothing support for the per-area TA likelihood.
constexpr double kTaSmoothingSupport = 4096.0;

double cross(const GeoPoint& o, const GeoPoint& a, const GeoPoint& b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double norm(const GeoPoint& p)
{
  return std::hypot(p.x, p.y);
}

}  // namespace

GeoPoint project(const LatLon& p, const LatLon& origin)
{
  const double coslat = std::cos(origin.lat * kDegToRad);
  GeoPoint out;
  out.x = (p.lon - origin.lon) * kDegToRad * kEarthRadiusM * coslat;
  out.y = (p.lat - origin.lat) * kDegToRad * kEarthRadiusM;
  return out;
}

LatLon unproject(const GeoPoint& p, const LatLon& origin)
{
  const double coslat = std::cos(origin.lat * kDegToRad);
  LatLon out;
  out.lon = origin.lon + p.x / (kEarthRadiusM * coslat) / kDegToRad;
  out.lat = origin.lat + p.y / kEarthRadiusM / kDegToRad;
  return out;
}

double distance(const GeoPoint& a, const GeoPoint& b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

double ta_step_m(int mu)
{
  // c * 16 * 64 * T_c / 2^mu / 2, with T_c = 1 / (480000 * 4096) s.
  constexpr double c = 299792458.0;
  constexpr double t_c = 1.0 / (480000.0 * 4096.0);
  return c * 16.0 * 64.0 * t_c / static_cast<double>(1 << mu) / 2.0;
}

DistanceRange ta_to_distance_range(const TimingAdvance& ta)
{
  if (ta.ta < 0 || ta.ta > kTaMax) {
    throw geo_error(geo_err::bad_input, "ta_to_distance_range: TA out of range");
  }
  const double step = ta_step_m(ta.mu);
  DistanceRange r;
  r.d_hi = step * ta.ta;
  r.d_lo = step * std::max(ta.ta - 1, 0);
  return r;
}

std::vector<GeoPoint> convex_hull(std::vector<GeoPoint> pts)
{
  std::sort(pts.begin(), pts.end(), [](const GeoPoint& a, const GeoPoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const GeoPoint& a, const GeoPoint& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const size_t n = pts.size();
  if (n < 3) {
    return pts;
  }
  std::vector<GeoPoint> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  for (size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

GeoPoint polygon_centroid(const std::vector<GeoPoint>& poly)
{
  if (poly.empty()) {
    throw geo_error(geo_err::bad_input, "polygon_centroid: empty polygon");
  }
  double area2 = 0.0, cx = 0.0, cy = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const GeoPoint& a = poly[i];
    const GeoPoint& b = poly[(i + 1) % poly.size()];
    const double w = a.x * b.y - b.x * a.y;
    area2 += w;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  if (std::abs(area2) < 1e-12) {
    // Degenerate polygon: fall back to the vertex mean.
    GeoPoint mean{0.0, 0.0};
    for (const GeoPoint& p : poly) {
      mean.x += p.x;
      mean.y += p.y;
    }
    mean.x /= static_cast<double>(poly.size());
    mean.y /= static_cast<double>(poly.size());
    return mean;
  }
  return {cx / (3.0 * area2), cy / (3.0 * area2)};
}

double point_segment_distance(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b)
{
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  if (len2 < 1e-18) {
    return distance(p, a);
  }
  double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

bool point_in_convex_polygon(const GeoPoint& p, const std::vector<GeoPoint>& poly)
{
  if (poly.size() < 3) {
    return false;
  }
  for (size_t i = 0; i < poly.size(); ++i) {
    if (cross(poly[i], poly[(i + 1) % poly.size()], p) < -1e-9) {
      return false;
    }
  }
  return true;
}

double hull_distance(const std::vector<GeoPoint>& a, const std::vector<GeoPoint>& b)
{
  for (const GeoPoint& p : a) {
    if (point_in_convex_polygon(p, b)) {
      return 0.0;
    }
  }
  for (const GeoPoint& p : b) {
    if (point_in_convex_polygon(p, a)) {
      return 0.0;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < a.size(); ++i) {
    const GeoPoint& a0 = a[i];
    const GeoPoint& a1 = a[(i + 1) % a.size()];
    for (size_t j = 0; j < b.size(); ++j) {
      const GeoPoint& b0 = b[j];
      const GeoPoint& b1 = b[(j + 1) % b.size()];
      best = std::min(best, point_segment_distance(a0, b0, b1));
      best = std::min(best, point_segment_distance(a1, b0, b1));
      best = std::min(best, point_segment_distance(b0, a0, a1));
      best = std::min(best, point_segment_distance(b1, a0, a1));
    }
  }
  return best;
}

bool FingerprintMap::adjacent(int a, int b) const
{
  if (a == b) {
    return false;
  }
  return adjacency.count({std::min(a, b), std::max(a, b)}) > 0;
}

std::vector<int> FingerprintMap::areas_of_beam(int beam_idx) const
{
  std::vector<int> out;
  for (size_t i = 0; i < areas.size(); ++i) {
    if (areas[i].beam_idx == beam_idx) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

FingerprintMap build_fingerprint(std::vector<SurveyPoint> survey, const LatLon& bs_latlon,
                                 const FingerprintParams& params)
{
  if (survey.empty()) {
    throw geo_error(geo_err::insufficient_survey, "build_fingerprint: empty survey");
  }
  // Deterministic output independent of input row order.
  std::sort(survey.begin(), survey.end(), [](const SurveyPoint& a, const SurveyPoint& b) {
    if (a.lat != b.lat) return a.lat < b.lat;
    if (a.lon != b.lon) return a.lon < b.lon;
    return a.beam_idx < b.beam_idx;
  });

  FingerprintMap map;
  map.bs_location = bs_latlon;
  map.params = params;

  std::map<int, std::vector<size_t>> by_beam;
  std::vector<GeoPoint> local(survey.size());
  for (size_t i = 0; i < survey.size(); ++i) {
    local[i] = project({survey[i].lat, survey[i].lon}, bs_latlon);
    by_beam[survey[i].beam_idx].push_back(i);
  }

  for (const auto& [beam, idxs] : by_beam) {
    // Single-linkage clustering: points closer than the gap threshold share
    // an area.
    std::vector<int> parent(idxs.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    for (size_t i = 0; i < idxs.size(); ++i) {
      for (size_t j = i + 1; j < idxs.size(); ++j) {
        if (distance(local[idxs[i]], local[idxs[j]]) <= params.gap_threshold_m) {
          parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
        }
      }
    }
    std::map<int, std::vector<size_t>> clusters;
    for (size_t i = 0; i < idxs.size(); ++i) {
      clusters[find(static_cast<int>(i))].push_back(idxs[i]);
    }
    for (const auto& [root, members] : clusters) {
      if (static_cast<int>(members.size()) < params.min_points_per_area) {
        continue;
      }
      std::vector<GeoPoint> pts;
      pts.reserve(members.size());
      BeamArea area;
      area.beam_idx = beam;
      for (size_t m : members) {
        pts.push_back(local[m]);
        area.ta_histogram[survey[m].ta] += 1;
      }
      area.polygon = convex_hull(pts);
      if (area.polygon.size() < 3) {
        continue;
      }
      area.centroid = polygon_centroid(area.polygon);
      const double r = norm(area.centroid);
      if (r < 1e-9) {
        continue;  // centroid on top of the BS gives no bearing
      }
      area.bisector = {area.centroid.x / r, area.centroid.y / r};
      area.point_count = static_cast<int>(members.size());
      map.areas.push_back(std::move(area));
    }
  }

  if (map.areas.empty()) {
    throw geo_error(geo_err::insufficient_survey, "build_fingerprint: no area kept");
  }

  for (size_t i = 0; i < map.areas.size(); ++i) {
    for (size_t j = i + 1; j < map.areas.size(); ++j) {
      if (hull_distance(map.areas[i].polygon, map.areas[j].polygon) <=
          params.adjacency_distance_m) {
        map.adjacency.insert({static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  return map;
}

namespace {

double radial_min(const BeamArea& a)
{
  double r = std::numeric_limits<double>::infinity();
  for (const GeoPoint& p : a.polygon) {
    r = std::min(r, norm(p));
  }
  return r;
}

double radial_max(const BeamArea& a)
{
  double r = 0.0;
  for (const GeoPoint& p : a.polygon) {
    r = std::max(r, norm(p));
  }
  return r;
}

}  // namespace

LocalizeEstimate localize_ssb_ra(int beam_idx, const TimingAdvance& ta, const FingerprintMap& map)
{
  const std::vector<int> owners = map.areas_of_beam(beam_idx);
  if (owners.empty()) {
    throw geo_error(geo_err::unknown_beam, "localize_ssb_ra: beam not in map");
  }
  const DistanceRange range = ta_to_distance_range(ta);
  const double mid = (range.d_lo + range.d_hi) / 2.0;

  // Likelihood of the observed TA under each candidate area's fingerprinted
  // TA distribution, Laplace-smoothed.
  int best = owners.front();
  double best_score = -1.0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int idx : owners) {
    const BeamArea& a = map.areas[static_cast<size_t>(idx)];
    const auto it = a.ta_histogram.find(ta.ta);
    const double count = it == a.ta_histogram.end() ? 0.0 : static_cast<double>(it->second);
    const double score = (count + 1.0) / (static_cast<double>(a.point_count) + kTaSmoothingSupport);
    const double d = std::abs(norm(a.centroid) - mid);
    if (score > best_score || (score == best_score && d < best_dist)) {
      best = idx;
      best_score = score;
      best_dist = d;
    }
  }

  const BeamArea& area = map.areas[static_cast<size_t>(best)];
  LocalizeEstimate est;
  est.area_index = best;
  double d = mid;
  const double far = radial_max(area);
  if (range.d_lo > far) {
    d = far;
    est.clamped = true;
  }
  est.point = {area.bisector.x * d, area.bisector.y * d};
  return est;
}

namespace {

std::vector<GeoPoint> interpolate_path(const std::vector<GeoPoint>& pts, double step)
{
  std::vector<GeoPoint> out;
  if (pts.empty()) {
    return out;
  }
  out.push_back(pts.front());
  for (size_t i = 1; i < pts.size(); ++i) {
    const GeoPoint& a = pts[i - 1];
    const GeoPoint& b = pts[i];
    const double len = distance(a, b);
    const int n = static_cast<int>(std::floor(len / step));
    for (int k = 1; k <= n; ++k) {
      const double t = (k * step) / len;
      out.push_back({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
    }
    if (distance(out.back(), b) > 1e-9) {
      out.push_back(b);
    }
  }
  return out;
}

}  // namespace

std::vector<GeoPoint> beam_to_path(const std::vector<CsiSample>& reports,
                                   const TrackerParams& params, const FingerprintMap& map)
{
  if (params.c_thres < 1 || params.p_thres_db <= 0.0) {
    throw geo_error(geo_err::bad_input, "beam_to_path: invalid tracker parameters");
  }

  double base;
  if (params.rsrp_base_dbm) {
    base = *params.rsrp_base_dbm;
  } else {
    std::vector<double> head;
    for (size_t i = 0; i < reports.size() && i < 10; ++i) {
      head.push_back(reports[i].rsrp_dbm);
    }
    if (head.empty()) {
      throw geo_error(geo_err::empty_path, "beam_to_path: no reports");
    }
    std::sort(head.begin(), head.end());
    base = head[head.size() / 2];
  }

  // Power filtering: outlier reports are dropped before run-length counting.
  std::vector<const CsiSample*> kept;
  for (const CsiSample& r : reports) {
    if (std::abs(r.rsrp_dbm - base) <= params.p_thres_db) {
      kept.push_back(&r);
    }
  }
  if (kept.empty()) {
    throw geo_error(geo_err::empty_path, "beam_to_path: all reports power-filtered");
  }

  std::vector<int> path_areas;
  std::vector<GeoPoint> anchors;
  int count = 0;

  auto try_append = [&](int beam) {
    if (count <= params.c_thres) {
      if (!params.strict_literal) {
        count = 0;
      }
      return;
    }
    const std::vector<int> owners = map.areas_of_beam(beam);
    if (owners.empty()) {
      if (!params.strict_literal) {
        count = 0;
      }
      return;
    }
    int chosen = -1;
    if (path_areas.empty()) {
      // First anchor: the beam's dominant area.
      int best_points = -1;
      for (int idx : owners) {
        if (map.areas[static_cast<size_t>(idx)].point_count > best_points) {
          best_points = map.areas[static_cast<size_t>(idx)].point_count;
          chosen = idx;
        }
      }
    } else {
      const int last = path_areas.back();
      double best_d = std::numeric_limits<double>::infinity();
      for (int idx : owners) {
        if (!map.adjacent(idx, last)) {
          continue;
        }
        const double d = distance(map.areas[static_cast<size_t>(idx)].centroid,
                                  map.areas[static_cast<size_t>(last)].centroid);
        if (d < best_d) {
          best_d = d;
          chosen = idx;
        }
      }
      if (chosen < 0 && !params.strict_literal && count > 3 * params.c_thres) {
        // Re-anchor on a long stable run even without contiguity.
        int best_points = -1;
        for (int idx : owners) {
          if (map.areas[static_cast<size_t>(idx)].point_count > best_points) {
            best_points = map.areas[static_cast<size_t>(idx)].point_count;
            chosen = idx;
          }
        }
      }
    }
    if (chosen >= 0) {
      path_areas.push_back(chosen);
      anchors.push_back(map.areas[static_cast<size_t>(chosen)].centroid);
      count = 0;
    } else if (!params.strict_literal) {
      count = 0;
    }
  };

  for (size_t i = 0; i + 1 < kept.size(); ++i) {
    if (kept[i]->beam_idx == kept[i + 1]->beam_idx) {
      ++count;
    } else {
      try_append(kept[i]->beam_idx);
    }
  }
  try_append(kept.back()->beam_idx);  // final run flush

  if (anchors.empty()) {
    throw geo_error(geo_err::empty_path, "beam_to_path: no beam run survived filtering");
  }
  return interpolate_path(anchors, params.interpolation_step_m);
}

double path_max_deviation(const std::vector<GeoPoint>& estimate,
                          const std::vector<GeoPoint>& ground_truth)
{
  if (estimate.empty() || ground_truth.empty()) {
    throw geo_error(geo_err::bad_input, "path_max_deviation: empty path");
  }
  double worst = 0.0;
  for (const GeoPoint& p : estimate) {
    double best = std::numeric_limits<double>::infinity();
    if (ground_truth.size() == 1) {
      best = distance(p, ground_truth.front());
    } else {
      for (size_t i = 0; i + 1 < ground_truth.size(); ++i) {
        best = std::min(best, point_segment_distance(p, ground_truth[i], ground_truth[i + 1]));
      }
    }
    worst = std::max(worst, best);
  }
  return worst;
}

Ecdf::Ecdf(std::vector<double> values) : values_(std::move(values))
{
  if (values_.empty()) {
    throw geo_error(geo_err::bad_input, "Ecdf: empty sample");
  }
  std::sort(values_.begin(), values_.end());
}

double Ecdf::operator()(double threshold) const
{
  const auto it = std::upper_bound(values_.begin(), values_.end(), threshold);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

}  // namespace llc
