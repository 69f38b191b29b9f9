#include "llc/geoloc_io.h"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace llc {

namespace {

using nlohmann::json;

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::string& expected_header)
{
  std::ifstream in(path);
  if (!in) {
    throw io_error("cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw schema_error(path + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != expected_header) {
    throw schema_error(path + ": expected header `" + expected_header + "`, got `" + line + "`");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

double to_double(const std::string& s, const std::string& path)
{
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception&) {
    throw schema_error(path + ": bad numeric field `" + s + "`");
  }
}

int to_int(const std::string& s, const std::string& path)
{
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception&) {
    throw schema_error(path + ": bad integer field `" + s + "`");
  }
}

}  // namespace

std::vector<SurveyPoint> load_survey_csv(const std::string& path)
{
  std::vector<SurveyPoint> out;
  for (const auto& row : read_csv(path, "lat,lon,beam_idx,rsrp_dbm,ta")) {
    if (row.size() != 5) {
      throw schema_error(path + ": expected 5 fields per row");
    }
    SurveyPoint p;
    p.lat = to_double(row[0], path);
    p.lon = to_double(row[1], path);
    p.beam_idx = to_int(row[2], path);
    p.rsrp_dbm = to_double(row[3], path);
    p.ta = to_int(row[4], path);
    out.push_back(p);
  }
  return out;
}

std::vector<CsiSample> load_csi_csv(const std::string& path)
{
  std::vector<CsiSample> out;
  for (const auto& row : read_csv(path, "t_ms,rnti,beam_idx,rsrp_dbm")) {
    if (row.size() != 4) {
      throw schema_error(path + ": expected 4 fields per row");
    }
    CsiSample s;
    s.t_ms = to_double(row[0], path);
    s.rnti = Rnti{static_cast<uint16_t>(to_int(row[1], path))};
    s.beam_idx = to_int(row[2], path);
    s.rsrp_dbm = to_double(row[3], path);
    out.push_back(s);
  }
  return out;
}

std::vector<RaLogEntry> load_ra_csv(const std::string& path)
{
  std::vector<RaLogEntry> out;
  for (const auto& row : read_csv(path, "t_ms,beam_idx,ta")) {
    if (row.size() != 3) {
      throw schema_error(path + ": expected 3 fields per row");
    }
    RaLogEntry e;
    e.t_ms = to_double(row[0], path);
    e.beam_idx = to_int(row[1], path);
    e.ta = to_int(row[2], path);
    out.push_back(e);
  }
  return out;
}

std::vector<LatLon> load_latlon_csv(const std::string& path)
{
  std::vector<LatLon> out;
  for (const auto& row : read_csv(path, "lat,lon")) {
    if (row.size() != 2) {
      throw schema_error(path + ": expected 2 fields per row");
    }
    out.push_back({to_double(row[0], path), to_double(row[1], path)});
  }
  return out;
}

void save_fingerprint_json(const FingerprintMap& map, const std::string& path)
{
  json j;
  j["bs"] = {{"lat", map.bs_location.lat}, {"lon", map.bs_location.lon}};
  j["params"] = {{"gap_threshold_m", map.params.gap_threshold_m},
                 {"adjacency_distance_m", map.params.adjacency_distance_m},
                 {"min_points_per_area", map.params.min_points_per_area},
                 {"mu", map.params.mu}};
  j["areas"] = json::array();
  for (const BeamArea& a : map.areas) {
    json ja;
    ja["beam_idx"] = a.beam_idx;
    ja["polygon"] = json::array();
    for (const GeoPoint& p : a.polygon) {
      ja["polygon"].push_back({p.x, p.y});
    }
    ja["centroid"] = {a.centroid.x, a.centroid.y};
    ja["bisector"] = {a.bisector.x, a.bisector.y};
    json hist = json::object();
    for (const auto& [ta, count] : a.ta_histogram) {
      hist[std::to_string(ta)] = count;
    }
    ja["ta_histogram"] = hist;
    ja["point_count"] = a.point_count;
    j["areas"].push_back(ja);
  }
  j["adjacency"] = json::array();
  for (const auto& [a, b] : map.adjacency) {
    j["adjacency"].push_back({a, b});
  }
  std::ofstream out(path);
  if (!out) {
    throw io_error("cannot write " + path);
  }
  out << j.dump(2) << "\n";
}

FingerprintMap load_fingerprint_json(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw io_error("cannot open " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw schema_error(path + ": " + e.what());
  }
  try {
    FingerprintMap map;
    map.bs_location = {j.at("bs").at("lat").get<double>(), j.at("bs").at("lon").get<double>()};
    const json& p = j.at("params");
    map.params.gap_threshold_m = p.at("gap_threshold_m").get<double>();
    map.params.adjacency_distance_m = p.at("adjacency_distance_m").get<double>();
    map.params.min_points_per_area = p.at("min_points_per_area").get<int>();
    map.params.mu = p.at("mu").get<int>();
    for (const json& ja : j.at("areas")) {
      BeamArea a;
      a.beam_idx = ja.at("beam_idx").get<int>();
      for (const json& jp : ja.at("polygon")) {
        a.polygon.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
      }
      a.centroid = {ja.at("centroid").at(0).get<double>(), ja.at("centroid").at(1).get<double>()};
      a.bisector = {ja.at("bisector").at(0).get<double>(), ja.at("bisector").at(1).get<double>()};
      for (const auto& [key, value] : ja.at("ta_histogram").items()) {
        a.ta_histogram[std::stoi(key)] = value.get<int>();
      }
      a.point_count = ja.at("point_count").get<int>();
      map.areas.push_back(std::move(a));
    }
    for (const json& jp : j.at("adjacency")) {
      map.adjacency.insert({jp.at(0).get<int>(), jp.at(1).get<int>()});
    }
    return map;
  } catch (const json::exception& e) {
    throw schema_error(path + ": " + e.what());
  }
}

void save_path_geojson(const std::vector<GeoPoint>& path, const LatLon& origin,
                       const std::string& out_path)
{
  json coords = json::array();
  for (const GeoPoint& p : path) {
    const LatLon ll = unproject(p, origin);
    coords.push_back({ll.lon, ll.lat});
  }
  json j = {{"type", "Feature"},
            {"properties", json::object()},
            {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}};
  std::ofstream out(out_path);
  if (!out) {
    throw io_error("cannot write " + out_path);
  }
  out << j.dump(2) << "\n";
}

void save_path_csv(const std::vector<GeoPoint>& path, const LatLon& origin,
                   const std::string& out_path)
{
  std::ofstream out(out_path);
  if (!out) {
    throw io_error("cannot write " + out_path);
  }
  out << "lat,lon,x_m,y_m\n";
  out.precision(10);
  for (const GeoPoint& p : path) {
    const LatLon ll = unproject(p, origin);
    out << ll.lat << "," << ll.lon << "," << p.x << "," << p.y << "\n";
  }
}

void save_ecdf_csv(const Ecdf& ecdf, const std::vector<double>& thresholds,
                   const std::string& out_path)
{
  std::ofstream out(out_path);
  if (!out) {
    throw io_error("cannot write " + out_path);
  }
  out << "threshold_m,fraction\n";
  out.precision(10);
  for (double t : thresholds) {
    out << t << "," << ecdf(t) << "\n";
  }
}

}  // namespace llc
