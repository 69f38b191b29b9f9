#pragma once

#include <string>
#include <vector>

#include "llc/geoloc.h"

namespace llc {

class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

class schema_error : public std::runtime_error {
public:
  explicit schema_error(const std::string& what) : std::runtime_error(what) {}
};

// Survey CSV: header `lat,lon,beam_idx,rsrp_dbm,ta`.
std::vector<SurveyPoint> load_survey_csv(const std::string& path);

// CSI log CSV: header `t_ms,rnti,beam_idx,rsrp_dbm`.
std::vector<CsiSample> load_csi_csv(const std::string& path);

struct RaLogEntry {
  double t_ms = 0.0;
  int beam_idx = 0;
  int ta = 0;
};

// RA log CSV: header `t_ms,beam_idx,ta`.
std::vector<RaLogEntry> load_ra_csv(const std::string& path);

// Ground-truth CSV: header `lat,lon`, one vertex per row.
std::vector<LatLon> load_latlon_csv(const std::string& path);

void save_fingerprint_json(const FingerprintMap& map, const std::string& path);
FingerprintMap load_fingerprint_json(const std::string& path);

void save_path_geojson(const std::vector<GeoPoint>& path, const LatLon& origin,
                       const std::string& out_path);
void save_path_csv(const std::vector<GeoPoint>& path, const LatLon& origin,
                   const std::string& out_path);

void save_ecdf_csv(const Ecdf& ecdf, const std::vector<double>& thresholds,
                   const std::string& out_path);

}  // namespace llc
