#pragma once

#include <vector>

#include "llc/geoloc.h"
#include "llc/rng.h"

namespace llc::testsupport {

// Synthetic wedge deployment: n_beams equal sectors covering total_deg
// degrees of azimuth, surveyed over a radial band.
struct WedgeSpec {
  int n_beams = 48;
  double total_deg = 120.0;
  double start_deg = -60.0;  // azimuth of the first sector edge, from +x
  double r_min = 30.0;
  double r_max = 458.0;
  int radial_steps = 16;
  int angular_steps = 3;
  int mu = 3;
};

LatLon wedge_bs();

double beam_width_rad(const WedgeSpec& spec);
double beam_azimuth_rad(const WedgeSpec& spec, int beam);
int beam_of_azimuth(const WedgeSpec& spec, double az_rad);  // -1 outside the wedge

GeoPoint polar(double r, double az_rad);

// Smallest TA whose annulus contains distance r (exact geometry).
int ta_from_distance(double r, int mu);

std::vector<SurveyPoint> make_wedge_survey(const WedgeSpec& spec);

// Deterministic area-uniform placement of n test points over the wedge.
std::vector<GeoPoint> make_test_points(const WedgeSpec& spec, int n, double margin_m);

struct WalkSpec {
  double r_lo = 140.0;
  double r_hi = 160.0;
  double length_lo = 20.0;
  double length_hi = 150.0;
  double sample_step_m = 0.5;
  double csi_period_ms = 20.0;
  double flicker_prob = 0.25;      // boundary flicker toward the adjacent beam
  double boundary_zone = 0.2;      // fraction of beam width counted as boundary
  double outlier_prob = 0.05;
  double outlier_drop_db = 30.0;
  double rsrp_base_dbm = -90.0;
  double rsrp_noise_db = 3.0;
};

struct SyntheticWalk {
  std::vector<GeoPoint> truth;
  std::vector<CsiSample> reports;
};

SyntheticWalk make_walk(const WedgeSpec& spec, const WalkSpec& walk, Rng& rng);

}  // namespace llc::testsupport
