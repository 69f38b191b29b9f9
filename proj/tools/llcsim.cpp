#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "llc/geoloc.h"
#include "llc/geoloc_io.h"
#include "llc/metrics.h"
#include "llc/simkit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitEmpty = 4;

namespace fs = std::filesystem;

int run_simulate(const std::vector<std::string>& scenario_files, int64_t seed_override,
                 const std::string& out_dir, bool mitigation, int jobs, bool csv)
{
  struct Job {
    std::string file;
    std::string out;
  };
  std::vector<Job> queue;
  for (const std::string& f : scenario_files) {
    Job j;
    j.file = f;
    const std::string stem = fs::path(f).stem().string();
    j.out = scenario_files.size() == 1 ? out_dir : out_dir + "/" + stem;
    queue.push_back(j);
  }

  std::mutex mu;
  size_t next = 0;
  int exit_code = kExitOk;

  auto worker = [&]() {
    for (;;) {
      Job job;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= queue.size() || exit_code != kExitOk) {
          return;
        }
        job = queue[next++];
      }
      try {
        if (!fs::exists(job.file)) {
          throw llc::io_error("scenario file not found: " + job.file);
        }
        llc::ScenarioConfig cfg = llc::load_scenario_file(job.file);
        if (seed_override >= 0) {
          cfg.seed = static_cast<uint64_t>(seed_override);
        }
        if (mitigation) {
          cfg.mitigation_enabled = true;
        }
        const llc::SimResult res = llc::run(cfg);
        llc::emit_report(res.metrics, csv ? llc::ReportFormat::CsvTables : llc::ReportFormat::JsonDoc,
                         job.out);
        std::lock_guard<std::mutex> lock(mu);
        std::cout << job.file << " -> " << job.out << "/report.json\n";
      } catch (const llc::config_error& e) {
        std::lock_guard<std::mutex> lock(mu);
        std::cerr << "config error: " << e.what() << "\n";
        exit_code = kExitConfig;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        std::cerr << "error: " << e.what() << "\n";
        exit_code = kExitIo;
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(queue.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) {
    pool.emplace_back(worker);
  }
  for (std::thread& th : pool) {
    th.join();
  }
  return exit_code;
}

bool parse_latlon(const std::string& s, llc::LatLon& out)
{
  const auto comma = s.find(',');
  if (comma == std::string::npos) {
    return false;
  }
  try {
    out.lat = std::stod(s.substr(0, comma));
    out.lon = std::stod(s.substr(comma + 1));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

int run_fingerprint(const std::string& survey_file, const std::string& bs, const std::string& out,
                    double gap_m, double adjacency_m, int mu)
{
  llc::LatLon origin;
  if (!parse_latlon(bs, origin)) {
    std::cerr << "config error: --bs expects LAT,LON\n";
    return kExitConfig;
  }
  try {
    const auto survey = llc::load_survey_csv(survey_file);
    llc::FingerprintParams params;
    params.gap_threshold_m = gap_m;
    params.adjacency_distance_m = adjacency_m;
    params.mu = mu;
    const llc::FingerprintMap map = llc::build_fingerprint(survey, origin, params);
    llc::save_fingerprint_json(map, out);
    std::cout << "map: " << map.areas.size() << " areas, " << map.adjacency.size()
              << " adjacent pairs -> " << out << "\n";
    return kExitOk;
  } catch (const llc::schema_error& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const llc::geo_error& e) {
    std::cerr << "fingerprint error: " << e.what() << "\n";
    return e.code() == llc::geo_err::insufficient_survey ? kExitEmpty : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int run_localize(const std::string& map_file, const std::string& ra_log, const std::string& out,
                 const std::string& truth_file)
{
  try {
    const llc::FingerprintMap map = llc::load_fingerprint_json(map_file);
    const auto entries = llc::load_ra_csv(ra_log);
    if (entries.empty()) {
      std::cerr << "empty RA log\n";
      return kExitEmpty;
    }
    std::vector<llc::GeoPoint> estimates;
    std::ofstream os(out);
    if (!os) {
      std::cerr << "cannot write " << out << "\n";
      return kExitIo;
    }
    os << "t_ms,beam_idx,ta,x_m,y_m,lat,lon,clamped\n";
    os.precision(10);
    for (const auto& e : entries) {
      llc::TimingAdvance ta{e.ta, map.params.mu};
      const llc::LocalizeEstimate est = llc::localize_ssb_ra(e.beam_idx, ta, map);
      const llc::LatLon ll = llc::unproject(est.point, map.bs_location);
      os << e.t_ms << "," << e.beam_idx << "," << e.ta << "," << est.point.x << ","
         << est.point.y << "," << ll.lat << "," << ll.lon << "," << (est.clamped ? 1 : 0) << "\n";
      estimates.push_back(est.point);
    }
    if (!truth_file.empty()) {
      const auto truth_ll = llc::load_latlon_csv(truth_file);
      if (truth_ll.size() != estimates.size()) {
        std::cerr << "schema error: truth rows do not match RA log rows\n";
        return kExitConfig;
      }
      std::vector<double> errors;
      for (size_t i = 0; i < estimates.size(); ++i) {
        const llc::GeoPoint t = llc::project(truth_ll[i], map.bs_location);
        errors.push_back(llc::distance(estimates[i], t));
      }
      llc::Ecdf ecdf(errors);
      std::vector<double> thresholds;
      for (double t = 0.0; t <= 50.0; t += 1.0) {
        thresholds.push_back(t);
      }
      const std::string ecdf_path = out + ".ecdf.csv";
      llc::save_ecdf_csv(ecdf, thresholds, ecdf_path);
      std::cout << "error ecdf: le10m=" << ecdf(10.0) << " le20m=" << ecdf(20.0) << " -> "
                << ecdf_path << "\n";
    }
    return kExitOk;
  } catch (const llc::schema_error& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const llc::geo_error& e) {
    std::cerr << "localize error: " << e.what() << "\n";
    return e.code() == llc::geo_err::unknown_beam ? kExitConfig : kExitEmpty;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int run_track(const std::string& map_file, const std::string& csi_log, double p_thres, int c_thres,
              const std::string& out, const std::string& truth_file, double rsrp_base,
              bool has_rsrp_base, bool non_strict)
{
  try {
    const llc::FingerprintMap map = llc::load_fingerprint_json(map_file);
    const auto samples = llc::load_csi_csv(csi_log);
    llc::TrackerParams params;
    params.p_thres_db = p_thres;
    params.c_thres = c_thres;
    params.strict_literal = !non_strict;
    if (has_rsrp_base) {
      params.rsrp_base_dbm = rsrp_base;
    }
    const std::vector<llc::GeoPoint> path = llc::beam_to_path(samples, params, map);
    llc::save_path_geojson(path, map.bs_location, out);
    llc::save_path_csv(path, map.bs_location, out + ".csv");
    std::cout << "path: " << path.size() << " points -> " << out << "\n";
    if (!truth_file.empty()) {
      const auto truth_ll = llc::load_latlon_csv(truth_file);
      std::vector<llc::GeoPoint> truth;
      truth.reserve(truth_ll.size());
      for (const llc::LatLon& p : truth_ll) {
        truth.push_back(llc::project(p, map.bs_location));
      }
      const double dev = llc::path_max_deviation(path, truth);
      std::cout << "max_deviation_m: " << dev << "\n";
    }
    return kExitOk;
  } catch (const llc::schema_error& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const llc::geo_error& e) {
    if (e.code() == llc::geo_err::empty_path) {
      std::cerr << "empty path: " << e.what() << "\n";
      return kExitEmpty;
    }
    std::cerr << "track error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int run_report(const std::string& metrics_file, const std::string& out_dir)
{
  try {
    const llc::MetricsReport m = llc::load_report_json(metrics_file);
    llc::emit_report(m, llc::ReportFormat::CsvTables, out_dir);
    std::cout << metrics_file << " -> " << out_dir << "\n";
    return kExitOk;
  } catch (const llc::schema_error& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"low-layer cellular control-plane simulator and passive geolocation toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one or more scenario files");
  std::vector<std::string> scenario_files;
  std::string out_dir = "out";
  int64_t seed_override = -1;
  bool mitigation = false;
  int jobs = 1;
  bool json_only = false;
  sim->add_option("--scenario", scenario_files, "scenario JSON file (repeatable)")->required();
  sim->add_option("--seed", seed_override, "override the scenario seed");
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_flag("--mitigation", mitigation, "enable keyed low-layer scrambling");
  sim->add_option("--jobs", jobs, "run scenarios concurrently")->default_val(1);
  sim->add_flag("--json-only", json_only, "skip the CSV tables");

  // fingerprint
  auto* fp = app.add_subcommand("fingerprint", "build a beam fingerprint map from a survey CSV");
  std::string survey_file, bs_latlon, map_out;
  double gap_m = 30.0, adjacency_m = 5.0;
  int mu = 3;
  fp->add_option("--survey", survey_file, "survey CSV (lat,lon,beam_idx,rsrp_dbm,ta)")->required();
  fp->add_option("--bs", bs_latlon, "BS location as LAT,LON")->required();
  fp->add_option("--out", map_out, "output map JSON")->required();
  fp->add_option("--gap-threshold", gap_m, "cluster split distance in meters")->default_val(30.0);
  fp->add_option("--adjacency", adjacency_m, "hull adjacency distance in meters")->default_val(5.0);
  fp->add_option("--mu", mu, "numerology for TA geometry")->default_val(3);

  // localize
  auto* loc = app.add_subcommand("localize", "estimate positions from an RA exchange log");
  std::string loc_map, ra_log, loc_out, loc_truth;
  loc->add_option("--map", loc_map, "fingerprint map JSON")->required();
  loc->add_option("--ra-log", ra_log, "RA log CSV (t_ms,beam_idx,ta)")->required();
  loc->add_option("--out", loc_out, "output estimates CSV")->required();
  loc->add_option("--truth", loc_truth, "ground truth CSV (lat,lon), row-aligned");

  // track
  auto* trk = app.add_subcommand("track", "infer a movement path from a CSI report log");
  std::string trk_map, csi_log, trk_out, trk_truth;
  double p_thres = 15.0, rsrp_base = 0.0;
  int c_thres = 3;
  bool non_strict = false;
  trk->add_option("--map", trk_map, "fingerprint map JSON")->required();
  trk->add_option("--csi-log", csi_log, "CSI log CSV (t_ms,rnti,beam_idx,rsrp_dbm)")->required();
  trk->add_option("--p-thres", p_thres, "power filtering threshold in dB")->default_val(15.0);
  trk->add_option("--c-thres", c_thres, "run-length threshold")->default_val(3);
  auto* base_opt = trk->add_option("--rsrp-base", rsrp_base, "reference RSRP in dBm");
  trk->add_flag("--non-strict", non_strict, "re-anchor on long stable runs after signal loss");
  trk->add_option("--out", trk_out, "output GeoJSON path")->required();
  trk->add_option("--truth", trk_truth, "ground truth CSV (lat,lon)");

  // report
  auto* rep = app.add_subcommand("report", "re-emit CSV tables from a metrics JSON");
  std::string metrics_file, rep_out;
  rep->add_option("--metrics", metrics_file, "report.json from a simulate run")->required();
  rep->add_option("--out", rep_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) {
    return run_simulate(scenario_files, seed_override, out_dir, mitigation, jobs, !json_only);
  }
  if (fp->parsed()) {
    return run_fingerprint(survey_file, bs_latlon, map_out, gap_m, adjacency_m, mu);
  }
  if (loc->parsed()) {
    return run_localize(loc_map, ra_log, loc_out, loc_truth);
  }
  if (trk->parsed()) {
    return run_track(trk_map, csi_log, p_thres, c_thres, trk_out, trk_truth, rsrp_base,
                     !base_opt->empty(), non_strict);
  }
  if (rep->parsed()) {
    return run_report(metrics_file, rep_out);
  }
  return kExitOk;
}
