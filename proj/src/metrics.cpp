#include "llc/metrics.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "llc/geoloc.h"
#include "llc/geoloc_io.h"

namespace llc {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json ue_to_json(const UeSeries& u)
{
  ordered_json j;
  j["rnti"] = u.rnti;
  j["throughput_mbps"] = u.throughput_mbps;
  j["ra_attempts"] = u.ra_attempts;
  j["energy_units"] = u.energy_units;
  j["rlf_time_ms"] = u.rlf_time_ms;
  j["ra_done"] = u.ra_done;
  j["ra_failed"] = u.ra_failed;
  j["first_ra_failed_ms"] = u.first_ra_failed_ms;
  j["first_msg1_ms"] = u.first_msg1_ms;
  if (!u.slot_bits.empty()) {
    j["slot_bits"] = u.slot_bits;
  }
  return j;
}

ordered_json series_to_json(const MetricsReport& m)
{
  ordered_json j;
  j["duration_ms"] = m.duration_ms;
  j["seed"] = m.seed;
  j["n_buckets"] = m.n_buckets;
  j["ues"] = ordered_json::array();
  for (const UeSeries& u : m.ues) {
    j["ues"].push_back(ue_to_json(u));
  }
  j["cell"] = {{"rach_load", m.cell.rach_load}, {"rar_emissions", m.cell.rar_emissions}};
  j["max_rb_utilization"] = m.max_rb_utilization;
  j["conservation_ok"] = m.conservation_ok;
  return j;
}

}  // namespace

std::string MetricsReport::series_json() const
{
  return series_to_json(*this).dump(2) + "\n";
}

std::string MetricsReport::full_json() const
{
  ordered_json j = series_to_json(*this);
  j["events"] = ordered_json::array();
  for (const SimEvent& e : events) {
    j["events"].push_back({{"t_ms", e.t_ms},
                           {"type", e.type},
                           {"rnti", e.rnti},
                           {"detail", e.detail},
                           {"action_idx", e.action_idx}});
  }
  return j.dump(2) + "\n";
}

const UeSeries* MetricsReport::find_ue(uint16_t rnti) const
{
  for (const UeSeries& u : ues) {
    if (u.rnti == rnti) {
      return &u;
    }
  }
  return nullptr;
}

void emit_report(const MetricsReport& m, ReportFormat format, const std::string& out_dir)
{
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw io_error("cannot create output directory " + out_dir);
  }

  {
    std::ofstream out(out_dir + "/report.json");
    if (!out) {
      throw io_error("cannot write report.json");
    }
    out << m.full_json();
  }
  if (format == ReportFormat::JsonDoc) {
    return;
  }

  {
    std::ofstream out(out_dir + "/throughput.csv");
    if (!out) {
      throw io_error("cannot write throughput.csv");
    }
    out << "t_s,rnti,throughput_mbps\n";
    out.precision(10);
    for (const UeSeries& u : m.ues) {
      for (size_t b = 0; b < u.throughput_mbps.size(); ++b) {
        out << b << "," << u.rnti << "," << u.throughput_mbps[b] << "\n";
      }
    }
  }
  {
    std::ofstream out(out_dir + "/ra_attempts.csv");
    out << "t_s,rnti,ra_attempts\n";
    for (const UeSeries& u : m.ues) {
      for (size_t b = 0; b < u.ra_attempts.size(); ++b) {
        out << b << "," << u.rnti << "," << u.ra_attempts[b] << "\n";
      }
    }
  }
  {
    std::ofstream out(out_dir + "/energy.csv");
    out << "t_s,rnti,energy_units\n";
    out.precision(10);
    for (const UeSeries& u : m.ues) {
      for (size_t b = 0; b < u.energy_units.size(); ++b) {
        out << b << "," << u.rnti << "," << u.energy_units[b] << "\n";
      }
    }
  }
  {
    std::ofstream out(out_dir + "/cell.csv");
    out << "t_s,rach_load,rar_emissions\n";
    for (size_t b = 0; b < m.cell.rach_load.size(); ++b) {
      out << b << "," << m.cell.rach_load[b] << "," << m.cell.rar_emissions[b] << "\n";
    }
  }
  {
    std::ofstream out(out_dir + "/events.csv");
    out << "t_ms,type,rnti,detail,action_idx\n";
    out.precision(10);
    for (const SimEvent& e : m.events) {
      out << e.t_ms << "," << e.type << "," << e.rnti << "," << e.detail << "," << e.action_idx
          << "\n";
    }
  }
  {
    // Per-UE ECDF of the 1 s throughput samples.
    std::ofstream out(out_dir + "/throughput_ecdf.csv");
    out << "rnti,threshold_mbps,fraction\n";
    out.precision(10);
    for (const UeSeries& u : m.ues) {
      if (u.throughput_mbps.empty()) {
        continue;
      }
      Ecdf ecdf(u.throughput_mbps);
      for (double v : ecdf.sorted_values()) {
        out << u.rnti << "," << v << "," << ecdf(v) << "\n";
      }
    }
  }
}

MetricsReport load_report_json(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw io_error("cannot open " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(path + ": " + e.what());
  }
  try {
    MetricsReport m;
    m.duration_ms = j.at("duration_ms").get<double>();
    m.seed = j.at("seed").get<uint64_t>();
    m.n_buckets = j.at("n_buckets").get<int>();
    for (const auto& ju : j.at("ues")) {
      UeSeries u;
      u.rnti = ju.at("rnti").get<uint16_t>();
      u.throughput_mbps = ju.at("throughput_mbps").get<std::vector<double>>();
      u.ra_attempts = ju.at("ra_attempts").get<std::vector<int>>();
      u.energy_units = ju.at("energy_units").get<std::vector<double>>();
      u.rlf_time_ms = ju.at("rlf_time_ms").get<double>();
      u.ra_done = ju.at("ra_done").get<int>();
      u.ra_failed = ju.at("ra_failed").get<int>();
      u.first_ra_failed_ms = ju.at("first_ra_failed_ms").get<double>();
      u.first_msg1_ms = ju.at("first_msg1_ms").get<double>();
      if (ju.contains("slot_bits")) {
        u.slot_bits = ju.at("slot_bits").get<std::vector<double>>();
      }
      m.ues.push_back(std::move(u));
    }
    m.cell.rach_load = j.at("cell").at("rach_load").get<std::vector<int>>();
    m.cell.rar_emissions = j.at("cell").at("rar_emissions").get<std::vector<int>>();
    m.max_rb_utilization = j.at("max_rb_utilization").get<double>();
    m.conservation_ok = j.at("conservation_ok").get<bool>();
    if (j.contains("events")) {
      for (const auto& je : j.at("events")) {
        SimEvent e;
        e.t_ms = je.at("t_ms").get<double>();
        e.type = je.at("type").get<std::string>();
        e.rnti = je.at("rnti").get<int>();
        e.detail = je.at("detail").get<std::string>();
        e.action_idx = je.at("action_idx").get<int>();
        m.events.push_back(std::move(e));
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(path + ": " + e.what());
  }
}

}  // namespace llc
