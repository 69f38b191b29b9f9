#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace llc {

struct UeSeries {
  uint16_t rnti = 0;
  std::vector<double> throughput_mbps;  // user data per 1 s interval
  std::vector<int> ra_attempts;         // Msg1 transmissions per interval
  std::vector<double> energy_units;     // cumulative at interval end
  double rlf_time_ms = -1.0;            // first radio link failure, -1 if none
  int ra_done = 0;
  int ra_failed = 0;
  double first_ra_failed_ms = -1.0;
  double first_msg1_ms = -1.0;
  std::vector<double> slot_bits;  // per-slot delivered bits, only when recorded
};

struct CellSeries {
  std::vector<int> rach_load;      // preambles per interval
  std::vector<int> rar_emissions;  // RARs per interval
};

struct SimEvent {
  double t_ms = 0.0;
  std::string type;
  int rnti = -1;
  std::string detail;
  int action_idx = -1;  // attack action that caused this event, if any
};

struct MetricsReport {
  double duration_ms = 0.0;
  uint64_t seed = 0;
  int n_buckets = 0;
  std::vector<UeSeries> ues;
  CellSeries cell;
  std::vector<SimEvent> events;
  double max_rb_utilization = 0.0;
  bool conservation_ok = true;

  // Canonical serialization of the quantitative series, event log excluded;
  // used for baseline-equality comparisons.
  std::string series_json() const;
  std::string full_json() const;

  const UeSeries* find_ue(uint16_t rnti) const;
};

enum class ReportFormat { JsonDoc, CsvTables };

// Writes report.json plus per-series CSV tables (and an events.csv) under
// out_dir.
void emit_report(const MetricsReport& m, ReportFormat format, const std::string& out_dir);

MetricsReport load_report_json(const std::string& path);

}  // namespace llc
