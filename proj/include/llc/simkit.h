#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llc/attacker.h"
#include "llc/channel.h"
#include "llc/codec.h"
#include "llc/metrics.h"
#include "llc/procedures.h"

namespace llc {

class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct CellConfig {
  uint32_t bandwidth_rb = 25;
  int mu = 0;
  int scell_count = 0;  // carriers beyond the primary, same bandwidth each
  double scell_deactivation_timer_ms = kInfiniteTimerMs;
  SibRaConfig sib;
  double sib_period_ms = 80.0;
  CsiScheduleKind csi_schedule = CsiScheduleKind::Off;
  double csi_period_ms = 20.0;
  int num_beams = 1;
  double bs_tx_power_dbm = 30.0;
  double noise_dbm = -95.0;
  int legit_bwp = 0;
  uint16_t rar_ta = 10;  // TA command carried in RARs
};

enum class TrafficKind { None, FullBufferUl, FullBufferDl };

struct UeConfig {
  uint16_t rnti = 0;
  double distance_m = 100.0;
  double path_loss_db = 100.0;
  TrafficKind traffic = TrafficKind::None;
  std::vector<int> initial_scells;
  int serving_beam = 0;
  double connect_at_ms = -1.0;  // < 0: starts attached
};

struct AttackerConfig {
  bool present = false;
  std::map<uint16_t, double> path_loss_to_ue_db;  // per-target link budget
  double path_loss_to_bs_db = 90.0;
  double grant_apply_jitter_max_ms = 650.0;  // COTS grant-application spread
  std::vector<AttackAction> actions;
};

struct SchedulerParams {
  int rar_rb = 4;
  int msg3_rb = 2;
  int msg4_rb = 2;
  int sib_rb = 2;
  // Resources a live RA procedure keeps occupied at the BS (RAR window,
  // Msg3 grant, contention resolution and retransmissions).
  int ra_hold_sf = 75;
  int ra_hold_dl_rb = 3;
  int ra_hold_ul_rb = 3;
  int harq_feedback_period_slots = 4;
  int ul_grant_lead_slots = 2;
  int sr_grant_rb = 4;
  double reconnect_delay_ms = 3000.0;
};

struct ScenarioConfig {
  std::string name;
  CellConfig cell;
  std::vector<UeConfig> ues;
  AttackerConfig attacker;
  bool mitigation_enabled = false;
  double duration_ms = 10000.0;
  uint64_t seed = 1;
  double rar_rtt_ms = 7.0;
  ProcedureParams procedures;
  ChannelParams channel;
  SchedulerParams scheduler;
  bool record_slot_bits = false;
};

void validate(const ScenarioConfig& cfg);  // throws config_error

struct SimResult {
  MetricsReport metrics;
  SnifferView sniffer;
};

// Deterministic slot-stepped run; identical (cfg, seed) gives bit-identical
// serialized metrics.
SimResult run(const ScenarioConfig& cfg);

// JSON scenario files (schema in docs/file_formats.md).
ScenarioConfig load_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_json(const std::string& text);

// Named cell presets of observed operator configurations.
std::vector<std::string> mno_profile_names();
void apply_mno_profile(CellConfig& cell, const std::string& name);

}  // namespace llc
