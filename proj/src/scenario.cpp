#include <fstream>
#include <sstream>

#include "json.hpp"
#include "llc/simkit.h"

namespace llc {

namespace {

using nlohmann::json;

RaWindow parse_window(const std::string& s)
{
  static const std::map<std::string, RaWindow> table = {
      {"sf2", RaWindow::sf2},  {"sf3", RaWindow::sf3}, {"sf4", RaWindow::sf4},
      {"sf5", RaWindow::sf5},  {"sf6", RaWindow::sf6}, {"sf7", RaWindow::sf7},
      {"sf8", RaWindow::sf8},  {"sf9", RaWindow::sf9}, {"sf10", RaWindow::sf10}};
  auto it = table.find(s);
  if (it == table.end()) {
    throw config_error("unknown ra-ResponseWindowSize: " + s);
  }
  return it->second;
}

PreambleTransMax parse_ptm(const std::string& s)
{
  static const std::map<std::string, PreambleTransMax> table = {
      {"n3", PreambleTransMax::n3},   {"n4", PreambleTransMax::n4},
      {"n5", PreambleTransMax::n5},   {"n6", PreambleTransMax::n6},
      {"n7", PreambleTransMax::n7},   {"n8", PreambleTransMax::n8},
      {"n10", PreambleTransMax::n10}, {"n20", PreambleTransMax::n20},
      {"n50", PreambleTransMax::n50}, {"n100", PreambleTransMax::n100},
      {"n200", PreambleTransMax::n200}};
  auto it = table.find(s);
  if (it == table.end()) {
    throw config_error("unknown preambleTransMax: " + s);
  }
  return it->second;
}

PowerRampingStep parse_step(int db)
{
  switch (db) {
    case 0: return PowerRampingStep::db0;
    case 2: return PowerRampingStep::db2;
    case 4: return PowerRampingStep::db4;
    case 6: return PowerRampingStep::db6;
    default: throw config_error("powerRampingStep must be 0/2/4/6 dB");
  }
}

SibRaConfig parse_sib(const json& j)
{
  SibRaConfig sib;
  if (j.contains("window")) {
    sib.window = parse_window(j.at("window").get<std::string>());
  }
  if (j.contains("preamble_trans_max")) {
    sib.preamble_trans_max = parse_ptm(j.at("preamble_trans_max").get<std::string>());
  }
  if (j.contains("power_ramping_step_db")) {
    sib.power_ramping_step = parse_step(j.at("power_ramping_step_db").get<int>());
  }
  if (j.contains("num_preambles")) {
    sib.num_preambles = j.at("num_preambles").get<int>();
  }
  return sib;
}

DciMessage parse_dci(const json& j, uint16_t target)
{
  DciMessage d;
  d.rnti = Rnti{target};
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ul_grant") {
    d.kind = DciKind::UlGrant;
  } else if (kind == "dl_assignment") {
    d.kind = DciKind::DlAssignment;
  } else if (kind == "pdcch_order") {
    d.kind = DciKind::PdcchOrder;
  } else if (kind == "bwp_switch") {
    d.kind = DciKind::BwpSwitch;
  } else {
    throw config_error("unknown dci kind: " + kind);
  }
  if (d.kind != DciKind::PdcchOrder) {
    ResourceAllocation alloc;
    alloc.start_rb = j.value("start_rb", 0u);
    alloc.num_rb = j.value("num_rb", 1u);
    alloc.direction = d.kind == DciKind::UlGrant ? Direction::UL : Direction::DL;
    d.alloc = alloc;
  }
  d.tpc = static_cast<uint8_t>(j.value("tpc", 1));
  d.dai = static_cast<uint8_t>(j.value("dai", 0));
  d.harq_feedback_timing = static_cast<uint8_t>(j.value("fb_timing", 0));
  d.bwp_indicator = static_cast<uint8_t>(j.value("bwp", 0));
  d.mcs = static_cast<uint8_t>(j.value("mcs", 0));
  d.ndi = static_cast<uint8_t>(j.value("ndi", 0));
  d.rv = static_cast<uint8_t>(j.value("rv", 0));
  d.harq_pid = static_cast<uint8_t>(j.value("harq_pid", 0));
  return d;
}

MacElement parse_ce(const json& j)
{
  const std::string type = j.at("type").get<std::string>();
  if (type == "scell_act_deact") {
    return ScellActDeact{static_cast<uint8_t>(j.at("bitmap").get<int>())};
  }
  if (type == "timing_advance") {
    return TimingAdvanceCmd{static_cast<uint8_t>(j.value("tag_id", 0)),
                            static_cast<uint8_t>(j.at("ta").get<int>())};
  }
  if (type == "sp_srs") {
    return SpSrsActDeact{j.at("active").get<bool>(),
                         static_cast<uint8_t>(j.value("resource_id", 0))};
  }
  if (type == "csi_reporting") {
    return CsiReportingActDeact{j.at("active").get<bool>()};
  }
  if (type == "bfr") {
    return BeamFailureRecovery{static_cast<uint8_t>(j.at("new_beam_idx").get<int>())};
  }
  if (type == "recommended_bitrate") {
    return RecommendedBitRate{static_cast<uint16_t>(j.at("kbps").get<int>())};
  }
  throw config_error("unknown mac ce type: " + type);
}

AttackOp parse_op(const json& j)
{
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "inject_dci") {
    InjectDci op;
    op.dci = parse_dci(j.at("dci"), static_cast<uint16_t>(j.at("target_rnti").get<int>()));
    op.tx_power_dbm = j.value("tx_power_dbm", 33.0);
    op.overshadow = j.value("overshadow", false);
    return op;
  }
  if (kind == "inject_mac_ce") {
    InjectMacCe op;
    op.target = Rnti{static_cast<uint16_t>(j.at("target_rnti").get<int>())};
    op.ce = parse_ce(j.at("ce"));
    op.tx_power_dbm = j.value("tx_power_dbm", 33.0);
    return op;
  }
  if (kind == "overshadow_sib") {
    OvershadowSib op;
    op.sib = parse_sib(j.at("sib"));
    op.tx_power_dbm = j.value("tx_power_dbm", 33.0);
    return op;
  }
  if (kind == "inject_paging") {
    InjectPaging op;
    op.tx_power_dbm = j.value("tx_power_dbm", 33.0);
    return op;
  }
  if (kind == "spoof_sr") {
    SpoofSr op;
    op.target = Rnti{static_cast<uint16_t>(j.at("target_rnti").get<int>())};
    return op;
  }
  throw config_error("unknown attack op: " + kind);
}

}  // namespace

std::vector<std::string> mno_profile_names()
{
  return {"MNO-A1", "MNO-A2", "MNO-A3", "MNO-B1", "MNO-B2", "MNO-C1"};
}

void apply_mno_profile(CellConfig& cell, const std::string& name)
{
  struct Profile {
    int max_ca;
    PreambleTransMax ptm;
  };
  static const std::map<std::string, Profile> profiles = {
      {"MNO-A1", {3, PreambleTransMax::n10}}, {"MNO-A2", {4, PreambleTransMax::n5}},
      {"MNO-A3", {5, PreambleTransMax::n10}}, {"MNO-B1", {3, PreambleTransMax::n10}},
      {"MNO-B2", {3, PreambleTransMax::n10}}, {"MNO-C1", {3, PreambleTransMax::n10}}};
  auto it = profiles.find(name);
  if (it == profiles.end()) {
    throw config_error("unknown MNO profile: " + name);
  }
  cell.scell_deactivation_timer_ms = kInfiniteTimerMs;
  cell.scell_count = it->second.max_ca - 1;
  cell.sib.preamble_trans_max = it->second.ptm;
  cell.sib.window = RaWindow::sf10;
}

ScenarioConfig parse_scenario_json(const std::string& text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("scenario JSON parse failure: ") + e.what());
  }
  try {
    ScenarioConfig cfg;
    cfg.name = j.value("name", "");
    if (j.contains("cell")) {
      const json& c = j.at("cell");
      if (c.contains("mno_profile")) {
        apply_mno_profile(cfg.cell, c.at("mno_profile").get<std::string>());
      }
      cfg.cell.bandwidth_rb = c.value("bandwidth_rb", cfg.cell.bandwidth_rb);
      cfg.cell.mu = c.value("mu", cfg.cell.mu);
      cfg.cell.scell_count = c.value("scell_count", cfg.cell.scell_count);
      if (c.contains("scell_deactivation_timer_ms")) {
        const json& timer = c.at("scell_deactivation_timer_ms");
        cfg.cell.scell_deactivation_timer_ms =
            timer.is_string() ? kInfiniteTimerMs : timer.get<double>();
      }
      if (c.contains("sib")) {
        cfg.cell.sib = parse_sib(c.at("sib"));
      }
      cfg.cell.sib_period_ms = c.value("sib_period_ms", cfg.cell.sib_period_ms);
      if (c.contains("csi_schedule")) {
        const std::string s = c.at("csi_schedule").get<std::string>();
        if (s == "off") {
          cfg.cell.csi_schedule = CsiScheduleKind::Off;
        } else if (s == "periodic") {
          cfg.cell.csi_schedule = CsiScheduleKind::Periodic;
        } else if (s == "semipersistent") {
          cfg.cell.csi_schedule = CsiScheduleKind::SemiPersistent;
        } else {
          throw config_error("unknown csi_schedule: " + s);
        }
      }
      cfg.cell.csi_period_ms = c.value("csi_period_ms", cfg.cell.csi_period_ms);
      cfg.cell.num_beams = c.value("num_beams", cfg.cell.num_beams);
      cfg.cell.bs_tx_power_dbm = c.value("bs_tx_power_dbm", cfg.cell.bs_tx_power_dbm);
      cfg.cell.noise_dbm = c.value("noise_dbm", cfg.cell.noise_dbm);
      cfg.cell.legit_bwp = c.value("legit_bwp", cfg.cell.legit_bwp);
      cfg.cell.rar_ta = static_cast<uint16_t>(c.value("rar_ta", cfg.cell.rar_ta));
    }
    for (const json& ju : j.value("ues", json::array())) {
      UeConfig u;
      u.rnti = static_cast<uint16_t>(ju.at("rnti").get<int>());
      u.distance_m = ju.value("distance_m", u.distance_m);
      u.path_loss_db = ju.value("path_loss_db", u.path_loss_db);
      const std::string traffic = ju.value("traffic", "none");
      if (traffic == "none") {
        u.traffic = TrafficKind::None;
      } else if (traffic == "full_buffer_ul") {
        u.traffic = TrafficKind::FullBufferUl;
      } else if (traffic == "full_buffer_dl") {
        u.traffic = TrafficKind::FullBufferDl;
      } else {
        throw config_error("unknown traffic kind: " + traffic);
      }
      for (const json& c : ju.value("initial_scells", json::array())) {
        u.initial_scells.push_back(c.get<int>());
      }
      u.serving_beam = ju.value("serving_beam", 0);
      u.connect_at_ms = ju.value("connect_at_ms", -1.0);
      cfg.ues.push_back(u);
    }
    const double slot_ms = slot_duration_ms(cfg.cell.mu);
    if (j.contains("attacker")) {
      const json& a = j.at("attacker");
      cfg.attacker.present = true;
      for (const auto& [key, value] : a.value("path_loss_to_ue_db", json::object()).items()) {
        cfg.attacker.path_loss_to_ue_db[static_cast<uint16_t>(std::stoi(key))] =
            value.get<double>();
      }
      cfg.attacker.path_loss_to_bs_db =
          a.value("path_loss_to_bs_db", cfg.attacker.path_loss_to_bs_db);
      cfg.attacker.grant_apply_jitter_max_ms =
          a.value("grant_apply_jitter_max_ms", cfg.attacker.grant_apply_jitter_max_ms);
      for (const json& ja : a.value("actions", json::array())) {
        AttackAction act;
        act.at_slot = static_cast<int64_t>(ja.value("at_ms", 0.0) / slot_ms);
        if (ja.contains("repeat_period_slots")) {
          act.repeat_period_slots = ja.at("repeat_period_slots").get<int64_t>();
        } else if (ja.contains("repeat_period_ms")) {
          act.repeat_period_slots =
              std::max<int64_t>(1, static_cast<int64_t>(ja.at("repeat_period_ms").get<double>() /
                                                        slot_ms));
        }
        if (ja.contains("until_ms")) {
          act.until_slot = static_cast<int64_t>(ja.at("until_ms").get<double>() / slot_ms);
        }
        act.op = parse_op(ja.at("op"));
        cfg.attacker.actions.push_back(std::move(act));
      }
    }
    cfg.mitigation_enabled = j.value("mitigation_enabled", false);
    cfg.duration_ms = j.value("duration_ms", cfg.duration_ms);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.rar_rtt_ms = j.value("rar_rtt_ms", cfg.rar_rtt_ms);
    cfg.record_slot_bits = j.value("record_slot_bits", false);
    if (j.contains("params")) {
      const json& p = j.at("params");
      if (p.contains("procedures")) {
        const json& q = p.at("procedures");
        ProcedureParams& pp = cfg.procedures;
        pp.prach_period_sf = q.value("prach_period_sf", pp.prach_period_sf);
        pp.ra_retry_gap_sf = q.value("ra_retry_gap_sf", pp.ra_retry_gap_sf);
        pp.rlf_harq_window_ms = q.value("rlf_harq_window_ms", pp.rlf_harq_window_ms);
        pp.sr_grant_latency_ms = q.value("sr_grant_latency_ms", pp.sr_grant_latency_ms);
        pp.rrc_inactivity_timeout_ms =
            q.value("rrc_inactivity_timeout_ms", pp.rrc_inactivity_timeout_ms);
        pp.rar_capacity_per_occasion =
            q.value("rar_capacity_per_occasion", pp.rar_capacity_per_occasion);
        pp.initial_ue_tx_power_dbm =
            q.value("initial_ue_tx_power_dbm", pp.initial_ue_tx_power_dbm);
      }
      if (p.contains("channel")) {
        const json& q = p.at("channel");
        ChannelParams& ch = cfg.channel;
        ch.sensitivity_dbm = q.value("sensitivity_dbm", ch.sensitivity_dbm);
        ch.capture_margin_db = q.value("capture_margin_db", ch.capture_margin_db);
        ch.overhead_factor = q.value("overhead_factor", ch.overhead_factor);
        ch.max_spectral_efficiency = q.value("max_spectral_efficiency", ch.max_spectral_efficiency);
      }
      if (p.contains("scheduler")) {
        const json& q = p.at("scheduler");
        SchedulerParams& sp = cfg.scheduler;
        sp.rar_rb = q.value("rar_rb", sp.rar_rb);
        sp.msg3_rb = q.value("msg3_rb", sp.msg3_rb);
        sp.msg4_rb = q.value("msg4_rb", sp.msg4_rb);
        sp.sib_rb = q.value("sib_rb", sp.sib_rb);
        sp.ra_hold_sf = q.value("ra_hold_sf", sp.ra_hold_sf);
        sp.ra_hold_dl_rb = q.value("ra_hold_dl_rb", sp.ra_hold_dl_rb);
        sp.ra_hold_ul_rb = q.value("ra_hold_ul_rb", sp.ra_hold_ul_rb);
        sp.harq_feedback_period_slots =
            q.value("harq_feedback_period_slots", sp.harq_feedback_period_slots);
        sp.ul_grant_lead_slots = q.value("ul_grant_lead_slots", sp.ul_grant_lead_slots);
        sp.sr_grant_rb = q.value("sr_grant_rb", sp.sr_grant_rb);
        sp.reconnect_delay_ms = q.value("reconnect_delay_ms", sp.reconnect_delay_ms);
      }
    }
    return cfg;
  } catch (const json::exception& e) {
    throw config_error(std::string("scenario schema violation: ") + e.what());
  }
}

ScenarioConfig load_scenario_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_json(ss.str());
}

}  // namespace llc
