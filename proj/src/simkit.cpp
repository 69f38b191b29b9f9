#include "llc/simkit.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace llc {

namespace {

// ---------------------------------------------------------------------------
// Engine-internal records
// ---------------------------------------------------------------------------

struct EngineUe {
  UeConfig cfg;
  UeState st;
  bool attached = false;
  bool wants_attach = false;
  bool in_initial_access = false;
  bool sib_read = false;
  bool sib_reread_pending = false;
  double reconnect_at_ms = -1.0;
  int64_t storm_first_msg1 = -1;
  double bucket_bits = 0.0;
};

struct PendingRar {
  RarPlan plan;
};

struct PendingMsg3 {
  int64_t slot = 0;
  Rnti tc_rnti;
  int beam_idx = 0;
  std::vector<int> accepted;  // ue indices that matched the RAR
};

struct PendingMsg4 {
  int64_t slot = 0;
  int winner = -1;
  std::vector<int> losers;
};

struct PendingUlTx {
  int64_t slot = 0;
  int ue_index = -1;
  ResourceAllocation alloc;
  double power_dbm = 0.0;
  bool legit = true;    // scheduled by the BS (counts toward conservation)
  bool padding = false; // no user data behind it
};

struct PendingSrGrant {
  int64_t slot = 0;
  uint16_t rnti = 0;
  int action_idx = -1;
};

struct RaHold {
  int64_t until_slot = 0;
};

struct AttackerDci {
  DciMessage dci;
  double tx_power_dbm = 0.0;
  bool overshadow = false;
  std::optional<MacPdu> pdsch;
  int action_idx = -1;
};

struct SibSpoof {
  SibRaConfig sib;
  double tx_power_dbm = 0.0;
  int action_idx = -1;
};

// ---------------------------------------------------------------------------

class Engine {
public:
  explicit Engine(const ScenarioConfig& cfg)
      : cfg_(cfg), rngs_(cfg.seed), slot_ms_(slot_duration_ms(cfg.cell.mu))
  {
    bs_.rar_rtt_ms = cfg.rar_rtt_ms;
    for (const UeConfig& u : cfg.ues) {
      EngineUe e;
      e.cfg = u;
      e.st.tx_power = {cfg.procedures.initial_ue_tx_power_dbm};
      e.st.serving_beam_idx = u.serving_beam;
      e.st.ra.window_cfg = cfg.cell.sib;
      e.st.csi_schedule.kind = cfg.cell.csi_schedule;
      e.st.csi_schedule.period_ms = cfg.cell.csi_period_ms;
      if (u.connect_at_ms < 0.0) {
        attach_initial(e);
      } else {
        e.wants_attach = false;  // armed when connect_at_ms is reached
      }
      ues_.push_back(std::move(e));
    }
    for (size_t i = 0; i < cfg.attacker.actions.size(); ++i) {
      actions_.push_back(cfg.attacker.actions[i]);
    }
    n_buckets_ = static_cast<int>(std::ceil(cfg.duration_ms / 1000.0));
    for (const UeConfig& u : cfg.ues) {
      UeSeries s;
      s.rnti = u.rnti;
      s.throughput_mbps.assign(n_buckets_, 0.0);
      s.ra_attempts.assign(n_buckets_, 0);
      s.energy_units.assign(n_buckets_, 0.0);
      report_.ues.push_back(std::move(s));
    }
    report_.cell.rach_load.assign(n_buckets_, 0);
    report_.cell.rar_emissions.assign(n_buckets_, 0);
    report_.duration_ms = cfg.duration_ms;
    report_.seed = cfg.seed;
    report_.n_buckets = n_buckets_;
  }

  SimResult run_all()
  {
    const int64_t total_slots = static_cast<int64_t>(std::ceil(cfg_.duration_ms / slot_ms_));
    for (int64_t s = 0; s < total_slots; ++s) {
      step(s);
    }
    report_.max_rb_utilization = max_utilization_;
    report_.conservation_ok = conservation_ok_;
    SimResult res;
    res.metrics = std::move(report_);
    res.sniffer = std::move(sniffer_);
    return res;
  }

private:
  // ---- setup -------------------------------------------------------------

  void attach_initial(EngineUe& e)
  {
    e.attached = true;
    e.sib_read = true;
    e.st.rnti = Rnti{e.cfg.rnti};
    e.st.ra.phase = RaPhase::Idle;
    BsUeContext ctx;
    ctx.rnti = Rnti{e.cfg.rnti};
    ctx.beam_view = e.cfg.serving_beam;
    for (int i : e.cfg.initial_scells) {
      ctx.scell_view |= static_cast<uint8_t>(1u << i);
      ScellEntry entry;
      entry.deadline_ms = kInfiniteTimerMs;
      e.st.active_scells[i] = entry;
    }
    bs_.connected[Rnti{e.cfg.rnti}] = ctx;
  }

  // ---- helpers -----------------------------------------------------------

  SimTime now(int64_t abs_slot) const
  {
    SimTime t;
    t.abs_slot = abs_slot;
    SlotTime base;
    base.mu = static_cast<uint8_t>(cfg_.cell.mu);
    t.t = slot_advance(base, abs_slot);
    return t;
  }

  int bucket_of(double ms) const
  {
    int b = static_cast<int>(ms / 1000.0);
    return std::min(b, n_buckets_ - 1);
  }

  int spsf() const { return 1 << cfg_.cell.mu; }

  double attacker_pl_to(uint16_t rnti) const
  {
    auto it = cfg_.attacker.path_loss_to_ue_db.find(rnti);
    if (it != cfg_.attacker.path_loss_to_ue_db.end()) {
      return it->second;
    }
    return 100.0;
  }

  bool is_feedback_slot(int64_t s) const
  {
    return s % cfg_.scheduler.harq_feedback_period_slots == 0;
  }

  uint8_t fb_offset(int64_t s) const
  {
    const int p = cfg_.scheduler.harq_feedback_period_slots;
    return static_cast<uint8_t>(p - (s % p));
  }

  bool is_prach_occasion(int64_t s) const
  {
    const int64_t period_slots = static_cast<int64_t>(cfg_.procedures.prach_period_sf) * spsf();
    return s % period_slots == 0;
  }

  bool is_sib_slot(int64_t s) const
  {
    const int64_t period_slots =
        std::max<int64_t>(1, static_cast<int64_t>(cfg_.cell.sib_period_ms / slot_ms_));
    return s % period_slots == 0;
  }

  void log_event(double t_ms, const std::string& type, int rnti, const std::string& detail,
                 int action_idx = -1)
  {
    report_.events.push_back({t_ms, type, rnti, detail, action_idx});
  }

  UeSeries& series(int ue_index) { return report_.ues[static_cast<size_t>(ue_index)]; }

  int ue_index_of(Rnti rnti) const
  {
    for (size_t i = 0; i < ues_.size(); ++i) {
      if (ues_[i].cfg.rnti == rnti.value) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  std::vector<Rnti> all_rntis() const
  {
    std::vector<Rnti> v;
    for (const EngineUe& e : ues_) {
      v.push_back(Rnti{e.cfg.rnti});
    }
    return v;
  }

  bool ue_in_ra(const EngineUe& e) const
  {
    return e.st.ra.phase == RaPhase::WaitingRar || e.st.ra.phase == RaPhase::WaitingMsg4;
  }

  bool dl_eligible(const EngineUe& e) const
  {
    return e.attached && !e.st.radio_link_failed && !ue_in_ra(e) &&
           e.cfg.traffic == TrafficKind::FullBufferDl;
  }

  bool ul_eligible(const EngineUe& e) const
  {
    return e.attached && !e.st.radio_link_failed && !ue_in_ra(e) &&
           e.cfg.traffic == TrafficKind::FullBufferUl;
  }

  double dl_sinr_db(const EngineUe& e) const
  {
    return cfg_.cell.bs_tx_power_dbm - e.cfg.path_loss_db - cfg_.cell.noise_dbm;
  }

  void detach(EngineUe& e, const SimTime& t, const std::string& reason)
  {
    if (e.attached && e.st.rnti) {
      bs_.connected.erase(*e.st.rnti);
    }
    e.attached = false;
    e.in_initial_access = false;
    e.st.rnti.reset();
    e.st.ra.phase = RaPhase::Idle;
    e.st.active_scells.clear();
    e.st.harq.pending.clear();
    log_event(t.ms(), "detach", e.cfg.rnti, reason);
    if (e.cfg.traffic != TrafficKind::None || e.cfg.connect_at_ms >= 0.0) {
      e.reconnect_at_ms = t.ms() + cfg_.scheduler.reconnect_delay_ms;
    }
  }

  void apply_rlf(EngineUe& e, const SimTime& t, const std::string& reason)
  {
    if (series(ue_index_of(Rnti{e.cfg.rnti})).rlf_time_ms < 0.0) {
      series(ue_index_of(Rnti{e.cfg.rnti})).rlf_time_ms = t.ms();
    }
    e.st.radio_link_failed = true;
    log_event(t.ms(), "rlf", e.cfg.rnti, reason);
    detach(e, t, "rlf:" + reason);
  }

  // The mitigation gate: a transmission whose sender lacks K_PHY descrambles
  // to noise at a keyed receiver, so it never survives the checksum. The
  // keyed legitimate copy is unaffected.
  bool blocked_by_mitigation(bool from_attacker) const
  {
    return cfg_.mitigation_enabled && from_attacker;
  }

  // ---- per-slot phases ----------------------------------------------------

  void step(int64_t s)
  {
    const SimTime t = now(s);
    const int bucket = bucket_of(t.ms());

    handle_connect_triggers(t);
    for (EngineUe& e : ues_) {
      scell_expire(e.st, t.ms());
    }

    std::vector<AttackerDci> attacker_dcis;
    std::optional<SibSpoof> sib_spoof;
    collect_attacker_actions(s, t, attacker_dcis, sib_spoof);

    if (is_sib_slot(s)) {
      broadcast_sib(t, sib_spoof, bucket);
    }

    plan_downlink(s, t, bucket);
    plan_uplink(s, t);

    deliver_pdcch(s, t, bucket, attacker_dcis);
    prach_occasion(s, t, bucket);
    deliver_rars(s, t, bucket);
    msg3_exchange(s, t);
    msg4_exchange(s, t, bucket);
    uplink_transmissions(s, t, bucket);
    harq_feedback(s, t);
    ra_timeouts(s, t, bucket);
    csi_reports(s, t);
    inactivity_release(t);

    for (size_t i = 0; i < ues_.size(); ++i) {
      EngineUe& e = ues_[i];
      energy_tick(e.st, slot_ms_, cfg_.procedures);
      series(static_cast<int>(i)).energy_units[static_cast<size_t>(bucket)] = e.st.energy_units;
      series(static_cast<int>(i)).throughput_mbps[static_cast<size_t>(bucket)] +=
          e.bucket_bits / 1e6;
      if (cfg_.record_slot_bits) {
        series(static_cast<int>(i)).slot_bits.push_back(e.bucket_bits);
      }
      e.bucket_bits = 0.0;
    }
  }

  void handle_connect_triggers(const SimTime& t)
  {
    for (EngineUe& e : ues_) {
      if (!e.attached && !e.wants_attach && !ue_in_ra(e)) {
        const bool first_connect = e.cfg.connect_at_ms >= 0.0 && t.ms() >= e.cfg.connect_at_ms &&
                                   e.reconnect_at_ms < 0.0 && e.st.ra.phase != RaPhase::Failed;
        const bool reconnect = e.reconnect_at_ms >= 0.0 && t.ms() >= e.reconnect_at_ms;
        if (first_connect || reconnect) {
          e.wants_attach = true;
          e.reconnect_at_ms = -1.0;
          e.st.radio_link_failed = false;
          e.st.ra.phase = RaPhase::Idle;
          e.sib_read = false;  // a fresh SIB read precedes initial access
        }
      }
    }
  }

  void collect_attacker_actions(int64_t s, const SimTime& t, std::vector<AttackerDci>& dcis,
                                std::optional<SibSpoof>& sib_spoof)
  {
    if (!cfg_.attacker.present) {
      return;
    }
    for (size_t i = 0; i < actions_.size(); ++i) {
      const AttackAction& a = actions_[i];
      if (!action_due(a, s)) {
        continue;
      }
      const int idx = static_cast<int>(i);
      std::visit(
          [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, InjectDci>) {
              AttackerDci ad;
              ad.dci = op.dci;
              if (ad.dci.alloc) {
                // Allocation slots are authored relative to the firing slot.
                ad.dci.alloc->slot = t.t;
              }
              ad.tx_power_dbm = op.tx_power_dbm;
              ad.overshadow = op.overshadow;
              ad.action_idx = idx;
              dcis.push_back(std::move(ad));
            } else if constexpr (std::is_same_v<T, InjectMacCe>) {
              if (std::holds_alternative<BeamFailureRecovery>(op.ce)) {
                // Uplink injection toward the BS on the victim's behalf.
                inject_bfr(op, t, idx);
              } else {
                AttackerDci ad;
                ad.dci.rnti = op.target;
                ad.dci.kind = DciKind::DlAssignment;
                ResourceAllocation alloc;
                alloc.start_rb = 0;
                alloc.num_rb = 1;
                alloc.slot = t.t;
                alloc.direction = Direction::DL;
                ad.dci.alloc = alloc;
                ad.dci.harq_feedback_timing = 0;  // no feedback requested
                ad.tx_power_dbm = op.tx_power_dbm;
                ad.action_idx = idx;
                MacPdu pdu;
                pdu.elements.push_back(op.ce);
                ad.pdsch = pdu;
                dcis.push_back(std::move(ad));
              }
            } else if constexpr (std::is_same_v<T, OvershadowSib>) {
              sib_spoof = SibSpoof{op.sib, op.tx_power_dbm, idx};
              pending_sib_spoof_ = *sib_spoof;
            } else if constexpr (std::is_same_v<T, InjectPaging>) {
              inject_paging(op, t, idx);
            } else if constexpr (std::is_same_v<T, SpoofSr>) {
              inject_sr(op, t, idx);
            }
          },
          a.op);
    }
    // A SIB spoof stays armed until the next broadcast slot consumes it.
    if (!sib_spoof && pending_sib_spoof_) {
      sib_spoof = pending_sib_spoof_;
    }
  }

  void inject_bfr(const InjectMacCe& op, const SimTime& t, int action_idx)
  {
    const double rx = op.tx_power_dbm - cfg_.attacker.path_loss_to_bs_db;
    if (rx < cfg_.channel.sensitivity_dbm) {
      return;
    }
    if (blocked_by_mitigation(true)) {
      log_event(t.ms(), "blocked_injection", op.target.value, "bfr", action_idx);
      return;
    }
    const auto& bfr = std::get<BeamFailureRecovery>(op.ce);
    if (bs_on_bfr(bs_, op.target, bfr.new_beam_idx) == BsOpStatus::Ok) {
      log_event(t.ms(), "injection", op.target.value,
                "bfr beam=" + std::to_string(bfr.new_beam_idx), action_idx);
    }
  }

  void inject_paging(const InjectPaging& op, const SimTime& t, int action_idx)
  {
    bool any = false;
    for (EngineUe& e : ues_) {
      if (!e.attached) {
        continue;
      }
      const double rx = op.tx_power_dbm - attacker_pl_to(e.cfg.rnti);
      if (rx < cfg_.channel.sensitivity_dbm) {
        continue;
      }
      if (blocked_by_mitigation(true)) {
        continue;
      }
      e.sib_reread_pending = true;
      any = true;
    }
    if (blocked_by_mitigation(true)) {
      log_event(t.ms(), "blocked_injection", -1, "paging", action_idx);
    } else if (any) {
      log_event(t.ms(), "injection", -1, "paging sysinfo_mod", action_idx);
    }
  }

  void inject_sr(const SpoofSr& op, const SimTime& t, int action_idx)
  {
    const double rx_at_bs =
        cfg_.attacker.path_loss_to_bs_db > 0.0
            ? 33.0 - cfg_.attacker.path_loss_to_bs_db
            : 0.0;
    if (rx_at_bs < cfg_.channel.sensitivity_dbm) {
      return;
    }
    if (blocked_by_mitigation(true)) {
      log_event(t.ms(), "blocked_injection", op.target.value, "sr", action_idx);
      return;
    }
    const SrResult res = bs_on_sr(bs_, op.target, t, cfg_.procedures);
    if (res.status == BsOpStatus::Ok) {
      PendingSrGrant g;
      g.slot = static_cast<int64_t>(res.grant_at_ms / slot_ms_);
      g.rnti = op.target.value;
      g.action_idx = action_idx;
      sr_grants_.push_back(g);
      log_event(t.ms(), "injection", op.target.value, "sr", action_idx);
    } else {
      log_event(t.ms(), "sr_unknown_rnti", op.target.value, "", action_idx);
    }
  }

  void broadcast_sib(const SimTime& t, std::optional<SibSpoof>& spoof, int bucket)
  {
    (void)bucket;
    for (EngineUe& e : ues_) {
      const bool needs = e.sib_reread_pending || (e.wants_attach && !e.sib_read);
      if (!needs) {
        continue;
      }
      const PowerDbm legit_rx{cfg_.cell.bs_tx_power_dbm - e.cfg.path_loss_db};
      std::optional<PowerDbm> spoof_rx;
      if (spoof) {
        spoof_rx = PowerDbm{spoof->tx_power_dbm - attacker_pl_to(e.cfg.rnti)};
      }
      DecodeOutcome outcome =
          decode_outcome(legit_rx, spoof_rx, /*occupied=*/true, cfg_.channel);
      if (outcome == DecodeOutcome::SpoofDecoded && blocked_by_mitigation(true)) {
        // The unkeyed copy cannot capture a keyed receiver; the legit copy
        // survives.
        outcome = DecodeOutcome::LegitDecoded;
      }
      if (outcome == DecodeOutcome::SpoofDecoded) {
        e.st.ra.window_cfg = spoof->sib;
        e.sib_read = true;
        e.sib_reread_pending = false;
        log_event(t.ms(), "injection", e.cfg.rnti, "sib_overshadow", spoof->action_idx);
      } else if (outcome == DecodeOutcome::LegitDecoded) {
        e.st.ra.window_cfg = cfg_.cell.sib;
        e.sib_read = true;
        e.sib_reread_pending = false;
      }
    }
    if (spoof) {
      pending_sib_spoof_.reset();
    }
  }

  void plan_downlink(int64_t s, const SimTime& t, int bucket)
  {
    legit_dl_dcis_.clear();
    rars_to_deliver_.clear();

    int64_t budget = cfg_.cell.bandwidth_rb;
    if (is_sib_slot(s)) {
      budget -= cfg_.scheduler.sib_rb;
    }

    // RAR emissions due this slot, strict priority.
    for (auto it = pending_rars_.begin(); it != pending_rars_.end();) {
      if (it->plan.emit_slot == s) {
        if (budget >= cfg_.scheduler.rar_rb) {
          budget -= cfg_.scheduler.rar_rb;
          rars_to_deliver_.push_back(it->plan);
          report_.cell.rar_emissions[static_cast<size_t>(bucket)] += 1;
          it = pending_rars_.erase(it);
          continue;
        }
        it->plan.emit_slot += 1;  // defer under DL pressure
      }
      ++it;
    }

    for (PendingMsg4& m : pending_msg4_) {
      if (m.slot == s) {
        if (budget >= cfg_.scheduler.msg4_rb) {
          budget -= cfg_.scheduler.msg4_rb;
        } else {
          m.slot += 1;  // defer under DL pressure
        }
      }
    }

    // Live RA procedures keep DL resources occupied.
    const int active_holds = holds_active_at(s);
    const int64_t hold_rb = std::min<int64_t>(
        std::max<int64_t>(budget, 0),
        static_cast<int64_t>(active_holds) * cfg_.scheduler.ra_hold_dl_rb);
    budget -= hold_rb;

    // Primary-carrier data split.
    std::vector<int> eligible;
    for (size_t i = 0; i < ues_.size(); ++i) {
      if (dl_eligible(ues_[i])) {
        eligible.push_back(static_cast<int>(i));
      }
    }
    if (!eligible.empty() && budget > 0) {
      std::sort(eligible.begin(), eligible.end(), [this](int a, int b) {
        return ues_[static_cast<size_t>(a)].cfg.rnti < ues_[static_cast<size_t>(b)].cfg.rnti;
      });
      const int n = static_cast<int>(eligible.size());
      const int64_t base = budget / n;
      int64_t extra = budget % n;
      uint32_t start_rb = 0;
      // The remainder rotates deterministically with the slot index.
      const int rot = static_cast<int>(s % n);
      for (int k = 0; k < n; ++k) {
        const int idx = eligible[static_cast<size_t>((k + rot) % n)];
        int64_t share = base + (extra > 0 ? 1 : 0);
        if (extra > 0) {
          --extra;
        }
        if (share <= 0) {
          continue;
        }
        emit_dl_assignment(idx, start_rb, static_cast<uint32_t>(share), s, t, 0);
        start_rb += static_cast<uint32_t>(share);
      }
    }

    // Secondary carriers: no RA traffic, data only, split among CA users the
    // BS believes are active on each SCell.
    for (int c = 1; c <= cfg_.cell.scell_count; ++c) {
      std::vector<int> ca_users;
      for (size_t i = 0; i < ues_.size(); ++i) {
        const EngineUe& e = ues_[i];
        if (!dl_eligible(e) || !e.st.rnti) {
          continue;
        }
        auto it = bs_.connected.find(*e.st.rnti);
        if (it != bs_.connected.end() && (it->second.scell_view & (1u << c))) {
          ca_users.push_back(static_cast<int>(i));
        }
      }
      if (ca_users.empty()) {
        continue;
      }
      const int64_t share = cfg_.cell.bandwidth_rb / ca_users.size();
      uint32_t start_rb = 0;
      for (int idx : ca_users) {
        emit_dl_assignment(idx, start_rb, static_cast<uint32_t>(share), s, t, c);
        start_rb += static_cast<uint32_t>(share);
      }
    }

    const double used = static_cast<double>(cfg_.cell.bandwidth_rb - budget);
    max_utilization_ = std::max(max_utilization_, used / cfg_.cell.bandwidth_rb);
    if (budget < 0) {
      conservation_ok_ = false;
    }
  }

  void emit_dl_assignment(int ue_index, uint32_t start_rb, uint32_t num_rb, int64_t s,
                          const SimTime& t, int carrier)
  {
    EngineUe& e = ues_[static_cast<size_t>(ue_index)];
    DciMessage d;
    d.rnti = Rnti{e.cfg.rnti};
    d.kind = DciKind::DlAssignment;
    ResourceAllocation alloc;
    alloc.start_rb = start_rb;
    alloc.num_rb = num_rb;
    alloc.slot = t.t;
    alloc.direction = Direction::DL;
    d.alloc = alloc;
    auto it = bs_.connected.find(Rnti{e.cfg.rnti});
    if (it == bs_.connected.end()) {
      return;
    }
    if (carrier == 0) {
      // Only primary-carrier assignments feed the PUCCH ACK bitmap; SCell
      // feedback is carried out of band of this model.
      d.harq_feedback_timing = fb_offset(s);
      d.dai = it->second.dai_counter;
      it->second.dai_counter = static_cast<uint8_t>((it->second.dai_counter + 1) & 0x3);
      it->second.expected_feedback_bits[s + d.harq_feedback_timing] += 1;
    } else {
      d.harq_feedback_timing = 0;
    }
    it->second.last_activity_ms = t.ms();
    legit_dl_dcis_.push_back({ue_index, d, carrier});
  }

  int holds_active_at(int64_t s) const
  {
    int n = 0;
    for (const RaHold& h : ra_holds_) {
      if (h.until_slot > s) {
        ++n;
      }
    }
    return n;
  }

  void plan_uplink(int64_t s, const SimTime& t)
  {
    // Grants issued now land ul_grant_lead_slots later; the budget is taken
    // against that transmission slot.
    const int64_t tx_slot = s + cfg_.scheduler.ul_grant_lead_slots;
    int64_t budget = cfg_.cell.bandwidth_rb;
    budget -= ul_reserved_[tx_slot];
    const int64_t hold_rb = std::min<int64_t>(
        std::max<int64_t>(budget, 0),
        static_cast<int64_t>(holds_active_at(tx_slot)) * cfg_.scheduler.ra_hold_ul_rb);
    budget -= hold_rb;

    // SR-triggered grants.
    for (auto it = sr_grants_.begin(); it != sr_grants_.end();) {
      if (it->slot <= s) {
        const int idx = ue_index_of(Rnti{it->rnti});
        if (idx >= 0 && ues_[static_cast<size_t>(idx)].attached &&
            budget >= cfg_.scheduler.sr_grant_rb) {
          emit_ul_grant(idx, 0, static_cast<uint32_t>(cfg_.scheduler.sr_grant_rb), s, t);
          budget -= cfg_.scheduler.sr_grant_rb;
        }
        it = sr_grants_.erase(it);
      } else {
        ++it;
      }
    }

    // Full-buffer uplink users share what remains.
    std::vector<int> eligible;
    for (size_t i = 0; i < ues_.size(); ++i) {
      if (ul_eligible(ues_[i])) {
        eligible.push_back(static_cast<int>(i));
      }
    }
    if (!eligible.empty() && budget > 0) {
      const int n = static_cast<int>(eligible.size());
      const int64_t base = budget / n;
      uint32_t start_rb = 0;
      for (int idx : eligible) {
        if (base <= 0) {
          continue;
        }
        emit_ul_grant(idx, start_rb, static_cast<uint32_t>(base), s, t);
        start_rb += static_cast<uint32_t>(base);
      }
    }
  }

  void emit_ul_grant(int ue_index, uint32_t start_rb, uint32_t num_rb, int64_t s, const SimTime& t)
  {
    EngineUe& e = ues_[static_cast<size_t>(ue_index)];
    DciMessage d;
    d.rnti = Rnti{e.cfg.rnti};
    d.kind = DciKind::UlGrant;
    ResourceAllocation alloc;
    alloc.start_rb = start_rb;
    alloc.num_rb = num_rb;
    alloc.slot = slot_advance(t.t, cfg_.scheduler.ul_grant_lead_slots);
    alloc.direction = Direction::UL;
    d.alloc = alloc;
    d.tpc = 1;  // hold power
    legit_ul_dcis_.push_back({ue_index, d, 0});
    auto it = bs_.connected.find(Rnti{e.cfg.rnti});
    if (it != bs_.connected.end()) {
      it->second.last_activity_ms = t.ms();
    }
    ul_reserved_[s + cfg_.scheduler.ul_grant_lead_slots] += num_rb;
  }

  struct LegitDci {
    int ue_index;
    DciMessage dci;
    int carrier;
  };

  void deliver_pdcch(int64_t s, const SimTime& t, int bucket, std::vector<AttackerDci>& injections)
  {
    (void)bucket;
    // Legitimate DCIs first, in scheduling order.
    for (const LegitDci& ld : legit_dl_dcis_) {
      deliver_legit_dci(ld, s, t, injections);
    }
    for (const LegitDci& ld : legit_ul_dcis_) {
      deliver_legit_dci(ld, s, t, injections);
    }
    legit_ul_dcis_.clear();

    // Attacker DCIs on free PDCCH candidates (or leftovers from overshadow
    // contests that had no legitimate counterpart).
    for (AttackerDci& ad : injections) {
      if (ad.action_idx < 0) {
        continue;  // consumed by an overshadow contest
      }
      deliver_attacker_dci(ad, s, t);
    }
  }

  void deliver_legit_dci(const LegitDci& ld, int64_t s, const SimTime& t,
                         std::vector<AttackerDci>& injections)
  {
    EngineUe& e = ues_[static_cast<size_t>(ld.ue_index)];
    if (!e.attached || !e.st.rnti) {
      return;
    }

    const BitString bits = encode_dci(ld.dci, cfg_.cell.bandwidth_rb, t.t);
    sniff_dci(bits, t);

    // A UE listening on another BWP, beamformed away, or no longer
    // monitoring the carrier misses the PDCCH entirely; the BS expectation
    // stays, which is the attack's leverage.
    auto ctx_it = bs_.connected.find(*e.st.rnti);
    const bool beam_ok =
        ctx_it == bs_.connected.end() || ctx_it->second.beam_view == e.st.serving_beam_idx;
    const bool bwp_ok = e.st.active_bwp == cfg_.cell.legit_bwp;
    const bool carrier_ok = ld.carrier == 0 || e.st.active_scells.count(ld.carrier) > 0;
    if (!bwp_ok || !beam_ok || !carrier_ok) {
      return;
    }

    const PowerDbm legit_rx{cfg_.cell.bs_tx_power_dbm - e.cfg.path_loss_db};
    std::optional<PowerDbm> spoof_rx;
    AttackerDci* contender = nullptr;
    for (AttackerDci& ad : injections) {
      if (ad.overshadow && ad.action_idx >= 0 && ad.dci.rnti == *e.st.rnti) {
        contender = &ad;
        spoof_rx = PowerDbm{ad.tx_power_dbm - attacker_pl_to(e.cfg.rnti)};
        break;
      }
    }
    DecodeOutcome outcome = decode_outcome(legit_rx, spoof_rx, true, cfg_.channel);
    if (outcome == DecodeOutcome::SpoofDecoded && blocked_by_mitigation(true)) {
      outcome = DecodeOutcome::LegitDecoded;
      log_event(t.ms(), "blocked_injection", e.cfg.rnti, "dci_overshadow", contender->action_idx);
      contender->action_idx = -1;
    }
    if (outcome == DecodeOutcome::SpoofDecoded) {
      log_event(t.ms(), "injection", e.cfg.rnti, "dci_overshadow", contender->action_idx);
      process_decoded_dci(ld.ue_index, contender->dci, contender->pdsch, true,
                          contender->action_idx, s, t, ld.carrier);
      contender->action_idx = -1;
      return;
    }
    if (outcome == DecodeOutcome::Collision) {
      if (contender) {
        contender->action_idx = -1;
      }
      return;  // neither copy decodes
    }

    // Bit-exact path: encoded at the BS, blind-decoded at the UE.
    const DciDecodeResult dec = decode_dci(bits, {*e.st.rnti}, cfg_.cell.bandwidth_rb, t.t);
    if (!dec.msg) {
      return;
    }
    process_decoded_dci(ld.ue_index, *dec.msg, std::nullopt, false, -1, s, t, ld.carrier);
  }

  void deliver_attacker_dci(AttackerDci& ad, int64_t s, const SimTime& t)
  {
    const int idx = ue_index_of(ad.dci.rnti);
    if (idx < 0) {
      return;
    }
    EngineUe& e = ues_[static_cast<size_t>(idx)];
    if (!e.attached || !e.st.rnti) {
      return;
    }
    const PowerDbm spoof_rx{ad.tx_power_dbm - attacker_pl_to(e.cfg.rnti)};
    const DecodeOutcome outcome =
        decode_outcome(std::nullopt, spoof_rx, /*occupied=*/false, cfg_.channel);
    if (outcome != DecodeOutcome::SpoofDecoded) {
      return;
    }
    if (blocked_by_mitigation(true)) {
      log_event(t.ms(), "blocked_injection", e.cfg.rnti, "dci", ad.action_idx);
      return;
    }
    const BitString bits = encode_dci(ad.dci, cfg_.cell.bandwidth_rb, t.t);
    const DciDecodeResult dec = decode_dci(bits, {*e.st.rnti}, cfg_.cell.bandwidth_rb, t.t);
    if (!dec.msg) {
      return;
    }
    std::string kind;
    switch (dec.msg->kind) {
      case DciKind::UlGrant: kind = "ul_grant"; break;
      case DciKind::DlAssignment: kind = "dl_assignment"; break;
      case DciKind::PdcchOrder: kind = "pdcch_order"; break;
      case DciKind::BwpSwitch: kind = "bwp_switch"; break;
    }
    log_event(t.ms(), "injection", e.cfg.rnti, "dci_" + kind, ad.action_idx);
    process_decoded_dci(idx, *dec.msg, ad.pdsch, true, ad.action_idx, s, t, 0);
  }

  void process_decoded_dci(int ue_index, const DciMessage& d, const std::optional<MacPdu>& pdsch,
                           bool from_attacker, int action_idx, int64_t s, const SimTime& t,
                           int carrier)
  {
    EngineUe& e = ues_[static_cast<size_t>(ue_index)];

    if (d.kind == DciKind::DlAssignment) {
      bool decode_ok = false;
      if (from_attacker) {
        // Crafted PDCCH and PDSCH arrive together; the payload decodes at
        // the same received power that carried the DCI.
        if (pdsch) {
          const std::vector<uint8_t> tb =
              wrap_transport_block(encode_mac_pdu(*pdsch), *e.st.rnti);
          const auto unwrapped = unwrap_transport_block(tb, *e.st.rnti);
          if (unwrapped) {
            const MacPdu decoded = decode_mac_pdu(*unwrapped);
            for (const MacElement& ce : decoded.elements) {
              apply_mac_ce(e.st, ce, t, cfg_.cell.scell_deactivation_timer_ms);
              log_mac_ce(e, ce, t, action_idx);
            }
            decode_ok = true;
          }
        } else {
          decode_ok = true;
        }
      } else {
        // Alignment was already checked on the PDCCH path; the data decodes
        // and its capacity is booked.
        decode_ok = true;
        double share_mbps = throughput_mbps(*d.alloc, dl_sinr_db(e), cfg_.cell.mu, cfg_.channel);
        e.bucket_bits += share_mbps * 1e6 * (slot_ms_ / 1000.0);
        (void)carrier;
      }
      if (d.harq_feedback_timing > 0) {
        harq_on_assignment(e.st, d, decode_ok, s);
      }
      return;
    }

    bool has_ul_data = e.cfg.traffic == TrafficKind::FullBufferUl;
    if (from_attacker && d.kind == DciKind::UlGrant) {
      // COTS grant application jitter: the first spoofed grant arms a delay
      // before the UE starts following the injected schedule.
      if (e.st.obey_spoofed_grants_from_ms < 0.0) {
        e.st.obey_spoofed_grants_from_ms =
            t.ms() + rngs_.attacker.next_real_in(0.0, cfg_.attacker.grant_apply_jitter_max_ms);
      }
      if (t.ms() < e.st.obey_spoofed_grants_from_ms) {
        return;
      }
      has_ul_data = false;  // induced grants are filled with padding
    }

    const UeDciActions actions =
        ue_on_dci(e.st, d, t, has_ul_data, true, rngs_.procedures, cfg_.procedures);
    if (actions.ul_tx) {
      PendingUlTx tx;
      const int64_t hyper = static_cast<int64_t>(kSfnPeriod) * kSubframesPerFrame * spsf();
      int64_t offset = (d.alloc->slot.hyper_slot() - t.t.hyper_slot()) % hyper;
      if (offset < 0) {
        offset += hyper;
      }
      if (offset > kDciMaxSlotOffset) {
        offset = 0;
      }
      tx.slot = s + offset;
      tx.ue_index = ue_index;
      tx.alloc = actions.ul_tx->alloc;
      tx.power_dbm = actions.ul_tx->power.dbm;
      tx.legit = !from_attacker;
      tx.padding = actions.ul_tx->fully_padded;
      pending_ul_tx_.push_back(tx);
    }
    if (actions.started_ra) {
      // Msg1 goes out at the next PRACH occasion.
      e.st.ra.msg1_pending = true;
      e.st.ra.earliest_msg1_slot = s;
      log_event(t.ms(), from_attacker ? "po_ra_start" : "ra_start", e.cfg.rnti, "",
                action_idx);
    }
    if (actions.bwp_switched) {
      log_event(t.ms(), "bwp_switch", e.cfg.rnti, "bwp=" + std::to_string(e.st.active_bwp),
                action_idx);
    }
  }

  void log_mac_ce(EngineUe& e, const MacElement& ce, const SimTime& t, int action_idx)
  {
    std::string what;
    if (std::holds_alternative<ScellActDeact>(ce)) {
      what = "scell_bitmap=" + std::to_string(std::get<ScellActDeact>(ce).bitmap);
      // Spoofed CE: the UE state moved, the BS view did not. That divergence
      // is the attack effect.
      log_event(t.ms(), "scell_divergence", e.cfg.rnti, what, action_idx);
      return;
    }
    if (std::holds_alternative<TimingAdvanceCmd>(ce)) {
      what = "ta";
    } else if (std::holds_alternative<SpSrsActDeact>(ce)) {
      what = std::get<SpSrsActDeact>(ce).active ? "srs_on" : "srs_off";
    } else if (std::holds_alternative<CsiReportingActDeact>(ce)) {
      what = std::get<CsiReportingActDeact>(ce).active ? "csi_on" : "csi_off";
    } else if (std::holds_alternative<RecommendedBitRate>(ce)) {
      what = "bitrate";
    } else {
      what = "ce";
    }
    log_event(t.ms(), "mac_ce", e.cfg.rnti, what, action_idx);
  }

  void prach_occasion(int64_t s, const SimTime& t, int bucket)
  {
    if (!is_prach_occasion(s)) {
      return;
    }
    std::vector<RachEntry> entries;
    for (size_t i = 0; i < ues_.size(); ++i) {
      EngineUe& e = ues_[i];
      // Fresh initial access starts here once the SIB has been read.
      if (e.wants_attach && e.sib_read && e.st.ra.phase == RaPhase::Idle) {
        ra_start(e.st, e.st.ra.window_cfg, t, rngs_.procedures);
        e.in_initial_access = true;
        e.wants_attach = false;
        e.storm_first_msg1 = s;
        record_msg1(static_cast<int>(i), s, t, bucket, entries);
        continue;
      }
      // Retries and PDCCH-order starts wait for the occasion.
      if (e.st.ra.phase == RaPhase::WaitingRar && e.st.ra.msg1_pending &&
          s >= e.st.ra.earliest_msg1_slot) {
        e.st.ra.msg1_slot = s;
        e.st.ra.deadline_slot =
            s + (3 + window_subframes(e.st.ra.window_cfg.window)) * spsf();
        e.st.ra.msg1_pending = false;
        if (e.storm_first_msg1 < 0) {
          e.storm_first_msg1 = s;
        }
        record_msg1(static_cast<int>(i), s, t, bucket, entries);
      }
    }
    if (entries.empty()) {
      return;
    }
    report_.cell.rach_load[static_cast<size_t>(bucket)] += static_cast<int>(entries.size());
    const RachOccasionResult res =
        bs_on_rach_occasion(entries, t, bs_.rar_rtt_ms, cfg_.procedures.rar_capacity_per_occasion,
                            cfg_.cell.rar_ta, Rnti{static_cast<uint16_t>(0x4600 + tc_counter_)});
    tc_counter_ = (tc_counter_ + res.rars.size()) % 0x100;
    if (res.overload_dropped > 0) {
      log_event(t.ms(), "rach_overload", -1, "dropped=" + std::to_string(res.overload_dropped));
    }
    for (const RarPlan& plan : res.rars) {
      pending_rars_.push_back({plan});
      ra_holds_.push_back({s + static_cast<int64_t>(cfg_.scheduler.ra_hold_sf) * spsf()});
    }
  }

  void record_msg1(int ue_index, int64_t s, const SimTime& t, int bucket,
                   std::vector<RachEntry>& entries)
  {
    EngineUe& e = ues_[static_cast<size_t>(ue_index)];
    RachEntry entry;
    entry.preamble = e.st.ra.preamble;
    entry.beam_idx = e.st.serving_beam_idx;
    entry.ue_index = ue_index;
    entries.push_back(entry);
    series(ue_index).ra_attempts[static_cast<size_t>(bucket)] += 1;
    if (series(ue_index).first_msg1_ms < 0.0) {
      series(ue_index).first_msg1_ms = t.ms();
    }
    (void)s;
  }

  void deliver_rars(int64_t s, const SimTime& t, int bucket)
  {
    (void)s;
    (void)bucket;
    for (const RarPlan& plan : rars_to_deliver_) {
      PendingMsg3 m3;
      m3.slot = t.abs_slot + 2;
      m3.tc_rnti = plan.rar.tc_rnti;
      m3.beam_idx = plan.beam_idx;
      for (int ue_index : plan.contenders) {
        EngineUe& e = ues_[static_cast<size_t>(ue_index)];
        const double rx = cfg_.cell.bs_tx_power_dbm - e.cfg.path_loss_db;
        if (rx < cfg_.channel.sensitivity_dbm) {
          continue;
        }
        // Bit-exact RAR path.
        const BitString bits = encode_rar(plan.rar);
        const auto decoded = decode_rar(bits);
        if (!decoded) {
          continue;
        }
        if (ue_on_rar(e.st, *decoded, t)) {
          m3.accepted.push_back(ue_index);
        }
      }
      sniff_rar(plan, t);
      if (!m3.accepted.empty()) {
        ul_reserved_[m3.slot] += cfg_.scheduler.msg3_rb;
        pending_msg3_.push_back(m3);
      }
    }
    rars_to_deliver_.clear();
  }

  void msg3_exchange(int64_t s, const SimTime& t)
  {
    for (auto it = pending_msg3_.begin(); it != pending_msg3_.end();) {
      if (it->slot != s) {
        ++it;
        continue;
      }
      // Colliding contenders answered the same RAR; the lowest RNTI wins
      // contention resolution at Msg4.
      std::vector<int> accepted = it->accepted;
      std::sort(accepted.begin(), accepted.end(), [this](int a, int b) {
        return ues_[static_cast<size_t>(a)].cfg.rnti < ues_[static_cast<size_t>(b)].cfg.rnti;
      });
      PendingMsg4 m4;
      m4.slot = s + 2;
      m4.winner = accepted.front();
      for (size_t k = 1; k < accepted.size(); ++k) {
        m4.losers.push_back(accepted[k]);
      }
      pending_msg4_.push_back(m4);
      it = pending_msg3_.erase(it);
      (void)t;
    }
  }

  void msg4_exchange(int64_t s, const SimTime& t, int bucket)
  {
    (void)bucket;
    for (auto it = pending_msg4_.begin(); it != pending_msg4_.end();) {
      if (it->slot != s) {
        ++it;
        continue;
      }
      EngineUe& w = ues_[static_cast<size_t>(it->winner)];
      ue_on_msg4(w.st, true, t, rngs_.procedures, cfg_.procedures);
      if (w.st.ra.phase == RaPhase::Done) {
        series(it->winner).ra_done += 1;
        w.storm_first_msg1 = -1;
        if (w.in_initial_access) {
          attach_after_ra(w, t);
        }
        w.st.ra.phase = RaPhase::Idle;
        log_event(t.ms(), "ra_done", w.cfg.rnti, "");
      }
      for (int loser : it->losers) {
        EngineUe& l = ues_[static_cast<size_t>(loser)];
        ue_on_msg4(l.st, false, t, rngs_.procedures, cfg_.procedures);
        log_event(t.ms(), "contention_lost", l.cfg.rnti, "");
      }
      it = pending_msg4_.erase(it);
    }
  }

  void attach_after_ra(EngineUe& e, const SimTime& t)
  {
    e.attached = true;
    e.in_initial_access = false;
    e.st.rnti = Rnti{e.cfg.rnti};
    e.st.radio_link_failed = false;
    BsUeContext ctx;
    ctx.rnti = Rnti{e.cfg.rnti};
    ctx.beam_view = e.st.serving_beam_idx;
    ctx.last_activity_ms = t.ms();
    bs_.connected[Rnti{e.cfg.rnti}] = ctx;
  }

  void uplink_transmissions(int64_t s, const SimTime& t, int bucket)
  {
    (void)bucket;
    // Conservation at the transmission slot: reservations plus RA holds must
    // fit the carrier.
    const int64_t scheduled = ul_reserved_[s];
    const int64_t holds =
        std::min<int64_t>(cfg_.cell.bandwidth_rb - std::min<int64_t>(scheduled,
                                                                     cfg_.cell.bandwidth_rb),
                          static_cast<int64_t>(holds_active_at(s)) * cfg_.scheduler.ra_hold_ul_rb);
    if (scheduled > cfg_.cell.bandwidth_rb) {
      conservation_ok_ = false;
    }
    max_utilization_ = std::max(
        max_utilization_, static_cast<double>(scheduled + holds) / cfg_.cell.bandwidth_rb);
    ul_reserved_.erase(s);
    if (ra_holds_.size() > 1024) {
      std::erase_if(ra_holds_, [s](const RaHold& h) { return h.until_slot <= s; });
    }

    // Rogue transmissions this slot become interference for everyone else.
    std::vector<PowerDbm> rogue_rx_at_bs;
    for (const PendingUlTx& tx : pending_ul_tx_) {
      if (tx.slot == s && !tx.legit) {
        const EngineUe& e = ues_[static_cast<size_t>(tx.ue_index)];
        rogue_rx_at_bs.push_back({tx.power_dbm - e.cfg.path_loss_db});
      }
    }

    for (auto it = pending_ul_tx_.begin(); it != pending_ul_tx_.end();) {
      if (it->slot != s) {
        ++it;
        continue;
      }
      EngineUe& e = ues_[static_cast<size_t>(it->ue_index)];
      if (it->legit && !it->padding && e.attached) {
        const PowerDbm rx{it->power_dbm - e.cfg.path_loss_db};
        const SinrSample sample = sinr(rx, rogue_rx_at_bs, cfg_.cell.noise_dbm);
        const double mbps = throughput_mbps(it->alloc, sample.sinr_db, cfg_.cell.mu, cfg_.channel);
        e.bucket_bits += mbps * 1e6 * (slot_ms_ / 1000.0);
      }
      it = pending_ul_tx_.erase(it);
    }
  }

  void harq_feedback(int64_t s, const SimTime& t)
  {
    if (!is_feedback_slot(s)) {
      return;
    }
    for (size_t i = 0; i < ues_.size(); ++i) {
      EngineUe& e = ues_[i];
      if (!e.attached || !e.st.rnti) {
        continue;
      }
      auto ctx_it = bs_.connected.find(*e.st.rnti);
      if (ctx_it == bs_.connected.end()) {
        continue;
      }
      const auto bitmap = ue_collect_feedback(e.st, s, t.t);
      const int received = bitmap ? static_cast<int>(bitmap->bits.size()) : 0;
      const FeedbackResult res =
          bs_on_feedback_slot(ctx_it->second, received, s, t, cfg_.procedures);
      if (res.outcome == FeedbackOutcome::HarqFailure ||
          res.outcome == FeedbackOutcome::MissingFeedback) {
        std::string bits;
        if (bitmap) {
          for (Ack a : bitmap->bits) {
            bits.push_back(a == Ack::ACK ? 'A' : 'N');
          }
        }
        log_event(t.ms(),
                  res.outcome == FeedbackOutcome::HarqFailure ? "harq_failure" : "missing_feedback",
                  e.cfg.rnti, "received=" + std::to_string(received) + ";bits=" + bits);
      }
      if (res.radio_link_failed) {
        apply_rlf(e, t, "harq");
      }
    }
  }

  void ra_timeouts(int64_t s, const SimTime& t, int bucket)
  {
    (void)bucket;
    (void)s;
    for (size_t i = 0; i < ues_.size(); ++i) {
      EngineUe& e = ues_[i];
      if (e.st.ra.phase != RaPhase::WaitingRar) {
        continue;
      }
      const RaTickEvent ev = ra_tick(e.st, t, rngs_.procedures, cfg_.procedures);
      if (ev == RaTickEvent::Failed) {
        series(static_cast<int>(i)).ra_failed += 1;
        const double storm_ms =
            e.storm_first_msg1 >= 0 ? (t.ms() - e.storm_first_msg1 * slot_ms_) : 0.0;
        if (series(static_cast<int>(i)).first_ra_failed_ms < 0.0) {
          series(static_cast<int>(i)).first_ra_failed_ms = t.ms();
        }
        log_event(t.ms(), "ra_failed", e.cfg.rnti,
                  "attempts=" + std::to_string(e.st.ra.attempt) +
                      ";storm_ms=" + std::to_string(storm_ms));
        e.storm_first_msg1 = -1;
        apply_rlf(e, t, "ra");
      }
    }
  }

  void csi_reports(int64_t s, const SimTime& t)
  {
    const int64_t period_slots =
        std::max<int64_t>(1, static_cast<int64_t>(cfg_.cell.csi_period_ms / slot_ms_));
    if (s % period_slots != 0) {
      return;
    }
    for (EngineUe& e : ues_) {
      if (!e.attached || !e.st.rnti) {
        continue;
      }
      const CsiSchedule& sched = e.st.csi_schedule;
      const bool due = sched.kind == CsiScheduleKind::Periodic ||
                       (sched.kind == CsiScheduleKind::SemiPersistent && sched.active);
      if (!due) {
        continue;
      }
      CsiReport r;
      r.rnti = *e.st.rnti;
      r.beam_idx = e.st.serving_beam_idx;
      double rsrp = cfg_.cell.bs_tx_power_dbm - e.cfg.path_loss_db;
      rsrp = std::clamp(rsrp, -156.0, -31.0);
      r.rsrp_dbm = std::round(rsrp);
      r.t = t.t;
      sniff_csi(r, e, t);
    }
  }

  void inactivity_release(const SimTime& t)
  {
    for (auto& [rnti, ctx] : bs_.connected) {
      if (ctx.released) {
        continue;
      }
      if (t.ms() - ctx.last_activity_ms > cfg_.procedures.rrc_inactivity_timeout_ms) {
        ctx.released = true;
        const int idx = ue_index_of(rnti);
        log_event(t.ms(), "rrc_release", rnti.value, "inactivity");
        if (idx >= 0) {
          EngineUe& e = ues_[static_cast<size_t>(idx)];
          e.attached = false;
          e.st.rnti.reset();
        }
      }
    }
    for (auto it = bs_.connected.begin(); it != bs_.connected.end();) {
      it = it->second.released ? bs_.connected.erase(it) : std::next(it);
    }
  }

  // ---- sniffer ------------------------------------------------------------

  void sniff_dci(const BitString& bits, const SimTime& t)
  {
    if (!cfg_.attacker.present) {
      return;
    }
    const double rx = cfg_.cell.bs_tx_power_dbm - cfg_.attacker.path_loss_to_bs_db;
    if (rx < cfg_.channel.sensitivity_dbm) {
      return;
    }
    if (cfg_.mitigation_enabled) {
      return;  // scrambled payload, nothing to decode
    }
    const DciDecodeResult dec = decode_dci(bits, all_rntis(), cfg_.cell.bandwidth_rb, t.t);
    if (dec.msg) {
      sniffer_.observed_rntis.insert(dec.msg->rnti.value);
      sniffer_.dcis.push_back({t.ms(), *dec.msg});
    }
  }

  void sniff_csi(const CsiReport& r, const EngineUe& e, const SimTime& t)
  {
    if (!cfg_.attacker.present) {
      return;
    }
    const double rx = e.st.tx_power.dbm - attacker_pl_to(e.cfg.rnti);
    if (rx < cfg_.channel.sensitivity_dbm) {
      return;
    }
    if (cfg_.mitigation_enabled) {
      return;
    }
    const BitString bits = encode_csi_report(r);
    const CsiDecodeResult dec = decode_csi_report(bits, all_rntis(), t.t);
    if (dec.report) {
      sniffer_.observed_rntis.insert(dec.report->rnti.value);
      sniffer_.csi_reports.push_back(
          {t.ms(), dec.report->rnti.value, dec.report->beam_idx, dec.report->rsrp_dbm});
    }
  }

  void sniff_rar(const RarPlan& plan, const SimTime& t)
  {
    if (!cfg_.attacker.present) {
      return;
    }
    const double rx = cfg_.cell.bs_tx_power_dbm - cfg_.attacker.path_loss_to_bs_db;
    if (rx < cfg_.channel.sensitivity_dbm || cfg_.mitigation_enabled) {
      return;
    }
    const auto decoded = decode_rar(encode_rar(plan.rar));
    if (decoded) {
      sniffer_.ra_exchanges.push_back({t.ms(), plan.beam_idx, decoded->ta});
    }
  }

  // ---- members -----------------------------------------------------------

  ScenarioConfig cfg_;
  RngStreams rngs_;
  double slot_ms_;
  int n_buckets_ = 0;

  std::vector<EngineUe> ues_;
  BsState bs_;
  std::vector<AttackAction> actions_;
  std::optional<SibSpoof> pending_sib_spoof_;

  std::vector<PendingRar> pending_rars_;
  std::vector<RarPlan> rars_to_deliver_;
  std::vector<PendingMsg3> pending_msg3_;
  std::vector<PendingMsg4> pending_msg4_;
  std::vector<PendingUlTx> pending_ul_tx_;
  std::vector<PendingSrGrant> sr_grants_;
  std::vector<RaHold> ra_holds_;
  std::map<int64_t, int64_t> ul_reserved_;
  std::vector<LegitDci> legit_dl_dcis_;
  std::vector<LegitDci> legit_ul_dcis_;
  size_t tc_counter_ = 0;

  MetricsReport report_;
  SnifferView sniffer_;
  double max_utilization_ = 0.0;
  bool conservation_ok_ = true;
};

}  // namespace

void validate(const ScenarioConfig& cfg)
{
  if (cfg.duration_ms <= 0.0) {
    throw config_error("duration_ms must be positive");
  }
  if (cfg.cell.bandwidth_rb == 0) {
    throw config_error("bandwidth_rb must be positive");
  }
  if (cfg.cell.mu < 0 || cfg.cell.mu > 4) {
    throw config_error("mu out of range");
  }
  std::set<uint16_t> rntis;
  for (const UeConfig& u : cfg.ues) {
    if (u.rnti == 0) {
      throw config_error("UE RNTI must be nonzero");
    }
    if (!rntis.insert(u.rnti).second) {
      throw config_error("duplicate RNTI " + std::to_string(u.rnti));
    }
    for (int c : u.initial_scells) {
      if (c < 1 || c > cfg.cell.scell_count) {
        throw config_error("initial SCell index out of range");
      }
    }
  }
  for (const AttackAction& a : cfg.attacker.actions) {
    if (a.at_slot < 0) {
      throw config_error("attack action before start of simulation");
    }
  }
  if (cfg.cell.sib.num_preambles < 1 || cfg.cell.sib.num_preambles > 64) {
    throw config_error("num_preambles out of range");
  }
}

SimResult run(const ScenarioConfig& cfg)
{
  validate(cfg);
  Engine engine(cfg);
  return engine.run_all();
}

}  // namespace llc
