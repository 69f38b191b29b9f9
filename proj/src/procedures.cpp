#include "llc/procedures.h"

#include <algorithm>

namespace llc {

namespace {

int64_t slots_per_subframe(const SimTime& now)
{
  return 1 << now.t.mu;
}

}  // namespace

UeDciActions ue_on_dci(UeState& ue, const DciMessage& d, const SimTime& now, bool has_ul_data,
                       bool pdsch_decode_ok, Rng& rng, const ProcedureParams& params)
{
  (void)params;
  UeDciActions out;
  if (ue.radio_link_failed) {
    return out;
  }
  switch (d.kind) {
    case DciKind::UlGrant: {
      UlTxPlan plan;
      plan.alloc = *d.alloc;
      if (d.tpc == 3) {
        ue.tx_power = {kUeMaxTxPowerDbm};
      } else if (d.tpc == 0) {
        ue.tx_power = clamp_ue_tx_power({ue.tx_power.dbm - 1.0});
      } else if (d.tpc == 2) {
        ue.tx_power = clamp_ue_tx_power({ue.tx_power.dbm + 1.0});
      }
      plan.power = ue.tx_power;
      // The grant is filled regardless of buffered data; a shorter buffer is
      // padded out to the full allocation.
      plan.fully_padded = !has_ul_data;
      plan.padding_rb = has_ul_data ? 0 : plan.alloc.num_rb;
      out.ul_tx = plan;
      break;
    }
    case DciKind::DlAssignment: {
      harq_on_assignment(ue, d, pdsch_decode_ok, now.abs_slot);
      break;
    }
    case DciKind::PdcchOrder: {
      if (ue.ra.phase != RaPhase::WaitingRar && ue.ra.phase != RaPhase::WaitingMsg4) {
        ra_start(ue, ue.ra.window_cfg, now, rng);
        out.started_ra = true;
      }
      break;
    }
    case DciKind::BwpSwitch: {
      ue.active_bwp = d.bwp_indicator;
      out.bwp_switched = true;
      break;
    }
  }
  return out;
}

void ra_start(UeState& ue, const SibRaConfig& cfg, const SimTime& now, Rng& rng)
{
  ue.ra.window_cfg = cfg;
  ue.ra.attempt = 1;
  ue.ra.preamble = static_cast<int>(rng.next_below(static_cast<uint64_t>(cfg.num_preambles)));
  ue.ra.phase = RaPhase::WaitingRar;
  ue.ra.msg1_slot = now.abs_slot;
  const int window_sf = 3 + window_subframes(cfg.window);
  ue.ra.deadline_slot = now.abs_slot + window_sf * slots_per_subframe(now);
  ue.ra.msg1_pending = false;
}

RaTickEvent ra_tick(UeState& ue, const SimTime& now, Rng& rng, const ProcedureParams& params)
{
  if (ue.ra.phase != RaPhase::WaitingRar || ue.ra.msg1_pending) {
    return RaTickEvent::None;
  }
  if (now.abs_slot <= ue.ra.deadline_slot) {
    return RaTickEvent::None;
  }
  const SibRaConfig& cfg = ue.ra.window_cfg;
  if (ue.ra.attempt + 1 > preamble_trans_max_value(cfg.preamble_trans_max)) {
    ue.ra.phase = RaPhase::Failed;
    ue.radio_link_failed = true;
    ue.rnti.reset();
    return RaTickEvent::Failed;
  }
  ue.ra.attempt += 1;
  ue.tx_power = clamp_ue_tx_power(
      {ue.tx_power.dbm + static_cast<double>(ramping_step_db(cfg.power_ramping_step))});
  ue.ra.preamble = static_cast<int>(rng.next_below(static_cast<uint64_t>(cfg.num_preambles)));
  ue.ra.msg1_pending = true;
  ue.ra.earliest_msg1_slot =
      ue.ra.deadline_slot + params.ra_retry_gap_sf * slots_per_subframe(now);
  return RaTickEvent::RetryScheduled;
}

bool ue_on_rar(UeState& ue, const RarMessage& rar, const SimTime& now)
{
  if (ue.ra.phase != RaPhase::WaitingRar || ue.ra.msg1_pending) {
    return false;
  }
  if (now.abs_slot > ue.ra.deadline_slot) {
    return false;
  }
  if (rar.preamble != ue.ra.preamble) {
    return false;
  }
  ue.ta_value = rar.ta;
  ue.ra.phase = RaPhase::WaitingMsg4;
  return true;
}

void ue_on_msg4(UeState& ue, bool contention_won, const SimTime& now, Rng& rng,
                const ProcedureParams& params)
{
  if (ue.ra.phase != RaPhase::WaitingMsg4) {
    return;
  }
  if (contention_won) {
    ue.ra.phase = RaPhase::Done;
    return;
  }
  const SibRaConfig& cfg = ue.ra.window_cfg;
  if (ue.ra.attempt + 1 > preamble_trans_max_value(cfg.preamble_trans_max)) {
    ue.ra.phase = RaPhase::Failed;
    ue.radio_link_failed = true;
    ue.rnti.reset();
    return;
  }
  ue.ra.attempt += 1;
  ue.tx_power = clamp_ue_tx_power(
      {ue.tx_power.dbm + static_cast<double>(ramping_step_db(cfg.power_ramping_step))});
  ue.ra.preamble = static_cast<int>(rng.next_below(static_cast<uint64_t>(cfg.num_preambles)));
  ue.ra.phase = RaPhase::WaitingRar;
  ue.ra.msg1_pending = true;
  ue.ra.earliest_msg1_slot = now.abs_slot + params.ra_retry_gap_sf * slots_per_subframe(now);
}

void harq_on_assignment(UeState& ue, const DciMessage& d, bool decode_ok, int64_t alloc_abs_slot)
{
  const int64_t fb_slot = alloc_abs_slot + d.harq_feedback_timing;
  // The DAI gap reveals how many assignments were missed since the last
  // decoded one; each is acknowledged negatively.
  const uint8_t gap = static_cast<uint8_t>((d.dai - ue.harq.ue_dai_expected) & 0x3);
  for (uint8_t i = 0; i < gap; ++i) {
    HarqEntry missed;
    missed.dai_seen = static_cast<uint8_t>((ue.harq.ue_dai_expected + i) & 0x3);
    missed.decode_ok = false;
    missed.feedback_slot = fb_slot;
    ue.harq.pending.push_back(missed);
  }
  HarqEntry e;
  e.dai_seen = d.dai;
  e.decode_ok = decode_ok;
  e.feedback_slot = fb_slot;
  ue.harq.pending.push_back(e);
  ue.harq.ue_dai_expected = static_cast<uint8_t>((d.dai + 1) & 0x3);
}

std::optional<AckBitmap> ue_collect_feedback(UeState& ue, int64_t fb_slot, const SlotTime& t)
{
  AckBitmap bitmap;
  bitmap.t = t;
  std::vector<HarqEntry> rest;
  rest.reserve(ue.harq.pending.size());
  for (const HarqEntry& e : ue.harq.pending) {
    if (e.feedback_slot == fb_slot) {
      bitmap.bits.push_back(e.decode_ok ? Ack::ACK : Ack::NACK);
    } else {
      rest.push_back(e);
    }
  }
  if (bitmap.bits.empty()) {
    return std::nullopt;
  }
  ue.harq.pending = std::move(rest);
  return bitmap;
}

MacCeResult apply_mac_ce(UeState& ue, const MacElement& ce, const SimTime& now,
                         double scell_timer_ms)
{
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ScellActDeact>) {
          ue.active_scells.clear();
          for (int i = 1; i <= 7; ++i) {
            if (v.bitmap & (1u << i)) {
              ScellEntry entry;
              entry.deadline_ms = now.ms() + scell_timer_ms;  // +inf stays infinite
              ue.active_scells[i] = entry;
            }
          }
        } else if constexpr (std::is_same_v<T, TimingAdvanceCmd>) {
          // 6-bit command applies a signed adjustment around the 31 midpoint.
          ue.ta_value = std::max(0, ue.ta_value + static_cast<int>(v.ta) - 31);
        } else if constexpr (std::is_same_v<T, SpSrsActDeact>) {
          ue.srs_semipersistent_active = v.active;
        } else if constexpr (std::is_same_v<T, CsiReportingActDeact>) {
          if (ue.csi_schedule.kind == CsiScheduleKind::SemiPersistent) {
            ue.csi_schedule.active = v.active;
          }
        } else if constexpr (std::is_same_v<T, BeamFailureRecovery>) {
          // Uplink CE; the UE state is untouched, the BS view changes.
        } else if constexpr (std::is_same_v<T, RecommendedBitRate>) {
          ue.recommended_bitrate_kbps = v.kbps;
        } else if constexpr (std::is_same_v<T, MacSdu>) {
          // user data, no control effect
        }
      },
      ce);
  return {};
}

void scell_expire(UeState& ue, double now_ms)
{
  for (auto it = ue.active_scells.begin(); it != ue.active_scells.end();) {
    if (it->second.deadline_ms <= now_ms) {
      it = ue.active_scells.erase(it);
    } else {
      ++it;
    }
  }
}

int active_scell_count(const UeState& ue)
{
  return static_cast<int>(ue.active_scells.size());
}

void energy_tick(UeState& ue, double dt_ms, const ProcedureParams& params)
{
  ue.energy_units += dt_ms * params.base_current_per_ms *
                     (1.0 + params.scell_energy_factor * active_scell_count(ue));
}

RachOccasionResult bs_on_rach_occasion(const std::vector<RachEntry>& entries, const SimTime& now,
                                       double rtt_ms, int capacity, uint16_t ta_value,
                                       Rnti tc_rnti_base)
{
  RachOccasionResult out;
  std::map<int, RarPlan> per_preamble;
  for (const RachEntry& e : entries) {
    RarPlan& plan = per_preamble[e.preamble];
    plan.rar.preamble = static_cast<uint8_t>(e.preamble);
    plan.beam_idx = e.beam_idx;
    plan.contenders.push_back(e.ue_index);
  }
  const int64_t rtt_slots =
      static_cast<int64_t>(rtt_ms / slot_duration_ms(now.t.mu));
  int emitted = 0;
  uint16_t next_tc = tc_rnti_base.value;
  for (auto& [preamble, plan] : per_preamble) {
    if (emitted >= capacity) {
      out.overload_dropped += 1;
      continue;
    }
    plan.rar.ta = ta_value;
    plan.rar.tc_rnti = Rnti{next_tc++};
    plan.rar.msg3_num_rb = 2;
    plan.emit_slot = now.abs_slot + rtt_slots;
    out.rars.push_back(plan);
    ++emitted;
  }
  return out;
}

FeedbackResult bs_on_feedback_slot(BsUeContext& ctx, int received_bits, int64_t fb_slot,
                                   const SimTime& now, const ProcedureParams& params)
{
  FeedbackResult res;
  int expected = 0;
  auto it = ctx.expected_feedback_bits.find(fb_slot);
  if (it != ctx.expected_feedback_bits.end()) {
    expected = it->second;
    ctx.expected_feedback_bits.erase(it);
  }
  if (expected == 0 && received_bits == 0) {
    res.outcome = FeedbackOutcome::Quiet;
    return res;
  }
  if (received_bits > 0 && received_bits <= expected) {
    // Equal sizes match outright; a shorter bitmap is the trailing-loss
    // prefix and the unreported tail is retransmitted.
    res.outcome = FeedbackOutcome::Matched;
    ctx.harq_fail_since_ms = -1.0;
    ctx.last_activity_ms = now.ms();
    return res;
  }
  res.outcome =
      received_bits == 0 ? FeedbackOutcome::MissingFeedback : FeedbackOutcome::HarqFailure;
  if (ctx.harq_fail_since_ms < 0.0) {
    ctx.harq_fail_since_ms = now.ms();
  }
  if (now.ms() - ctx.harq_fail_since_ms >= params.rlf_harq_window_ms) {
    res.radio_link_failed = true;
  }
  return res;
}

SrResult bs_on_sr(BsState& bs, Rnti rnti, const SimTime& now, const ProcedureParams& params)
{
  SrResult res;
  auto it = bs.connected.find(rnti);
  if (it == bs.connected.end() || it->second.released) {
    res.status = BsOpStatus::UnknownRnti;
    return res;
  }
  it->second.last_activity_ms = now.ms();
  res.status = BsOpStatus::Ok;
  res.grant_at_ms = now.ms() + params.sr_grant_latency_ms;
  return res;
}

BsOpStatus bs_on_bfr(BsState& bs, Rnti rnti, int new_beam_idx)
{
  auto it = bs.connected.find(rnti);
  if (it == bs.connected.end() || it->second.released) {
    return BsOpStatus::UnknownRnti;
  }
  it->second.beam_view = new_beam_idx;
  return BsOpStatus::Ok;
}

}  // namespace llc
