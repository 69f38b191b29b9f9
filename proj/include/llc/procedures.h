#pragma once

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "llc/codec.h"
#include "llc/core.h"
#include "llc/rng.h"

namespace llc {

// Engine clock: absolute slot count since simulation start plus the radio
// framing of the same instant. Absolute time avoids SFN-wrap bookkeeping for
// horizons longer than the 10.24 s hyperperiod.
struct SimTime {
  int64_t abs_slot = 0;
  SlotTime t;

  double ms() const { return static_cast<double>(abs_slot) * slot_duration_ms(t.mu); }
};

struct ProcedureParams {
  int prach_period_sf = 10;      // PRACH occasion cadence
  int ra_retry_gap_sf = 2;       // readiness gap after RAR window expiry
  double rlf_harq_window_ms = 2000.0;
  double sr_grant_latency_ms = 4.0;
  double rrc_inactivity_timeout_ms = 10000.0;
  double scell_energy_factor = 0.79;  // extra current per active SCell
  double base_current_per_ms = 1.0;
  int rar_capacity_per_occasion = 4;
  double initial_ue_tx_power_dbm = 10.0;
};

// ---------------------------------------------------------------------------
// Random access
// ---------------------------------------------------------------------------

enum class RaPhase { Idle, WaitingRar, WaitingMsg4, Done, Failed };

struct RaState {
  RaPhase phase = RaPhase::Idle;
  int attempt = 0;
  int preamble = -1;
  SibRaConfig window_cfg;  // the UE's last decoded SIB copy
  int64_t msg1_slot = 0;
  int64_t deadline_slot = 0;  // RAR window end, valid while WaitingRar
  bool msg1_pending = false;  // timed out; next Msg1 waits for a PRACH occasion
  int64_t earliest_msg1_slot = 0;
};

// ---------------------------------------------------------------------------
// HARQ
// ---------------------------------------------------------------------------

struct HarqEntry {
  uint8_t dai_seen = 0;
  bool decode_ok = false;
  int64_t feedback_slot = 0;
};

struct HarqTracker {
  uint8_t ue_dai_expected = 0;  // next expected DAI, mod 4
  std::vector<HarqEntry> pending;
};

// ---------------------------------------------------------------------------
// UE state
// ---------------------------------------------------------------------------

constexpr double kInfiniteTimerMs = std::numeric_limits<double>::infinity();

struct ScellEntry {
  double deadline_ms = kInfiniteTimerMs;
};

enum class CsiScheduleKind { Off, Periodic, SemiPersistent };

struct CsiSchedule {
  CsiScheduleKind kind = CsiScheduleKind::Off;
  double period_ms = 20.0;
  bool active = true;  // SemiPersistent only; toggled by MAC CE
};

struct UeState {
  std::optional<Rnti> rnti;
  RaState ra;
  HarqTracker harq;
  std::map<int, ScellEntry> active_scells;  // SCell index 1..7 -> deactivation deadline
  int active_bwp = 0;
  CsiSchedule csi_schedule;
  bool srs_semipersistent_active = false;
  int serving_beam_idx = 0;
  int ta_value = 0;
  PowerDbm tx_power{10.0};
  double energy_units = 0.0;
  bool radio_link_failed = false;

  uint16_t recommended_bitrate_kbps = 0;  // 0 = uncapped
  double obey_spoofed_grants_from_ms = -1.0;  // grant application jitter gate
};

// ---------------------------------------------------------------------------
// BS state
// ---------------------------------------------------------------------------

struct BsUeContext {
  Rnti rnti;
  uint8_t dai_counter = 0;                      // mod 4, per DL assignment
  std::map<int64_t, int> expected_feedback_bits;  // feedback slot -> bitmap size
  uint8_t scell_view = 0;   // BS belief of the UE's active SCells (bitmap, bit i = SCell i)
  int beam_view = 0;        // BS belief of the UE's serving beam
  double last_activity_ms = 0.0;
  double harq_fail_since_ms = -1.0;  // start of the current failure streak
  bool released = false;
};

struct BsState {
  std::map<Rnti, BsUeContext> connected;
  double rar_rtt_ms = 7.0;
};

// ---------------------------------------------------------------------------
// UE-side operations
// ---------------------------------------------------------------------------

struct UlTxPlan {
  ResourceAllocation alloc;
  PowerDbm power;
  uint32_t padding_rb = 0;  // RBs carrying padding only
  bool fully_padded = false;
};

struct UeDciActions {
  std::optional<UlTxPlan> ul_tx;  // UlGrant
  bool started_ra = false;        // PdcchOrder
  bool bwp_switched = false;      // BwpSwitch
};

// The unprotected layer applies whatever it decodes; callers resolve PDSCH
// decoding before passing `pdsch_decode_ok` for DL assignments.
UeDciActions ue_on_dci(UeState& ue, const DciMessage& d, const SimTime& now, bool has_ul_data,
                       bool pdsch_decode_ok, Rng& rng, const ProcedureParams& params);

// Transmits Msg1 at `now`: draws a preamble and opens the RAR window.
void ra_start(UeState& ue, const SibRaConfig& cfg, const SimTime& now, Rng& rng);

enum class RaTickEvent { None, RetryScheduled, Failed };

RaTickEvent ra_tick(UeState& ue, const SimTime& now, Rng& rng, const ProcedureParams& params);

// RAR reception while the window is open; returns true when it matches the
// outstanding preamble.
bool ue_on_rar(UeState& ue, const RarMessage& rar, const SimTime& now);

// Msg4 outcome: winner completes RA, loser re-enters the retry path.
void ue_on_msg4(UeState& ue, bool contention_won, const SimTime& now, Rng& rng,
                const ProcedureParams& params);

void harq_on_assignment(UeState& ue, const DciMessage& d, bool decode_ok, int64_t alloc_abs_slot);

// Drains the entries aggregated at `fb_slot`, in arrival order.
std::optional<AckBitmap> ue_collect_feedback(UeState& ue, int64_t fb_slot, const SlotTime& t);

struct MacCeResult {
  bool bs_notified = false;  // the BS never learns of spoofed CE effects
};

MacCeResult apply_mac_ce(UeState& ue, const MacElement& ce, const SimTime& now,
                         double scell_timer_ms);

// Removes SCells whose deactivation timer has expired.
void scell_expire(UeState& ue, double now_ms);

int active_scell_count(const UeState& ue);

void energy_tick(UeState& ue, double dt_ms, const ProcedureParams& params);

// ---------------------------------------------------------------------------
// BS-side operations
// ---------------------------------------------------------------------------

struct RachEntry {
  int preamble = 0;
  int beam_idx = 0;
  int ue_index = 0;  // engine-side identifier of the sender
};

struct RarPlan {
  RarMessage rar;
  int64_t emit_slot = 0;
  std::vector<int> contenders;  // ue indices that sent this preamble
  int beam_idx = 0;
};

// Groups the preambles of one PRACH occasion into RAR emissions; colliding
// preambles share one RAR and resolve at Msg4. Emissions beyond the per
// occasion capacity are dropped.
struct RachOccasionResult {
  std::vector<RarPlan> rars;
  int overload_dropped = 0;
};

RachOccasionResult bs_on_rach_occasion(const std::vector<RachEntry>& entries, const SimTime& now,
                                       double rtt_ms, int capacity, uint16_t ta_value,
                                       Rnti tc_rnti_base);

enum class FeedbackOutcome { Quiet, Matched, HarqFailure, MissingFeedback };

struct FeedbackResult {
  FeedbackOutcome outcome = FeedbackOutcome::Quiet;
  bool radio_link_failed = false;
};

// Compares the received bitmap size (0 when missing) with the expectation
// for this feedback slot. A bitmap larger than expected cannot be resolved
// to transmissions (HarqFailure); a shorter one is a trailing-loss prefix
// the DAI rules still align, so the tail is retransmitted. Silence where
// feedback was expected counts as missing. Failure or missing streaks
// spanning the RLF window break the link.
FeedbackResult bs_on_feedback_slot(BsUeContext& ctx, int received_bits, int64_t fb_slot,
                                   const SimTime& now, const ProcedureParams& params);

enum class BsOpStatus { Ok, UnknownRnti };

struct SrResult {
  BsOpStatus status = BsOpStatus::UnknownRnti;
  double grant_at_ms = 0.0;
};

SrResult bs_on_sr(BsState& bs, Rnti rnti, const SimTime& now, const ProcedureParams& params);

BsOpStatus bs_on_bfr(BsState& bs, Rnti rnti, int new_beam_idx);

}  // namespace llc
