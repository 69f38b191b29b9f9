#pragma once

#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "llc/codec.h"
#include "llc/core.h"

namespace llc {

// Injection primitives. DCI injections default to free PDCCH candidates;
// `overshadow` contends with the legitimate copy on the same resource
// instead. MAC CE injections expand to a crafted assignment plus PDSCH
// payload addressed to the target.
struct InjectDci {
  DciMessage dci;  // target RNTI carried in the CRC mask
  double tx_power_dbm = 33.0;
  bool overshadow = false;
};

struct InjectMacCe {
  Rnti target;
  MacElement ce;
  double tx_power_dbm = 33.0;
};

struct OvershadowSib {
  SibRaConfig sib;
  double tx_power_dbm = 33.0;
};

struct InjectPaging {
  double tx_power_dbm = 33.0;
};

struct SpoofSr {
  Rnti target;
};

using AttackOp = std::variant<InjectDci, InjectMacCe, OvershadowSib, InjectPaging, SpoofSr>;

struct AttackAction {
  int64_t at_slot = 0;
  int64_t repeat_period_slots = 0;  // 0: fire once at at_slot
  int64_t until_slot = -1;          // inclusive repeat bound; -1: open ended
  AttackOp op;
};

bool action_due(const AttackAction& a, int64_t slot);

// Passive capture log. Only messages that decoded at the attacker position
// appear here; keyed scrambling empties the content-bearing logs.
struct SniffedDci {
  double t_ms = 0.0;
  DciMessage dci;
};

struct SniffedCsi {
  double t_ms = 0.0;
  uint16_t rnti = 0;
  int beam_idx = 0;
  double rsrp_dbm = 0.0;
};

struct SniffedRa {
  double t_ms = 0.0;
  int beam_idx = 0;
  int ta = 0;
};

struct SnifferView {
  std::set<uint16_t> observed_rntis;
  std::vector<SniffedDci> dcis;
  std::vector<SniffedCsi> csi_reports;
  std::vector<SniffedRa> ra_exchanges;
};

}  // namespace llc
