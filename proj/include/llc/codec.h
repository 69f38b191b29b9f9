#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "llc/bits.h"
#include "llc/core.h"

namespace llc {

enum class codec_err {
  field_overflow,
  unknown_lcid,
  truncated_pdu,
  index_out_of_range,
  bad_value,
};

class codec_error : public std::runtime_error {
public:
  codec_error(codec_err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  codec_err code() const { return code_; }

private:
  codec_err code_;
};

// ---------------------------------------------------------------------------
// DCI
//
// Payload layout (MSB first):
//   kind:2 harq_pid:4 ndi:1 rv:2 mcs:5 tpc:2 bwp:2 start_rb:9 num_rb:9 k_offset:3   (39 bits)
// DlAssignment appends:
//   dai:2 fb_timing:3                                                               (44 bits)
// PdcchOrder uses the 39-bit layout with the predefined pattern
// start_rb = num_rb = 0x1FF and every other field zero.
// A CRC-16 masked with the addressed RNTI is appended to the payload.
// ---------------------------------------------------------------------------

enum class DciKind : uint8_t {
  UlGrant = 0,
  DlAssignment = 1,
  PdcchOrder = 2,
  BwpSwitch = 3,
};

struct DciMessage {
  Rnti rnti;
  DciKind kind = DciKind::UlGrant;
  std::optional<ResourceAllocation> alloc;  // absent for PdcchOrder
  uint8_t tpc = 0;                   // 2 bits; 3 commands maximum power
  uint8_t dai = 0;                   // 2 bits, DlAssignment only
  uint8_t harq_feedback_timing = 0;  // 3 bits, DlAssignment only
  uint8_t bwp_indicator = 0;         // 2 bits
  uint8_t mcs = 0;                   // 5 bits
  uint8_t ndi = 0;                   // 1 bit
  uint8_t rv = 0;                    // 2 bits
  uint8_t harq_pid = 0;              // 4 bits

  bool operator==(const DciMessage&) const = default;
};

constexpr size_t kDciPayloadBitsShort = 39;  // UlGrant / PdcchOrder / BwpSwitch
constexpr size_t kDciPayloadBitsDl = 44;     // DlAssignment
constexpr int kDciMaxSlotOffset = 7;         // 3-bit allocation slot offset

// tx_slot anchors the encoded allocation slot offset; the allocation slot
// must lie within kDciMaxSlotOffset slots of it.
BitString encode_dci(const DciMessage& d, uint32_t bandwidth_rb, const SlotTime& tx_slot);

struct DciDecodeResult {
  std::optional<DciMessage> msg;  // empty: no candidate RNTI unmasked the CRC
  bool ambiguous = false;         // >1 candidate matched; lowest RNTI was chosen
};

DciDecodeResult decode_dci(const BitString& bits, const std::vector<Rnti>& candidates,
                           uint32_t bandwidth_rb, const SlotTime& tx_slot);

// ---------------------------------------------------------------------------
// MAC PDU
//
// Byte-aligned: each element a one-byte subheader [R:2=0 | LCID:6] followed by
// its body. SDUs carry a 16-bit big-endian length. LCID 63 starts padding that
// runs to the end of the PDU.
// ---------------------------------------------------------------------------

constexpr uint8_t kLcidSdu = 4;
constexpr uint8_t kLcidRecommendedBitRate = 47;
constexpr uint8_t kLcidCsiReportingActDeact = 49;
constexpr uint8_t kLcidSpSrsActDeact = 50;
constexpr uint8_t kLcidScellActDeact = 58;
constexpr uint8_t kLcidBeamFailureRecovery = 59;
constexpr uint8_t kLcidTimingAdvanceCmd = 61;
constexpr uint8_t kLcidPadding = 63;

struct ScellActDeact {
  // Bit (1 << i) activates SCell index i for i in 1..7; bit 0 is reserved
  // and must be zero.
  uint8_t bitmap = 0;
  bool operator==(const ScellActDeact&) const = default;
};

struct TimingAdvanceCmd {
  uint8_t tag_id = 0;  // 2 bits
  uint8_t ta = 0;      // 6 bits
  bool operator==(const TimingAdvanceCmd&) const = default;
};

struct SpSrsActDeact {
  bool active = false;
  uint8_t resource_id = 0;  // 7 bits
  bool operator==(const SpSrsActDeact&) const = default;
};

struct CsiReportingActDeact {
  bool active = false;
  bool operator==(const CsiReportingActDeact&) const = default;
};

struct BeamFailureRecovery {
  uint8_t new_beam_idx = 0;  // 6 bits
  bool operator==(const BeamFailureRecovery&) const = default;
};

struct RecommendedBitRate {
  uint16_t kbps = 0;
  bool operator==(const RecommendedBitRate&) const = default;
};

struct MacSdu {
  std::vector<uint8_t> bytes;
  bool operator==(const MacSdu&) const = default;
};

using MacElement = std::variant<ScellActDeact, TimingAdvanceCmd, SpSrsActDeact,
                                CsiReportingActDeact, BeamFailureRecovery, RecommendedBitRate,
                                MacSdu>;

struct MacPdu {
  std::vector<MacElement> elements;
  // Trailing padding in bits, subheader included; zero or a multiple of 8,
  // at least 16 when nonzero (subheader plus one padding byte).
  uint32_t padding_bits = 0;

  bool operator==(const MacPdu&) const = default;
};

std::vector<uint8_t> encode_mac_pdu(const MacPdu& p);
MacPdu decode_mac_pdu(const std::vector<uint8_t>& bytes);

// ---------------------------------------------------------------------------
// SIB random-access configuration
// ---------------------------------------------------------------------------

enum class RaWindow : uint8_t { sf2, sf3, sf4, sf5, sf6, sf7, sf8, sf9, sf10 };
enum class PreambleTransMax : uint8_t { n3, n4, n5, n6, n7, n8, n10, n20, n50, n100, n200 };
enum class PowerRampingStep : uint8_t { db0, db2, db4, db6 };

int window_subframes(RaWindow w);
int preamble_trans_max_value(PreambleTransMax m);
int ramping_step_db(PowerRampingStep s);

struct SibRaConfig {
  RaWindow window = RaWindow::sf10;
  PreambleTransMax preamble_trans_max = PreambleTransMax::n10;
  PowerRampingStep power_ramping_step = PowerRampingStep::db2;
  int num_preambles = 64;  // 1..64

  bool operator==(const SibRaConfig&) const = default;
};

// 16 bits: window_idx:4 ptm_idx:4 step_idx:2 (num_preambles-1):6
BitString encode_sib_ra(const SibRaConfig& c);
SibRaConfig decode_sib_ra(const BitString& bits);

// ---------------------------------------------------------------------------
// UCI payloads
// ---------------------------------------------------------------------------

struct CsiReport {
  Rnti rnti;
  int beam_idx = 0;
  double rsrp_dbm = -100.0;  // [-156, -31], integer-dB reporting grid
  SlotTime t;

  bool operator==(const CsiReport&) const = default;
};

enum class Ack : uint8_t { NACK = 0, ACK = 1 };

struct AckBitmap {
  std::vector<Ack> bits;
  SlotTime t;
};

// beam_idx:8 rsrp_idx:7 followed by a CRC-16 masked with the reporting RNTI.
BitString encode_csi_report(const CsiReport& r);

struct CsiDecodeResult {
  std::optional<CsiReport> report;
  bool ambiguous = false;
};

CsiDecodeResult decode_csi_report(const BitString& bits, const std::vector<Rnti>& candidates,
                                  const SlotTime& t);

// ---------------------------------------------------------------------------
// Broadcast / RA plumbing messages
// ---------------------------------------------------------------------------

// Paging indication: magic:8=0xA5 sysinfo_mod:1 reserved:7, CRC masked with
// the paging RNTI.
BitString encode_paging(bool sysinfo_modification);
std::optional<bool> decode_paging(const BitString& bits);

struct RarMessage {
  uint8_t preamble = 0;   // 6 bits
  uint16_t ta = 0;        // 12 bits
  Rnti tc_rnti;           // 16 bits
  uint16_t msg3_num_rb = 1;  // 9 bits

  bool operator==(const RarMessage&) const = default;
};

BitString encode_rar(const RarMessage& r);
std::optional<RarMessage> decode_rar(const BitString& bits);

// Generic masked-CRC framing used by broadcast payloads and transport blocks.
BitString append_crc(BitString payload, Rnti mask);
std::optional<BitString> check_strip_crc(const BitString& bits, Rnti mask);

std::vector<uint8_t> wrap_transport_block(const std::vector<uint8_t>& payload, Rnti mask);
std::optional<std::vector<uint8_t>> unwrap_transport_block(const std::vector<uint8_t>& bytes,
                                                           Rnti mask);

// ---------------------------------------------------------------------------
// Keyed scrambling mitigation
// ---------------------------------------------------------------------------

struct MitigationKeyContext {
  std::array<uint8_t, 32> k_phy{};
  uint16_t sfn = 0;
  uint8_t sf = 0;
  uint16_t start_rb = 0;
};

MitigationKeyContext make_key_context(const std::array<uint8_t, 32>& k_phy, const SlotTime& t,
                                      uint16_t start_rb);

// XOR with a ChaCha20 keystream derived from (K_PHY, SFN, sf, start RB).
// Applying twice with the same context is the identity.
BitString scramble_keyed(const BitString& bits, const MitigationKeyContext& ctx);
std::vector<uint8_t> scramble_keyed_bytes(const std::vector<uint8_t>& bytes,
                                          const MitigationKeyContext& ctx);

// `<label> <hex>` line for golden-file comparisons.
std::string hex_line(const std::string& label, const BitString& bits);

}  // namespace llc
