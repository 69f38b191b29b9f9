#include "llc/codec.h"

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace llc {

namespace {

constexpr uint16_t kPdcchOrderRbPattern = 0x1FF;

struct DciFields {
  uint8_t kind;
  uint8_t harq_pid;
  uint8_t ndi;
  uint8_t rv;
  uint8_t mcs;
  uint8_t tpc;
  uint8_t bwp;
  uint16_t start_rb;
  uint16_t num_rb;
  uint8_t k_offset;
};

void require(bool ok, codec_err code, const char* what)
{
  if (!ok) {
    throw codec_error(code, what);
  }
}

}  // namespace

BitString encode_dci(const DciMessage& d, uint32_t bandwidth_rb, const SlotTime& tx_slot)
{
  require(d.tpc < 4 && d.dai < 4 && d.harq_feedback_timing < 8 && d.bwp_indicator < 4 &&
              d.mcs < 32 && d.ndi < 2 && d.rv < 4 && d.harq_pid < 16,
          codec_err::field_overflow, "encode_dci: field out of declared width");

  DciFields f{};
  f.kind = static_cast<uint8_t>(d.kind);
  f.harq_pid = d.harq_pid;
  f.ndi = d.ndi;
  f.rv = d.rv;
  f.mcs = d.mcs;
  f.tpc = d.tpc;
  f.bwp = d.bwp_indicator;

  if (d.kind == DciKind::PdcchOrder) {
    require(!d.alloc.has_value(), codec_err::bad_value, "encode_dci: order carries no allocation");
    f = DciFields{};
    f.kind = static_cast<uint8_t>(DciKind::PdcchOrder);
    f.start_rb = kPdcchOrderRbPattern;
    f.num_rb = kPdcchOrderRbPattern;
  } else {
    require(d.alloc.has_value(), codec_err::bad_value, "encode_dci: allocation required");
    const ResourceAllocation& a = *d.alloc;
    require(a.num_rb >= 1 && a.start_rb < 512 && a.num_rb < 512,
            codec_err::field_overflow, "encode_dci: allocation out of field range");
    require(a.start_rb + a.num_rb <= bandwidth_rb, codec_err::field_overflow,
            "encode_dci: allocation exceeds cell bandwidth");
    const int64_t hyper =
        static_cast<int64_t>(kSfnPeriod) * kSubframesPerFrame * tx_slot.slots_per_subframe();
    int64_t offset = (a.slot.hyper_slot() - tx_slot.hyper_slot()) % hyper;
    if (offset < 0) {
      offset += hyper;
    }
    require(offset >= 0 && offset <= kDciMaxSlotOffset, codec_err::field_overflow,
            "encode_dci: allocation slot outside the 3-bit offset range");
    f.start_rb = static_cast<uint16_t>(a.start_rb);
    f.num_rb = static_cast<uint16_t>(a.num_rb);
    f.k_offset = static_cast<uint8_t>(offset);
  }

  BitWriter w;
  w.put(f.kind, 2);
  w.put(f.harq_pid, 4);
  w.put(f.ndi, 1);
  w.put(f.rv, 2);
  w.put(f.mcs, 5);
  w.put(f.tpc, 2);
  w.put(f.bwp, 2);
  w.put(f.start_rb, 9);
  w.put(f.num_rb, 9);
  w.put(f.k_offset, 3);
  if (d.kind == DciKind::DlAssignment) {
    w.put(d.dai, 2);
    w.put(d.harq_feedback_timing, 3);
  }

  BitString payload = w.take();
  return append_crc(std::move(payload), d.rnti);
}

DciDecodeResult decode_dci(const BitString& bits, const std::vector<Rnti>& candidates,
                           uint32_t bandwidth_rb, const SlotTime& tx_slot)
{
  DciDecodeResult out;
  if (bits.size() != kDciPayloadBitsShort + 16 && bits.size() != kDciPayloadBitsDl + 16) {
    return out;
  }
  const size_t payload_len = bits.size() - 16;
  BitString payload(bits.begin(), bits.begin() + payload_len);
  const uint16_t crc = crc16(payload);
  uint16_t rx_crc = 0;
  for (size_t i = payload_len; i < bits.size(); ++i) {
    rx_crc = static_cast<uint16_t>((rx_crc << 1) | bits[i]);
  }

  std::vector<Rnti> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::optional<Rnti> matched;
  int n_matches = 0;
  for (const Rnti& r : sorted) {
    if (static_cast<uint16_t>(crc ^ r.value) == rx_crc) {
      if (!matched) {
        matched = r;
      }
      ++n_matches;
    }
  }
  if (!matched) {
    return out;
  }
  out.ambiguous = n_matches > 1;

  BitReader rd(payload);
  DciFields f{};
  f.kind = static_cast<uint8_t>(rd.get(2));
  f.harq_pid = static_cast<uint8_t>(rd.get(4));
  f.ndi = static_cast<uint8_t>(rd.get(1));
  f.rv = static_cast<uint8_t>(rd.get(2));
  f.mcs = static_cast<uint8_t>(rd.get(5));
  f.tpc = static_cast<uint8_t>(rd.get(2));
  f.bwp = static_cast<uint8_t>(rd.get(2));
  f.start_rb = static_cast<uint16_t>(rd.get(9));
  f.num_rb = static_cast<uint16_t>(rd.get(9));
  f.k_offset = static_cast<uint8_t>(rd.get(3));

  const DciKind kind = static_cast<DciKind>(f.kind);
  if (kind == DciKind::DlAssignment) {
    if (payload_len != kDciPayloadBitsDl) {
      return {};
    }
  } else if (payload_len != kDciPayloadBitsShort) {
    return {};
  }

  DciMessage d;
  d.rnti = *matched;
  d.kind = kind;
  d.tpc = f.tpc;
  d.bwp_indicator = f.bwp;
  d.mcs = f.mcs;
  d.ndi = f.ndi;
  d.rv = f.rv;
  d.harq_pid = f.harq_pid;

  if (kind == DciKind::PdcchOrder) {
    // Predefined pattern check; anything else is treated as undecodable.
    if (f.start_rb != kPdcchOrderRbPattern || f.num_rb != kPdcchOrderRbPattern ||
        f.harq_pid != 0 || f.ndi != 0 || f.rv != 0 || f.mcs != 0 || f.tpc != 0 || f.bwp != 0 ||
        f.k_offset != 0) {
      return {};
    }
  } else {
    if (f.num_rb < 1 || static_cast<uint32_t>(f.start_rb) + f.num_rb > bandwidth_rb) {
      return {};
    }
    ResourceAllocation a;
    a.start_rb = f.start_rb;
    a.num_rb = f.num_rb;
    a.slot = slot_advance(tx_slot, f.k_offset);
    a.direction = (kind == DciKind::UlGrant) ? Direction::UL : Direction::DL;
    d.alloc = a;
  }

  if (kind == DciKind::DlAssignment) {
    d.dai = static_cast<uint8_t>(rd.get(2));
    d.harq_feedback_timing = static_cast<uint8_t>(rd.get(3));
  }

  out.msg = d;
  return out;
}

// --------------------------------------------------------------------------
// MAC PDU
// --------------------------------------------------------------------------

namespace {

uint8_t subheader(uint8_t lcid)
{
  return lcid & 0x3F;
}

}  // namespace

std::vector<uint8_t> encode_mac_pdu(const MacPdu& p)
{
  std::vector<uint8_t> out;
  for (const MacElement& e : p.elements) {
    std::visit(
        [&out](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, ScellActDeact>) {
            require((v.bitmap & 0x01) == 0, codec_err::bad_value,
                    "encode_mac_pdu: SCell bitmap reserved bit set");
            out.push_back(subheader(kLcidScellActDeact));
            out.push_back(v.bitmap);
          } else if constexpr (std::is_same_v<T, TimingAdvanceCmd>) {
            require(v.tag_id < 4 && v.ta < 64, codec_err::field_overflow,
                    "encode_mac_pdu: TA command field overflow");
            out.push_back(subheader(kLcidTimingAdvanceCmd));
            out.push_back(static_cast<uint8_t>((v.tag_id << 6) | v.ta));
          } else if constexpr (std::is_same_v<T, SpSrsActDeact>) {
            require(v.resource_id < 128, codec_err::field_overflow,
                    "encode_mac_pdu: SRS resource id overflow");
            out.push_back(subheader(kLcidSpSrsActDeact));
            out.push_back(static_cast<uint8_t>((v.active ? 0x80 : 0x00) | v.resource_id));
          } else if constexpr (std::is_same_v<T, CsiReportingActDeact>) {
            out.push_back(subheader(kLcidCsiReportingActDeact));
            out.push_back(v.active ? 0x80 : 0x00);
          } else if constexpr (std::is_same_v<T, BeamFailureRecovery>) {
            require(v.new_beam_idx < 64, codec_err::field_overflow,
                    "encode_mac_pdu: beam index overflow");
            out.push_back(subheader(kLcidBeamFailureRecovery));
            out.push_back(v.new_beam_idx);
          } else if constexpr (std::is_same_v<T, RecommendedBitRate>) {
            out.push_back(subheader(kLcidRecommendedBitRate));
            out.push_back(static_cast<uint8_t>(v.kbps >> 8));
            out.push_back(static_cast<uint8_t>(v.kbps & 0xFF));
          } else if constexpr (std::is_same_v<T, MacSdu>) {
            require(v.bytes.size() <= 0xFFFF, codec_err::field_overflow,
                    "encode_mac_pdu: SDU too long");
            out.push_back(subheader(kLcidSdu));
            out.push_back(static_cast<uint8_t>(v.bytes.size() >> 8));
            out.push_back(static_cast<uint8_t>(v.bytes.size() & 0xFF));
            out.insert(out.end(), v.bytes.begin(), v.bytes.end());
          }
        },
        e);
  }
  if (p.padding_bits > 0) {
    require(p.padding_bits % 8 == 0 && p.padding_bits >= 16, codec_err::bad_value,
            "encode_mac_pdu: padding must be whole bytes incl. subheader");
    out.push_back(subheader(kLcidPadding));
    out.insert(out.end(), p.padding_bits / 8 - 1, 0x00);
  }
  return out;
}

MacPdu decode_mac_pdu(const std::vector<uint8_t>& bytes)
{
  MacPdu p;
  size_t i = 0;
  auto need = [&](size_t n) {
    require(i + n <= bytes.size(), codec_err::truncated_pdu, "decode_mac_pdu: truncated");
  };
  while (i < bytes.size()) {
    need(1);
    const uint8_t sh = bytes[i++];
    require((sh & 0xC0) == 0, codec_err::unknown_lcid, "decode_mac_pdu: reserved bits set");
    const uint8_t lcid = sh & 0x3F;
    switch (lcid) {
      case kLcidScellActDeact: {
        need(1);
        const uint8_t bitmap = bytes[i++];
        require((bitmap & 0x01) == 0, codec_err::bad_value,
                "decode_mac_pdu: SCell bitmap reserved bit set");
        p.elements.push_back(ScellActDeact{bitmap});
        break;
      }
      case kLcidTimingAdvanceCmd: {
        need(1);
        const uint8_t b = bytes[i++];
        p.elements.push_back(TimingAdvanceCmd{static_cast<uint8_t>(b >> 6),
                                              static_cast<uint8_t>(b & 0x3F)});
        break;
      }
      case kLcidSpSrsActDeact: {
        need(1);
        const uint8_t b = bytes[i++];
        p.elements.push_back(SpSrsActDeact{(b & 0x80) != 0, static_cast<uint8_t>(b & 0x7F)});
        break;
      }
      case kLcidCsiReportingActDeact: {
        need(1);
        const uint8_t b = bytes[i++];
        require((b & 0x7F) == 0, codec_err::bad_value, "decode_mac_pdu: CSI CE reserved bits");
        p.elements.push_back(CsiReportingActDeact{(b & 0x80) != 0});
        break;
      }
      case kLcidBeamFailureRecovery: {
        need(1);
        const uint8_t b = bytes[i++];
        require(b < 64, codec_err::bad_value, "decode_mac_pdu: BFR reserved bits");
        p.elements.push_back(BeamFailureRecovery{b});
        break;
      }
      case kLcidRecommendedBitRate: {
        need(2);
        const uint16_t kbps = static_cast<uint16_t>((bytes[i] << 8) | bytes[i + 1]);
        i += 2;
        p.elements.push_back(RecommendedBitRate{kbps});
        break;
      }
      case kLcidSdu: {
        need(2);
        const size_t len = static_cast<size_t>(bytes[i] << 8) | bytes[i + 1];
        i += 2;
        need(len);
        p.elements.push_back(MacSdu{{bytes.begin() + i, bytes.begin() + i + len}});
        i += len;
        break;
      }
      case kLcidPadding: {
        p.padding_bits = static_cast<uint32_t>(8 * (1 + (bytes.size() - i)));
        i = bytes.size();
        break;
      }
      default:
        throw codec_error(codec_err::unknown_lcid, "decode_mac_pdu: unknown LCID");
    }
  }
  return p;
}

// --------------------------------------------------------------------------
// SIB RA configuration
// --------------------------------------------------------------------------

int window_subframes(RaWindow w)
{
  return 2 + static_cast<int>(w);
}

int preamble_trans_max_value(PreambleTransMax m)
{
  static constexpr int values[] = {3, 4, 5, 6, 7, 8, 10, 20, 50, 100, 200};
  return values[static_cast<int>(m)];
}

int ramping_step_db(PowerRampingStep s)
{
  return 2 * static_cast<int>(s);
}

BitString encode_sib_ra(const SibRaConfig& c)
{
  require(c.num_preambles >= 1 && c.num_preambles <= 64, codec_err::index_out_of_range,
          "encode_sib_ra: num_preambles out of range");
  BitWriter w;
  w.put(static_cast<uint32_t>(c.window), 4);
  w.put(static_cast<uint32_t>(c.preamble_trans_max), 4);
  w.put(static_cast<uint32_t>(c.power_ramping_step), 2);
  w.put(static_cast<uint32_t>(c.num_preambles - 1), 6);
  return w.take();
}

SibRaConfig decode_sib_ra(const BitString& bits)
{
  require(bits.size() == 16, codec_err::truncated_pdu, "decode_sib_ra: wrong length");
  BitReader rd(bits);
  const uint32_t window = rd.get(4);
  const uint32_t ptm = rd.get(4);
  const uint32_t step = rd.get(2);
  const uint32_t preambles = rd.get(6);
  require(window <= 8, codec_err::index_out_of_range, "decode_sib_ra: window index");
  require(ptm <= 10, codec_err::index_out_of_range, "decode_sib_ra: preambleTransMax index");
  SibRaConfig c;
  c.window = static_cast<RaWindow>(window);
  c.preamble_trans_max = static_cast<PreambleTransMax>(ptm);
  c.power_ramping_step = static_cast<PowerRampingStep>(step);
  c.num_preambles = static_cast<int>(preambles) + 1;
  return c;
}

// --------------------------------------------------------------------------
// UCI
// --------------------------------------------------------------------------

namespace {

constexpr double kRsrpFloorDbm = -156.0;
constexpr double kRsrpCeilDbm = -31.0;

}  // namespace

BitString encode_csi_report(const CsiReport& r)
{
  require(r.beam_idx >= 0 && r.beam_idx < 256, codec_err::field_overflow,
          "encode_csi_report: beam index overflow");
  require(r.rsrp_dbm >= kRsrpFloorDbm && r.rsrp_dbm <= kRsrpCeilDbm, codec_err::field_overflow,
          "encode_csi_report: RSRP out of range");
  const int idx = static_cast<int>(std::lround(r.rsrp_dbm - kRsrpFloorDbm));
  BitWriter w;
  w.put(static_cast<uint32_t>(r.beam_idx), 8);
  w.put(static_cast<uint32_t>(idx), 7);
  return append_crc(w.take(), r.rnti);
}

CsiDecodeResult decode_csi_report(const BitString& bits, const std::vector<Rnti>& candidates,
                                  const SlotTime& t)
{
  CsiDecodeResult out;
  if (bits.size() != 15 + 16) {
    return out;
  }
  BitString payload(bits.begin(), bits.begin() + 15);
  const uint16_t crc = crc16(payload);
  uint16_t rx_crc = 0;
  for (size_t i = 15; i < bits.size(); ++i) {
    rx_crc = static_cast<uint16_t>((rx_crc << 1) | bits[i]);
  }
  std::vector<Rnti> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::optional<Rnti> matched;
  int n = 0;
  for (const Rnti& r : sorted) {
    if (static_cast<uint16_t>(crc ^ r.value) == rx_crc) {
      if (!matched) {
        matched = r;
      }
      ++n;
    }
  }
  if (!matched) {
    return out;
  }
  BitReader rd(payload);
  CsiReport r;
  r.rnti = *matched;
  r.beam_idx = static_cast<int>(rd.get(8));
  const uint32_t idx = rd.get(7);
  if (idx > static_cast<uint32_t>(kRsrpCeilDbm - kRsrpFloorDbm)) {
    return {};
  }
  r.rsrp_dbm = kRsrpFloorDbm + idx;
  r.t = t;
  out.report = r;
  out.ambiguous = n > 1;
  return out;
}

// --------------------------------------------------------------------------
// Broadcast / RA messages
// --------------------------------------------------------------------------

BitString encode_paging(bool sysinfo_modification)
{
  BitWriter w;
  w.put(0xA5, 8);
  w.put(sysinfo_modification ? 1 : 0, 1);
  w.put(0, 7);
  return append_crc(w.take(), kPagingRnti);
}

std::optional<bool> decode_paging(const BitString& bits)
{
  if (bits.size() != 16 + 16) {
    return std::nullopt;
  }
  auto payload = check_strip_crc(bits, kPagingRnti);
  if (!payload) {
    return std::nullopt;
  }
  BitReader rd(*payload);
  if (rd.get(8) != 0xA5) {
    return std::nullopt;
  }
  const bool mod = rd.get(1) != 0;
  if (rd.get(7) != 0) {
    return std::nullopt;
  }
  return mod;
}

BitString encode_rar(const RarMessage& r)
{
  require(r.preamble < 64 && r.ta < 4096 && r.msg3_num_rb < 512, codec_err::field_overflow,
          "encode_rar: field overflow");
  BitWriter w;
  w.put(r.preamble, 6);
  w.put(r.ta, 12);
  w.put(r.tc_rnti.value, 16);
  w.put(r.msg3_num_rb, 9);
  return append_crc(w.take(), kRaRnti);
}

std::optional<RarMessage> decode_rar(const BitString& bits)
{
  if (bits.size() != 43 + 16) {
    return std::nullopt;
  }
  auto payload = check_strip_crc(bits, kRaRnti);
  if (!payload) {
    return std::nullopt;
  }
  BitReader rd(*payload);
  RarMessage r;
  r.preamble = static_cast<uint8_t>(rd.get(6));
  r.ta = static_cast<uint16_t>(rd.get(12));
  r.tc_rnti = Rnti{static_cast<uint16_t>(rd.get(16))};
  r.msg3_num_rb = static_cast<uint16_t>(rd.get(9));
  return r;
}

BitString append_crc(BitString payload, Rnti mask)
{
  const uint16_t crc = static_cast<uint16_t>(crc16(payload) ^ mask.value);
  for (int i = 15; i >= 0; --i) {
    payload.push_back(static_cast<uint8_t>((crc >> i) & 1u));
  }
  return payload;
}

std::optional<BitString> check_strip_crc(const BitString& bits, Rnti mask)
{
  if (bits.size() < 16) {
    return std::nullopt;
  }
  BitString payload(bits.begin(), bits.end() - 16);
  uint16_t rx = 0;
  for (size_t i = bits.size() - 16; i < bits.size(); ++i) {
    rx = static_cast<uint16_t>((rx << 1) | bits[i]);
  }
  if (static_cast<uint16_t>(crc16(payload) ^ mask.value) != rx) {
    return std::nullopt;
  }
  return payload;
}

std::vector<uint8_t> wrap_transport_block(const std::vector<uint8_t>& payload, Rnti mask)
{
  BitString bits = unpack_bits(payload, payload.size() * 8);
  const uint16_t crc = static_cast<uint16_t>(crc16(bits) ^ mask.value);
  std::vector<uint8_t> out = payload;
  out.push_back(static_cast<uint8_t>(crc >> 8));
  out.push_back(static_cast<uint8_t>(crc & 0xFF));
  return out;
}

std::optional<std::vector<uint8_t>> unwrap_transport_block(const std::vector<uint8_t>& bytes,
                                                           Rnti mask)
{
  if (bytes.size() < 2) {
    return std::nullopt;
  }
  std::vector<uint8_t> payload(bytes.begin(), bytes.end() - 2);
  BitString bits = unpack_bits(payload, payload.size() * 8);
  const uint16_t rx = static_cast<uint16_t>((bytes[bytes.size() - 2] << 8) | bytes.back());
  if (static_cast<uint16_t>(crc16(bits) ^ mask.value) != rx) {
    return std::nullopt;
  }
  return payload;
}

// --------------------------------------------------------------------------
// Keyed scrambling
// --------------------------------------------------------------------------

MitigationKeyContext make_key_context(const std::array<uint8_t, 32>& k_phy, const SlotTime& t,
                                      uint16_t start_rb)
{
  MitigationKeyContext ctx;
  ctx.k_phy = k_phy;
  ctx.sfn = t.sfn;
  ctx.sf = t.subframe;
  ctx.start_rb = start_rb;
  return ctx;
}

std::vector<uint8_t> scramble_keyed_bytes(const std::vector<uint8_t>& bytes,
                                          const MitigationKeyContext& ctx)
{
  uint8_t nonce[crypto_stream_chacha20_NONCEBYTES] = {0};
  nonce[0] = static_cast<uint8_t>(ctx.sfn >> 8);
  nonce[1] = static_cast<uint8_t>(ctx.sfn & 0xFF);
  nonce[2] = ctx.sf;
  nonce[3] = static_cast<uint8_t>(ctx.start_rb >> 8);
  nonce[4] = static_cast<uint8_t>(ctx.start_rb & 0xFF);
  std::vector<uint8_t> out(bytes.size());
  if (!bytes.empty()) {
    crypto_stream_chacha20_xor(out.data(), bytes.data(), bytes.size(), nonce, ctx.k_phy.data());
  }
  return out;
}

BitString scramble_keyed(const BitString& bits, const MitigationKeyContext& ctx)
{
  std::vector<uint8_t> packed = pack_bits(bits);
  std::vector<uint8_t> mixed = scramble_keyed_bytes(packed, ctx);
  return unpack_bits(mixed, bits.size());
}

std::string hex_line(const std::string& label, const BitString& bits)
{
  return label + " " + to_hex(bits);
}

}  // namespace llc
