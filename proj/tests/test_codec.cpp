#include <set>

#include "doctest.h"
#include "llc/codec.h"
#include "llc/rng.h"

using namespace llc;

namespace {

constexpr uint32_t kBw = 52;

SlotTime tx_slot()
{
  return SlotTime{5, 3, 0, 0};
}

DciMessage random_dci(Rng& rng, DciKind kind)
{
  DciMessage d;
  d.rnti = Rnti{static_cast<uint16_t>(1 + rng.next_below(0xFFF0))};
  d.kind = kind;
  d.tpc = static_cast<uint8_t>(rng.next_below(4));
  d.bwp_indicator = static_cast<uint8_t>(rng.next_below(4));
  d.mcs = static_cast<uint8_t>(rng.next_below(32));
  d.ndi = static_cast<uint8_t>(rng.next_below(2));
  d.rv = static_cast<uint8_t>(rng.next_below(4));
  d.harq_pid = static_cast<uint8_t>(rng.next_below(16));
  if (kind == DciKind::DlAssignment) {
    d.dai = static_cast<uint8_t>(rng.next_below(4));
    d.harq_feedback_timing = static_cast<uint8_t>(rng.next_below(8));
  }
  if (kind != DciKind::PdcchOrder) {
    ResourceAllocation a;
    a.num_rb = static_cast<uint32_t>(1 + rng.next_below(kBw));
    a.start_rb = static_cast<uint32_t>(rng.next_below(kBw - a.num_rb + 1));
    a.slot = slot_advance(tx_slot(), static_cast<int64_t>(rng.next_below(8)));
    a.direction = kind == DciKind::UlGrant ? Direction::UL : Direction::DL;
    d.alloc = a;
  } else {
    d.tpc = 0;
    d.bwp_indicator = 0;
    d.mcs = 0;
    d.ndi = 0;
    d.rv = 0;
    d.harq_pid = 0;
  }
  return d;
}

MacPdu random_pdu(Rng& rng)
{
  MacPdu p;
  const int n = static_cast<int>(rng.next_below(5));
  for (int i = 0; i < n; ++i) {
    switch (rng.next_below(7)) {
      case 0:
        p.elements.push_back(
            ScellActDeact{static_cast<uint8_t>(rng.next_below(256) & 0xFE)});
        break;
      case 1:
        p.elements.push_back(TimingAdvanceCmd{static_cast<uint8_t>(rng.next_below(4)),
                                              static_cast<uint8_t>(rng.next_below(64))});
        break;
      case 2:
        p.elements.push_back(
            SpSrsActDeact{rng.next_below(2) == 1, static_cast<uint8_t>(rng.next_below(128))});
        break;
      case 3:
        p.elements.push_back(CsiReportingActDeact{rng.next_below(2) == 1});
        break;
      case 4:
        p.elements.push_back(BeamFailureRecovery{static_cast<uint8_t>(rng.next_below(64))});
        break;
      case 5:
        p.elements.push_back(RecommendedBitRate{static_cast<uint16_t>(rng.next_below(65536))});
        break;
      default: {
        MacSdu sdu;
        const size_t len = rng.next_below(32);
        for (size_t k = 0; k < len; ++k) {
          sdu.bytes.push_back(static_cast<uint8_t>(rng.next_below(256)));
        }
        p.elements.push_back(std::move(sdu));
        break;
      }
    }
  }
  if (rng.next_below(3) == 0) {
    p.padding_bits = static_cast<uint32_t>(8 * (2 + rng.next_below(6)));
  }
  return p;
}

}  // namespace

TEST_CASE("reference UL grant payload is 39 bits plus CRC")
{
  DciMessage d;
  d.rnti = Rnti{0x4601};
  d.kind = DciKind::UlGrant;
  ResourceAllocation a;
  a.start_rb = 0;
  a.num_rb = kBw;  // full band
  a.slot = tx_slot();
  a.direction = Direction::UL;
  d.alloc = a;
  d.tpc = 3;
  const BitString bits = encode_dci(d, kBw, tx_slot());
  CHECK(bits.size() == kDciPayloadBitsShort + 16);
  CHECK(kDciPayloadBitsShort == 39);
}

TEST_CASE("dci round-trip identity on random valid messages")
{
  Rng rng(1);
  const DciKind kinds[] = {DciKind::UlGrant, DciKind::DlAssignment, DciKind::BwpSwitch,
                           DciKind::PdcchOrder};
  for (int i = 0; i < 20000; ++i) {
    const DciMessage d = random_dci(rng, kinds[i % 4]);
    const BitString bits = encode_dci(d, kBw, tx_slot());
    const DciDecodeResult res = decode_dci(bits, {d.rnti}, kBw, tx_slot());
    REQUIRE(res.msg.has_value());
    CHECK(*res.msg == d);
    CHECK(!res.ambiguous);
  }
}

TEST_CASE("exhaustive field product round-trips on the DL assignment")
{
  // tpc(2) dai(2) mcs(5) ndi(1) rv(2) harq_pid(4) = 16 bits.
  ResourceAllocation a;
  a.start_rb = 4;
  a.num_rb = 10;
  a.slot = tx_slot();
  a.direction = Direction::DL;
  int count = 0;
  for (uint32_t v = 0; v < (1u << 16); ++v) {
    DciMessage d;
    d.rnti = Rnti{0x1234};
    d.kind = DciKind::DlAssignment;
    d.alloc = a;
    d.tpc = static_cast<uint8_t>(v & 0x3);
    d.dai = static_cast<uint8_t>((v >> 2) & 0x3);
    d.mcs = static_cast<uint8_t>((v >> 4) & 0x1F);
    d.ndi = static_cast<uint8_t>((v >> 9) & 0x1);
    d.rv = static_cast<uint8_t>((v >> 10) & 0x3);
    d.harq_pid = static_cast<uint8_t>((v >> 12) & 0xF);
    const BitString bits = encode_dci(d, kBw, tx_slot());
    const DciDecodeResult res = decode_dci(bits, {d.rnti}, kBw, tx_slot());
    REQUIRE(res.msg.has_value());
    if (*res.msg == d) {
      ++count;
    }
  }
  CHECK(count == 1 << 16);
}

TEST_CASE("single bit flips are rejected at every position")
{
  Rng rng(2);
  const DciMessage d = random_dci(rng, DciKind::UlGrant);
  const BitString bits = encode_dci(d, kBw, tx_slot());
  for (size_t i = 0; i < bits.size(); ++i) {
    BitString flipped = bits;
    flipped[i] ^= 1;
    const DciDecodeResult res = decode_dci(flipped, {d.rnti}, kBw, tx_slot());
    // Either the CRC fails outright or the payload no longer parses.
    CHECK(!(res.msg.has_value() && *res.msg == d));
    if (res.msg.has_value()) {
      CHECK(i < bits.size() - 16);  // a payload flip plus matching mask flip cannot happen
    }
  }
}

TEST_CASE("pdcch order pattern round-trips")
{
  DciMessage d;
  d.rnti = Rnti{0x4601};
  d.kind = DciKind::PdcchOrder;
  const BitString bits = encode_dci(d, kBw, tx_slot());
  CHECK(bits.size() == 39 + 16);
  const DciDecodeResult res = decode_dci(bits, {Rnti{0x4601}, Rnti{0x17}}, kBw, tx_slot());
  REQUIRE(res.msg.has_value());
  CHECK(res.msg->kind == DciKind::PdcchOrder);
  CHECK(res.msg->rnti.value == 0x4601);
  CHECK(!res.msg->alloc.has_value());
}

TEST_CASE("decode returns NoMatch when no candidate fits")
{
  Rng rng(3);
  const DciMessage d = random_dci(rng, DciKind::UlGrant);
  const BitString bits = encode_dci(d, kBw, tx_slot());
  const DciDecodeResult res =
      decode_dci(bits, {Rnti{static_cast<uint16_t>(d.rnti.value ^ 0x1)}}, kBw, tx_slot());
  CHECK(!res.msg.has_value());
}

TEST_CASE("field overflow is rejected at encode time")
{
  DciMessage d;
  d.rnti = Rnti{1};
  d.kind = DciKind::UlGrant;
  ResourceAllocation a;
  a.start_rb = kBw - 1;
  a.num_rb = 2;  // spills past the carrier
  a.slot = tx_slot();
  d.alloc = a;
  CHECK_THROWS_AS(encode_dci(d, kBw, tx_slot()), codec_error);
}

TEST_CASE("false accept rate on random payloads stays near the binomial bound")
{
  // Random 39-bit payloads with random checksums, one candidate: the accept
  // probability is 2^-16 per candidate.
  Rng rng(4);
  const std::vector<Rnti> candidates = {Rnti{0x4601}};
  int accepted = 0;
  const int trials = 1000000;
  for (int i = 0; i < trials; ++i) {
    BitString bits(55);
    for (auto& b : bits) {
      b = static_cast<uint8_t>(rng.next_below(2));
    }
    if (decode_dci(bits, candidates, kBw, tx_slot()).msg.has_value()) {
      ++accepted;
    }
  }
  // p = 2^-16 (further thinned by field validation), n = 1e6: mean 15.3,
  // sigma 3.9. Accept anything below mean + 3 sigma.
  CHECK(accepted <= 27);
}

TEST_CASE("mac pdu examples")
{
  MacPdu p;
  p.elements.push_back(ScellActDeact{0b00000010});
  const std::vector<uint8_t> bytes = encode_mac_pdu(p);
  CHECK(bytes.size() == 2);
  CHECK(decode_mac_pdu(bytes) == p);

  MacPdu padded;
  padded.padding_bits = 24;
  const std::vector<uint8_t> pb = encode_mac_pdu(padded);
  const MacPdu back = decode_mac_pdu(pb);
  CHECK(back.elements.empty());
  CHECK(back.padding_bits == 24);

  MacPdu multi;
  multi.elements.push_back(TimingAdvanceCmd{0, 31});
  multi.elements.push_back(MacSdu{{1, 2, 3}});
  CHECK(decode_mac_pdu(encode_mac_pdu(multi)) == multi);
}

TEST_CASE("mac pdu round-trips on random inputs")
{
  Rng rng(5);
  for (int i = 0; i < 20000; ++i) {
    const MacPdu p = random_pdu(rng);
    CHECK(decode_mac_pdu(encode_mac_pdu(p)) == p);
  }
}

TEST_CASE("exhaustive SCell bitmap round-trip")
{
  for (int v = 0; v < 256; ++v) {
    if (v & 1) {
      MacPdu p;
      p.elements.push_back(ScellActDeact{static_cast<uint8_t>(v)});
      CHECK_THROWS_AS(encode_mac_pdu(p), codec_error);  // reserved bit
      continue;
    }
    MacPdu p;
    p.elements.push_back(ScellActDeact{static_cast<uint8_t>(v)});
    CHECK(decode_mac_pdu(encode_mac_pdu(p)) == p);
  }
}

TEST_CASE("mac pdu decode errors")
{
  CHECK_THROWS_AS(decode_mac_pdu({0x07}), codec_error);  // unknown LCID
  try {
    decode_mac_pdu({0x07});
  } catch (const codec_error& e) {
    CHECK(e.code() == codec_err::unknown_lcid);
  }
  try {
    decode_mac_pdu({kLcidScellActDeact});  // missing body
  } catch (const codec_error& e) {
    CHECK(e.code() == codec_err::truncated_pdu);
  }
  try {
    decode_mac_pdu({kLcidSdu, 0x00, 0x08, 0x01});  // short SDU
  } catch (const codec_error& e) {
    CHECK(e.code() == codec_err::truncated_pdu);
  }
}

TEST_CASE("sib codec covers the full enum product exhaustively")
{
  int n = 0;
  for (int w = 0; w < 9; ++w) {
    for (int p = 0; p < 11; ++p) {
      for (int st = 0; st < 4; ++st) {
        SibRaConfig c;
        c.window = static_cast<RaWindow>(w);
        c.preamble_trans_max = static_cast<PreambleTransMax>(p);
        c.power_ramping_step = static_cast<PowerRampingStep>(st);
        c.num_preambles = 1 + (n % 64);
        CHECK(decode_sib_ra(encode_sib_ra(c)) == c);
        ++n;
      }
    }
  }
  CHECK(n == 396);
}

TEST_CASE("sib known configurations")
{
  SibRaConfig mno;  // observed operator default
  mno.window = RaWindow::sf10;
  mno.preamble_trans_max = PreambleTransMax::n10;
  mno.power_ramping_step = PowerRampingStep::db2;
  CHECK(decode_sib_ra(encode_sib_ra(mno)) == mno);

  SibRaConfig attack;  // hostile override
  attack.window = RaWindow::sf2;
  attack.preamble_trans_max = PreambleTransMax::n200;
  attack.power_ramping_step = PowerRampingStep::db0;
  CHECK(decode_sib_ra(encode_sib_ra(attack)) == attack);
  CHECK(window_subframes(attack.window) == 2);
  CHECK(preamble_trans_max_value(attack.preamble_trans_max) == 200);
}

TEST_CASE("sib decode rejects out-of-range indices")
{
  BitWriter w;
  w.put(12, 4);  // window index beyond sf10
  w.put(0, 4);
  w.put(0, 2);
  w.put(63, 6);
  CHECK_THROWS_AS(decode_sib_ra(w.take()), codec_error);
}

TEST_CASE("csi report codec")
{
  CsiReport r;
  r.rnti = Rnti{0x46};
  r.beam_idx = 31;
  r.rsrp_dbm = -92.0;
  r.t = tx_slot();
  const BitString bits = encode_csi_report(r);
  const CsiDecodeResult res = decode_csi_report(bits, {Rnti{0x46}, Rnti{0x99}}, tx_slot());
  REQUIRE(res.report.has_value());
  CHECK(*res.report == r);

  const CsiDecodeResult miss = decode_csi_report(bits, {Rnti{0x99}}, tx_slot());
  CHECK(!miss.report.has_value());
}

TEST_CASE("paging and rar codecs")
{
  CHECK(decode_paging(encode_paging(true)) == true);
  CHECK(decode_paging(encode_paging(false)) == false);
  BitString broken = encode_paging(true);
  broken[3] ^= 1;
  CHECK(!decode_paging(broken).has_value());

  RarMessage rar;
  rar.preamble = 17;
  rar.ta = 10;
  rar.tc_rnti = Rnti{0x4622};
  rar.msg3_num_rb = 2;
  CHECK(decode_rar(encode_rar(rar)) == rar);
}

TEST_CASE("scramble is an involution and changes with every context field")
{
  std::array<uint8_t, 32> key{};
  for (size_t i = 0; i < key.size(); ++i) {
    key[i] = static_cast<uint8_t>(i * 17 + 3);
  }
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    BitString bits(39 + 16);
    for (auto& b : bits) {
      b = static_cast<uint8_t>(rng.next_below(2));
    }
    MitigationKeyContext ctx;
    ctx.k_phy = key;
    ctx.sfn = static_cast<uint16_t>(rng.next_below(1024));
    ctx.sf = static_cast<uint8_t>(rng.next_below(10));
    ctx.start_rb = static_cast<uint16_t>(rng.next_below(512));
    const BitString once = scramble_keyed(bits, ctx);
    CHECK(scramble_keyed(once, ctx) == bits);
    CHECK(once != bits);
  }
}

TEST_CASE("keystream distinctness across contexts")
{
  std::array<uint8_t, 32> key{};
  key[0] = 0xAB;
  const std::vector<uint8_t> zeros(8, 0);
  std::set<std::vector<uint8_t>> seen;
  int contexts = 0;
  for (uint16_t sfn = 0; sfn < 40; ++sfn) {
    for (uint8_t sf = 0; sf < 10; ++sf) {
      for (uint16_t rb = 0; rb < 25; ++rb) {
        MitigationKeyContext ctx;
        ctx.k_phy = key;
        ctx.sfn = sfn;
        ctx.sf = sf;
        ctx.start_rb = rb;
        seen.insert(scramble_keyed_bytes(zeros, ctx));
        ++contexts;
      }
    }
  }
  CHECK(contexts == 10000);
  CHECK(seen.size() == 10000);
}

TEST_CASE("scrambled dci is undecodable without the key")
{
  std::array<uint8_t, 32> key{};
  key[5] = 0x5A;
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const DciMessage d = random_dci(rng, DciKind::UlGrant);
    const BitString bits = encode_dci(d, kBw, tx_slot());
    MitigationKeyContext ctx;
    ctx.k_phy = key;
    ctx.sfn = static_cast<uint16_t>(i);
    ctx.sf = static_cast<uint8_t>(i % 10);
    ctx.start_rb = 0;
    const BitString scrambled = scramble_keyed(bits, ctx);
    CHECK(!decode_dci(scrambled, {d.rnti}, kBw, tx_slot()).msg.has_value());
  }
}

TEST_CASE("transport block wrap/unwrap")
{
  const std::vector<uint8_t> payload = {1, 2, 3, 4, 5};
  const auto tb = wrap_transport_block(payload, Rnti{0x46});
  CHECK(unwrap_transport_block(tb, Rnti{0x46}) == payload);
  CHECK(!unwrap_transport_block(tb, Rnti{0x47}).has_value());
  auto broken = tb;
  broken[1] ^= 0x10;
  CHECK(!unwrap_transport_block(broken, Rnti{0x46}).has_value());
}

TEST_CASE("hex dump line format")
{
  BitWriter w;
  w.put(0xAB, 8);
  w.put(0x1, 1);
  CHECK(hex_line("dci_test", w.take()) == "dci_test ab80");
}
