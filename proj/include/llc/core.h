#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace llc {

class time_error : public std::runtime_error {
public:
  explicit time_error(const std::string& what) : std::runtime_error(what) {}
};

// Discrete radio time. Slot duration is 1ms / 2^mu, so mu=0 gives one slot
// per subframe (LTE-style) and mu=3 gives eight 125us slots per subframe.
struct SlotTime {
  uint16_t sfn = 0;      // system frame number, 0..1023, wraps
  uint8_t subframe = 0;  // 0..9, 1 ms each
  uint8_t slot = 0;      // 0 .. 2^mu - 1
  uint8_t mu = 0;        // numerology index

  int slots_per_subframe() const { return 1 << mu; }

  // Position within the 1024-frame hyperperiod, in slots.
  int64_t hyper_slot() const
  {
    return (static_cast<int64_t>(sfn) * 10 + subframe) * slots_per_subframe() + slot;
  }

  bool operator==(const SlotTime& o) const
  {
    return sfn == o.sfn && subframe == o.subframe && slot == o.slot && mu == o.mu;
  }
};

constexpr int kSfnPeriod = 1024;
constexpr int kSubframesPerFrame = 10;

SlotTime slot_advance(SlotTime t, int64_t n_slots);

// Whole subframes from a to b, wrap-aware. Throws time_error when the
// separation exceeds half the SFN space (512 frames) and the direction of
// the wrap becomes ambiguous.
int64_t subframes_between(const SlotTime& a, const SlotTime& b);

// Wrap-aware ordering: a precedes b when b is reachable from a within half
// the hyperperiod.
bool slot_less(const SlotTime& a, const SlotTime& b);

double slot_duration_ms(int mu);

struct Rnti {
  uint16_t value = 0;

  auto operator<=>(const Rnti&) const = default;
};

// Reserved identifiers for broadcast-style addressing.
constexpr Rnti kSiRnti{0xFFFF};
constexpr Rnti kPagingRnti{0xFFFE};
constexpr Rnti kRaRnti{0xFFFD};

enum class Direction : uint8_t { DL = 0, UL = 1 };

struct ResourceAllocation {
  uint32_t start_rb = 0;
  uint32_t num_rb = 1;
  SlotTime slot;
  Direction direction = Direction::DL;

  bool operator==(const ResourceAllocation&) const = default;
};

constexpr double kUeMaxTxPowerDbm = 23.0;
constexpr double kUeMinTxPowerDbm = -60.0;

struct PowerDbm {
  double dbm = 0.0;

  auto operator<=>(const PowerDbm&) const = default;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

// UE transmit power is clamped to the handheld class range.
PowerDbm clamp_ue_tx_power(PowerDbm p);

}  // namespace llc
