#include "llc/core.h"

#include <cmath>

namespace llc {

SlotTime slot_advance(SlotTime t, int64_t n_slots)
{
  if (n_slots < 0) {
    throw time_error("slot_advance: negative step");
  }
  const int spsf = t.slots_per_subframe();
  const int64_t hyper = static_cast<int64_t>(kSfnPeriod) * kSubframesPerFrame * spsf;
  int64_t pos = (t.hyper_slot() + n_slots) % hyper;
  SlotTime out;
  out.mu = t.mu;
  out.slot = static_cast<uint8_t>(pos % spsf);
  pos /= spsf;
  out.subframe = static_cast<uint8_t>(pos % kSubframesPerFrame);
  out.sfn = static_cast<uint16_t>(pos / kSubframesPerFrame);
  return out;
}

int64_t subframes_between(const SlotTime& a, const SlotTime& b)
{
  const int64_t sf_a = static_cast<int64_t>(a.sfn) * kSubframesPerFrame + a.subframe;
  const int64_t sf_b = static_cast<int64_t>(b.sfn) * kSubframesPerFrame + b.subframe;
  const int64_t period = static_cast<int64_t>(kSfnPeriod) * kSubframesPerFrame;
  int64_t diff = (sf_b - sf_a) % period;
  if (diff < 0) {
    diff += period;
  }
  if (diff > period / 2) {
    throw time_error("subframes_between: separation exceeds half the SFN space");
  }
  return diff;
}

bool slot_less(const SlotTime& a, const SlotTime& b)
{
  const int spsf = a.slots_per_subframe();
  const int64_t hyper = static_cast<int64_t>(kSfnPeriod) * kSubframesPerFrame * spsf;
  int64_t diff = (b.hyper_slot() - a.hyper_slot()) % hyper;
  if (diff < 0) {
    diff += hyper;
  }
  return diff != 0 && diff <= hyper / 2;
}

double slot_duration_ms(int mu)
{
  return 1.0 / static_cast<double>(1 << mu);
}

double dbm_to_mw(double dbm)
{
  return std::pow(10.0, dbm / 10.0);
}

double mw_to_dbm(double mw)
{
  return 10.0 * std::log10(mw);
}

PowerDbm clamp_ue_tx_power(PowerDbm p)
{
  if (p.dbm > kUeMaxTxPowerDbm) {
    return {kUeMaxTxPowerDbm};
  }
  if (p.dbm < kUeMinTxPowerDbm) {
    return {kUeMinTxPowerDbm};
  }
  return p;
}

}  // namespace llc
