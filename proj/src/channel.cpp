#include "llc/channel.h"

#include <cmath>

namespace llc {

SinrSample sinr(PowerDbm target_rx, const std::vector<PowerDbm>& interferers, double noise_dbm)
{
  double denom_mw = dbm_to_mw(noise_dbm);
  for (const PowerDbm& p : interferers) {
    denom_mw += dbm_to_mw(p.dbm);
  }
  SinrSample s;
  s.signal_dbm = target_rx.dbm;
  s.interference_plus_noise_dbm = mw_to_dbm(denom_mw);
  s.sinr_db = s.signal_dbm - s.interference_plus_noise_dbm;
  return s;
}

DecodeOutcome decode_outcome(std::optional<PowerDbm> legit_rx, std::optional<PowerDbm> spoof_rx,
                             bool occupied, const ChannelParams& params)
{
  const double margin = params.capture_margin_db;
  if (legit_rx && spoof_rx) {
    if (spoof_rx->dbm >= legit_rx->dbm + margin) {
      return DecodeOutcome::SpoofDecoded;
    }
    if (legit_rx->dbm >= spoof_rx->dbm + margin) {
      return DecodeOutcome::LegitDecoded;
    }
    return DecodeOutcome::Collision;
  }
  if (spoof_rx) {
    if (!occupied && spoof_rx->dbm >= params.sensitivity_dbm) {
      return DecodeOutcome::SpoofDecoded;
    }
    return DecodeOutcome::Collision;
  }
  if (legit_rx && legit_rx->dbm >= params.sensitivity_dbm) {
    return DecodeOutcome::LegitDecoded;
  }
  return DecodeOutcome::Collision;
}

double rb_bandwidth_hz(int mu)
{
  // 12 subcarriers at 15 kHz * 2^mu spacing.
  return 12.0 * 15e3 * static_cast<double>(1 << mu);
}

double throughput_mbps(const ResourceAllocation& alloc, double sinr_db, int mu,
                       const ChannelParams& params)
{
  const double snr_lin = dbm_to_mw(sinr_db);  // same 10^(x/10) mapping
  double eff = std::log2(1.0 + snr_lin);
  if (eff > params.max_spectral_efficiency) {
    eff = params.max_spectral_efficiency;
  }
  const double bps = static_cast<double>(alloc.num_rb) * rb_bandwidth_hz(mu) * eff *
                     params.overhead_factor;
  return bps / 1e6;
}

}  // namespace llc
