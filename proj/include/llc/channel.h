#pragma once

#include <optional>
#include <vector>

#include "llc/core.h"

namespace llc {

struct LinkBudget {
  PowerDbm tx_power;
  double path_loss_db = 0.0;

  PowerDbm rx_power() const { return {tx_power.dbm - path_loss_db}; }
};

struct SinrSample {
  double signal_dbm = 0.0;
  double interference_plus_noise_dbm = 0.0;
  double sinr_db = 0.0;
};

struct ChannelParams {
  double sensitivity_dbm = -110.0;
  double capture_margin_db = 3.0;
  double overhead_factor = 0.7;
  double max_spectral_efficiency = 7.4;  // bit/s/Hz
};

// Interference and noise are summed in the linear domain.
SinrSample sinr(PowerDbm target_rx, const std::vector<PowerDbm>& interferers, double noise_dbm);

enum class DecodeOutcome { LegitDecoded, SpoofDecoded, Collision };

// Capture model: the spoofed copy wins with a capture_margin_db power
// advantage (or on unoccupied resources above sensitivity); the legitimate
// copy wins symmetrically; anything in between is a collision where neither
// side decodes.
DecodeOutcome decode_outcome(std::optional<PowerDbm> legit_rx, std::optional<PowerDbm> spoof_rx,
                             bool occupied, const ChannelParams& params = {});

double rb_bandwidth_hz(int mu);

// Shannon-capacity proxy, linear in allocated RBs, spectral efficiency capped.
double throughput_mbps(const ResourceAllocation& alloc, double sinr_db, int mu,
                       const ChannelParams& params = {});

}  // namespace llc
