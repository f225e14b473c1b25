// TDMA superframe timing parameters shared by the analytic model and the
// event simulator. All durations are in seconds; slot-count helpers derive
// integer quantities used by the discrete backoff chain.
#pragma once

#include <cmath>
#include <cstdint>

namespace wban {

struct MacParams {
  double t_superframe = 0.080;   // full TDMA round owned by one WBAN [s]
  double t_slot = 0.312e-3;      // backoff slot [s]
  double t_beacon = 6.25e-3;     // beacon airtime at head of superframe [s]
  double t_payload = 54.6875e-3; // data fragment airtime [s]
  double t_ack = 3.125e-3;       // acknowledgement airtime [s]
  double payload_bits = 1400.0;  // fragment payload size [bit]
  int cw_min = 140;              // initial contention window [slots]
  int max_backoff_stage = 4;     // retry budget m; drop after stage-m failure
  double window_growth = 2.0;    // per-stage window multiplier

  // Backoff window at stage k: 0 at the first attempt, growth^k * cw_min after
  // k consecutive failures (capped at max_backoff_stage by the caller).
  double stage_window(int k) const {
    if (k <= 0) return 0.0;
    return std::pow(window_growth, k) * static_cast<double>(cw_min);
  }
};

// Parameter set used for model-vs-simulation validation runs: 64 ms
// superframe, 0.25 ms slots, 30 B beacon / 110 B payload / 10 B ack at
// 32 kbit/s, CW_min 64, m = 4.
inline MacParams validation_mac() {
  MacParams mac;
  mac.t_superframe = 0.064;
  mac.t_slot = 0.25e-3;
  mac.t_beacon = 7.5e-3;
  mac.t_payload = 27.5e-3;
  mac.t_ack = 2.5e-3;
  mac.payload_bits = 880.0;
  mac.cw_min = 64;
  mac.max_backoff_stage = 4;
  return mac;
}

// Default evaluation parameter set: 80 ms superframe, 0.312 ms slots, 20 B
// beacon, 175 B payload at the given PHY rate, 10 B ack at 25.6 kbit/s,
// CW_min 43.75 ms (140 slots), m = 4.
inline MacParams default_mac(double rate_bps = 25600.0) {
  MacParams mac;
  mac.t_superframe = 0.080;
  mac.t_slot = 0.312e-3;
  mac.t_beacon = 6.25e-3;
  mac.t_payload = 1400.0 / rate_bps;
  mac.t_ack = 3.125e-3;
  mac.payload_bits = 1400.0;
  mac.cw_min = 140;
  mac.max_backoff_stage = 4;
  return mac;
}

} // namespace wban
