// Discrete-event simulator of N co-located, unsynchronized TDMA networks:
// beacon, scheduled payload with per-superframe slot rotation, ACK feedback,
// exponential backoff with retry-limit discard, and per-epoch game updates.
// Works on an integer nanosecond clock; both a pure-collision resolution mode
// (any payload overlap is fatal) and an SINR mode (overlap-weighted
// interference through the delivery curves) are provided.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wban/backoff_game.hpp"
#include "wban/channel.hpp"
#include "wban/link_game.hpp"
#include "wban/mac.hpp"
#include "wban/pdr.hpp"

namespace wban {

enum class SimMode { baseline, link_game, backoff_game };
enum class CollisionModel { sinr, overlap_fatal };

struct SimConfig {
  int n_wbans = 2;
  long long superframes = 20000;    // measured epochs per run
  long long warmup_superframes = 0; // epochs excluded from metrics
  std::uint64_t seed = 1;
  std::uint64_t channel_seed = 0; // 0 = reuse the scenario seed
  SimMode mode = SimMode::baseline;
  CollisionModel collision_model = CollisionModel::sinr;
  double pdr_collision = 0.0; // delivery probability on overlap (pure mode)
  int rotation_slots = -2;    // payload-offset window width; -2 = auto rule,
                              // -1 = full schedulable region, 0 = fixed slot
  MacParams mac;              // t_payload is the fixed-rate payload duration
  ChannelParams channel;
  LinkGameConfig link;
  PdrModel rate_table;
  BackoffGameConfig backoff;
  double link_ewma = 0.1;          // interference smoothing weight
  double backoff_p_prior = 0.5;    // estimator prior before first outcome
  int backoff_window_slots = 100000;
  double energy_eta = 0.25;        // power-amplifier efficiency
  double energy_fixed_w = 3e-3;    // fixed circuit draw while transmitting [W]
  long long timeseries_every = 1;  // per-superframe row decimation; 0 = none
  std::vector<GainMatrix> trace;   // non-empty = measured-trace channel
};

// Per-network accumulators over the measured window.
struct WbanSummary {
  int wban_id = 0;
  long long attempts = 0;  // payload transmissions resolved
  long long failures = 0;  // transmissions without an ACK
  long long delivered = 0; // fragments delivered
  long long dropped = 0;   // fragments discarded after the stage-m failure
  double goodput_ratio = 0.0;       // delivered payload airtime / elapsed
  double throughput_bps = 0.0;      // delivered payload bits / elapsed
  double collision_prob = 0.0;      // failures / attempts
  double pdr = 0.0;                 // delivered / completed fragments
  double drop_rate = 0.0;           // dropped / completed fragments
  double mean_delay_s = 0.0;        // retry-delay estimand over all fragments
  double mean_service_delay_s = 0.0; // epoch-start-to-delivery, delivered only
  double energy_per_bit = 0.0;      // J per delivered payload bit (NaN if none)
  double mean_power_w = 0.0;        // attempt-weighted action averages
  double mean_rate_bps = 0.0;
  double mean_cw = 0.0;
  double tau_est = 0.0; // estimator state at run end
  double p_est = 0.0;
  int cw_final = 0;
};

// One decimated estimator sample (emitted per own superframe index).
struct TimeseriesRow {
  int wban_id = 0;
  long long sf = 0;
  double tau_est = 0.0;
  double p_est = 0.0;
  int cw_star = 0;
  double power_w = 0.0;
  double rate_bps = 0.0;
};

struct ScenarioMetrics {
  std::vector<WbanSummary> per_wban;
  WbanSummary aggregate; // counters summed, ratios over the union
  std::vector<TimeseriesRow> timeseries;
  long long clamped_distances = 0; // mobility pairs pinned at the floor
};

// Simulate one scenario to completion. Throws on an unusable configuration
// (payload longer than the schedulable region, trace shorter than the run).
ScenarioMetrics run_scenario(const SimConfig& cfg);

} // namespace wban
