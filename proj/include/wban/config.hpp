// Flat key = value scenario configuration: dotted section names, '#'
// comments, unknown keys rejected by name. The canonical rendering of the
// effective configuration (defaults included) is hashed into every output CSV
// so artifacts are traceable to the exact run settings.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wban/efficiency.hpp"
#include "wban/sim.hpp"

namespace wban {

struct ScenarioConfig {
  // scenario.*
  int n_wbans = 2;
  long long superframes = 20000;
  long long warmup_superframes = 0;
  std::uint64_t seed = 1;
  std::string mode = "baseline-tdma"; // baseline-tdma|link-game|backoff-game|both
  int replications = 1;
  int workers = 1;
  std::string out_dir = ".";
  long long timeseries_every = 1;
  std::string collision_model = "sinr"; // sinr|overlap-fatal
  double pdr_collision = 0.0;

  // mac.*
  MacParams mac; // defaults to the evaluation parameter set
  int rotation_slots = -2;

  // channel.*
  std::string channel_mode = "synthetic"; // synthetic|trace
  std::string trace_path;
  std::uint64_t channel_seed = 0; // 0 = reuse scenario.seed
  ChannelParams channel;

  // link.*
  LinkGameConfig link;
  double link_ewma = 0.1;
  std::string rate_table_path; // empty = built-in delivery table

  // backoff.*
  BackoffGameConfig backoff;
  double backoff_p_prior = 0.5;
  int backoff_window_slots = 100000;

  // energy.*
  double energy_eta = 0.25;
  double energy_fixed_w = 3e-3;

  // poa.*
  int poa_instances = 200;
  EfficiencySearch poa_search;
};

// Apply one dotted key. Throws std::runtime_error naming the key when it is
// unknown and describing the failure when the value does not parse.
void apply_key(ScenarioConfig& cfg, const std::string& key,
               const std::string& value);

// Parse a whole config body (line-oriented key = value, '#' comments). Errors
// carry the offending line number. The result is validated.
ScenarioConfig parse_config_text(const std::string& text);

// Read and parse a config file; errors carry the path.
ScenarioConfig load_config(const std::string& path);

// Cross-field checks (counts positive, ranges ordered, trace path present in
// trace mode). Throws std::runtime_error naming the violated constraint.
void validate_config(const ScenarioConfig& cfg);

// Canonical rendering: every key in a fixed order, one per line, defaults
// included, doubles at round-trip precision.
std::string canonical_config_text(const ScenarioConfig& cfg);

// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(const std::string& text);

// 16-hex-digit hash of the canonical rendering; the provenance column value.
std::string config_hash(const ScenarioConfig& cfg);

// Simulation modes selected by a mode string; "both" expands to the two game
// modes so summaries can be compared per game.
std::vector<SimMode> modes_for(const std::string& mode);

// Stable CSV tag for one simulation mode.
std::string mode_tag(SimMode mode);

// Translate the scenario settings into one simulator run at the given mode
// and seed. The channel trace and a custom delivery table, being file-backed,
// are left for the caller to attach.
SimConfig make_sim_config(const ScenarioConfig& cfg, SimMode mode,
                          std::uint64_t seed);

} // namespace wban
