#include "wban/config.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace wban {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* want) {
  throw std::runtime_error("config key '" + key + "': cannot parse '" + value +
                           "' as " + want);
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') bad_value(key, value, "a number");
  return v;
}

long long to_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') bad_value(key, value, "an integer");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    bad_value(key, value, "an unsigned integer");
  return v;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void check(bool ok, const char* what) {
  if (!ok) throw std::runtime_error(std::string("invalid config: ") + what);
}

} // namespace

void apply_key(ScenarioConfig& c, const std::string& key,
               const std::string& value) {
  // scenario.*
  if (key == "scenario.n_wbans")
    c.n_wbans = static_cast<int>(to_int(key, value));
  else if (key == "scenario.superframes")
    c.superframes = to_int(key, value);
  else if (key == "scenario.warmup_superframes")
    c.warmup_superframes = to_int(key, value);
  else if (key == "scenario.seed")
    c.seed = to_u64(key, value);
  else if (key == "scenario.mode") {
    if (value != "baseline-tdma" && value != "link-game" &&
        value != "backoff-game" && value != "both")
      bad_value(key, value,
                "one of baseline-tdma, link-game, backoff-game, both");
    c.mode = value;
  } else if (key == "scenario.replications")
    c.replications = static_cast<int>(to_int(key, value));
  else if (key == "scenario.workers")
    c.workers = static_cast<int>(to_int(key, value));
  else if (key == "scenario.out_dir")
    c.out_dir = value;
  else if (key == "scenario.timeseries_every")
    c.timeseries_every = to_int(key, value);
  else if (key == "scenario.collision_model") {
    if (value != "sinr" && value != "overlap-fatal")
      bad_value(key, value, "one of sinr, overlap-fatal");
    c.collision_model = value;
  } else if (key == "scenario.pdr_collision")
    c.pdr_collision = to_double(key, value);

  // mac.*
  else if (key == "mac.superframe_s")
    c.mac.t_superframe = to_double(key, value);
  else if (key == "mac.slot_s")
    c.mac.t_slot = to_double(key, value);
  else if (key == "mac.beacon_s")
    c.mac.t_beacon = to_double(key, value);
  else if (key == "mac.payload_s")
    c.mac.t_payload = to_double(key, value);
  else if (key == "mac.ack_s")
    c.mac.t_ack = to_double(key, value);
  else if (key == "mac.payload_bits")
    c.mac.payload_bits = to_double(key, value);
  else if (key == "mac.cw_min")
    c.mac.cw_min = static_cast<int>(to_int(key, value));
  else if (key == "mac.max_backoff_stage")
    c.mac.max_backoff_stage = static_cast<int>(to_int(key, value));
  else if (key == "mac.window_growth")
    c.mac.window_growth = to_double(key, value);
  else if (key == "mac.rotation_slots")
    c.rotation_slots = static_cast<int>(to_int(key, value));

  // channel.*
  else if (key == "channel.mode") {
    if (value != "synthetic" && value != "trace")
      bad_value(key, value, "one of synthetic, trace");
    c.channel_mode = value;
  } else if (key == "channel.trace_path")
    c.trace_path = value;
  else if (key == "channel.seed")
    c.channel_seed = to_u64(key, value);
  else if (key == "channel.noise_w")
    c.channel.noise_w = to_double(key, value);
  else if (key == "channel.area_m")
    c.channel.area_m = to_double(key, value);
  else if (key == "channel.speed_mps")
    c.channel.speed_mps = to_double(key, value);
  else if (key == "channel.speed_std")
    c.channel.speed_std = to_double(key, value);
  else if (key == "channel.turn_every_s")
    c.channel.turn_every_s = to_double(key, value);
  else if (key == "channel.path_loss_exp")
    c.channel.path_loss_exp = to_double(key, value);
  else if (key == "channel.ref_distance_m")
    c.channel.ref_distance_m = to_double(key, value);
  else if (key == "channel.ref_atten_db")
    c.channel.ref_atten_db = to_double(key, value);
  else if (key == "channel.shadow_db")
    c.channel.shadow_db = to_double(key, value);
  else if (key == "channel.doppler_hz")
    c.channel.doppler_hz = to_double(key, value);
  else if (key == "channel.oscillators")
    c.channel.oscillators = static_cast<int>(to_int(key, value));
  else if (key == "channel.onbody_atten_db")
    c.channel.onbody_atten_db = to_double(key, value);
  else if (key == "channel.onbody_shape")
    c.channel.onbody_shape = to_double(key, value);
  else if (key == "channel.onbody_scale")
    c.channel.onbody_scale = to_double(key, value);
  else if (key == "channel.onbody_coherence_s")
    c.channel.onbody_coherence_s = to_double(key, value);

  // link.*
  else if (key == "link.p_min")
    c.link.p_min = to_double(key, value);
  else if (key == "link.p_max")
    c.link.p_max = to_double(key, value);
  else if (key == "link.cost_c")
    c.link.cost_c = to_double(key, value);
  else if (key == "link.cost_g")
    c.link.cost_g = to_double(key, value);
  else if (key == "link.qos_q")
    c.link.qos_q = to_double(key, value);
  else if (key == "link.ewma")
    c.link_ewma = to_double(key, value);
  else if (key == "link.rate_table")
    c.rate_table_path = value;

  // backoff.*
  else if (key == "backoff.weight_d")
    c.backoff.weight_d = to_double(key, value);
  else if (key == "backoff.weight_l")
    c.backoff.weight_l = to_double(key, value);
  else if (key == "backoff.cw_lo")
    c.backoff.cw_lo = static_cast<int>(to_int(key, value));
  else if (key == "backoff.cw_hi")
    c.backoff.cw_hi = static_cast<int>(to_int(key, value));
  else if (key == "backoff.p_prior")
    c.backoff_p_prior = to_double(key, value);
  else if (key == "backoff.window_slots")
    c.backoff_window_slots = static_cast<int>(to_int(key, value));

  // energy.*
  else if (key == "energy.eta")
    c.energy_eta = to_double(key, value);
  else if (key == "energy.fixed_w")
    c.energy_fixed_w = to_double(key, value);

  // poa.*
  else if (key == "poa.instances")
    c.poa_instances = static_cast<int>(to_int(key, value));
  else if (key == "poa.exact_n_cap")
    c.poa_search.exact_n_cap = static_cast<int>(to_int(key, value));
  else if (key == "poa.power_grid")
    c.poa_search.power_grid = static_cast<int>(to_int(key, value));
  else if (key == "poa.cw_grid")
    c.poa_search.cw_grid = static_cast<int>(to_int(key, value));
  else if (key == "poa.starts")
    c.poa_search.starts = static_cast<int>(to_int(key, value));

  else
    throw std::runtime_error("unknown config key '" + key + "'");
}

ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": empty key");
    try {
      apply_key(cfg, key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream body;
  body << f.rdbuf();
  try {
    return parse_config_text(body.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void validate_config(const ScenarioConfig& c) {
  check(c.n_wbans >= 1, "scenario.n_wbans must be >= 1");
  check(c.superframes >= 1, "scenario.superframes must be >= 1");
  check(c.warmup_superframes >= 0,
        "scenario.warmup_superframes must be >= 0");
  check(c.replications >= 1, "scenario.replications must be >= 1");
  check(c.workers >= 1, "scenario.workers must be >= 1");
  check(c.timeseries_every >= 0, "scenario.timeseries_every must be >= 0");
  check(c.pdr_collision >= 0.0 && c.pdr_collision <= 1.0,
        "scenario.pdr_collision must lie in [0, 1]");
  check(c.mac.t_superframe > 0 && c.mac.t_slot > 0 && c.mac.t_beacon >= 0 &&
            c.mac.t_payload > 0 && c.mac.t_ack >= 0,
        "mac durations must be positive");
  check(c.mac.payload_bits > 0, "mac.payload_bits must be positive");
  check(c.mac.cw_min >= 1, "mac.cw_min must be >= 1");
  check(c.mac.max_backoff_stage >= 1, "mac.max_backoff_stage must be >= 1");
  check(c.mac.window_growth >= 1.0, "mac.window_growth must be >= 1");
  check(c.rotation_slots >= -2, "mac.rotation_slots must be >= -2");
  check(c.channel_mode != "trace" || !c.trace_path.empty(),
        "channel.mode = trace requires channel.trace_path");
  check(c.channel.noise_w > 0, "channel.noise_w must be positive");
  check(c.channel.oscillators >= 1, "channel.oscillators must be >= 1");
  check(c.link.p_min > 0 && c.link.p_max > c.link.p_min,
        "link power range must satisfy 0 < p_min < p_max");
  check(c.link_ewma > 0.0 && c.link_ewma <= 1.0,
        "link.ewma must lie in (0, 1]");
  check(c.backoff.cw_lo >= 1 && c.backoff.cw_hi >= c.backoff.cw_lo,
        "backoff window range must satisfy 1 <= cw_lo <= cw_hi");
  check(c.backoff_p_prior >= 0.0 && c.backoff_p_prior <= 1.0,
        "backoff.p_prior must lie in [0, 1]");
  check(c.backoff_window_slots >= 1, "backoff.window_slots must be >= 1");
  check(c.energy_eta > 0.0 && c.energy_eta <= 1.0,
        "energy.eta must lie in (0, 1]");
  check(c.energy_fixed_w >= 0.0, "energy.fixed_w must be >= 0");
  check(c.poa_instances >= 1, "poa.instances must be >= 1");
  check(c.poa_search.exact_n_cap >= 0, "poa.exact_n_cap must be >= 0");
  check(c.poa_search.power_grid >= 2, "poa.power_grid must be >= 2");
  check(c.poa_search.cw_grid >= 2, "poa.cw_grid must be >= 2");
  check(c.poa_search.starts >= 1, "poa.starts must be >= 1");
}

std::string canonical_config_text(const ScenarioConfig& c) {
  std::ostringstream out;
  out << std::setprecision(17);
  auto put = [&](const char* key, const auto& value) {
    out << key << " = " << value << '\n';
  };
  put("scenario.n_wbans", c.n_wbans);
  put("scenario.superframes", c.superframes);
  put("scenario.warmup_superframes", c.warmup_superframes);
  put("scenario.seed", c.seed);
  put("scenario.mode", c.mode);
  put("scenario.replications", c.replications);
  put("scenario.workers", c.workers);
  put("scenario.out_dir", c.out_dir);
  put("scenario.timeseries_every", c.timeseries_every);
  put("scenario.collision_model", c.collision_model);
  put("scenario.pdr_collision", c.pdr_collision);
  put("mac.superframe_s", c.mac.t_superframe);
  put("mac.slot_s", c.mac.t_slot);
  put("mac.beacon_s", c.mac.t_beacon);
  put("mac.payload_s", c.mac.t_payload);
  put("mac.ack_s", c.mac.t_ack);
  put("mac.payload_bits", c.mac.payload_bits);
  put("mac.cw_min", c.mac.cw_min);
  put("mac.max_backoff_stage", c.mac.max_backoff_stage);
  put("mac.window_growth", c.mac.window_growth);
  put("mac.rotation_slots", c.rotation_slots);
  put("channel.mode", c.channel_mode);
  put("channel.trace_path", c.trace_path);
  put("channel.seed", c.channel_seed);
  put("channel.noise_w", c.channel.noise_w);
  put("channel.area_m", c.channel.area_m);
  put("channel.speed_mps", c.channel.speed_mps);
  put("channel.speed_std", c.channel.speed_std);
  put("channel.turn_every_s", c.channel.turn_every_s);
  put("channel.path_loss_exp", c.channel.path_loss_exp);
  put("channel.ref_distance_m", c.channel.ref_distance_m);
  put("channel.ref_atten_db", c.channel.ref_atten_db);
  put("channel.shadow_db", c.channel.shadow_db);
  put("channel.doppler_hz", c.channel.doppler_hz);
  put("channel.oscillators", c.channel.oscillators);
  put("channel.onbody_atten_db", c.channel.onbody_atten_db);
  put("channel.onbody_shape", c.channel.onbody_shape);
  put("channel.onbody_scale", c.channel.onbody_scale);
  put("channel.onbody_coherence_s", c.channel.onbody_coherence_s);
  put("link.p_min", c.link.p_min);
  put("link.p_max", c.link.p_max);
  put("link.cost_c", c.link.cost_c);
  put("link.cost_g", c.link.cost_g);
  put("link.qos_q", c.link.qos_q);
  put("link.ewma", c.link_ewma);
  put("link.rate_table", c.rate_table_path);
  put("backoff.weight_d", c.backoff.weight_d);
  put("backoff.weight_l", c.backoff.weight_l);
  put("backoff.cw_lo", c.backoff.cw_lo);
  put("backoff.cw_hi", c.backoff.cw_hi);
  put("backoff.p_prior", c.backoff_p_prior);
  put("backoff.window_slots", c.backoff_window_slots);
  put("energy.eta", c.energy_eta);
  put("energy.fixed_w", c.energy_fixed_w);
  put("poa.instances", c.poa_instances);
  put("poa.exact_n_cap", c.poa_search.exact_n_cap);
  put("poa.power_grid", c.poa_search.power_grid);
  put("poa.cw_grid", c.poa_search.cw_grid);
  put("poa.starts", c.poa_search.starts);
  return out.str();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = fnv1a64(canonical_config_text(cfg));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::vector<SimMode> modes_for(const std::string& mode) {
  if (mode == "baseline-tdma") return {SimMode::baseline};
  if (mode == "link-game") return {SimMode::link_game};
  if (mode == "backoff-game") return {SimMode::backoff_game};
  if (mode == "both") return {SimMode::link_game, SimMode::backoff_game};
  throw std::runtime_error("unknown mode '" + mode + "'");
}

std::string mode_tag(SimMode mode) {
  switch (mode) {
    case SimMode::baseline: return "baseline-tdma";
    case SimMode::link_game: return "link-game";
    case SimMode::backoff_game: return "backoff-game";
  }
  return "?";
}

SimConfig make_sim_config(const ScenarioConfig& c, SimMode mode,
                          std::uint64_t seed) {
  SimConfig s;
  s.n_wbans = c.n_wbans;
  s.superframes = c.superframes;
  s.warmup_superframes = c.warmup_superframes;
  s.seed = seed;
  s.channel_seed = c.channel_seed;
  s.mode = mode;
  s.collision_model = c.collision_model == "sinr"
                          ? CollisionModel::sinr
                          : CollisionModel::overlap_fatal;
  s.pdr_collision = c.pdr_collision;
  s.rotation_slots = c.rotation_slots;
  s.mac = c.mac;
  s.channel = c.channel;
  s.link = c.link;
  s.backoff = c.backoff;
  s.link_ewma = c.link_ewma;
  s.backoff_p_prior = c.backoff_p_prior;
  s.backoff_window_slots = c.backoff_window_slots;
  s.energy_eta = c.energy_eta;
  s.energy_fixed_w = c.energy_fixed_w;
  s.timeseries_every = c.timeseries_every;
  return s;
}

} // namespace wban
