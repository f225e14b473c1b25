#include "wban/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "wban/markov.hpp"

namespace wban {

namespace {

long long to_ns(double seconds) { return std::llround(seconds * 1e9); }
double to_s(long long ns) { return static_cast<double>(ns) * 1e-9; }

struct Interval {
  long long s = -1, e = -1;
  double power_w = 0.0;
};

inline long long overlap_ns(const Interval& a, long long s, long long e) {
  if (a.s < 0) return 0;
  long long lo = std::max(a.s, s);
  long long hi = std::min(a.e, e);
  return hi > lo ? hi - lo : 0;
}

struct Node {
  // Event state: when !in_epoch, next_ns is the next epoch start; otherwise
  // it is the resolution instant at the epoch's end.
  long long next_ns = 0;
  bool in_epoch = false;
  Interval cur;     // in-flight payload interval
  Interval prev[3]; // recently resolved payloads, newest first
  long long epoch_idx = -1;
  int stage = 0;
  long long pending_wait_slots = 0; // backoff drawn before the next attempt

  // Bounds of this network's own measured window: the start of its first
  // counted epoch and the resolution instant of its last one.
  long long measure_start_ns = 0;
  long long measure_end_ns = 0;

  Action action;
  long long payload_ns = 0;

  // Fragment bookkeeping (saturation: always exactly one in flight).
  bool first_attempt = true;
  long long frag_start_ns = 0;

  ContentionEstimate est;
  double i_ewma = 0.0;
  bool i_ewma_init = false;

  std::mt19937_64 rot_rng, backoff_rng, delivery_rng;
  double last_epoch_s = -1.0;

  // Accumulators over the measured window.
  long long attempts = 0, failures = 0, delivered = 0, dropped = 0;
  long long completed = 0;
  long long success_payload_ns = 0;
  double delivered_bits = 0.0;
  double energy_j = 0.0;
  double retry_delay_sum_s = 0.0;
  double service_delay_sum_s = 0.0;
  double power_sum = 0.0, rate_sum = 0.0, cw_sum = 0.0;
};

// Payload-offset bounds (slots) for the current payload duration. The window
// is capped so that two successive payload starts of one network stay at
// least two payload durations apart, which keeps foreign epochs statistically
// independent hits; when the payload already covers half the superframe the
// full schedulable region satisfies that on its own.
struct OffsetBounds {
  int lo = 0, hi = 0;
};
OffsetBounds offset_bounds(const MacParams& mac, double payload_s,
                           int rotation_slots) {
  OffsetBounds b;
  b.lo = static_cast<int>(std::llround(mac.t_beacon / mac.t_slot));
  int full = static_cast<int>(std::floor(
      (mac.t_superframe - payload_s - mac.t_ack) / mac.t_slot + 1e-9));
  if (full < b.lo)
    throw std::runtime_error(
        "payload does not fit in the schedulable region of the superframe");
  int width;
  if (rotation_slots >= 0) {
    width = rotation_slots;
  } else if (rotation_slots == -1 ||
             2.0 * payload_s >= mac.t_superframe + mac.t_slot) {
    width = full - b.lo; // full schedulable region
  } else {
    width = static_cast<int>(std::floor(
                (mac.t_superframe + mac.t_slot - 2.0 * payload_s) /
                    mac.t_slot +
                1e-9)) -
            1;
    width = std::max(width, 0);
  }
  b.hi = std::min(full, b.lo + width);
  return b;
}

WbanSummary finalize(const Node& nd, int id, double window_s) {
  WbanSummary s;
  s.wban_id = id;
  s.attempts = nd.attempts;
  s.failures = nd.failures;
  s.delivered = nd.delivered;
  s.dropped = nd.dropped;
  s.goodput_ratio = to_s(nd.success_payload_ns) / window_s;
  s.throughput_bps = nd.delivered_bits / window_s;
  s.collision_prob =
      nd.attempts > 0 ? static_cast<double>(nd.failures) / nd.attempts : 0.0;
  s.pdr = nd.completed > 0
              ? static_cast<double>(nd.delivered) / nd.completed
              : 0.0;
  s.drop_rate =
      nd.completed > 0 ? static_cast<double>(nd.dropped) / nd.completed : 0.0;
  s.mean_delay_s =
      nd.completed > 0 ? nd.retry_delay_sum_s / nd.completed : 0.0;
  s.mean_service_delay_s =
      nd.delivered > 0 ? nd.service_delay_sum_s / nd.delivered : 0.0;
  s.energy_per_bit = nd.delivered_bits > 0.0
                         ? nd.energy_j / nd.delivered_bits
                         : std::nan("");
  s.mean_power_w = nd.attempts > 0 ? nd.power_sum / nd.attempts : 0.0;
  s.mean_rate_bps = nd.attempts > 0 ? nd.rate_sum / nd.attempts : 0.0;
  s.mean_cw = nd.attempts > 0 ? nd.cw_sum / nd.attempts : 0.0;
  s.tau_est = nd.est.tau_est();
  s.p_est = nd.est.p_est();
  s.cw_final = nd.action.cw_min;
  return s;
}

} // namespace

ScenarioMetrics run_scenario(const SimConfig& cfg) {
  const int n = cfg.n_wbans;
  if (n < 1) throw std::runtime_error("n_wbans must be at least 1");
  const long long ts_ns = to_ns(cfg.mac.t_superframe);
  const long long slot_ns = to_ns(cfg.mac.t_slot);
  // Unsynchronized networks start at individual phases, so each runs its own
  // budget of warmup + measured epochs rather than sharing a wall-clock
  // horizon; a shared cutoff would clip a boundary epoch from late starters.
  const long long total_epochs = cfg.warmup_superframes + cfg.superframes;
  const long long done_ns = std::numeric_limits<long long>::max();
  const bool use_trace = !cfg.trace.empty();
  const bool games_on = cfg.mode != SimMode::baseline;
  // The pure-collision baseline never consults the channel, so skip the
  // mobility/fading machinery entirely there.
  const bool need_channel =
      games_on || cfg.collision_model == CollisionModel::sinr;

  std::unique_ptr<SyntheticChannel> channel;
  if (need_channel && !use_trace)
    channel = std::make_unique<SyntheticChannel>(
        n, cfg.channel_seed ? cfg.channel_seed : cfg.seed, cfg.channel);
  if (use_trace) {
    for (const auto& g : cfg.trace)
      if (g.n < n)
        throw std::runtime_error("trace matrices are smaller than n_wbans");
  }

  std::vector<Node> nodes(n);
  for (int i = 0; i < n; ++i) {
    Node& nd = nodes[i];
    nd.rot_rng = make_rng(cfg.seed, Stream::payload_rotation,
                          static_cast<std::uint64_t>(i));
    nd.backoff_rng = make_rng(cfg.seed, Stream::backoff_draws,
                              static_cast<std::uint64_t>(i));
    nd.delivery_rng = make_rng(cfg.seed, Stream::delivery_draws,
                               static_cast<std::uint64_t>(i));
    nd.est = ContentionEstimate(cfg.backoff_window_slots,
                                cfg.backoff_p_prior);
    nd.action.power_w = cfg.link.p_max;
    nd.action.rate_index = 0;
    nd.action.cw_min = cfg.mac.cw_min;
    nd.payload_ns = to_ns(cfg.mac.t_payload);
    // Unsynchronized networks: phase drawn in whole slots over several
    // superframes.
    int ts_slots = static_cast<int>(ts_ns / slot_ns);
    std::uniform_int_distribution<int> phase(0, 4 * ts_slots - 1);
    nd.next_ns = static_cast<long long>(phase(nd.rot_rng)) * slot_ns;
    nd.frag_start_ns = nd.next_ns;
  }

  auto own_gain = [&](int i, long long epoch_idx) {
    if (use_trace) return cfg.trace[epoch_idx].at(i, i);
    return channel->onbody_gain(i);
  };
  auto cross_gain = [&](int i, int j, long long t_pay_ns,
                        long long epoch_idx) {
    if (use_trace) return cfg.trace[epoch_idx].at(i, j);
    return channel->inter_gain(i, j, to_s(t_pay_ns));
  };
  const double noise_w =
      use_trace ? cfg.trace.front().noise_w : cfg.channel.noise_w;

  ScenarioMetrics out;

  while (true) {
    int i = 0;
    for (int k = 1; k < n; ++k)
      if (nodes[k].next_ns < nodes[i].next_ns) i = k;
    Node& nd = nodes[i];
    const long long t = nd.next_ns;
    if (t == done_ns) break; // every network has spent its epoch budget

    if (!nd.in_epoch) {
      // Epoch start: advance the channel, schedule this superframe's payload.
      ++nd.epoch_idx;
      if (nd.epoch_idx == cfg.warmup_superframes) nd.measure_start_ns = t;
      if (use_trace &&
          nd.epoch_idx >= static_cast<long long>(cfg.trace.size()))
        throw std::runtime_error(
            "channel trace is shorter than the simulated run");
      if (channel) {
        channel->advance_to(to_s(t));
        if (nd.last_epoch_s >= 0.0)
          channel->advance_onbody(i, to_s(t) - nd.last_epoch_s);
        nd.last_epoch_s = to_s(t);
      }
      OffsetBounds b = offset_bounds(cfg.mac, to_s(nd.payload_ns),
                                     cfg.rotation_slots);
      std::uniform_int_distribution<int> off(b.lo, b.hi);
      nd.cur.s = t + static_cast<long long>(off(nd.rot_rng)) * slot_ns;
      nd.cur.e = nd.cur.s + nd.payload_ns;
      nd.cur.power_w = nd.action.power_w;
      nd.in_epoch = true;
      nd.next_ns = t + ts_ns;
      continue;
    }

    // Resolution at the epoch's end. Every foreign epoch that can overlap our
    // payload started before this instant, so its interval is already placed.
    const bool measured = nd.epoch_idx >= cfg.warmup_superframes;
    if (measured) nd.measure_end_ns = t;
    bool overlapped = false;
    double interference_w = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Node& o = nodes[j];
      auto add = [&](const Interval& iv) {
        long long ov = overlap_ns(iv, nd.cur.s, nd.cur.e);
        if (ov == 0) return;
        overlapped = true;
        if (need_channel) {
          double frac = static_cast<double>(ov) / nd.payload_ns;
          interference_w += frac * cross_gain(i, j, nd.cur.s, nd.epoch_idx) *
                            iv.power_w;
        }
      };
      add(o.cur);
      for (const Interval& iv : o.prev) add(iv);
    }

    bool success;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    if (cfg.collision_model == CollisionModel::overlap_fatal) {
      success = !overlapped ||
                (cfg.pdr_collision > 0.0 && u01(nd.delivery_rng) <
                                                cfg.pdr_collision);
    } else {
      double gamma = own_gain(i, nd.epoch_idx) * nd.action.power_w /
                     (interference_w + noise_w);
      double pd = pdr(gamma, nd.action.rate_index, cfg.rate_table);
      success = u01(nd.delivery_rng) < pd;
    }

    const double payload_s = to_s(nd.payload_ns);
    if (measured) {
      ++nd.attempts;
      if (!success) ++nd.failures;
      if (success) {
        nd.success_payload_ns += nd.payload_ns;
        nd.delivered_bits += cfg.mac.payload_bits;
      }
      nd.energy_j += (nd.action.power_w / cfg.energy_eta +
                      cfg.energy_fixed_w) *
                     payload_s;
      nd.power_sum += nd.action.power_w;
      nd.rate_sum += cfg.rate_table.rates[nd.action.rate_index];
      nd.cw_sum += nd.action.cw_min;
    }

    // The transmission occupies one chain state; report it, then the outcome.
    nd.est.update(ContentionEvent::slot_tick);
    nd.est.update(success ? ContentionEvent::tx_success
                          : ContentionEvent::tx_fail);

    const double elapsed_s = to_s(t - nd.frag_start_ns);
    long long draw = 0;
    if (success) {
      if (measured) {
        ++nd.delivered;
        ++nd.completed;
        if (!nd.first_attempt) nd.retry_delay_sum_s += elapsed_s;
        nd.service_delay_sum_s += elapsed_s;
      }
      nd.stage = 0;
      nd.first_attempt = true;
      nd.frag_start_ns = t;
    } else {
      ++nd.stage;
      if (nd.stage > cfg.mac.max_backoff_stage) {
        // Retry budget exhausted: discard, next fragment immediately.
        if (measured) {
          ++nd.dropped;
          ++nd.completed;
          nd.retry_delay_sum_s += elapsed_s;
        }
        nd.stage = 0;
        nd.first_attempt = true;
        nd.frag_start_ns = t;
      } else {
        long long w = static_cast<long long>(
            cfg.mac.stage_window(nd.stage) + 0.5);
        std::uniform_int_distribution<long long> ud(1, w);
        draw = ud(nd.backoff_rng);
        nd.pending_wait_slots = draw;
        for (long long k = 0; k < draw; ++k)
          nd.est.update(ContentionEvent::slot_tick);
        nd.first_attempt = false;
      }
    }

    // Game updates, once per own resolution: smooth the interference just
    // measured, then best-respond.
    if (games_on) {
      nd.i_ewma = nd.i_ewma_init
                      ? (1.0 - cfg.link_ewma) * nd.i_ewma +
                            cfg.link_ewma * interference_w
                      : interference_w;
      nd.i_ewma_init = true;
      InterferenceContext ctx;
      ctx.gain = own_gain(i, nd.epoch_idx);
      ctx.interference_w = nd.i_ewma;
      ctx.noise_w = noise_w;
      if (cfg.mode == SimMode::link_game) {
        Action br = best_response_link(ctx, cfg.link, cfg.rate_table);
        nd.action.power_w = br.power_w;
        nd.action.rate_index = br.rate_index;
        nd.payload_ns = to_ns(cfg.mac.payload_bits /
                              cfg.rate_table.rates[br.rate_index]);
      } else {
        MacParams own = cfg.mac;
        own.t_payload = payload_s;
        double gamma_hat = sinr(nd.action.power_w, ctx);
        double pdr_ctx = pdr(gamma_hat, nd.action.rate_index, cfg.rate_table);
        // The search range is certified concave, so the ternary variant is a
        // safe fast path inside the hot loop.
        nd.action.cw_min = best_response_cw_ternary(
            nd.est.p_est(), own, cfg.backoff, pdr_ctx);
      }
    }

    if (cfg.timeseries_every > 0 &&
        nd.epoch_idx % cfg.timeseries_every == 0) {
      TimeseriesRow row;
      row.wban_id = i;
      row.sf = nd.epoch_idx;
      row.tau_est = nd.est.tau_est();
      row.p_est = nd.est.p_est();
      row.cw_star = nd.action.cw_min;
      row.power_w = nd.action.power_w;
      row.rate_bps = cfg.rate_table.rates[nd.action.rate_index];
      out.timeseries.push_back(row);
    }

    nd.prev[2] = nd.prev[1];
    nd.prev[1] = nd.prev[0];
    nd.prev[0] = nd.cur;
    nd.cur = Interval{};
    nd.in_epoch = false;
    // A network that has spent its budget retires; its resolved payloads stay
    // in prev[] so stragglers still see the interference they experienced.
    nd.next_ns = nd.epoch_idx + 1 >= total_epochs ? done_ns
                                                  : t + draw * slot_ns;
  }

  out.per_wban.reserve(n);
  for (int i = 0; i < n; ++i)
    out.per_wban.push_back(finalize(
        nodes[i], i,
        to_s(nodes[i].measure_end_ns - nodes[i].measure_start_ns)));

  // Aggregate row: airtime and throughput add the per-network rates; the
  // probability, delay, and energy columns pool the underlying counters so
  // busy networks carry their actual weight.
  WbanSummary& agg = out.aggregate;
  agg.wban_id = -1;
  double energy = 0.0, bits = 0.0;
  double power_sum = 0.0, rate_sum = 0.0, cw_sum = 0.0;
  double retry_sum = 0.0, service_sum = 0.0;
  long long completed = 0;
  for (int i = 0; i < n; ++i) {
    const Node& nd = nodes[i];
    const WbanSummary& w = out.per_wban[i];
    agg.attempts += nd.attempts;
    agg.failures += nd.failures;
    agg.delivered += nd.delivered;
    agg.dropped += nd.dropped;
    completed += nd.completed;
    agg.goodput_ratio += w.goodput_ratio;
    agg.throughput_bps += w.throughput_bps;
    energy += nd.energy_j;
    bits += nd.delivered_bits;
    retry_sum += nd.retry_delay_sum_s;
    service_sum += nd.service_delay_sum_s;
    power_sum += nd.power_sum;
    rate_sum += nd.rate_sum;
    cw_sum += nd.cw_sum;
  }
  const double att = static_cast<double>(agg.attempts);
  agg.collision_prob = agg.attempts > 0 ? agg.failures / att : 0.0;
  agg.pdr =
      completed > 0 ? static_cast<double>(agg.delivered) / completed : 0.0;
  agg.drop_rate =
      completed > 0 ? static_cast<double>(agg.dropped) / completed : 0.0;
  agg.mean_delay_s = completed > 0 ? retry_sum / completed : 0.0;
  agg.mean_service_delay_s =
      agg.delivered > 0 ? service_sum / agg.delivered : 0.0;
  agg.energy_per_bit = bits > 0.0 ? energy / bits : std::nan("");
  agg.mean_power_w = agg.attempts > 0 ? power_sum / att : 0.0;
  agg.mean_rate_bps = agg.attempts > 0 ? rate_sum / att : 0.0;
  agg.mean_cw = agg.attempts > 0 ? cw_sum / att : 0.0;
  if (channel) out.clamped_distances = channel->clamped_distance_count();
  return out;
}

} // namespace wban
