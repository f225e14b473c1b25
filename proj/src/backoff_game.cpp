#include "wban/backoff_game.hpp"

#include <algorithm>
#include <cmath>

#include "wban/markov.hpp"

namespace wban {

void ContentionEstimate::update(ContentionEvent ev) {
  if (ev == ContentionEvent::slot_tick) {
    buckets_.emplace_back();
    ++slots_;
    if (static_cast<int>(buckets_.size()) > window_len_) {
      const Bucket& old = buckets_.front();
      transmitted_ -= old.tx;
      ack_failures_ -= old.fail;
      --slots_;
      buckets_.pop_front();
    }
    return;
  }
  if (buckets_.empty()) {
    // Outcome reported before any slot was observed; open the first bucket.
    buckets_.emplace_back();
    ++slots_;
  }
  Bucket& cur = buckets_.back();
  ++cur.tx;
  ++transmitted_;
  if (ev == ContentionEvent::tx_fail) {
    ++cur.fail;
    ++ack_failures_;
  }
}

double contention_delay(double p, double cw, const MacParams& mac) {
  auto stage_cost = [&](int upto) {
    double c = 0.0;
    for (int j = 0; j <= upto; ++j) {
      double wj = (j == 0) ? 0.0 : std::pow(mac.window_growth, j) * cw;
      c += (wj + 1.0) / 2.0 * mac.t_slot + mac.t_superframe;
    }
    return c;
  };
  const int m = mac.max_backoff_stage;
  double d = 0.0;
  for (int i = 1; i <= m - 1; ++i)
    d += std::pow(p, i) * (1.0 - p) * stage_cost(i);
  d += std::pow(p, m) * stage_cost(m);
  return d;
}

double utility_backoff(int cw_min, double p_est, const MacParams& mac,
                       const BackoffGameConfig& cfg, double pdr_context) {
  double tau = tau_of_cw(p_est, cw_min);
  double e = epoch_mean(tau, mac);
  double s = (1.0 - p_est) * tau * mac.t_payload / e;
  double delay = contention_delay(p_est, cw_min, mac);
  double drop = tau * std::pow(p_est, mac.max_backoff_stage + 1);
  return cfg.weight_d * (pdr_context * s) - cfg.weight_l * delay - drop;
}

double utility_backoff(int cw_min, const ContentionEstimate& est,
                       const MacParams& mac, const BackoffGameConfig& cfg,
                       double pdr_context) {
  return utility_backoff(cw_min, est.p_est(), mac, cfg, pdr_context);
}

int best_response_cw(double p_est, const MacParams& mac,
                     const BackoffGameConfig& cfg, double pdr_context) {
  int best = cfg.cw_lo;
  double bv = -1e300;
  for (int cw = cfg.cw_lo; cw <= cfg.cw_hi; ++cw) {
    double v = utility_backoff(cw, p_est, mac, cfg, pdr_context);
    // Strict improvement keeps ties at the smaller window.
    if (v > bv + 1e-18) {
      bv = v;
      best = cw;
    }
  }
  return best;
}

int best_response_cw_ternary(double p_est, const MacParams& mac,
                             const BackoffGameConfig& cfg,
                             double pdr_context) {
  auto v = [&](int cw) {
    return utility_backoff(cw, p_est, mac, cfg, pdr_context);
  };
  int lo = cfg.cw_lo, hi = cfg.cw_hi;
  while (hi - lo > 2) {
    int m1 = lo + (hi - lo) / 3;
    int m2 = hi - (hi - lo) / 3;
    if (v(m1) < v(m2))
      lo = m1 + 1;
    else
      hi = m2;
  }
  int best = lo;
  double bv = v(lo);
  for (int cw = lo + 1; cw <= hi; ++cw) {
    double val = v(cw);
    if (val > bv + 1e-18) {
      bv = val;
      best = cw;
    }
  }
  return best;
}

CoupledContention
couple_contention(const std::vector<double>& cw,
                  const std::vector<double>& t_payload,
                  const std::vector<double>& pdr_ctx, const MacParams& mac,
                  const CoupledContention* warm) {
  const int n = static_cast<int>(cw.size());
  CoupledContention c;
  if (warm && static_cast<int>(warm->tau.size()) == n) {
    c = *warm;
  } else {
    c.tau.assign(n, 0.01);
    c.p.assign(n, 0.3);
  }
  for (int it = 0; it < 4000; ++it) {
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      double no_hit = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double ej = epoch_mean(c.tau[j], mac);
        double w =
            std::min(1.0, (t_payload[i] + t_payload[j]) * c.tau[j] / ej);
        no_hit *= 1.0 - w;
      }
      double pn = (1.0 - pdr_ctx[i]) * (1.0 - no_hit);
      double tn = tau_of_cw(pn, cw[i]);
      delta = std::max(delta, std::abs(pn - c.p[i]));
      c.p[i] = 0.5 * c.p[i] + 0.5 * pn;
      c.tau[i] = 0.5 * c.tau[i] + 0.5 * tn;
    }
    if (delta < 1e-13) break;
  }
  return c;
}

double backoff_welfare(const std::vector<double>& cw,
                       const std::vector<double>& t_payload,
                       const std::vector<double>& pdr_ctx,
                       const MacParams& mac, const BackoffGameConfig& cfg,
                       const CoupledContention* warm) {
  CoupledContention c = couple_contention(cw, t_payload, pdr_ctx, mac, warm);
  double w = 0.0;
  for (std::size_t i = 0; i < cw.size(); ++i) {
    double e = epoch_mean(c.tau[i], mac);
    double s = (1.0 - c.p[i]) * c.tau[i] * t_payload[i] / e;
    double delay = contention_delay(c.p[i], cw[i], mac);
    w += cfg.weight_d * s - cfg.weight_l * delay -
         c.tau[i] * std::pow(c.p[i], mac.max_backoff_stage + 1);
  }
  return w;
}

CwNeResult solve_cw_ne(const std::vector<double>& t_payload,
                       const std::vector<double>& pdr_ctx,
                       const MacParams& mac, const BackoffGameConfig& cfg,
                       std::vector<double> start, int max_iter) {
  const int n = static_cast<int>(t_payload.size());
  CwNeResult res;
  std::vector<double> cwp =
      start.empty() ? std::vector<double>(n, static_cast<double>(mac.cw_min))
                    : std::move(start);
  CoupledContention state;
  for (int it = 0; it < max_iter; ++it) {
    state = couple_contention(cwp, t_payload, pdr_ctx, mac,
                              state.tau.empty() ? nullptr : &state);
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      MacParams mi = mac;
      mi.t_payload = t_payload[i];
      int br = best_response_cw(state.p[i], mi, cfg);
      moved = std::max(moved, std::abs(br - cwp[i]));
      cwp[i] = 0.5 * cwp[i] + 0.5 * br;
    }
    res.iterations = it + 1;
    if (moved < 0.5) {
      res.converged = true;
      break;
    }
  }
  res.cw.resize(n);
  for (int i = 0; i < n; ++i)
    res.cw[i] = static_cast<int>(std::lround(cwp[i]));
  return res;
}

} // namespace wban
