#include "wban/link_game.hpp"

#include <algorithm>
#include <cmath>

namespace wban {

double sinr(int i, const ActionProfile& profile, const GainMatrix& gains) {
  return sinr(profile[i].power_w, interference_context(i, profile, gains));
}

InterferenceContext interference_context(int i, const ActionProfile& profile,
                                         const GainMatrix& gains) {
  InterferenceContext ctx;
  ctx.gain = gains.at(i, i);
  ctx.noise_w = gains.noise_w;
  ctx.interference_w = 0.0;
  for (int j = 0; j < gains.n; ++j)
    if (j != i) ctx.interference_w += gains.at(i, j) * profile[j].power_w;
  return ctx;
}

std::vector<InterferenceContext>
interference_contexts(const ActionProfile& profile, const GainMatrix& gains) {
  std::vector<InterferenceContext> out;
  out.reserve(profile.size());
  for (int i = 0; i < static_cast<int>(profile.size()); ++i)
    out.push_back(interference_context(i, profile, gains));
  return out;
}

double utility_link(double power_w, int rate_index,
                    const InterferenceContext& ctx, const LinkGameConfig& cfg,
                    const PdrModel& model) {
  double gamma = sinr(power_w, ctx);
  return -cfg.cost_c * std::pow(power_w, cfg.cost_g) +
         std::log1p(pdr(gamma, rate_index, model)) -
         cfg.qos_q / model.rates[rate_index];
}

double utility_link(int i, const ActionProfile& profile,
                    const GainMatrix& gains, const LinkGameConfig& cfg,
                    const PdrModel& model) {
  return utility_link(profile[i].power_w, profile[i].rate_index,
                      interference_context(i, profile, gains), cfg, model);
}

double utility_link_dP(double power_w, int rate_index,
                       const InterferenceContext& ctx,
                       const LinkGameConfig& cfg, const PdrModel& model) {
  double gamma = sinr(power_w, ctx);
  double t = pdr_exponent(gamma, rate_index, model);
  double e = std::exp(t);
  return -cfg.cost_c * cfg.cost_g * std::pow(power_w, cfg.cost_g - 1.0) +
         e / (1.0 + e) * t * model.beta[rate_index] / power_w;
}

double utility_link_d2P(double power_w, int rate_index,
                        const InterferenceContext& ctx,
                        const LinkGameConfig& cfg, const PdrModel& model) {
  double gamma = sinr(power_w, ctx);
  double t = pdr_exponent(gamma, rate_index, model);
  double b = model.beta[rate_index];
  double tp = b * t / power_w;
  double tpp = b * (b - 1.0) * t / (power_w * power_w);
  double e = std::exp(t);
  return -cfg.cost_c * cfg.cost_g * (cfg.cost_g - 1.0) *
             std::pow(power_w, cfg.cost_g - 2.0) +
         e / (1.0 + e) * (tp * tp / (1.0 + e) + tpp);
}

double best_power(int rate_index, const InterferenceContext& ctx,
                  const LinkGameConfig& cfg, const PdrModel& model) {
  // Dense scan first: robust when the curve has a convex window near p_min.
  const int kGrid = 220;
  const double ratio = cfg.p_max / cfg.p_min;
  double best_p = cfg.p_min, best_u = -1e300;
  for (int i = 0; i < kGrid; ++i) {
    double f = static_cast<double>(i) / (kGrid - 1);
    double pw = cfg.p_min * std::pow(ratio, f);
    double u = utility_link(pw, rate_index, ctx, cfg, model);
    if (std::isfinite(u) && u > best_u) {
      best_u = u;
      best_p = pw;
    }
  }
  // Refine by bisection on the derivative inside the bracketing cell.
  double cell = std::pow(ratio, 1.0 / (kGrid - 1));
  double lo = std::max(cfg.p_min, best_p / cell);
  double hi = std::min(cfg.p_max, best_p * cell);
  double dlo = utility_link_dP(lo, rate_index, ctx, cfg, model);
  double dhi = utility_link_dP(hi, rate_index, ctx, cfg, model);
  if (dlo > 0.0 && dhi < 0.0) {
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (utility_link_dP(mid, rate_index, ctx, cfg, model) > 0.0)
        lo = mid;
      else
        hi = mid;
      if (hi - lo <= 1e-9 * hi) break;
    }
    best_p = 0.5 * (lo + hi);
  }
  return best_p;
}

Action best_response_link(const InterferenceContext& ctx,
                          const LinkGameConfig& cfg, const PdrModel& model) {
  Action br;
  br.power_w = cfg.p_min;
  br.rate_index = 0;
  double best_u = -1e300;
  for (int r = 0; r < model.num_rates(); ++r) {
    double pw = best_power(r, ctx, cfg, model);
    double u = utility_link(pw, r, ctx, cfg, model);
    if (!std::isfinite(u)) continue; // overflow candidates never win
    // Strict improvement required, so ties stay at lower power / lower rate.
    if (u > best_u + 1e-15) {
      best_u = u;
      br.power_w = pw;
      br.rate_index = r;
    }
  }
  return br;
}

Action best_response_link(int i, const ActionProfile& profile,
                          const GainMatrix& gains, const LinkGameConfig& cfg,
                          const PdrModel& model) {
  Action br =
      best_response_link(interference_context(i, profile, gains), cfg, model);
  br.cw_min = profile[i].cw_min;
  return br;
}

double taylor_utility(double power_w, int rate_index,
                      const InterferenceContext& ctx,
                      const LinkGameConfig& cfg, const PdrModel& model) {
  double gamma = sinr(power_w, ctx);
  return -cfg.cost_c * std::pow(power_w, cfg.cost_g) -
         cfg.qos_q / model.rates[rate_index] +
         pdr_exponent(gamma, rate_index, model) / 2.0;
}

double potential_value(const ActionProfile& profile,
                       const std::vector<InterferenceContext>& contexts,
                       const LinkGameConfig& cfg, const PdrModel& model) {
  double f = 0.0;
  for (int i = 0; i < static_cast<int>(profile.size()); ++i)
    f += taylor_utility(profile[i].power_w, profile[i].rate_index, contexts[i],
                        cfg, model);
  return f;
}

double potential_value(const ActionProfile& profile, const GainMatrix& gains,
                       const LinkGameConfig& cfg, const PdrModel& model) {
  return potential_value(profile, interference_contexts(profile, gains), cfg,
                         model);
}

double rate_preference(double power_w, int rate_index,
                       const InterferenceContext& ctx,
                       const LinkGameConfig& cfg, const PdrModel& model) {
  double gamma = sinr(power_w, ctx);
  return -cfg.qos_q / model.rates[rate_index] +
         pdr_exponent(gamma, rate_index, model) / 2.0;
}

LmpWitness check_lmp(double power_w, int low_rate_index,
                     const InterferenceContext& ctx, const LinkGameConfig& cfg,
                     const PdrModel& model) {
  LmpWitness w;
  w.f_low = rate_preference(power_w, low_rate_index, ctx, cfg, model);
  w.f_mid = rate_preference(power_w, low_rate_index + 1, ctx, cfg, model);
  w.f_high = rate_preference(power_w, low_rate_index + 2, ctx, cfg, model);
  if (w.f_low == w.f_high)
    w.holds = w.f_mid >= w.f_low;
  else
    w.holds = w.f_mid > std::min(w.f_low, w.f_high);
  return w;
}

LinkNeResult solve_link_ne(const GainMatrix& gains, const LinkGameConfig& cfg,
                           const PdrModel& model, ActionProfile start,
                           int max_sweeps) {
  LinkNeResult res;
  if (start.empty()) {
    Action a;
    a.power_w = cfg.p_max;
    a.rate_index = 0;
    start.assign(gains.n, a);
  }
  res.profile = std::move(start);
  int quiet_sweeps = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_dp = 0.0;
    bool rate_change = false;
    for (int i = 0; i < gains.n; ++i) {
      Action br = best_response_link(i, res.profile, gains, cfg, model);
      max_dp = std::max(max_dp, std::abs(br.power_w - res.profile[i].power_w));
      rate_change |= br.rate_index != res.profile[i].rate_index;
      res.profile[i] = br;
    }
    res.sweeps = sweep + 1;
    quiet_sweeps = (max_dp < 1e-6 && !rate_change) ? quiet_sweeps + 1 : 0;
    if (quiet_sweeps >= 2) {
      res.converged = true;
      break;
    }
  }
  return res;
}

double link_welfare(const ActionProfile& profile, const GainMatrix& gains,
                    const LinkGameConfig& cfg, const PdrModel& model) {
  double w = 0.0;
  for (int i = 0; i < static_cast<int>(profile.size()); ++i)
    w += utility_link(i, profile, gains, cfg, model);
  return w;
}

} // namespace wban
