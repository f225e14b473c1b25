#include "wban/efficiency.hpp"

#include <algorithm>
#include <cmath>

namespace wban {

namespace {

std::vector<double> log_levels(double lo, double hi, int k) {
  std::vector<double> v(k);
  for (int i = 0; i < k; ++i)
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (k - 1));
  return v;
}

// Welfare evaluator with the per-network interference totals kept up to date
// so probing a single-player deviation costs O(N) instead of O(N^2).
class LinkWelfare {
public:
  LinkWelfare(const GainMatrix& gains, const LinkGameConfig& cfg,
              const PdrModel& model, ActionProfile profile)
      : gains_(gains), cfg_(cfg), model_(model), profile_(std::move(profile)) {
    interf_.assign(gains_.n, 0.0);
    for (int j = 0; j < gains_.n; ++j)
      for (int k = 0; k < gains_.n; ++k)
        if (k != j) interf_[j] += gains_.at(j, k) * profile_[k].power_w;
  }

  double welfare() const {
    double w = 0.0;
    for (int j = 0; j < gains_.n; ++j)
      w += player_utility(j, profile_[j], interf_[j]);
    return w;
  }

  // Welfare if player i played a instead (no state change).
  double welfare_with(int i, const Action& a) const {
    double dp = a.power_w - profile_[i].power_w;
    double w = player_utility(i, a, interf_[i]);
    for (int j = 0; j < gains_.n; ++j) {
      if (j == i) continue;
      w += player_utility(j, profile_[j],
                          interf_[j] + gains_.at(j, i) * dp);
    }
    return w;
  }

  void commit(int i, const Action& a) {
    double dp = a.power_w - profile_[i].power_w;
    for (int j = 0; j < gains_.n; ++j)
      if (j != i) interf_[j] += gains_.at(j, i) * dp;
    profile_[i] = a;
  }

  const ActionProfile& profile() const { return profile_; }

private:
  double player_utility(int j, const Action& a, double interf) const {
    InterferenceContext ctx{gains_.at(j, j), interf, gains_.noise_w};
    return utility_link(a.power_w, a.rate_index, ctx, cfg_, model_);
  }

  const GainMatrix& gains_;
  const LinkGameConfig& cfg_;
  const PdrModel& model_;
  ActionProfile profile_;
  std::vector<double> interf_;
};

} // namespace

LinkOptimum link_global_optimum(const GainMatrix& gains,
                                const LinkGameConfig& cfg,
                                const PdrModel& model,
                                const ActionProfile& ne_profile,
                                const EfficiencySearch& search,
                                std::mt19937_64& rng, bool minimize) {
  const int n = gains.n;
  const double sign = minimize ? -1.0 : 1.0;
  std::vector<double> levels =
      log_levels(cfg.p_min, cfg.p_max, search.power_grid);
  const int num_rates = model.num_rates();
  const int actions = search.power_grid * num_rates;

  LinkOptimum best;
  best.profile = ne_profile;
  best.welfare = link_welfare(ne_profile, gains, cfg, model);
  best.exact = n <= search.exact_n_cap;

  auto consider = [&](const ActionProfile& prof, double w) {
    if (sign * w > sign * best.welfare) {
      best.welfare = w;
      best.profile = prof;
    }
  };

  if (best.exact) {
    // Full odometer enumeration of the action grid.
    std::vector<int> idx(n, 0);
    ActionProfile prof(n);
    while (true) {
      for (int i = 0; i < n; ++i) {
        prof[i].power_w = levels[idx[i] % search.power_grid];
        prof[i].rate_index = idx[i] / search.power_grid;
      }
      consider(prof, link_welfare(prof, gains, cfg, model));
      int c = 0;
      while (c < n && ++idx[c] == actions) idx[c++] = 0;
      if (c == n) break;
    }
  } else {
    // Multi-start coordinate search, the equilibrium always among the starts.
    std::uniform_int_distribution<int> pick(0, actions - 1);
    for (int s = 0; s < search.starts; ++s) {
      ActionProfile start(n);
      if (s == 0) {
        start = ne_profile;
      } else {
        for (auto& a : start) {
          int v = pick(rng);
          a.power_w = levels[v % search.power_grid];
          a.rate_index = v / search.power_grid;
        }
      }
      LinkWelfare eval(gains, cfg, model, start);
      double w = eval.welfare();
      bool improved = true;
      while (improved) {
        improved = false;
        for (int i = 0; i < n; ++i) {
          Action cand = eval.profile()[i];
          Action chosen = cand;
          double cw = w;
          for (int v = 0; v < actions; ++v) {
            cand.power_w = levels[v % search.power_grid];
            cand.rate_index = v / search.power_grid;
            double wt = eval.welfare_with(i, cand);
            if (sign * wt > sign * cw + 1e-15) {
              cw = wt;
              chosen = cand;
            }
          }
          if (sign * cw > sign * w + 1e-15) {
            eval.commit(i, chosen);
            w = cw;
            improved = true;
          }
        }
      }
      consider(eval.profile(), w);
    }
  }

  // Polish the winning cell by per-player golden-section on power (rates are
  // already discrete). Keeps the result only when it genuinely improves.
  {
    LinkWelfare eval(gains, cfg, model, best.profile);
    double w = eval.welfare();
    const double cell =
        std::pow(cfg.p_max / cfg.p_min, 1.0 / (search.power_grid - 1));
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (int i = 0; i < n; ++i) {
        Action a = eval.profile()[i];
        double lo = std::max(cfg.p_min, a.power_w / cell);
        double hi = std::min(cfg.p_max, a.power_w * cell);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        Action t1 = a, t2 = a;
        for (int it = 0; it < 60; ++it) {
          t1.power_w = x1;
          t2.power_w = x2;
          if (sign * eval.welfare_with(i, t1) >
              sign * eval.welfare_with(i, t2)) {
            hi = x2;
            x2 = x1;
            x1 = hi - gr * (hi - lo);
          } else {
            lo = x1;
            x1 = x2;
            x2 = lo + gr * (hi - lo);
          }
        }
        t1.power_w = 0.5 * (lo + hi);
        double wt = eval.welfare_with(i, t1);
        if (sign * wt > sign * w) {
          eval.commit(i, t1);
          w = wt;
        }
      }
    }
    consider(eval.profile(), w);
  }
  return best;
}

EfficiencyReport link_efficiency(const GainMatrix& gains,
                                 const LinkGameConfig& cfg,
                                 const PdrModel& model,
                                 const EfficiencySearch& search,
                                 std::mt19937_64& rng) {
  EfficiencyReport rep;
  rep.n = gains.n;
  rep.game_tag = "link";
  LinkNeResult ne = solve_link_ne(gains, cfg, model);
  rep.welfare_ne = link_welfare(ne.profile, gains, cfg, model);
  LinkOptimum opt =
      link_global_optimum(gains, cfg, model, ne.profile, search, rng, false);
  LinkOptimum worst =
      link_global_optimum(gains, cfg, model, ne.profile, search, rng, true);
  rep.welfare_opt = opt.welfare;
  rep.welfare_worst = worst.welfare;
  rep.exact = opt.exact;
  if (rep.welfare_ne > 0.0) {
    rep.poa = rep.welfare_opt / rep.welfare_ne;
    rep.exp_inv_poa = std::exp(1.0 / rep.poa);
    rep.l_metric = std::exp(rep.welfare_worst / rep.welfare_ne);
  } else {
    rep.poa = std::nan("");
    rep.exp_inv_poa = std::nan("");
    rep.l_metric = std::nan("");
  }
  return rep;
}

BackoffInstance backoff_instance_from_link(const GainMatrix& gains,
                                           const ActionProfile& link_ne,
                                           const PdrModel& model,
                                           const MacParams& mac) {
  BackoffInstance inst;
  inst.mac = mac;
  inst.t_payload.resize(gains.n);
  inst.pdr_ctx.resize(gains.n);
  for (int i = 0; i < gains.n; ++i) {
    inst.t_payload[i] =
        mac.payload_bits / model.rates[link_ne[i].rate_index];
    inst.pdr_ctx[i] =
        pdr(sinr(i, link_ne, gains), link_ne[i].rate_index, model);
  }
  return inst;
}

CwOptimum cw_global_optimum(const BackoffInstance& inst,
                            const BackoffGameConfig& cfg,
                            const std::vector<int>& ne_cw,
                            const EfficiencySearch& search,
                            std::mt19937_64& rng, bool minimize) {
  const int n = static_cast<int>(inst.t_payload.size());
  const double sign = minimize ? -1.0 : 1.0;
  std::vector<double> grid;
  for (int i = 0; i < search.cw_grid; ++i)
    grid.push_back(std::round(
        cfg.cw_lo * std::pow(static_cast<double>(cfg.cw_hi) / cfg.cw_lo,
                             static_cast<double>(i) / (search.cw_grid - 1))));

  CwOptimum best;
  best.cw.assign(ne_cw.begin(), ne_cw.end());
  CoupledContention warm;
  best.welfare =
      backoff_welfare(best.cw, inst.t_payload, inst.pdr_ctx, inst.mac, cfg);
  best.exact = n <= search.exact_n_cap;

  auto welfare_of = [&](const std::vector<double>& prof) {
    warm = couple_contention(prof, inst.t_payload, inst.pdr_ctx, inst.mac,
                             warm.tau.empty() ? nullptr : &warm);
    // warm now holds the exact state, so the inner solve returns immediately.
    return backoff_welfare(prof, inst.t_payload, inst.pdr_ctx, inst.mac, cfg,
                           &warm);
  };

  auto consider = [&](const std::vector<double>& prof, double w) {
    if (sign * w > sign * best.welfare) {
      best.welfare = w;
      best.cw = prof;
    }
  };

  if (best.exact) {
    std::vector<int> idx(n, 0);
    std::vector<double> prof(n);
    while (true) {
      for (int i = 0; i < n; ++i) prof[i] = grid[idx[i]];
      consider(prof, welfare_of(prof));
      int c = 0;
      while (c < n && ++idx[c] == static_cast<int>(grid.size())) idx[c++] = 0;
      if (c == n) break;
    }
  } else {
    std::uniform_int_distribution<int> pick(0,
                                            static_cast<int>(grid.size()) - 1);
    for (int s = 0; s < search.starts; ++s) {
      std::vector<double> prof(n);
      if (s == 0)
        prof = best.cw;
      else
        for (auto& v : prof) v = grid[pick(rng)];
      double w = welfare_of(prof);
      bool improved = true;
      while (improved) {
        improved = false;
        for (int i = 0; i < n; ++i) {
          double keep = prof[i];
          double chosen = keep;
          double cw = w;
          for (double cand : grid) {
            prof[i] = cand;
            double wt = welfare_of(prof);
            if (sign * wt > sign * cw + 1e-15) {
              cw = wt;
              chosen = cand;
            }
          }
          prof[i] = chosen;
          if (sign * cw > sign * w + 1e-15) {
            w = cw;
            improved = true;
          }
        }
      }
      consider(prof, w);
    }
  }

  // Integer hill-climb around the winner (the grid is log-coarse).
  {
    std::vector<double> prof = best.cw;
    double w = best.welfare;
    bool improved = true;
    int guard = 0;
    while (improved && guard++ < 50) {
      improved = false;
      for (int i = 0; i < n; ++i) {
        for (int step : {-8, -4, -2, -1, 1, 2, 4, 8}) {
          double cand = prof[i] + step;
          if (cand < cfg.cw_lo || cand > cfg.cw_hi) continue;
          double keep = prof[i];
          prof[i] = cand;
          double wt = welfare_of(prof);
          if (sign * wt > sign * w + 1e-15) {
            w = wt;
            improved = true;
          } else {
            prof[i] = keep;
          }
        }
      }
    }
    consider(prof, w);
  }
  return best;
}

EfficiencyReport backoff_efficiency(const BackoffInstance& inst,
                                    const BackoffGameConfig& cfg,
                                    const EfficiencySearch& search,
                                    std::mt19937_64& rng) {
  EfficiencyReport rep;
  rep.n = static_cast<int>(inst.t_payload.size());
  rep.game_tag = "backoff";
  CwNeResult ne = solve_cw_ne(inst.t_payload, inst.pdr_ctx, inst.mac, cfg);
  std::vector<double> ne_d(ne.cw.begin(), ne.cw.end());
  rep.welfare_ne =
      backoff_welfare(ne_d, inst.t_payload, inst.pdr_ctx, inst.mac, cfg);
  CwOptimum opt =
      cw_global_optimum(inst, cfg, ne.cw, search, rng, false);
  CwOptimum worst =
      cw_global_optimum(inst, cfg, ne.cw, search, rng, true);
  rep.welfare_opt = opt.welfare;
  rep.welfare_worst = worst.welfare;
  rep.exact = opt.exact;
  if (rep.welfare_ne > 0.0) {
    rep.poa = rep.welfare_opt / rep.welfare_ne;
    rep.exp_inv_poa = std::exp(1.0 / rep.poa);
    rep.l_metric = std::exp(rep.welfare_worst / rep.welfare_ne);
  } else {
    rep.poa = std::nan("");
    rep.exp_inv_poa = std::nan("");
    rep.l_metric = std::nan("");
  }
  return rep;
}

GainMatrix random_instance(int n, std::uint64_t seed,
                           const ChannelParams& cp) {
  SyntheticChannel ch(n, seed, cp);
  return ch.snapshot(0.0);
}

} // namespace wban
