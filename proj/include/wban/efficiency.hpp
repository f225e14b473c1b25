// Social-welfare evaluation for both games: global-optimum and worst-case
// profile search (exact grid for small N, multi-start ascent above that),
// Price of Anarchy, and the exp-ratio stability metrics derived from the
// welfare at the equilibrium, the optimum, and the worst searched profile.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "wban/backoff_game.hpp"
#include "wban/channel.hpp"
#include "wban/link_game.hpp"

namespace wban {

struct EfficiencySearch {
  int exact_n_cap = 3;  // full grid enumeration up to this many networks
  int power_grid = 40;  // log-spaced power points per rate (link game)
  int cw_grid = 24;     // log-spaced windows (backoff game)
  int starts = 6;       // multi-start count above the cap (first = NE seed)
};

struct EfficiencyReport {
  int n = 0;
  std::string game_tag;       // "link" or "backoff"
  double welfare_ne = 0.0;
  double welfare_opt = 0.0;   // exact max for n <= cap, else ascent lower bound
  double welfare_worst = 0.0; // min over the same searched space
  double poa = 0.0;           // welfare_opt / welfare_ne; NaN when degenerate
  double exp_inv_poa = 0.0;   // exp(1/poa); NaN when poa is absent
  double l_metric = 0.0;      // exp(welfare_worst / welfare_ne)
  bool exact = false;         // optimum search enumerated the full grid
};

struct LinkOptimum {
  ActionProfile profile;
  double welfare = 0.0;
  bool exact = false;
};

// Best and worst welfare over (power grid x rate set)^N when N <= cap (the
// equilibrium profile is always included as a candidate, and the best cell is
// polished by local continuous ascent); multi-start coordinate ascent/descent
// seeded by the equilibrium otherwise.
LinkOptimum link_global_optimum(const GainMatrix& gains,
                                const LinkGameConfig& cfg,
                                const PdrModel& model,
                                const ActionProfile& ne_profile,
                                const EfficiencySearch& search,
                                std::mt19937_64& rng, bool minimize = false);

// Full PoA report for one link-game instance: equilibrium from sequential
// best response, optimum/worst per link_global_optimum.
EfficiencyReport link_efficiency(const GainMatrix& gains,
                                 const LinkGameConfig& cfg,
                                 const PdrModel& model,
                                 const EfficiencySearch& search,
                                 std::mt19937_64& rng);

// One backoff-game instance: per-network payload durations and link-layer
// delivery probabilities (both taken from a link equilibrium on the same
// channel), shared MAC timing.
struct BackoffInstance {
  std::vector<double> t_payload;
  std::vector<double> pdr_ctx;
  MacParams mac;
};

BackoffInstance backoff_instance_from_link(const GainMatrix& gains,
                                           const ActionProfile& link_ne,
                                           const PdrModel& model,
                                           const MacParams& mac);

struct CwOptimum {
  std::vector<double> cw;
  double welfare = 0.0;
  bool exact = false;
};

CwOptimum cw_global_optimum(const BackoffInstance& inst,
                            const BackoffGameConfig& cfg,
                            const std::vector<int>& ne_cw,
                            const EfficiencySearch& search,
                            std::mt19937_64& rng, bool minimize = false);

EfficiencyReport backoff_efficiency(const BackoffInstance& inst,
                                    const BackoffGameConfig& cfg,
                                    const EfficiencySearch& search,
                                    std::mt19937_64& rng);

// Synthetic-channel gain snapshot used for Monte-Carlo efficiency instances.
GainMatrix random_instance(int n, std::uint64_t seed,
                           const ChannelParams& cp);

} // namespace wban
