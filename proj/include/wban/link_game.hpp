// Joint power/rate adaptation game: each network maximizes a utility that
// rewards delivery and rate while penalizing transmit power, against the
// interference the other networks create. Provides the closed-form utility
// derivatives, per-rate best power, joint best response, the Taylor-expanded
// potential over frozen interference contexts, and the larger-midpoint
// property check used to certify rate-wise local optima are global.
#pragma once

#include <vector>

#include "wban/channel.hpp"
#include "wban/pdr.hpp"

namespace wban {

// One network's action: transmit power, rate index into the PdrModel table,
// and the minimum contention window used by the backoff game.
struct Action {
  double power_w = 1e-3;
  int rate_index = 0;
  int cw_min = 140;
};
using ActionProfile = std::vector<Action>;

struct LinkGameConfig {
  double p_min = 1e-5;   // transmit power bounds [W]
  double p_max = 1e-3;
  double cost_c = 2e5;   // power-cost scale [W^-g]
  double cost_g = 2.0;   // power-cost exponent; > 1 keeps the utility concave
  double qos_q = 2560.0; // rate-reward scale [bit/s]
};

// One network's view of the channel: own-link gain plus the total foreign
// received power at its hub. All single-player evaluations in this module are
// functions of this pair, so callers can evaluate either against live gains
// or against a frozen context.
struct InterferenceContext {
  double gain = 1e-6;          // own-link power gain
  double interference_w = 0.0; // sum of foreign received powers [W]
  double noise_w = 3.16e-12;   // receiver noise [W]
};

inline double sinr(double power_w, const InterferenceContext& ctx) {
  return ctx.gain * power_w / (ctx.interference_w + ctx.noise_w);
}

// gamma_i = h_ii P_i / (sum_{j != i} h_ij P_j + noise).
double sinr(int i, const ActionProfile& profile, const GainMatrix& gains);

InterferenceContext interference_context(int i, const ActionProfile& profile,
                                         const GainMatrix& gains);
std::vector<InterferenceContext>
interference_contexts(const ActionProfile& profile, const GainMatrix& gains);

// U = -c P^g + ln(1 + PDR(gamma, R)) - q/R.
double utility_link(double power_w, int rate_index,
                    const InterferenceContext& ctx, const LinkGameConfig& cfg,
                    const PdrModel& model);
double utility_link(int i, const ActionProfile& profile,
                    const GainMatrix& gains, const LinkGameConfig& cfg,
                    const PdrModel& model);

// dU/dP = -c g P^(g-1) + PDR/(1+PDR) * beta T / P with T = alpha gamma^beta.
double utility_link_dP(double power_w, int rate_index,
                       const InterferenceContext& ctx,
                       const LinkGameConfig& cfg, const PdrModel& model);

// d2U/dP2 = -c g (g-1) P^(g-2) + PDR/(1+PDR) [T'^2/(1+PDR) + T''] with
// T' = beta T / P and T'' = beta (beta-1) T / P^2.
double utility_link_d2P(double power_w, int rate_index,
                        const InterferenceContext& ctx,
                        const LinkGameConfig& cfg, const PdrModel& model);

// argmax_P U at a fixed rate: dense log-spaced scan over [p_min, p_max]
// refined by bisection on dU/dP inside the bracketing cell, 1e-9 relative.
double best_power(int rate_index, const InterferenceContext& ctx,
                  const LinkGameConfig& cfg, const PdrModel& model);

// Joint best response over (P, R). Non-finite utilities count as -infinity;
// ties break toward lower power, then lower rate. Preserves cw_min of the
// current action.
Action best_response_link(int i, const ActionProfile& profile,
                          const GainMatrix& gains, const LinkGameConfig& cfg,
                          const PdrModel& model);
Action best_response_link(const InterferenceContext& ctx,
                          const LinkGameConfig& cfg, const PdrModel& model);

// First-order Taylor utility -c P^g - q/R + alpha gamma^beta / 2 (constants
// dropped). Summed over players at frozen contexts this is an exact potential
// for unilateral deviations.
double taylor_utility(double power_w, int rate_index,
                      const InterferenceContext& ctx,
                      const LinkGameConfig& cfg, const PdrModel& model);

double potential_value(const ActionProfile& profile,
                       const std::vector<InterferenceContext>& contexts,
                       const LinkGameConfig& cfg, const PdrModel& model);
// Convenience: contexts derived from the profile/gains before summing.
double potential_value(const ActionProfile& profile, const GainMatrix& gains,
                       const LinkGameConfig& cfg, const PdrModel& model);

// Power-independent part of the Taylor utility as a function of the rate
// index, -q/R + alpha gamma^beta / 2; ordering over rates at fixed power is
// decided by this term alone.
double rate_preference(double power_w, int rate_index,
                       const InterferenceContext& ctx,
                       const LinkGameConfig& cfg, const PdrModel& model);

// Larger-midpoint property over the rate triplet (low, low+1, low+2) at fixed
// power: the midpoint's preference must strictly exceed the smaller endpoint
// when the endpoints differ, and reach them when they are equal.
struct LmpWitness {
  bool holds = false;
  double f_low = 0.0;  // preference at rate index low
  double f_mid = 0.0;  // at low + 1
  double f_high = 0.0; // at low + 2
};
LmpWitness check_lmp(double power_w, int low_rate_index,
                     const InterferenceContext& ctx, const LinkGameConfig& cfg,
                     const PdrModel& model);

struct LinkNeResult {
  ActionProfile profile;
  int sweeps = 0;
  bool converged = false;
};

// Sequential best-response iteration in fixed index order. Converged when the
// largest power change stays below 1e-6 W and no rate changes for two
// consecutive sweeps.
LinkNeResult solve_link_ne(const GainMatrix& gains, const LinkGameConfig& cfg,
                           const PdrModel& model, ActionProfile start = {},
                           int max_sweeps = 500);

// Sum of true (non-Taylor) utilities at live gains.
double link_welfare(const ActionProfile& profile, const GainMatrix& gains,
                    const LinkGameConfig& cfg, const PdrModel& model);

} // namespace wban
