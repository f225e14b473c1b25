// Saturated per-WBAN backoff chain analytics: stationary transmit
// probability, coupled failure-probability fixed point across N co-located
// networks, and the derived goodput / delay / drop measures.
#pragma once

#include "wban/mac.hpp"

namespace wban {

// Stationary probability of the chain's (0,0) state from direct term-by-term
// summation over backoff stages. Total for all p in [0,1]; this is the
// authoritative form the rest of the library uses.
double stationary_b00(double p, const MacParams& mac);

// Per-state transmit probability tau = b00 * sum_{k=0..m} p^k (summation).
double tx_probability(double p, const MacParams& mac);

// Closed-form equivalents of the two functions above. Algebraically equal to
// the summations away from the removable points p = 1/2 and p = 1 (where they
// delegate to the summation).
double b00_closed(double p, const MacParams& mac);
double tau_closed(double p, const MacParams& mac);

// Compact geometric-series variants that drop the stage-m truncation
// correction. Kept only for the closed-form audit (validate-markov reports
// how far they drift from the summation); do not use for analysis.
double b00_geometric(double p, const MacParams& mac);
double tau_geometric(double p, const MacParams& mac);

// Mean duration of one chain state: transmissions cost a full superframe,
// backoff states one slot.
double epoch_mean(double tau, const MacParams& mac);

// Overlap normalization: probability scale for a foreign payload window
// intersecting ours, 2*T_payload / E[epoch duration].
double overlap_coefficient(double tau, const MacParams& mac);

// Per-attempt failure probability among n saturated networks:
// (1 - pdr_collision) * (1 - (1 - eta*tau)^(n-1)), eta*tau clamped to [0,1].
// pdr_collision is the delivery probability given a collision (0 = every
// overlap is fatal). eta_override > 0 replaces the self-consistent overlap
// coefficient with a fixed value.
double failure_probability(double tau, int n, double pdr_collision,
                           const MacParams& mac, double eta_override = -1.0);

struct MarkovFixedPoint {
  double p = 0.0;        // per-attempt failure probability
  double tau = 0.0;      // per-state transmit probability
  double eta = 0.0;      // overlap coefficient at the fixed point
  double residual = 0.0; // |failure_probability(tau(p)) - p| at the result
  int iterations = 0;
  bool converged = false;
};

// Solve p = failure_probability(tx_probability(p)) by damped iteration (factor
// 0.5, tolerance 1e-14) started from the transmit probability tau0, falling
// back to bisection on [0, 1] if the iteration stalls. The solution is unique,
// so the starting point only affects the iteration count. Throws
// std::runtime_error carrying the last iterate and residual if neither phase
// converges.
MarkovFixedPoint solve_fixed_point(int n, double pdr_collision,
                                   const MacParams& mac,
                                   double eta_override = -1.0,
                                   double tau0 = 0.5);

// Delivered-payload airtime fraction (1-p) tau T_payload / E[epoch].
double goodput(double p, double tau, const MacParams& mac);

// Mean retry delay per fragment: fragments delivered on the first attempt
// contribute zero; a fragment whose first success is at stage i contributes
// the full service time of stages 0..i; stage-m reachers contribute the full
// stage-m service time whether delivered or dropped.
double mean_delay(double p, const MacParams& mac);

// Probability an arbitrary chain state starts a transmission that exhausts
// the retry budget: tau * p^(m+1).
double drop_probability(double p, double tau, const MacParams& mac);

// Coarse transmit-probability approximation 1/(p*cw + 1) used by the
// contention-window game. Within 15% of the chain value only for p <= 0.1.
double tau_of_cw(double p, double cw);

} // namespace wban
