#include "wban/markov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wban {

double stationary_b00(double p, const MacParams& mac) {
  // 1/b00 = 1 + sum_{k=1..m} p^k (W_k + 3)/2. The sum never divides by
  // 1-2p, so there is no removable singularity to special-case.
  double inv = 1.0;
  double pk = 1.0;
  for (int k = 1; k <= mac.max_backoff_stage; ++k) {
    pk *= p;
    inv += pk * (mac.stage_window(k) + 3.0) / 2.0;
  }
  return 1.0 / inv;
}

double tx_probability(double p, const MacParams& mac) {
  double s = 0.0, pk = 1.0;
  for (int k = 0; k <= mac.max_backoff_stage; ++k) {
    s += pk;
    pk *= p;
  }
  return stationary_b00(p, mac) * s;
}

double b00_closed(double p, const MacParams& mac) {
  if (std::abs(1.0 - 2.0 * p) < 1e-9 || std::abs(1.0 - p) < 1e-9)
    return stationary_b00(p, mac);
  if (p == 0.0) return 1.0;
  const double cw = mac.cw_min;
  const double m = mac.max_backoff_stage;
  // Geometric form of the stage sum plus the p^m truncation term the compact
  // variant below leaves out.
  double inv_geometric =
      (2.0 * cw * p * (1.0 - std::pow(2.0 * p, m)) * (1.0 - p) +
       (2.0 + p) * (1.0 - std::pow(p, m)) * (1.0 - 2.0 * p)) /
      (2.0 * (1.0 - p) * (1.0 - 2.0 * p));
  return 1.0 / (inv_geometric + std::pow(p, m));
}

double tau_closed(double p, const MacParams& mac) {
  if (std::abs(1.0 - 2.0 * p) < 1e-9 || std::abs(1.0 - p) < 1e-9)
    return tx_probability(p, mac);
  double geom = (1.0 - std::pow(p, mac.max_backoff_stage + 1)) / (1.0 - p);
  return b00_closed(p, mac) * geom;
}

double b00_geometric(double p, const MacParams& mac) {
  if (std::abs(1.0 - 2.0 * p) < 1e-9 || std::abs(1.0 - p) < 1e-9)
    return stationary_b00(p, mac);
  const double cw = mac.cw_min;
  const double m = mac.max_backoff_stage;
  return 2.0 * (1.0 - p) * (1.0 - 2.0 * p) /
         (2.0 * cw * p * (1.0 - std::pow(2.0 * p, m)) * (1.0 - p) +
          (2.0 + p) * (1.0 - std::pow(p, m)) * (1.0 - 2.0 * p));
}

double tau_geometric(double p, const MacParams& mac) {
  if (std::abs(1.0 - 2.0 * p) < 1e-9 || std::abs(1.0 - p) < 1e-9)
    return tx_probability(p, mac);
  const double cw = mac.cw_min;
  const double m = mac.max_backoff_stage;
  return 2.0 * (1.0 - 2.0 * p) * (1.0 - std::pow(p, m + 1)) /
         (2.0 * cw * p * (2.0 - std::pow(2.0 * p, m)) * (1.0 - p) +
          (1.0 - 2.0 * p) * (2.0 + p) * (1.0 - std::pow(p, m)));
}

double epoch_mean(double tau, const MacParams& mac) {
  return tau * mac.t_superframe + (1.0 - tau) * mac.t_slot;
}

double overlap_coefficient(double tau, const MacParams& mac) {
  return 2.0 * mac.t_payload / epoch_mean(tau, mac);
}

double failure_probability(double tau, int n, double pdr_collision,
                           const MacParams& mac, double eta_override) {
  double eta =
      eta_override > 0.0 ? eta_override : overlap_coefficient(tau, mac);
  double x = std::clamp(eta * tau, 0.0, 1.0);
  return (1.0 - pdr_collision) * (1.0 - std::pow(1.0 - x, n - 1));
}

MarkovFixedPoint solve_fixed_point(int n, double pdr_collision,
                                   const MacParams& mac, double eta_override,
                                   double tau0) {
  auto map_p = [&](double p) {
    return failure_probability(tx_probability(p, mac), n, pdr_collision, mac,
                               eta_override);
  };
  MarkovFixedPoint fp;
  // Enter the p-iteration through the failure probability the starting
  // transmit probability would see.
  double p = failure_probability(std::clamp(tau0, 0.0, 1.0), n, pdr_collision,
                                 mac, eta_override);
  const int max_iter = 20000;
  for (int it = 0; it < max_iter; ++it) {
    double next = 0.5 * p + 0.5 * map_p(p);
    fp.iterations = it + 1;
    if (std::abs(next - p) < 1e-14) {
      p = next;
      fp.converged = true;
      break;
    }
    p = next;
  }
  if (!fp.converged) {
    // The map is continuous with map_p(0) >= 0 and map_p(1) <= 1, so the
    // residual changes sign over [0, 1] and bisection always brackets.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (map_p(mid) - mid >= 0.0)
        lo = mid;
      else
        hi = mid;
      ++fp.iterations;
    }
    p = 0.5 * (lo + hi);
    fp.converged = std::abs(map_p(p) - p) < 1e-10;
  }
  fp.p = p;
  fp.tau = tx_probability(p, mac);
  fp.eta = eta_override > 0.0 ? eta_override : overlap_coefficient(fp.tau, mac);
  fp.residual = std::abs(map_p(p) - p);
  if (!fp.converged)
    throw std::runtime_error(
        "failure-probability fixed point did not converge: last iterate p=" +
        std::to_string(fp.p) + " residual=" + std::to_string(fp.residual));
  return fp;
}

double goodput(double p, double tau, const MacParams& mac) {
  return (1.0 - p) * tau * mac.t_payload / epoch_mean(tau, mac);
}

double mean_delay(double p, const MacParams& mac) {
  auto stage_cost = [&](int upto) {
    double c = 0.0;
    for (int j = 0; j <= upto; ++j)
      c += (mac.stage_window(j) + 1.0) / 2.0 * mac.t_slot + mac.t_superframe;
    return c;
  };
  const int m = mac.max_backoff_stage;
  double d = 0.0;
  for (int i = 1; i <= m - 1; ++i)
    d += std::pow(p, i) * (1.0 - p) * stage_cost(i);
  d += std::pow(p, m) * stage_cost(m);
  return d;
}

double drop_probability(double p, double tau, const MacParams& mac) {
  return tau * std::pow(p, mac.max_backoff_stage + 1);
}

double tau_of_cw(double p, double cw) { return 1.0 / (p * cw + 1.0); }

} // namespace wban
