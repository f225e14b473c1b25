#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "wban/mac.hpp"
#include "wban/markov.hpp"

using namespace wban;

namespace {

double rel_err(double got, double want) {
  return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
}

} // namespace

TEST_CASE("chain state probabilities are exact when failures never happen") {
  for (MacParams mac : {validation_mac(), default_mac()}) {
    CHECK(stationary_b00(0.0, mac) == 1.0);
    CHECK(tx_probability(0.0, mac) == 1.0);
    CHECK(mean_delay(0.0, mac) == 0.0);
    CHECK(drop_probability(0.0, tx_probability(0.0, mac), mac) == 0.0);
  }
}

TEST_CASE("closed forms match the stage summation across the audit grid") {
  MacParams mac = validation_mac();
  double worst_b = 0.0, worst_t = 0.0;
  for (int cw : {16, 64, 256})
    for (int m : {2, 4}) {
      mac.cw_min = cw;
      mac.max_backoff_stage = m;
      for (int pi = 0; pi <= 99; ++pi) {
        if (pi == 50) continue; // removable point, closed form delegates
        double p = pi / 100.0;
        worst_b = std::max(worst_b,
                           rel_err(b00_closed(p, mac), stationary_b00(p, mac)));
        worst_t = std::max(worst_t,
                           rel_err(tau_closed(p, mac), tx_probability(p, mac)));
      }
    }
  CHECK(worst_b < 1e-12);
  CHECK(worst_t < 1e-12);
}

TEST_CASE("closed forms delegate cleanly at the removable points") {
  MacParams mac = validation_mac();
  for (double p : {0.5, 1.0}) {
    CHECK(rel_err(b00_closed(p, mac), stationary_b00(p, mac)) < 1e-12);
    CHECK(rel_err(tau_closed(p, mac), tx_probability(p, mac)) < 1e-12);
  }
  // Near-singular neighborhood must stay smooth, not blow up.
  for (double p : {0.5 - 1e-10, 0.5 + 1e-10}) {
    CHECK(rel_err(b00_closed(p, mac), stationary_b00(p, mac)) < 1e-9);
  }
}

TEST_CASE("geometric variants drift far from the summation at high p") {
  // The compact geometric forms drop the stage-m truncation correction and
  // are kept only so the audit CSV can report how far off they run. The tau
  // variant additionally carries a 2-(2p)^m factor that blows up at high p.
  double worst_b00 = 0.0, worst_tau = 0.0;
  for (int cw : {16, 64, 256})
    for (int m : {2, 4}) {
      MacParams mac = validation_mac();
      mac.cw_min = cw;
      mac.max_backoff_stage = m;
      for (int pi = 51; pi <= 99; ++pi) {
        double p = pi / 100.0;
        worst_b00 = std::max(
            worst_b00, rel_err(b00_geometric(p, mac), stationary_b00(p, mac)));
        worst_tau = std::max(
            worst_tau, rel_err(tau_geometric(p, mac), tx_probability(p, mac)));
      }
    }
  CHECK(worst_b00 > 1e-3); // visible in the audit columns
  CHECK(worst_tau > 1.0);  // orders of magnitude, not a rounding artifact
}

TEST_CASE("validation-parameter fixed points match frozen values") {
  const MacParams mac = validation_mac();
  struct Ref {
    int n;
    double p, tau, s;
  };
  const Ref refs[] = {
      {2, 0.625129794805, 0.010317051798, 0.117171267},
      {4, 0.891104362160, 0.006021219278, 0.028447182},
      {6, 0.968514493445, 0.005386126236, 0.007859548},
      {8, 0.991382474148, 0.005227478497, 0.002123985},
      {10, 0.997716527120, 0.005185543895, 0.000560870},
  };
  for (const Ref& r : refs) {
    MarkovFixedPoint fp = solve_fixed_point(r.n, 0.0, mac);
    CHECK(fp.converged);
    CHECK(rel_err(fp.p, r.p) < 1e-9);
    CHECK(rel_err(fp.tau, r.tau) < 1e-9);
    // The reference airtime fractions are printed with nine decimals, so the
    // comparison is absolute at that resolution.
    CHECK(std::abs(goodput(fp.p, fp.tau, mac) - r.s) < 5e-10);
  }
}

TEST_CASE("default-parameter fixed points match frozen values") {
  const MacParams mac = default_mac();
  struct Ref {
    int n;
    double p;
  };
  const Ref refs[] = {
      {2, 0.694584920}, {5, 0.954267665}, {8, 0.994159600},
      {10, 0.998609590}, {15, 0.999963443},
  };
  for (const Ref& r : refs) {
    MarkovFixedPoint fp = solve_fixed_point(r.n, 0.0, mac);
    CHECK(fp.converged);
    CHECK(rel_err(fp.p, r.p) < 1e-8);
  }
}

TEST_CASE("fixed point is independent of the starting point") {
  const MacParams mac = validation_mac();
  for (int n : {2, 6, 10}) {
    MarkovFixedPoint a = solve_fixed_point(n, 0.0, mac, -1.0, 0.01);
    MarkovFixedPoint b = solve_fixed_point(n, 0.0, mac, -1.0, 0.5);
    MarkovFixedPoint c = solve_fixed_point(n, 0.0, mac, -1.0, 0.99);
    CHECK(std::abs(a.p - b.p) < 1e-8);
    CHECK(std::abs(b.p - c.p) < 1e-8);
    CHECK(a.residual < 1e-10);
    CHECK(std::abs(a.tau - tx_probability(a.p, mac)) < 1e-10);
  }
}

TEST_CASE("fixed point honors the delivery-on-collision parameter") {
  const MacParams mac = validation_mac();
  // Everything delivered despite overlaps: no failures at all.
  MarkovFixedPoint fp = solve_fixed_point(6, 1.0, mac);
  CHECK(fp.p == 0.0);
  CHECK(fp.tau == 1.0);
  // Partial capture must sit strictly between the extremes.
  MarkovFixedPoint half = solve_fixed_point(6, 0.5, mac);
  MarkovFixedPoint none = solve_fixed_point(6, 0.0, mac);
  CHECK(half.p > 0.0);
  CHECK(half.p < none.p);
}

TEST_CASE("single network never fails") {
  MarkovFixedPoint fp = solve_fixed_point(1, 0.0, validation_mac());
  CHECK(fp.p == 0.0);
  CHECK(fp.tau == 1.0);
}

TEST_CASE("epoch mean interpolates between slot and superframe") {
  MacParams mac = validation_mac();
  CHECK(epoch_mean(1.0, mac) == doctest::Approx(mac.t_superframe));
  CHECK(epoch_mean(0.0, mac) == doctest::Approx(mac.t_slot));
}

TEST_CASE("delay grows with the failure probability and drop matches form") {
  MacParams mac = validation_mac();
  double prev = 0.0;
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double d = mean_delay(p, mac);
    CHECK(d > prev);
    prev = d;
    double tau = tx_probability(p, mac);
    CHECK(drop_probability(p, tau, mac) ==
          doctest::Approx(tau * std::pow(p, mac.max_backoff_stage + 1)));
  }
}

TEST_CASE("window approximation tracks the chain only at low p") {
  MacParams mac = default_mac();
  for (double p : {0.02, 0.05, 0.1}) {
    double approx = tau_of_cw(p, mac.cw_min);
    double chain = tx_probability(p, mac);
    CHECK(rel_err(approx, chain) < 0.15);
  }
  // The coarse form degrades fast beyond that; this bound is the documented
  // reason the contention game works from estimated p rather than the chain.
  double err02 = rel_err(tau_of_cw(0.2, mac.cw_min), tx_probability(0.2, mac));
  CHECK(err02 > 0.15);
  CHECK(err02 < 0.5);
}

TEST_CASE("failure probability clamps and saturates sanely") {
  MacParams mac = validation_mac();
  CHECK(failure_probability(0.5, 1, 0.0, mac) == 0.0); // no other networks
  CHECK(failure_probability(1.0, 8, 0.0, mac) <= 1.0);
  CHECK(failure_probability(1.0, 8, 0.0, mac) >= 0.0);
  CHECK(failure_probability(0.3, 4, 1.0, mac) == 0.0); // perfect capture
}
