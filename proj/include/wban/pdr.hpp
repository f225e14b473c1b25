// PHY abstraction: the five selectable rates and the fitted
// PDR(sinr) = exp(alpha * sinr^beta) delivery curves, one (alpha, beta) pair
// per rate. Higher rates need proportionally more SINR for the same PDR.
#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace wban {

inline constexpr int kNumRates = 5;

inline constexpr std::array<double, kNumRates> kRateBps = {
    25600.0, 51200.0, 76800.0, 102400.0, 128000.0};

inline constexpr std::array<double, kNumRates> kPdrAlpha = {
    -100.02, -214.95, -663.69, -1182.7, -1433.5};

inline constexpr std::array<double, kNumRates> kPdrBeta = {
    -3.66, -2.82, -2.79, -2.73, -2.58};

// Selectable rate set with its delivery-curve coefficients. Defaults to the
// built-in table above; alternative fits can be loaded from a CSV file.
struct PdrModel {
  std::vector<double> rates{kRateBps.begin(), kRateBps.end()};
  std::vector<double> alpha{kPdrAlpha.begin(), kPdrAlpha.end()};
  std::vector<double> beta{kPdrBeta.begin(), kPdrBeta.end()};

  int num_rates() const { return static_cast<int>(rates.size()); }
};

// Exponent term T = alpha * gamma^beta; pdr = exp(T). Exposed because the
// utility derivatives are written in terms of T and its gamma-derivatives.
inline double pdr_exponent(double gamma, int r, const PdrModel& m) {
  return m.alpha[r] * std::pow(gamma, m.beta[r]);
}

// Delivery probability at linear SINR gamma for rate index r.
inline double pdr(double gamma, int r, const PdrModel& m) {
  if (gamma <= 0.0) return 0.0;
  return std::exp(pdr_exponent(gamma, r, m));
}

// Convenience overloads against the built-in table.
inline double pdr_exponent(double gamma, int r) {
  return kPdrAlpha[r] * std::pow(gamma, kPdrBeta[r]);
}
inline double pdr(double gamma, int r) {
  if (gamma <= 0.0) return 0.0;
  return std::exp(pdr_exponent(gamma, r));
}

// Load a rate table from CSV rows "rate_bps,alpha,beta" (blank lines and
// lines starting with '#' skipped). Throws with the offending line number on
// malformed input.
PdrModel load_pdr_model(const std::string& path);

} // namespace wban
