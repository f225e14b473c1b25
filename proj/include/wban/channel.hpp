// Channel-gain provision: measured-trace ingestion and the synthetic
// statistical model (path loss, fixed shadowing, Jakes small-scale fading on
// inter-network links, temporally correlated Gamma fading on the on-body
// link) with random mobility inside a square area.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wban/rng.hpp"

namespace wban {

inline double db_to_linear(double atten_db) {
  return std::pow(10.0, -atten_db / 10.0);
}
inline double linear_to_db(double gain) { return -10.0 * std::log10(gain); }

// Linear power gains between N networks at one superframe; h(i, j) is the
// gain from network j's transmitter to network i's hub, h(i, i) the on-body
// gain of network i.
struct GainMatrix {
  int n = 0;
  std::vector<double> h; // row-major n*n
  double noise_w = 3.16e-12;
  long long timestamp = 0; // superframe index

  GainMatrix() = default;
  explicit GainMatrix(int n_, double noise = 3.16e-12)
      : n(n_), h(static_cast<std::size_t>(n_) * n_, 0.0), noise_w(noise) {}
  double& at(int i, int j) { return h[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const {
    return h[static_cast<std::size_t>(i) * n + j];
  }
};

// Regularized lower incomplete gamma P(a, x) and the Gamma(shape, scale)
// quantile used to map the latent Gaussian onto the on-body fading marginal.
double gamma_lower_regularized(double a, double x);
double gamma_quantile(double shape, double scale, double u);

// Standard normal CDF.
double normal_cdf(double z);

struct ChannelParams {
  double noise_w = 3.16e-12;       // receiver noise power [W]
  double area_m = 6.0;             // square side [m]
  double speed_mps = 0.5;          // mean walking speed [m/s]
  double speed_std = 0.1;          // speed standard deviation [m/s]
  double turn_every_s = 1.0;       // heading redraw period [s]
  double path_loss_exp = 2.5;      // distance exponent (amplitude uses /2)
  double ref_distance_m = 5.0;     // reference distance [m]
  double ref_atten_db = 50.0;      // attenuation at the reference distance
  double shadow_db = 42.0;         // fixed shadowing attenuation
  double doppler_hz = 1.1;         // Doppler spread of the small-scale fading
  int oscillators = 16;            // Jakes sum-of-sinusoids count
  double onbody_atten_db = 65.0;   // mean on-body attenuation
  double onbody_shape = 1.31;      // on-body Gamma shape
  double onbody_scale = 0.562;     // on-body Gamma scale
  double onbody_coherence_s = 2.0; // on-body fading coherence time
};

// Wearer positions/headings/speeds inside the square area.
struct MobilityState {
  std::vector<double> x, y;       // [m]
  std::vector<double> heading;    // [rad]
  std::vector<double> speed;      // [m/s]
  double time_since_turn = 0.0;   // [s]
};

// Advance every wearer by dt along its heading with reflective walls; speeds
// are redrawn Normal(speed_mps, speed_std) truncated positive at every call
// (callers step in 1 ms increments), headings uniformly at turn epochs.
void step_mobility(MobilityState& st, double dt, std::mt19937_64& rng,
                   const ChannelParams& cp);

// One Jakes sum-of-sinusoids fading process: a deterministic function of time
// once its per-instance phases are drawn, so it can be evaluated at arbitrary
// instants without advancing state. complex_gain has unit mean square.
class JakesFader {
public:
  JakesFader() = default;
  JakesFader(std::mt19937_64& rng, double doppler_hz, int oscillators);
  // In-phase component (unit variance) and unit-mean power gain at time t.
  double in_phase(double t) const;
  double power_gain(double t) const;

private:
  std::vector<double> cos_freq_, sin_freq_; // rad/s
  std::vector<double> phase_i_, phase_q_;
  double norm_ = 1.0;
};

// Synthetic channel per the statistical model: owns mobility, one Jakes
// process per unordered network pair, and one correlated-Gamma process per
// network's on-body link.
class SyntheticChannel {
public:
  SyntheticChannel(int n, std::uint64_t seed, const ChannelParams& cp);

  // Advance mobility in 1 ms steps up to absolute time t (seconds).
  void advance_to(double t);

  // Inter-network gain i<-j at absolute time t (uses current positions).
  double inter_gain(int i, int j, double t) const;

  // Current on-body gain of network i; advance_onbody moves its correlated
  // fading state forward by dt (call once per superframe of network i).
  double onbody_gain(int i) const;
  void advance_onbody(int i, double dt);

  // Full matrix snapshot at time t (advances mobility there first).
  GainMatrix snapshot(double t);

  double noise_w() const { return params_.noise_w; }
  int size() const { return n_; }
  long long clamped_distance_count() const { return clamp_count_; }

private:
  double pair_fade(int i, int j, double t) const;

  int n_ = 0;
  ChannelParams params_;
  MobilityState mobility_;
  std::vector<JakesFader> pair_fader_; // indexed by pair_index(i, j)
  std::vector<double> onbody_z_;       // latent AR(1) Gaussians
  std::vector<double> onbody_gain_;    // current linear gains
  std::mt19937_64 mobility_rng_;
  std::vector<std::mt19937_64> onbody_rng_; // one per network
  double mobility_time_ = 0.0;
  mutable long long clamp_count_ = 0;

  int pair_index(int i, int j) const;
  void refresh_onbody(int i);
};

// Measured-trace ingestion: CSV rows "superframe,i,j,attenuation_db" (1-based
// network ids), one complete matrix per superframe index.
std::vector<GainMatrix> load_trace(const std::string& path, double noise_w);

} // namespace wban
