#include "wban/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wban {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kMobilityStep = 1e-3; // wearer state update period [s]
} // namespace

double gamma_lower_regularized(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    // Series expansion around 0.
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
      term *= x / (a + k);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // Continued fraction for the upper tail (modified Lentz).
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double f = d;
  for (int k = 1; k < 500; ++k) {
    double an = -static_cast<double>(k) * (k - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  double q = f * std::exp(-x + a * std::log(x) - std::lgamma(a));
  return 1.0 - q;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// Rational approximation to the standard normal quantile followed by one
// Halley refinement against erfc, giving near machine precision.
double normal_quantile(double u) {
  if (u <= 0.0) return -38.0;
  if (u >= 1.0) return 38.0;
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double z;
  if (u < plow) {
    double q = std::sqrt(-2.0 * std::log(u));
    z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    double q = u - 0.5;
    double r = q * q;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - u));
    z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  double e = normal_cdf(z) - u;
  double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
  if (pdf > 0.0) {
    double w = e / pdf;
    z -= w / (1.0 + z * w / 2.0);
  }
  return z;
}

} // namespace

double gamma_quantile(double shape, double scale, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) u = 1.0 - 1e-16;
  // Wilson-Hilferty start, then safeguarded Newton on P(shape, x) - u.
  double z = normal_quantile(u);
  double t = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * std::sqrt(shape));
  double x = shape * t * t * t;
  if (x <= 0.0) x = shape * std::exp(z / std::sqrt(shape)) * 1e-2 + 1e-12;
  double lo = 0.0, hi = -1.0; // hi < 0 means "no upper bracket yet"
  for (int it = 0; it < 64; ++it) {
    double f = gamma_lower_regularized(shape, x) - u;
    if (f > 0.0) {
      hi = (hi < 0.0) ? x : std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    double logpdf = (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
    double pdf = std::exp(logpdf);
    double step = (pdf > 1e-300) ? f / pdf : 0.0;
    double next = x - step;
    bool inside = hi < 0.0 ? next > lo : (next > lo && next < hi);
    if (!inside || step == 0.0)
      next = hi < 0.0 ? (lo > 0.0 ? lo * 2.0 + 1e-12 : x * 2.0)
                      : 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * (1.0 + x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x * scale;
}

void step_mobility(MobilityState& st, double dt, std::mt19937_64& rng,
                   const ChannelParams& cp) {
  std::normal_distribution<double> speed_draw(cp.speed_mps, cp.speed_std);
  std::uniform_real_distribution<double> angle_draw(-kPi, kPi);
  st.time_since_turn += dt;
  bool turn = st.time_since_turn >= cp.turn_every_s;
  if (turn) st.time_since_turn = 0.0;
  for (std::size_t i = 0; i < st.x.size(); ++i) {
    double s = speed_draw(rng);
    while (s <= 0.0) s = speed_draw(rng);
    st.speed[i] = s;
    if (turn) st.heading[i] = angle_draw(rng);
    double nx = st.x[i] + s * std::cos(st.heading[i]) * dt;
    double ny = st.y[i] + s * std::sin(st.heading[i]) * dt;
    // Reflective walls; a step is far shorter than the area so one bounce per
    // axis suffices, but loop for safety.
    for (int guard = 0; guard < 8; ++guard) {
      bool bounced = false;
      if (nx < 0.0) {
        nx = -nx;
        st.heading[i] = kPi - st.heading[i];
        bounced = true;
      } else if (nx > cp.area_m) {
        nx = 2.0 * cp.area_m - nx;
        st.heading[i] = kPi - st.heading[i];
        bounced = true;
      }
      if (ny < 0.0) {
        ny = -ny;
        st.heading[i] = -st.heading[i];
        bounced = true;
      } else if (ny > cp.area_m) {
        ny = 2.0 * cp.area_m - ny;
        st.heading[i] = -st.heading[i];
        bounced = true;
      }
      if (!bounced) break;
    }
    st.x[i] = nx;
    st.y[i] = ny;
  }
}

JakesFader::JakesFader(std::mt19937_64& rng, double doppler_hz,
                       int oscillators) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  double theta = u(rng);
  double wd = 2.0 * kPi * doppler_hz;
  cos_freq_.resize(oscillators);
  sin_freq_.resize(oscillators);
  phase_i_.resize(oscillators);
  phase_q_.resize(oscillators);
  for (int m = 0; m < oscillators; ++m) {
    // Arrival angles spread over one quadrant with a random rotation; the
    // quadrature projections then cover the full Doppler spectrum.
    double alpha =
        (2.0 * kPi * (m + 1) - kPi + theta) / (4.0 * oscillators);
    cos_freq_[m] = wd * std::cos(alpha);
    sin_freq_[m] = wd * std::sin(alpha);
    phase_i_[m] = u(rng);
    phase_q_[m] = u(rng);
  }
  norm_ = std::sqrt(2.0 / oscillators);
}

double JakesFader::in_phase(double t) const {
  double s = 0.0;
  for (std::size_t m = 0; m < cos_freq_.size(); ++m)
    s += std::cos(cos_freq_[m] * t + phase_i_[m]);
  return norm_ * s;
}

double JakesFader::power_gain(double t) const {
  double si = 0.0, sq = 0.0;
  for (std::size_t m = 0; m < cos_freq_.size(); ++m) {
    si += std::cos(cos_freq_[m] * t + phase_i_[m]);
    sq += std::cos(sin_freq_[m] * t + phase_q_[m]);
  }
  si *= norm_;
  sq *= norm_;
  return 0.5 * (si * si + sq * sq); // E[si^2 + sq^2] = 2
}

SyntheticChannel::SyntheticChannel(int n, std::uint64_t seed,
                                   const ChannelParams& cp)
    : n_(n), params_(cp), mobility_rng_(make_rng(seed, Stream::mobility)) {
  std::uniform_real_distribution<double> pos(0.0, cp.area_m);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::normal_distribution<double> speed_draw(cp.speed_mps, cp.speed_std);
  mobility_.x.resize(n);
  mobility_.y.resize(n);
  mobility_.heading.resize(n);
  mobility_.speed.resize(n);
  for (int i = 0; i < n; ++i) {
    mobility_.x[i] = pos(mobility_rng_);
    mobility_.y[i] = pos(mobility_rng_);
    mobility_.heading[i] = ang(mobility_rng_);
    double s = speed_draw(mobility_rng_);
    while (s <= 0.0) s = speed_draw(mobility_rng_);
    mobility_.speed[i] = s;
  }
  pair_fader_.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
  {
    std::mt19937_64 fade_rng = make_rng(seed, Stream::interlink_fading);
    for (auto& f : pair_fader_)
      f = JakesFader(fade_rng, cp.doppler_hz, cp.oscillators);
  }
  onbody_z_.resize(n);
  onbody_gain_.resize(n);
  onbody_rng_.reserve(n);
  for (int i = 0; i < n; ++i) {
    onbody_rng_.push_back(
        make_rng(seed, Stream::onbody_fading, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> z01(0.0, 1.0);
    onbody_z_[i] = z01(onbody_rng_[i]);
    refresh_onbody(i);
  }
}

int SyntheticChannel::pair_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  // Index into the upper triangle laid out row by row.
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

void SyntheticChannel::advance_to(double t) {
  while (mobility_time_ + kMobilityStep <= t) {
    step_mobility(mobility_, kMobilityStep, mobility_rng_, params_);
    mobility_time_ += kMobilityStep;
  }
}

double SyntheticChannel::pair_fade(int i, int j, double t) const {
  return pair_fader_[pair_index(i, j)].power_gain(t);
}

double SyntheticChannel::inter_gain(int i, int j, double t) const {
  double dx = mobility_.x[i] - mobility_.x[j];
  double dy = mobility_.y[i] - mobility_.y[j];
  double d = std::sqrt(dx * dx + dy * dy);
  if (d < 0.01) {
    d = 0.01;
    ++clamp_count_;
  }
  double mean_gain = db_to_linear(params_.ref_atten_db + params_.shadow_db) *
                     std::pow(params_.ref_distance_m / d,
                              params_.path_loss_exp / 2.0);
  return mean_gain * pair_fade(i, j, t);
}

void SyntheticChannel::refresh_onbody(int i) {
  double u = normal_cdf(onbody_z_[i]);
  double g = gamma_quantile(params_.onbody_shape, params_.onbody_scale, u);
  double mean = params_.onbody_shape * params_.onbody_scale;
  onbody_gain_[i] = db_to_linear(params_.onbody_atten_db) * g / mean;
}

double SyntheticChannel::onbody_gain(int i) const { return onbody_gain_[i]; }

void SyntheticChannel::advance_onbody(int i, double dt) {
  double rho = std::exp(-dt / params_.onbody_coherence_s);
  std::normal_distribution<double> z01(0.0, 1.0);
  onbody_z_[i] =
      rho * onbody_z_[i] + std::sqrt(1.0 - rho * rho) * z01(onbody_rng_[i]);
  refresh_onbody(i);
}

GainMatrix SyntheticChannel::snapshot(double t) {
  advance_to(t);
  GainMatrix g(n_, params_.noise_w);
  for (int i = 0; i < n_; ++i) {
    g.at(i, i) = onbody_gain_[i];
    for (int j = 0; j < n_; ++j)
      if (j != i) g.at(i, j) = inter_gain(i, j, t);
  }
  return g;
}

std::vector<GainMatrix> load_trace(const std::string& path, double noise_w) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open trace file: " + path);
  // sf -> (i, j) -> attenuation
  std::map<long long, std::map<std::pair<int, int>, double>> rows;
  int max_id = 0;
  std::string line;
  long long line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    // Allow one header line.
    if (line_no == 1 && line.find_first_not_of("0123456789,.+-eE \t\r") !=
                            std::string::npos)
      continue;
    std::istringstream ss(line);
    long long sf;
    int i, j;
    double atten;
    char c1, c2, c3;
    if (!(ss >> sf >> c1 >> i >> c2 >> j >> c3 >> atten) || c1 != ',' ||
        c2 != ',' || c3 != ',')
      throw std::runtime_error("trace parse error at line " +
                               std::to_string(line_no) + ": " + line);
    if (i < 1 || j < 1)
      throw std::runtime_error("trace ids must be 1-based at line " +
                               std::to_string(line_no));
    double gain = db_to_linear(atten);
    if (!(gain > 0.0))
      throw std::runtime_error("non-positive gain at line " +
                               std::to_string(line_no));
    rows[sf][{i - 1, j - 1}] = gain;
    max_id = std::max({max_id, i, j});
  }
  std::vector<GainMatrix> out;
  for (const auto& [sf, cells] : rows) {
    GainMatrix g(max_id, noise_w);
    g.timestamp = sf;
    if (cells.size() != static_cast<std::size_t>(max_id) * max_id)
      throw std::runtime_error("incomplete gain matrix for superframe " +
                               std::to_string(sf));
    for (const auto& [ij, gain] : cells) g.at(ij.first, ij.second) = gain;
    out.push_back(std::move(g));
  }
  return out;
}

} // namespace wban
