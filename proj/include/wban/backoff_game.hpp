// Adaptive contention-window game: each network picks the minimum contention
// window that maximizes a weighted goodput / delay / drop utility built on the
// coarse tau = 1/(p*CW + 1) approximation, with the failure probability
// estimated on-line from transmission counters. Also provides the coupled
// multi-network fixed point used to score whole CW profiles.
#pragma once

#include <deque>
#include <vector>

#include "wban/mac.hpp"

namespace wban {

struct BackoffGameConfig {
  double weight_d = 1e-3;      // goodput reward weight
  double weight_l = 1.4238e-3; // delay penalty weight [1/s]
  int cw_lo = 8;               // inclusive integer search range for CW_min
  int cw_hi = 1024;
};

enum class ContentionEvent { tx_success, tx_fail, slot_tick };

// Sliding-window counters behind the on-line estimates: one bucket per
// observed chain state (slot_tick), transmission outcomes attributed to the
// current bucket. tau_est = transmitted / slots, p_est = failures /
// transmitted; p_est falls back to a configurable prior before the first
// transmission is observed.
class ContentionEstimate {
public:
  explicit ContentionEstimate(int window_len = 100000, double p_prior = 0.0)
      : window_len_(window_len), p_prior_(p_prior) {}

  void update(ContentionEvent ev);

  double tau_est() const {
    if (slots_ <= 0) return 0.0;
    double ratio = static_cast<double>(transmitted_) / slots_;
    // Callers reporting several outcomes against one observed state cannot
    // push the probability estimate past one.
    return ratio < 1.0 ? ratio : 1.0;
  }
  double p_est() const {
    return transmitted_ > 0 ? static_cast<double>(ack_failures_) / transmitted_
                            : p_prior_;
  }
  long long transmitted() const { return transmitted_; }
  long long ack_failures() const { return ack_failures_; }
  long long slots() const { return slots_; }
  int window_len() const { return window_len_; }

private:
  struct Bucket {
    int tx = 0;
    int fail = 0;
  };
  int window_len_;
  double p_prior_;
  std::deque<Bucket> buckets_;
  long long transmitted_ = 0;
  long long ack_failures_ = 0;
  long long slots_ = 0;
};

inline void update_estimates(ContentionEstimate& est, ContentionEvent ev) {
  est.update(ev);
}

// Copy of mac with the contention window replaced.
inline MacParams with_cw(const MacParams& mac, int cw_min) {
  MacParams out = mac;
  out.cw_min = cw_min;
  return out;
}

// Retry-delay curve with the window as a continuous variable (stage windows
// growth^j * cw); equals mean_delay(p, with_cw(mac, cw)) at integer cw.
double contention_delay(double p, double cw, const MacParams& mac);

// V = d * pdr_context * S - l * D - P_Drop at tau = 1/(p_est*CW + 1), where S
// is the delivered-airtime ratio, D the retry delay and P_Drop = tau *
// p_est^(m+1). pdr_context scales the reward by the delivery probability the
// link-layer game settled on (1 = count every non-collided fragment).
double utility_backoff(int cw_min, double p_est, const MacParams& mac,
                       const BackoffGameConfig& cfg, double pdr_context = 1.0);
double utility_backoff(int cw_min, const ContentionEstimate& est,
                       const MacParams& mac, const BackoffGameConfig& cfg,
                       double pdr_context = 1.0);

// Exhaustive argmax of utility_backoff over [cw_lo, cw_hi]; ties break toward
// the smaller window. This is the authoritative best response.
int best_response_cw(double p_est, const MacParams& mac,
                     const BackoffGameConfig& cfg, double pdr_context = 1.0);

// Ternary-search variant exploiting the utility's strict concavity in CW;
// must agree with the exhaustive version wherever concavity holds.
int best_response_cw_ternary(double p_est, const MacParams& mac,
                             const BackoffGameConfig& cfg,
                             double pdr_context = 1.0);

// Per-network (tau, p) fixed point of a CW profile: network i's payload
// window is hit by j when j transmits within t_payload_i + t_payload_j of i's
// start, and a hit is lost with probability 1 - pdr_ctx_i. Damped iteration;
// pass a previous state as warm start when scanning neighboring profiles.
struct CoupledContention {
  std::vector<double> tau, p;
};
CoupledContention
couple_contention(const std::vector<double>& cw,
                  const std::vector<double>& t_payload,
                  const std::vector<double>& pdr_ctx, const MacParams& mac,
                  const CoupledContention* warm = nullptr);

// Sum of per-network utilities at the coupled fixed point. The delivery
// context enters through the coupled p (capture already thins the failures),
// so no extra PDR factor multiplies the reward here.
double backoff_welfare(const std::vector<double>& cw,
                       const std::vector<double>& t_payload,
                       const std::vector<double>& pdr_ctx,
                       const MacParams& mac, const BackoffGameConfig& cfg,
                       const CoupledContention* warm = nullptr);

struct CwNeResult {
  std::vector<int> cw;
  int iterations = 0;
  bool converged = false;
};

// Damped best-response iteration on the coupled model: every network
// best-responds to its own coupled failure probability, windows move half way
// toward the response, convergence when no response is further than half a
// slot from the current window.
CwNeResult solve_cw_ne(const std::vector<double>& t_payload,
                       const std::vector<double>& pdr_ctx,
                       const MacParams& mac, const BackoffGameConfig& cfg,
                       std::vector<double> start = {}, int max_iter = 400);

} // namespace wban
