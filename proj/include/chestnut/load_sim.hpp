#pragma once

// Per-server resource utilization over timestamps. A server's state at
// timestamp t is the triple rho = (computing, storage, bandwidth) in
// [rho_min, rho_max], plus a ring of the most recent <= k start-of-
// timestamp triples feeding the volatility windows (queueing service
// rate, bandwidth trend).

#include <array>
#include <cmath>
#include <deque>

#include "chestnut/config.hpp"
#include "chestnut/entity_gen.hpp"
#include "chestnut/rng.hpp"

namespace chestnut {

struct UtilTriple {
  double c = 0.0;
  double s = 0.0;
  double b = 0.0;

  friend bool operator==(const UtilTriple&, const UtilTriple&) = default;
};

struct DemandTotals {
  long long c = 0;
  long long s = 0;
  long long b = 0;

  void add(const ServiceSpec& svc) {
    c += svc.pref_c;
    s += svc.pref_s;
    b += svc.pref_b;
  }
};

struct LoadState {
  int eid = 0;
  long long t = 0;
  UtilTriple rho;                 // current start-of-t utilizations
  std::deque<UtilTriple> history; // last <= k triples; back() mirrors rho
};

inline double clamp_rho(double x, const SimConfig& cfg) {
  return std::clamp(x, cfg.rho_min, cfg.rho_max);
}

/// Remaining supply-level units per resource: (1 - rho) * psi.
inline UtilTriple remaining_supply(const UtilTriple& rho, const EdgeServer& e) {
  return UtilTriple{(1.0 - rho.c) * e.supply_c,
                    (1.0 - rho.s) * e.supply_s,
                    (1.0 - rho.b) * e.supply_b};
}

inline UtilTriple remaining_supply(const LoadState& state, const EdgeServer& e) {
  return remaining_supply(state.rho, e);
}

/// Exponential normalization with max subtraction; components sum to 1.
inline std::array<double, 3> softmax3(std::array<double, 3> x) {
  const double m = std::max({x[0], x[1], x[2]});
  double sum = 0.0;
  for (double& v : x) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : x) v /= sum;
  return x;
}

/// Relative next-step utilization weights:
/// gamma = softmax(softmax(beta - alpha) + rho) with
/// alpha = softmax(remaining supply), beta = softmax(summed demand).
inline std::array<double, 3> load_allocation_weights(const LoadState& state,
                                                     const EdgeServer& server,
                                                     const DemandTotals& demand) {
  const UtilTriple supply = remaining_supply(state, server);
  const auto alpha = softmax3({supply.c, supply.s, supply.b});
  const auto beta = softmax3({static_cast<double>(demand.c),
                              static_cast<double>(demand.s),
                              static_cast<double>(demand.b)});
  const auto relative = softmax3({beta[0] - alpha[0], beta[1] - alpha[1], beta[2] - alpha[2]});
  return softmax3({relative[0] + state.rho.c, relative[1] + state.rho.s,
                   relative[2] + state.rho.b});
}

namespace detail {

inline void push_history(LoadState& state, const SimConfig& cfg) {
  state.history.push_back(state.rho);
  while (state.history.size() > static_cast<size_t>(cfg.k)) state.history.pop_front();
}

}  // namespace detail

/// t = 0 state with utilizations drawn uniformly from the configured
/// initialization band.
inline LoadState make_initial_state(int eid, const SimConfig& cfg, Rng& rng) {
  LoadState st;
  st.eid = eid;
  st.t = 0;
  st.rho.c = clamp_rho(rng.uniform_real(cfg.init_load_min, cfg.init_load_max), cfg);
  st.rho.s = clamp_rho(rng.uniform_real(cfg.init_load_min, cfg.init_load_max), cfg);
  st.rho.b = clamp_rho(rng.uniform_real(cfg.init_load_min, cfg.init_load_max), cfg);
  detail::push_history(st, cfg);
  return st;
}

/// Additive uniform(-epsilon, +epsilon) disturbance per resource, applied
/// when a timestamp opens, before any allocation. Draws c, s, b in order.
inline void start_of_step_disturbance(LoadState& state, const SimConfig& cfg, Rng& rng) {
  state.rho.c = clamp_rho(state.rho.c + rng.uniform_real(-cfg.epsilon, cfg.epsilon), cfg);
  state.rho.s = clamp_rho(state.rho.s + rng.uniform_real(-cfg.epsilon, cfg.epsilon), cfg);
  state.rho.b = clamp_rho(state.rho.b + rng.uniform_real(-cfg.epsilon, cfg.epsilon), cfg);
  state.history.back() = state.rho;
}

/// Closes timestamp t: the next utilizations are the gamma weights scaled
/// by one shared uniform draw g (so their ratios survive the draw), then
/// clamped. Advances t and the history ring.
inline void step_load(LoadState& state, const EdgeServer& server, const DemandTotals& demand,
                      const SimConfig& cfg, Rng& rng) {
  const auto gamma = load_allocation_weights(state, server, demand);
  const double g = rng.uniform_real(cfg.g_min, cfg.g_max);
  state.rho.c = clamp_rho(cfg.load_scale * gamma[0] * g, cfg);
  state.rho.s = clamp_rho(cfg.load_scale * gamma[1] * g, cfg);
  state.rho.b = clamp_rho(cfg.load_scale * gamma[2] * g, cfg);
  state.t += 1;
  detail::push_history(state, cfg);
}

/// Mean absolute successive change per resource over the ring
/// (volatility window for the queueing service rate). Zero when fewer
/// than two samples exist.
inline UtilTriple mean_abs_deltas(const std::deque<UtilTriple>& history) {
  if (history.size() < 2) return UtilTriple{};
  UtilTriple acc;
  for (size_t i = 1; i < history.size(); ++i) {
    acc.c += std::fabs(history[i].c - history[i - 1].c);
    acc.s += std::fabs(history[i].s - history[i - 1].s);
    acc.b += std::fabs(history[i].b - history[i - 1].b);
  }
  const double n = static_cast<double>(history.size() - 1);
  return UtilTriple{acc.c / n, acc.s / n, acc.b / n};
}

/// Signed mean successive change of the bandwidth utilization over the
/// ring (the jitter trend factor). Zero when fewer than two samples.
inline double bandwidth_trend(const std::deque<UtilTriple>& history) {
  if (history.size() < 2) return 0.0;
  double acc = 0.0;
  for (size_t i = 1; i < history.size(); ++i) acc += history[i].b - history[i - 1].b;
  return acc / static_cast<double>(history.size() - 1);
}

}  // namespace chestnut
