#pragma once

// Edge perturbation: a small fixed-weight feedforward map over
// (uid, eid, sid) triples whose outputs are min-max scaled into [0, 0.2]
// across the triples observed in the invocation set. Weights come from
// the run seed, so equal triples always perturb equally.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "chestnut/errors.hpp"
#include "chestnut/qos_model.hpp"
#include "chestnut/rng.hpp"

namespace chestnut {

using IdTriple = std::array<int, 3>; // uid, eid, sid

class PerturbationModel {
public:
  static constexpr int kFeatures = 16;
  static constexpr int kHidden = 32;

  /// Draws the weights from `rng`, evaluates every triple once, and
  /// freezes the normalization over the observed outputs.
  static PerturbationModel fit(std::span<const IdTriple> triples,
                               int n_users, int n_servers, int n_services, Rng rng) {
    PerturbationModel m;
    m.n_users_ = std::max(1, n_users);
    m.n_servers_ = std::max(1, n_servers);
    m.n_services_ = std::max(1, n_services);
    for (auto& row : m.feature_w_)
      for (double& w : row) w = rng.uniform_real(-8.0, 8.0);
    for (double& b : m.feature_b_) b = rng.uniform_real(0.0, 2.0 * kPi);
    for (auto& row : m.hidden_w_)
      for (double& w : row) w = rng.uniform_real(-0.5, 0.5);
    for (double& b : m.hidden_b_) b = rng.uniform_real(-0.5, 0.5);
    for (double& w : m.out_w_) w = rng.uniform_real(-1.0, 1.0);

    if (triples.empty()) return m;
    std::map<IdTriple, double> raw_by_triple;
    for (const IdTriple& t : triples) raw_by_triple[t] = raw(m, t);
    double lo = raw_by_triple.begin()->second;
    double hi = lo;
    for (const auto& [t, r] : raw_by_triple) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    m.raw_min_ = lo;
    m.raw_max_ = hi;
    for (const auto& [t, r] : raw_by_triple)
      m.delta_by_triple_[t] = hi > lo ? 0.2 * (r - lo) / (hi - lo) : 0.0;
    return m;
  }

  /// Perturbation for a fitted triple, in [0, 0.2].
  double delta(int uid, int eid, int sid) const {
    const auto it = delta_by_triple_.find(IdTriple{uid, eid, sid});
    if (it == delta_by_triple_.end())
      throw ModelError("perturbation requested for a triple outside the fitted set");
    return it->second;
  }

  double raw_min() const { return raw_min_; }
  double raw_max() const { return raw_max_; }
  size_t fitted_count() const { return delta_by_triple_.size(); }

private:
  static double raw(const PerturbationModel& m, const IdTriple& t) {
    const std::array<double, 3> x{static_cast<double>(t[0]) / m.n_users_,
                                  static_cast<double>(t[1]) / m.n_servers_,
                                  static_cast<double>(t[2]) / m.n_services_};
    std::array<double, kFeatures> f{};
    for (int j = 0; j < kFeatures; ++j) {
      double acc = m.feature_b_[j];
      for (int i = 0; i < 3; ++i) acc += m.feature_w_[j][i] * x[i];
      f[j] = std::sin(acc);
    }
    double out = 0.0;
    for (int i = 0; i < kHidden; ++i) {
      double acc = m.hidden_b_[i];
      for (int j = 0; j < kFeatures; ++j) acc += m.hidden_w_[i][j] * f[j];
      out += m.out_w_[i] * std::tanh(acc);
    }
    return out;
  }

  int n_users_ = 1;
  int n_servers_ = 1;
  int n_services_ = 1;
  std::array<std::array<double, 3>, kFeatures> feature_w_{};
  std::array<double, kFeatures> feature_b_{};
  std::array<std::array<double, kFeatures>, kHidden> hidden_w_{};
  std::array<double, kHidden> hidden_b_{};
  std::array<double, kHidden> out_w_{};
  double raw_min_ = 0.0;
  double raw_max_ = 0.0;
  std::map<IdTriple, double> delta_by_triple_;
};

}  // namespace chestnut
