#pragma once

// Descriptive statistics over a generated dataset: rank correlation,
// fixed-width histograms, timestamp-interval distribution and per-server
// coverage counts.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "chestnut/entity_gen.hpp"
#include "chestnut/errors.hpp"
#include "chestnut/geo.hpp"
#include "chestnut/mobility.hpp"

namespace chestnut {

/// Ranks with ties averaged (1-based fractional ranks).
inline std::vector<double> fractional_ranks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t m = i; m <= j; ++m) ranks[order[m]] = avg;
    i = j + 1;
  }
  return ranks;
}

/// Spearman correlation: Pearson correlation of the fractional ranks.
/// Returns 0 when either column is constant.
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ModelError("spearman: column sizes differ");
  if (x.size() < 2) throw ModelError("spearman: need at least two samples");
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct HistogramBin {
  long long index = 0; // value in [index*width, (index+1)*width)
  size_t count = 0;
};

/// Fixed-width bins over non-negative values; only occupied bins appear.
inline std::vector<HistogramBin> fixed_width_histogram(std::span<const double> values,
                                                       double width) {
  if (width <= 0) throw ModelError("histogram bin width must be positive");
  std::map<long long, size_t> bins;
  for (const double v : values)
    ++bins[static_cast<long long>(std::floor(v / width))];
  std::vector<HistogramBin> out;
  out.reserve(bins.size());
  for (const auto& [idx, count] : bins) out.push_back(HistogramBin{idx, count});
  return out;
}

/// Gap sizes between successive timestamps, pooled over all users.
inline std::map<long long, size_t> timestamp_interval_counts(
    const std::vector<SelectedUser>& users) {
  std::map<long long, size_t> out;
  for (const SelectedUser& u : users)
    for (size_t i = 1; i < u.snapshots.size(); ++i)
      ++out[u.snapshots[i].t - u.snapshots[i - 1].t];
  return out;
}

/// covered[t][eid] = number of selected users inside server eid's radius
/// at timestamp t. Rows cover t = 0..max_t even when empty.
inline std::vector<std::vector<int>> coverage_counts(const std::vector<SelectedUser>& users,
                                                     const std::vector<EdgeServer>& servers,
                                                     long long max_t,
                                                     const GeoConstants& gc) {
  std::vector<std::vector<int>> covered(static_cast<size_t>(max_t + 1),
                                        std::vector<int>(servers.size(), 0));
  for (const SelectedUser& u : users) {
    for (const UserSnapshot& s : u.snapshots) {
      if (s.t < 0 || s.t > max_t) continue;
      for (const EdgeServer& e : servers) {
        if (haversine(s.pos, e.pos, gc) <= static_cast<double>(e.radius_m))
          ++covered[static_cast<size_t>(s.t)][static_cast<size_t>(e.id)];
      }
    }
  }
  return covered;
}

}  // namespace chestnut
