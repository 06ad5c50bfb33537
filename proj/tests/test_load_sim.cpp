#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chestnut/load_sim.hpp"

using namespace chestnut;

namespace {

EdgeServer server(int c, int s, int b) { return EdgeServer{0, GeoPoint{}, 800, c, s, b}; }

LoadState state_with(UtilTriple rho, std::deque<UtilTriple> history = {}) {
  LoadState st;
  st.rho = rho;
  if (history.empty()) history.push_back(rho);
  st.history = std::move(history);
  return st;
}

}  // namespace

TEST_CASE("remaining_supply: (1 - rho) * psi componentwise") {
  const EdgeServer e = server(4, 2, 3);
  CHECK(remaining_supply(state_with({0, 0, 0}), e).c == 4.0);
  CHECK(remaining_supply(state_with({0.5, 0.5, 0.5}), e).s == 1.0);
  CHECK(remaining_supply(state_with({1.0, 1.0, 1.0}), e).c == 0.0);
}

TEST_CASE("softmax3: symmetry, closed form, normalization, shift invariance") {
  const auto thirds = softmax3({7.0, 7.0, 7.0});
  for (const double v : thirds) CHECK_THAT(v, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));

  const auto closed = softmax3({0.0, 0.0, std::log(2.0)});
  CHECK_THAT(closed[0], Catch::Matchers::WithinAbs(0.25, 1e-15));
  CHECK_THAT(closed[1], Catch::Matchers::WithinAbs(0.25, 1e-15));
  CHECK_THAT(closed[2], Catch::Matchers::WithinAbs(0.50, 1e-15));

  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const std::array<double, 3> x{rng.uniform_real(-50, 50), rng.uniform_real(-50, 50),
                                  rng.uniform_real(-50, 50)};
    const auto y = softmax3(x);
    CHECK_THAT(y[0] + y[1] + y[2], Catch::Matchers::WithinAbs(1.0, 1e-12));
    for (const double v : y) CHECK(v > 0.0);

    const double c = rng.uniform_real(-100, 100);
    const auto shifted = softmax3({x[0] + c, x[1] + c, x[2] + c});
    for (int j = 0; j < 3; ++j)
      CHECK_THAT(shifted[static_cast<size_t>(j)],
                 Catch::Matchers::WithinAbs(y[static_cast<size_t>(j)], 1e-12));
  }
}

TEST_CASE("load_allocation_weights: zero demand normalizes to thirds before mixing") {
  // softmax of a zero demand triple is exactly (1/3, 1/3, 1/3)
  const auto beta = softmax3({0.0, 0.0, 0.0});
  for (const double v : beta) CHECK_THAT(v, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));

  // and the composed weights still form a probability triple
  const auto gamma = load_allocation_weights(state_with({0.2, 0.3, 0.4}), server(2, 3, 1),
                                             DemandTotals{});
  CHECK_THAT(gamma[0] + gamma[1] + gamma[2], Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("step_load: gamma ratios survive the shared scale draw") {
  SimConfig cfg;
  cfg.g_min = cfg.g_max = 0.2; // keep values away from the clamps
  LoadState st = state_with({0.25, 0.35, 0.15});
  const EdgeServer e = server(3, 2, 4);
  DemandTotals demand;
  demand.c = 7;
  demand.s = 3;
  demand.b = 5;

  const auto gamma = load_allocation_weights(st, e, demand);
  Rng rng(5);
  step_load(st, e, demand, cfg, rng);
  CHECK(st.t == 1);
  CHECK_THAT(st.rho.c / st.rho.s, Catch::Matchers::WithinRel(gamma[0] / gamma[1], 1e-12));
  CHECK_THAT(st.rho.c / st.rho.b, Catch::Matchers::WithinRel(gamma[0] / gamma[2], 1e-12));
}

TEST_CASE("step_load: deterministic under the same stream position") {
  SimConfig cfg;
  const EdgeServer e = server(2, 2, 2);
  DemandTotals demand;
  demand.c = demand.s = demand.b = 4;
  LoadState a = state_with({0.2, 0.2, 0.2});
  LoadState b = a;
  Rng ra(123), rb(123);
  step_load(a, e, demand, cfg, ra);
  step_load(b, e, demand, cfg, rb);
  CHECK(a.rho == b.rho);
}

TEST_CASE("step_load and disturbance keep utilizations inside the clamp band") {
  SimConfig cfg;
  cfg.epsilon = 0.5; // oversized disturbance to hit both clamps
  const EdgeServer e = server(1, 3, 5);
  Rng rng(2024);
  LoadState st = make_initial_state(0, cfg, rng);
  bool hit_floor = false;
  for (int t = 0; t < 300; ++t) {
    start_of_step_disturbance(st, cfg, rng);
    for (const double rho : {st.rho.c, st.rho.s, st.rho.b}) {
      REQUIRE(rho >= cfg.rho_min);
      REQUIRE(rho <= cfg.rho_max);
      hit_floor |= rho == cfg.rho_min;
    }
    DemandTotals demand;
    demand.c = t % 5;
    demand.b = t % 3;
    step_load(st, e, demand, cfg, rng);
    REQUIRE(st.history.size() <= static_cast<size_t>(cfg.k));
  }
  CHECK(hit_floor); // the floor clamp actually engaged
}

TEST_CASE("disturbance with epsilon = 0 leaves the state unchanged") {
  SimConfig cfg;
  cfg.epsilon = 0.0;
  LoadState st = state_with({0.4, 0.5, 0.6});
  Rng rng(9);
  start_of_step_disturbance(st, cfg, rng);
  CHECK(st.rho == UtilTriple{0.4, 0.5, 0.6});
}

TEST_CASE("history ring: windows use successive differences") {
  // constant history: zero deltas
  const LoadState flat = state_with({0.5, 0.5, 0.5}, {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}});
  CHECK(mean_abs_deltas(flat.history) == UtilTriple{0, 0, 0});
  CHECK(bandwidth_trend(flat.history) == 0.0);

  // bandwidth climbing 0.1 per step: signed trend 0.1, absolute delta 0.1
  std::deque<UtilTriple> climb;
  for (int i = 0; i < 5; ++i)
    climb.push_back({0.5, 0.5, 0.3 + 0.1 * i});
  CHECK_THAT(bandwidth_trend(climb), Catch::Matchers::WithinAbs(0.1, 1e-12));
  CHECK_THAT(mean_abs_deltas(climb).b, Catch::Matchers::WithinAbs(0.1, 1e-12));

  // oscillation cancels in the signed trend but not in the absolute delta
  const std::deque<UtilTriple> wave = {{0, 0, 0.4}, {0, 0, 0.6}, {0, 0, 0.4}};
  CHECK_THAT(bandwidth_trend(wave), Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(mean_abs_deltas(wave).b, Catch::Matchers::WithinAbs(0.2, 1e-12));

  // singleton history has no differences
  CHECK(mean_abs_deltas({{0.5, 0.5, 0.5}}) == UtilTriple{0, 0, 0});
  CHECK(bandwidth_trend({{0.5, 0.5, 0.5}}) == 0.0);
}

TEST_CASE("initial state stays in the configured band and seeds the ring") {
  SimConfig cfg;
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const LoadState st = make_initial_state(i, cfg, rng);
    for (const double rho : {st.rho.c, st.rho.s, st.rho.b}) {
      REQUIRE(rho >= cfg.init_load_min);
      REQUIRE(rho <= cfg.init_load_max);
    }
    REQUIRE(st.history.size() == 1);
    REQUIRE(st.history.back() == st.rho);
  }
}
