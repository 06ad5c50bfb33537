#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "chestnut/rng.hpp"

using namespace chestnut;

TEST_CASE("rng: same seed reproduces the same sequence") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: uniform_int stays in its inclusive bounds") {
  Rng rng(5);
  bool saw_lo = false, saw_hi = false;
  for (int i = 0; i < 10000; ++i) {
    const int64_t v = rng.uniform_int(-3, 3);
    REQUIRE(v >= -3);
    REQUIRE(v <= 3);
    saw_lo |= v == -3;
    saw_hi |= v == 3;
  }
  CHECK(saw_lo);
  CHECK(saw_hi);
  CHECK(rng.uniform_int(42, 42) == 42);
}

TEST_CASE("rng: uniform_real stays in [lo, hi)") {
  Rng rng(6);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform_real(0.1, 0.95);
    REQUIRE(v >= 0.1);
    REQUIRE(v < 0.95);
  }
}

TEST_CASE("seed tree: distinct labels and indices give distinct streams") {
  const SeedTree tree{1234};
  CHECK(tree.derive("servers") != tree.derive("services"));
  CHECK(tree.derive("load", 0) != tree.derive("load", 1));
  CHECK(tree.derive("load", 0) == tree.derive("load", 0));

  Rng a = tree.stream("assign", 7);
  Rng b = tree.stream("assign", 7);
  for (int i = 0; i < 16; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("seed tree: root seed changes every stream") {
  const SeedTree t1{1};
  const SeedTree t2{2};
  CHECK(t1.derive("servers") != t2.derive("servers"));
}
