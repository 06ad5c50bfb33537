#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chestnut/geo.hpp"
#include "chestnut/rng.hpp"

using namespace chestnut;

namespace {

// Independent reference route: the numerically stable atan2 form of the
// spherical great-circle distance.
double great_circle_reference(GeoPoint a, GeoPoint b, double radius_m) {
  const double la1 = deg2rad(a.lat);
  const double la2 = deg2rad(b.lat);
  const double dlon = deg2rad(b.lon - a.lon);
  const double num = std::hypot(std::cos(la2) * std::sin(dlon),
                                std::cos(la1) * std::sin(la2) -
                                    std::sin(la1) * std::cos(la2) * std::cos(dlon));
  const double den =
      std::sin(la1) * std::sin(la2) + std::cos(la1) * std::cos(la2) * std::cos(dlon);
  return radius_m * std::atan2(num, den);
}

}  // namespace

TEST_CASE("haversine: identical points give zero") {
  const GeoPoint p{121.4737, 31.2304};
  CHECK(haversine(p, p) == 0.0);
}

TEST_CASE("haversine: one equatorial degree") {
  const GeoConstants gc;
  const double expected = 2.0 * kPi * gc.earth_radius_m / 360.0;
  const double d = haversine(GeoPoint{0, 0}, GeoPoint{1, 0});
  CHECK_THAT(d, Catch::Matchers::WithinAbs(expected, 1e-6));
  CHECK_THAT(d, Catch::Matchers::WithinAbs(111194.93, 0.01));
}

TEST_CASE("haversine: antipodal points give pi R") {
  const GeoConstants gc;
  const double d = haversine(GeoPoint{0, 0}, GeoPoint{180, 0});
  CHECK_THAT(d, Catch::Matchers::WithinAbs(kPi * gc.earth_radius_m, 0.1));
}

TEST_CASE("haversine: symmetric, non-negative, bounded by pi R") {
  const GeoConstants gc;
  Rng rng(20240901);
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint a{rng.uniform_real(-180, 180), rng.uniform_real(-90, 90)};
    const GeoPoint b{rng.uniform_real(-180, 180), rng.uniform_real(-90, 90)};
    const double ab = haversine(a, b);
    const double ba = haversine(b, a);
    REQUIRE(ab >= 0.0);
    REQUIRE(ab <= kPi * gc.earth_radius_m * (1 + 1e-12));
    REQUIRE_THAT(ba, Catch::Matchers::WithinRel(ab, 1e-12));
    REQUIRE(haversine(a, a) == 0.0);
  }
}

TEST_CASE("haversine: matches the independent great-circle route") {
  const GeoConstants gc;
  Rng rng(424242);
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint a{rng.uniform_real(-180, 180), rng.uniform_real(-90, 90)};
    const GeoPoint b{rng.uniform_real(-180, 180), rng.uniform_real(-90, 90)};
    const double got = haversine(a, b, gc);
    const double want = great_circle_reference(a, b, gc.earth_radius_m);
    if (want > 0)
      REQUIRE_THAT(got, Catch::Matchers::WithinRel(want, 1e-9));
    else
      REQUIRE(got < 1e-9);
  }
}

TEST_CASE("extrapolate: zero distance is the identity for any heading") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint p{rng.uniform_real(-180, 180), rng.uniform_real(-90, 90)};
    const double heading = rng.uniform_real(0, 360);
    const GeoPoint q = extrapolate(p, heading, 0.0);
    CHECK(q.lon == p.lon);
    CHECK(q.lat == p.lat);
  }
}

TEST_CASE("extrapolate: one grid degree along each axis") {
  const GeoPoint p{121.0, 31.0};
  const GeoConstants gc;

  const GeoPoint east = extrapolate(p, 0.0, gc.meters_per_degree);
  CHECK_THAT(east.lon, Catch::Matchers::WithinAbs(122.0, 1e-9));
  CHECK_THAT(east.lat, Catch::Matchers::WithinAbs(31.0, 1e-9));

  const GeoPoint north = extrapolate(p, 90.0, gc.meters_per_degree);
  CHECK_THAT(north.lon, Catch::Matchers::WithinAbs(121.0, 1e-9));
  CHECK_THAT(north.lat, Catch::Matchers::WithinAbs(32.0, 1e-9));
}

TEST_CASE("extrapolate: north-referenced convention swaps the axes") {
  const GeoPoint p{121.0, 31.0};
  const GeoConstants gc;

  const GeoPoint north = extrapolate(p, 0.0, gc.meters_per_degree,
                                     BearingConvention::north_referenced);
  CHECK_THAT(north.lon, Catch::Matchers::WithinAbs(121.0, 1e-9));
  CHECK_THAT(north.lat, Catch::Matchers::WithinAbs(32.0, 1e-9));

  const GeoPoint east = extrapolate(p, 90.0, gc.meters_per_degree,
                                    BearingConvention::north_referenced);
  CHECK_THAT(east.lon, Catch::Matchers::WithinAbs(122.0, 1e-9));
  CHECK_THAT(east.lat, Catch::Matchers::WithinAbs(31.0, 1e-9));
}

TEST_CASE("normalized wraps longitude and clamps latitude") {
  CHECK(normalized(GeoPoint{181.0, 0.0}).lon == -179.0);
  CHECK(normalized(GeoPoint{-541.0, 0.0}).lon == 179.0);
  CHECK(normalized(GeoPoint{0.0, 95.0}).lat == 90.0);
  CHECK(normalized(GeoPoint{0.0, -95.0}).lat == -90.0);
  CHECK(normalized(GeoPoint{121.5, 31.2}) == GeoPoint{121.5, 31.2});
}
