#pragma once

// Geodesic primitives: great-circle distance on a sphere and the
// flat-equirectangular dead-reckoning extrapolation used to predict a
// moving user's position.

#include <algorithm>
#include <cmath>

namespace chestnut {

/// Position in decimal degrees.
struct GeoPoint {
  double lon = 0.0;  // [-180, 180] after normalization
  double lat = 0.0;  // [-90, 90] after normalization

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct GeoConstants {
  double earth_radius_m = 6'371'000.0;
  double speed_of_light = 3e8;          // m/s
  double meters_per_degree = 111'320.0; // equirectangular scale
};

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps longitude into [-180, 180] and clamps latitude into [-90, 90].
inline GeoPoint normalized(GeoPoint p) {
  if (p.lon < -180.0 || p.lon > 180.0) {
    p.lon = std::remainder(p.lon, 360.0);
  }
  p.lat = std::clamp(p.lat, -90.0, 90.0);
  return p;
}

inline bool in_lon_range(double lon) { return lon >= -180.0 && lon <= 180.0; }
inline bool in_lat_range(double lat) { return lat >= -90.0 && lat <= 90.0; }

/// Great-circle distance in meters between two points.
/// hav(theta) = hav(dlat) + cos(lat1) cos(lat2) hav(dlon),
/// distance = 2 R asin(sqrt(hav(theta))), in [0, pi R].
inline double haversine(GeoPoint a, GeoPoint b,
                        const GeoConstants& gc = GeoConstants{}) {
  a = normalized(a);
  b = normalized(b);
  const double lat1 = deg2rad(a.lat);
  const double lat2 = deg2rad(b.lat);
  const double dlat = deg2rad(b.lat - a.lat);
  const double dlon = deg2rad(b.lon - a.lon);

  const double sin_dlat = std::sin(dlat / 2.0);
  const double sin_dlon = std::sin(dlon / 2.0);
  double h = sin_dlat * sin_dlat +
             std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;
  h = std::clamp(h, 0.0, 1.0); // guard asin against rounding
  return 2.0 * gc.earth_radius_m * std::asin(std::sqrt(h));
}

/// Which axis the direction angle's cosine displaces.
/// `paper` assigns cos to longitude and sin to latitude; `north_referenced`
/// is the conventional compass bearing (sin to longitude, cos to latitude).
enum class BearingConvention { paper, north_referenced };

/// Dead-reckoned position after moving `distance_m` meters along
/// `direction_deg` from `p`, on a flat grid of `meters_per_degree` per
/// degree of both longitude and latitude.
inline GeoPoint extrapolate(GeoPoint p, double direction_deg, double distance_m,
                            BearingConvention convention = BearingConvention::paper,
                            const GeoConstants& gc = GeoConstants{}) {
  const double theta = deg2rad(direction_deg);
  const double step = distance_m / gc.meters_per_degree;
  GeoPoint out = p;
  if (convention == BearingConvention::paper) {
    out.lon = p.lon + step * std::cos(theta);
    out.lat = p.lat + step * std::sin(theta);
  } else {
    out.lon = p.lon + step * std::sin(theta);
    out.lat = p.lat + step * std::cos(theta);
  }
  return out;
}

}  // namespace chestnut
