#pragma once

#include <bestest/error.hpp>
#include <bestest/site.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

// Azimuths are degrees clockwise from north. Tilt 0 is horizontal facing up,
// 90 is vertical.
namespace bestest {

namespace solar_detail {

inline constexpr double kDeg = std::numbers::pi / 180.0;

// Exact at multiples of 90 degrees so that vertical/horizontal surfaces get
// view factors of exactly 1/2, 1 and 0.
inline double cos_deg(double deg) {
  const double r = std::fmod(std::fabs(deg), 360.0);
  if (r == 0.0) return 1.0;
  if (r == 90.0 || r == 270.0) return 0.0;
  if (r == 180.0) return -1.0;
  return std::cos(deg * kDeg);
}

inline double sin_deg(double deg) { return cos_deg(deg - 90.0); }

inline double wrap360(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a -= 360.0;
  return a;
}

}  // namespace solar_detail

struct SunPosition {
  double altitude = 0.0;  // deg
  double azimuth = 0.0;   // deg, [0,360)
};

struct SurfaceGeometry {
  double area = 1.0;     // m2
  double azimuth = 0.0;  // deg
  double tilt = 90.0;    // deg

  void validate() const {
    if (!(area > 0.0) || !std::isfinite(area)) throw InvalidParameter("surface area must be > 0");
    if (!(tilt >= 0.0 && tilt <= 180.0)) throw InvalidParameter("surface tilt must be in [0,180]");
    if (!std::isfinite(azimuth)) throw InvalidParameter("surface azimuth must be finite");
  }
};

struct SolarTimeOptions {
  // When false the hour clock is read as solar time directly.
  bool equation_of_time = false;
};

// Spencer (1971) Fourier series; day_of_year in [1,365].
inline double solar_declination(int day_of_year) {
  const double g = 2.0 * std::numbers::pi * (day_of_year - 1) / 365.0;
  const double rad = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
                     0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
                     0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);
  return rad / solar_detail::kDeg;
}

// Minutes.
inline double equation_of_time(int day_of_year) {
  const double g = 2.0 * std::numbers::pi * (day_of_year - 1) / 365.0;
  return 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) -
                   0.014615 * std::cos(2 * g) - 0.040849 * std::sin(2 * g));
}

// Sun position for a day of year and a solar-time hour (12.0 = solar noon).
inline SunPosition sun_position_at(const Site& site, int day_of_year, double solar_hour) {
  using solar_detail::kDeg;
  const double decl = solar_declination(day_of_year) * kDeg;
  const double lat = site.latitude * kDeg;
  const double hour_angle = (solar_hour - 12.0) * 15.0 * kDeg;

  // Sun direction in (east, north, up).
  const double e = -std::cos(decl) * std::sin(hour_angle);
  const double n = std::sin(decl) * std::cos(lat) - std::cos(decl) * std::cos(hour_angle) * std::sin(lat);
  const double u = std::sin(decl) * std::sin(lat) + std::cos(decl) * std::cos(hour_angle) * std::cos(lat);

  SunPosition sun;
  sun.altitude = std::asin(std::clamp(u, -1.0, 1.0)) / kDeg;
  sun.azimuth = (e == 0.0 && n == 0.0) ? 0.0 : solar_detail::wrap360(std::atan2(e, n) / kDeg);
  return sun;
}

// Position at the midpoint of the hour, with hour 0 of day 1 spanning 00:00-01:00.
inline SunPosition sun_position(const Site& site, std::int64_t hour_index, SolarTimeOptions opts = {}) {
  const int day = static_cast<int>((hour_index / 24) % 365) + 1;
  double hour = static_cast<double>(hour_index % 24) + 0.5;
  if (opts.equation_of_time)
    hour += (4.0 * (site.longitude - site.timezone_meridian) + equation_of_time(day)) / 60.0;
  return sun_position_at(site, day, hour);
}

inline double incidence_cosine(const SunPosition& sun, const SurfaceGeometry& surface) {
  using namespace solar_detail;
  if (sun.altitude <= 0.0) return 0.0;
  const double c = sin_deg(sun.altitude) * cos_deg(surface.tilt) +
                   cos_deg(sun.altitude) * sin_deg(surface.tilt) * cos_deg(sun.azimuth - surface.azimuth);
  return std::clamp(c, 0.0, 1.0);
}

struct PlaneIrradiance {
  double beam = 0.0;              // W/m2
  double sky_diffuse = 0.0;       // W/m2
  double ground_reflected = 0.0;  // W/m2

  double diffuse() const { return sky_diffuse + ground_reflected; }
  double total() const { return beam + sky_diffuse + ground_reflected; }
};

// Isotropic-sky irradiance on a tilted plane.
inline PlaneIrradiance plane_irradiance(const WeatherRecord& record, const SunPosition& sun,
                                        const SurfaceGeometry& surface, double ground_reflectance) {
  using namespace solar_detail;
  const double ct = cos_deg(surface.tilt);
  const double ghi = record.direct_normal * std::max(sin_deg(sun.altitude), 0.0) + record.diffuse_horizontal;
  PlaneIrradiance p;
  p.beam = record.direct_normal * incidence_cosine(sun, surface);
  p.sky_diffuse = record.diffuse_horizontal * (1.0 + ct) / 2.0;
  p.ground_reflected = ghi * ground_reflectance * (1.0 - ct) / 2.0;
  return p;
}

// ---------------------------------------------------------------------------
// Shading by overhangs and wingwalls.

enum class ShadingKind { Overhang, Wingwall };
enum class WingwallSide { Left, Right };  // as seen from outside, facing the wall

struct ShadingDevice {
  ShadingKind kind = ShadingKind::Overhang;
  double depth = 0.0;  // m, projection away from the wall
  // Overhang: height of the device above the window top.
  // Wingwall: horizontal distance from the window side edge.
  double gap = 0.0;
  // Overrun beyond the window edges on both ends (overhang: lateral,
  // wingwall: vertical). Infinity for an unbounded device.
  double extension = std::numeric_limits<double>::infinity();
  WingwallSide side = WingwallSide::Left;
  // Constant fraction of diffuse irradiance blocked; 0 = beam-only shading.
  double diffuse_block = 0.0;

  void validate() const {
    if (!(depth >= 0.0) || !std::isfinite(depth)) throw InvalidParameter("shading depth must be >= 0");
    if (!(gap >= 0.0) || !std::isfinite(gap)) throw InvalidParameter("shading gap must be >= 0");
    if (!(extension >= 0.0)) throw InvalidParameter("shading extension must be >= 0");
    if (!(diffuse_block >= 0.0 && diffuse_block <= 1.0))
      throw InvalidParameter("diffuse_block must be in [0,1]");
  }
};

// Vertical rectangular window; coordinates on the wall run x to the right
// (seen from outside) and y up, origin at the window's lower-left corner.
struct WindowRect {
  double width = 1.0;   // m
  double height = 1.0;  // m
  double azimuth = 180.0;
};

namespace solar_detail {

struct Point {
  double x, y;
};
using Polygon = std::vector<Point>;

inline double polygon_area(const Polygon& p) {
  double a = 0.0;
  for (std::size_t i = 0, n = p.size(); i < n; ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % n];
    a += u.x * v.y - v.x * u.y;
  }
  return std::fabs(a) / 2.0;
}

// Sutherland-Hodgman against one half-plane a*x + b*y <= c.
inline Polygon clip_half_plane(const Polygon& in, double a, double b, double c) {
  Polygon out;
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = in[i];
    const Point& q = in[(i + 1) % n];
    const double fp = a * p.x + b * p.y - c;
    const double fq = a * q.x + b * q.y - c;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
      const double t = fp / (fp - fq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return out;
}

// Intersection of a polygon with a convex polygon (counter-clockwise).
inline Polygon clip_convex(Polygon subject, const Polygon& clip) {
  const std::size_t n = clip.size();
  for (std::size_t i = 0; i < n && subject.size() >= 3; ++i) {
    const Point& p = clip[i];
    const Point& q = clip[(i + 1) % n];
    // Inside of a CCW edge is on the left: cross(q-p, x-p) >= 0.
    const double a = (q.y - p.y);
    const double b = -(q.x - p.x);
    subject = clip_half_plane(subject, a, b, a * p.x + b * p.y);
  }
  if (subject.size() < 3) subject.clear();
  return subject;
}

inline Polygon make_ccw(Polygon p) {
  double s = 0.0;
  for (std::size_t i = 0, n = p.size(); i < n; ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % n];
    s += u.x * v.y - v.x * u.y;
  }
  if (s < 0) std::reverse(p.begin(), p.end());
  return p;
}

}  // namespace solar_detail

// Fraction of the window area in the beam shadow of the devices. Each device
// casts the parallelogram swept between its wall attachment line and that
// line displaced by depth*(tan(wall-solar azimuth), -tan(profile angle)); the
// shadows are clipped to the window and combined by area union.
inline double shaded_fraction(const WindowRect& window, std::span<const ShadingDevice> devices,
                              const SunPosition& sun) {
  using namespace solar_detail;
  if (!(window.width > 0.0) || !(window.height > 0.0) || devices.empty()) return 0.0;
  if (sun.altitude <= 0.0) return 0.0;
  const double rel = sun.azimuth - window.azimuth;
  const double cos_rel = cos_deg(rel);
  if (cos_rel <= 0.0) return 0.0;  // sun behind the wall plane

  const double W = window.width;
  const double H = window.height;
  const double shift_x_per_depth = sin_deg(rel) / cos_rel;
  const double shift_y_per_depth = -std::tan(sun.altitude * kDeg) / cos_rel;

  const Polygon window_poly{{0, 0}, {W, 0}, {W, H}, {0, H}};
  std::vector<Polygon> shadows;
  for (const auto& d : devices) {
    if (!(d.depth > 0.0)) continue;
    const double dx = d.depth * shift_x_per_depth;
    const double dy = d.depth * shift_y_per_depth;
    // Any overrun beyond this cannot reach the window.
    const double reach = W + H + d.gap + std::fabs(dx) + std::fabs(dy) + 1.0;
    const double ext = std::min(d.extension, reach);
    Point a, b;
    if (d.kind == ShadingKind::Overhang) {
      const double y = H + d.gap;
      a = {-ext, y};
      b = {W + ext, y};
    } else {
      const double x = d.side == WingwallSide::Left ? -d.gap : W + d.gap;
      a = {x, -ext};
      b = {x, H + ext};
    }
    Polygon para{a, b, {b.x + dx, b.y + dy}, {a.x + dx, a.y + dy}};
    if (polygon_area(para) <= 0.0) continue;
    auto clipped = clip_convex(make_ccw(std::move(para)), window_poly);
    if (!clipped.empty()) shadows.push_back(make_ccw(std::move(clipped)));
  }
  if (shadows.empty()) return 0.0;

  // Inclusion-exclusion over convex pieces; device counts are small.
  const std::size_t n = shadows.size();
  if (n > 16) throw InvalidParameter("too many shading devices on one window");
  double area = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Polygon inter;
    bool first = true;
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      ++bits;
      if (first) {
        inter = shadows[i];
        first = false;
      } else {
        inter = clip_convex(std::move(inter), shadows[i]);
        if (inter.empty()) break;
      }
    }
    if (inter.empty()) continue;
    area += (bits % 2 ? 1.0 : -1.0) * polygon_area(inter);
  }
  return std::clamp(area / (W * H), 0.0, 1.0);
}

// Fraction of diffuse irradiance that still reaches the window.
inline double diffuse_unblocked(std::span<const ShadingDevice> devices) {
  double f = 1.0;
  for (const auto& d : devices) f *= 1.0 - d.diffuse_block;
  return f;
}

// ---------------------------------------------------------------------------
// Glazing.

struct Glazing {
  double area = 1.0;                  // m2
  double normal_transmittance = 0.75;
  // Relative angular transmittance as a polynomial in cos(theta), lowest
  // order first; evaluated value is normalised to 1 at normal incidence.
  // The default 1-(1-c)^3 is monotone with 0.875 at 60 degrees.
  std::vector<double> angular_coefficients{0.0, 3.0, -3.0, 1.0};
  // Hemispherical diffuse transmittance; defaults to the angular curve at 60 degrees.
  std::optional<double> diffuse_transmittance;
  double u_value = 3.0;  // W/m2K, air to air

  void validate() const {
    if (!(area > 0.0)) throw InvalidParameter("glazing area must be > 0");
    if (!(normal_transmittance >= 0.0 && normal_transmittance <= 1.0))
      throw InvalidParameter("normal transmittance must be in [0,1]");
    if (diffuse_transmittance && !(*diffuse_transmittance >= 0.0 && *diffuse_transmittance <= 1.0))
      throw InvalidParameter("diffuse transmittance must be in [0,1]");
    if (!(u_value > 0.0)) throw InvalidParameter("glazing U-value must be > 0");
    if (angular_coefficients.empty()) throw InvalidParameter("angular coefficients must be non-empty");
    double at_normal = 0.0;
    for (double c : angular_coefficients) at_normal += c;
    if (!(at_normal > 0.0)) throw InvalidParameter("angular polynomial must be positive at normal incidence");
  }

  double transmittance(double cos_theta) const {
    double v = 0.0, at_normal = 0.0, p = 1.0;
    for (double c : angular_coefficients) {
      v += c * p;
      at_normal += c;
      p *= cos_theta;
    }
    if (!(at_normal > 0.0)) return 0.0;
    return std::clamp(normal_transmittance * v / at_normal, 0.0, 1.0);
  }

  double diffuse() const { return diffuse_transmittance.value_or(transmittance(0.5)); }
};

struct TransmittedSolar {
  double beam = 0.0;     // W
  double diffuse = 0.0;  // W
  double total() const { return beam + diffuse; }
};

inline TransmittedSolar window_transmission_split(const Glazing& glazing, const PlaneIrradiance& plane,
                                                  double beam_unshaded, double incidence_cos,
                                                  double diffuse_unshaded = 1.0) {
  TransmittedSolar t;
  t.beam = glazing.area * glazing.transmittance(incidence_cos) * plane.beam * std::clamp(beam_unshaded, 0.0, 1.0);
  t.diffuse = glazing.area * glazing.diffuse() * plane.diffuse() * std::clamp(diffuse_unshaded, 0.0, 1.0);
  return t;
}

// Transmitted solar power, W.
inline double window_transmission(const Glazing& glazing, const PlaneIrradiance& plane, double beam_unshaded,
                                  double incidence_cos) {
  return window_transmission_split(glazing, plane, beam_unshaded, incidence_cos).total();
}

}  // namespace bestest
