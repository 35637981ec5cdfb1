#pragma once

// Test-only solar position following the NOAA solar calculator spreadsheet
// (Julian-century series for declination). Independent of the Spencer series
// used by the library.

#include <cmath>
#include <numbers>

namespace oracle {

struct NoaaSun {
  double altitude;  // deg
  double declination;  // deg
};

// Calendar date (Gregorian) at the given true solar time in hours.
inline NoaaSun noaa_sun(int year, int month, int day, double solar_hour, double latitude) {
  constexpr double d2r = std::numbers::pi / 180.0;
  // Julian day at 12:00 UT is close enough for declination at noon-ish times.
  const int a = (14 - month) / 12;
  const int y = year + 4800 - a;
  const int m = month + 12 * a - 3;
  const double jdn = day + (153 * m + 2) / 5 + 365 * y + y / 4 - y / 100 + y / 400 - 32045;
  const double jd = jdn - 0.5 + solar_hour / 24.0;
  const double t = (jd - 2451545.0) / 36525.0;

  const double l0 = std::fmod(280.46646 + t * (36000.76983 + t * 0.0003032), 360.0);
  const double m_anom = 357.52911 + t * (35999.05029 - 0.0001537 * t);
  const double c = std::sin(m_anom * d2r) * (1.914602 - t * (0.004817 + 0.000014 * t)) +
                   std::sin(2 * m_anom * d2r) * (0.019993 - 0.000101 * t) + std::sin(3 * m_anom * d2r) * 0.000289;
  const double true_long = l0 + c;
  const double omega = 125.04 - 1934.136 * t;
  const double app_long = true_long - 0.00569 - 0.00478 * std::sin(omega * d2r);
  const double eps0 = 23.0 + (26.0 + (21.448 - t * (46.815 + t * (0.00059 - t * 0.001813))) / 60.0) / 60.0;
  const double eps = eps0 + 0.00256 * std::cos(omega * d2r);
  const double decl = std::asin(std::sin(eps * d2r) * std::sin(app_long * d2r)) / d2r;

  const double hour_angle = solar_hour * 15.0 - 180.0;
  const double cos_zen = std::sin(latitude * d2r) * std::sin(decl * d2r) +
                         std::cos(latitude * d2r) * std::cos(decl * d2r) * std::cos(hour_angle * d2r);
  const double zen = std::acos(std::fmax(-1.0, std::fmin(1.0, cos_zen))) / d2r;
  return {90.0 - zen, decl};
}

}  // namespace oracle
