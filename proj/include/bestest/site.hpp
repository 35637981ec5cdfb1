#pragma once

#include <bestest/error.hpp>

#include <cmath>
#include <cstdint>

namespace bestest {

struct Site {
  double latitude = 39.8;             // deg, north positive
  double longitude = -104.9;          // deg, east positive
  double timezone_meridian = -105.0;  // deg
  double ground_reflectance = 0.2;

  void validate() const {
    auto in = [](double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; };
    if (!in(latitude, -90, 90) || !in(longitude, -180, 180) ||
        !in(timezone_meridian, -180, 180) || !in(ground_reflectance, 0, 1))
      throw InvalidParameter("site field out of range");
  }

  friend bool operator==(const Site&, const Site&) = default;
};

struct WeatherRecord {
  std::int64_t hour_index = 0;
  double dry_bulb = 0.0;            // degC
  double direct_normal = 0.0;       // W/m2
  double diffuse_horizontal = 0.0;  // W/m2

  friend bool operator==(const WeatherRecord&, const WeatherRecord&) = default;
};

}  // namespace bestest
