#pragma once

// Shared test inputs: bundled catalog, synthetic weather, simple zones.

#include <bestest/bestest.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace fixtures {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const bestest::Catalog& bundled_catalog() {
  static const bestest::Catalog c = bestest::load_catalog(read_file(std::string(BESTEST_DATA_DIR) + "/catalog.json"));
  return c;
}

inline const bestest::WeatherSeries& synthetic_year() {
  static const bestest::WeatherSeries w = bestest::synth_weather(bestest::Site{}, bestest::SynthWeatherParams{});
  return w;
}

// Whole days of constant weather.
inline bestest::WeatherSeries constant_weather(double t_out, std::size_t days = 2, double dni = 0.0,
                                               double dhi = 0.0) {
  std::vector<bestest::WeatherRecord> r;
  for (std::size_t h = 0; h < 24 * days; ++h) r.push_back({static_cast<std::int64_t>(h), t_out, dni, dhi});
  return bestest::WeatherSeries(bestest::Site{}, std::move(r));
}

// 8 x 6 x 2.7 m box. Walls facing N/E/S/W, roof and floor, all of the given construction.
inline bestest::ZoneModel box_zone(const bestest::Construction& c,
                                   bestest::ExteriorBoundary boundary = bestest::ExteriorBoundary::Outdoor) {
  using bestest::SurfaceRole;
  bestest::ZoneModel z;
  z.volume = 8 * 6 * 2.7;
  auto add = [&](const char* name, double area, double azimuth, double tilt, SurfaceRole role) {
    bestest::ZoneSurface s;
    s.name = name;
    s.geometry = {area, azimuth, tilt};
    s.construction = c;
    s.role = role;
    s.boundary = boundary;
    z.surfaces.push_back(s);
  };
  add("north", 8 * 2.7, 0, 90, SurfaceRole::Wall);
  add("east", 6 * 2.7, 90, 90, SurfaceRole::Wall);
  add("south", 8 * 2.7, 180, 90, SurfaceRole::Wall);
  add("west", 6 * 2.7, 270, 90, SurfaceRole::Wall);
  add("roof", 48, 0, 0, SurfaceRole::Roof);
  add("floor", 48, 0, 180, SurfaceRole::Floor);
  return z;
}

inline bestest::Construction massless_insulation() {
  return bestest::Construction{{{0.066, 0.04, 0.0, 0.0}}, 0.6, 0.6};
}

// Minimal catalog text with one massless box case per id.
inline std::string tiny_catalog(const std::string& extra_ranges, const std::string& extra_pairs = "[]",
                         const std::string& provenance = "synthetic") {
  const std::string zone = R"({
      "volume": 129.6,
      "infiltration_ach": 0.5,
      "surfaces": [
        {"area": 21.6, "azimuth": 0, "construction": "ins"},
        {"area": 16.2, "azimuth": 90, "construction": "ins"},
        {"area": 15.6, "azimuth": 180, "construction": "ins"},
        {"area": 16.2, "azimuth": 270, "construction": "ins"},
        {"area": 48, "tilt": 0, "role": "roof", "construction": "ins"},
        {"area": 48, "tilt": 180, "role": "floor", "construction": "ins", "exterior_solar_absorptance": 0}
      ],
      "windows": [{"width": 3, "height": 2, "glazing": {"normal_transmittance": 0.75}}]
    })";
  return R"({"provenance": ")" + provenance + R"(",
    "constructions": {"ins": {"layers": [{"thickness": 0.066, "conductivity": 0.04}]}},
    "cases": [
      {"id": "A", "description": "first", "zone": )" + zone + R"(},
      {"id": "B", "description": "second", "default_model": "discretized", "zone": )" + zone + R"(}
    ],
    "ranges": )" + extra_ranges + R"(,
    "pairs": )" + extra_pairs + "}";
}

}  // namespace fixtures
