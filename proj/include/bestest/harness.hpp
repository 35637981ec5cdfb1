#pragma once

#include <bestest/conduction.hpp>
#include <bestest/error.hpp>
#include <bestest/simulate.hpp>
#include <bestest/solar.hpp>
#include <bestest/weather.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#define BESTEST_VERSION "1.0.0"

// Case catalog, reference envelopes, suite runner and reports.
namespace bestest {

using Json = nlohmann::ordered_json;

enum class Quantity { Heating, Cooling };

inline const char* to_string(Quantity q) { return q == Quantity::Heating ? "heating" : "cooling"; }

inline std::optional<Quantity> parse_quantity(std::string_view s) {
  if (s == "heating") return Quantity::Heating;
  if (s == "cooling") return Quantity::Cooling;
  return std::nullopt;
}

// Accepts "two_node"/"two-node" and "discretized".
inline std::optional<ConductionModel> parse_model(std::string_view s) {
  if (s == "two_node" || s == "two-node") return ConductionModel::TwoNode;
  if (s == "discretized") return ConductionModel::Discretized;
  return std::nullopt;
}

struct Bounds {
  double min = 0.0;  // MWh
  double max = 0.0;

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct ProgramResult {
  std::string program;
  double heating = 0.0;  // MWh
  double cooling = 0.0;

  friend bool operator==(const ProgramResult&, const ProgramResult&) = default;
};

struct ReferenceRange {
  std::string case_id;
  std::optional<Bounds> heating;
  std::optional<Bounds> cooling;
  std::vector<ProgramResult> per_program;

  const std::optional<Bounds>& bounds(Quantity q) const { return q == Quantity::Heating ? heating : cooling; }
};

struct DiagnosticPair {
  std::string case_minuend;
  std::string case_subtrahend;
  Quantity quantity = Quantity::Heating;
  std::optional<Bounds> expected_delta_range;
};

struct CaseDefinition {
  std::string id;
  std::string description;
  ZoneModel zone;
  ConductionModel default_model = ConductionModel::TwoNode;
  std::vector<std::string> diagnostic_tags;
};

struct Catalog {
  std::string provenance;
  std::vector<CaseDefinition> cases;
  std::vector<ReferenceRange> ranges;
  std::vector<DiagnosticPair> pairs;

  const CaseDefinition* find_case(std::string_view id) const {
    for (const auto& c : cases)
      if (c.id == id) return &c;
    return nullptr;
  }
  const ReferenceRange* find_range(std::string_view id) const {
    for (const auto& r : ranges)
      if (r.case_id == id) return &r;
    return nullptr;
  }
};

class CatalogError : public Error {
 public:
  enum class Kind { ParseError, UnknownCaseRef, InvalidRange, DuplicateCase, InvalidCase };
  CatalogError(Kind kind, std::string location, const std::string& what)
      : Error(what), kind_(kind), location_(std::move(location)) {}
  Kind kind() const noexcept { return kind_; }
  // JSON path for ParseError/InvalidCase, case id otherwise.
  const std::string& location() const noexcept { return location_; }

 private:
  Kind kind_;
  std::string location_;
};

// ---------------------------------------------------------------------------
// Catalog loading.

namespace catalog_detail {

using Kind = CatalogError::Kind;

[[noreturn]] inline void fail(const std::string& where, const std::string& msg) {
  throw CatalogError(Kind::ParseError, where, where + ": " + msg);
}

inline const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

inline double number_at(const Json& j, const char* key, const std::string& where) {
  return number(member(j, key, where), where + "/" + key);
}

inline double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  return number(j[key], where + "/" + key);
}

inline std::string string_at(const Json& j, const char* key, const std::string& where) {
  const auto& v = member(j, key, where);
  if (!v.is_string()) fail(where + "/" + key, "expected a string");
  return v.get<std::string>();
}

inline std::string string_or(const Json& j, const char* key, std::string fallback, const std::string& where) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_string()) fail(where + "/" + key, "expected a string");
  return j[key].get<std::string>();
}

inline bool bool_or(const Json& j, const char* key, bool fallback, const std::string& where) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_boolean()) fail(where + "/" + key, "expected a boolean");
  return j[key].get<bool>();
}

inline const Json& array_at(const Json& j, const char* key, const std::string& where) {
  const auto& v = member(j, key, where);
  if (!v.is_array()) fail(where + "/" + key, "expected an array");
  return v;
}

// A number (same every hour) or an array of 24 numbers.
inline std::array<double, 24> hourly_values(const Json& j, const std::string& where) {
  std::array<double, 24> out{};
  if (j.is_number()) {
    out.fill(j.get<double>());
    return out;
  }
  if (!j.is_array() || j.size() != 24) fail(where, "expected a number or an array of 24 numbers");
  for (std::size_t h = 0; h < 24; ++h) out[h] = number(j[h], where + "/" + std::to_string(h));
  return out;
}

inline std::vector<std::size_t> hour_list(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of hours");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer() || j[i].get<long long>() < 0 || j[i].get<long long>() > 23)
      fail(where + "/" + std::to_string(i), "expected an hour of day 0..23");
    out.push_back(j[i].get<std::size_t>());
  }
  return out;
}

inline Layer parse_layer(const Json& j, const std::string& w) {
  Layer l;
  l.thickness = number_at(j, "thickness", w);
  l.conductivity = number_at(j, "conductivity", w);
  l.density = number_or(j, "density", 0.0, w);
  l.specific_heat = number_or(j, "specific_heat", 0.0, w);
  return l;
}

inline Construction parse_construction(const Json& j, const std::string& w) {
  Construction c;
  const auto& layers = array_at(j, "layers", w);
  for (std::size_t i = 0; i < layers.size(); ++i)
    c.layers.push_back(parse_layer(layers[i], w + "/layers/" + std::to_string(i)));
  c.exterior_solar_absorptance = number_or(j, "exterior_solar_absorptance", 0.6, w);
  c.interior_solar_absorptance = number_or(j, "interior_solar_absorptance", 0.6, w);
  return c;
}

inline Glazing parse_glazing(const Json& j, const std::string& w) {
  Glazing g;
  g.normal_transmittance = number_or(j, "normal_transmittance", g.normal_transmittance, w);
  if (j.contains("angular_coefficients")) {
    const auto& a = j["angular_coefficients"];
    if (!a.is_array() || a.empty()) fail(w + "/angular_coefficients", "expected a non-empty array");
    g.angular_coefficients.clear();
    for (std::size_t i = 0; i < a.size(); ++i)
      g.angular_coefficients.push_back(number(a[i], w + "/angular_coefficients/" + std::to_string(i)));
  }
  if (j.contains("diffuse_transmittance") && !j["diffuse_transmittance"].is_null())
    g.diffuse_transmittance = number(j["diffuse_transmittance"], w + "/diffuse_transmittance");
  g.u_value = number_or(j, "u_value", g.u_value, w);
  return g;
}

template <typename T, typename Parse>
T named_or_inline(const Json& j, const std::map<std::string, T>& named, const std::string& w, Parse parse) {
  if (j.is_string()) {
    auto it = named.find(j.get<std::string>());
    if (it == named.end()) fail(w, "unknown name '" + j.get<std::string>() + "'");
    return it->second;
  }
  return parse(j, w);
}

inline ShadingDevice parse_device(const Json& j, const std::string& w) {
  ShadingDevice d;
  const auto kind = string_at(j, "kind", w);
  if (kind == "overhang") d.kind = ShadingKind::Overhang;
  else if (kind == "wingwall") d.kind = ShadingKind::Wingwall;
  else fail(w + "/kind", "expected 'overhang' or 'wingwall'");
  d.depth = number_at(j, "depth", w);
  d.gap = number_or(j, "gap", 0.0, w);
  d.extension = number_or(j, "extension", std::numeric_limits<double>::infinity(), w);
  const auto side = string_or(j, "side", "left", w);
  if (side == "left") d.side = WingwallSide::Left;
  else if (side == "right") d.side = WingwallSide::Right;
  else fail(w + "/side", "expected 'left' or 'right'");
  d.diffuse_block = number_or(j, "diffuse_block", 0.0, w);
  return d;
}

struct Library {
  std::map<std::string, Construction> constructions;
  std::map<std::string, Glazing> glazings;
};

inline ZoneModel parse_zone(const Json& j, const Library& lib, const std::string& w) {
  ZoneModel z;
  z.volume = number_at(j, "volume", w);
  if (j.contains("air_capacitance") && !j["air_capacitance"].is_null())
    z.air_capacitance = number(j["air_capacitance"], w + "/air_capacitance");
  z.air_volumetric_heat_capacity = number_or(j, "air_volumetric_heat_capacity", z.air_volumetric_heat_capacity, w);
  if (j.contains("infiltration_ach")) z.infiltration_ach = hourly_values(j["infiltration_ach"], w + "/infiltration_ach");
  z.internal_gains = number_or(j, "internal_gains", 0.0, w);
  z.convective_fraction = number_or(j, "convective_fraction", z.convective_fraction, w);
  z.floor_beam_fraction = number_or(j, "floor_beam_fraction", 0.0, w);
  if (j.contains("initial_temperature") && !j["initial_temperature"].is_null())
    z.initial_temperature = number(j["initial_temperature"], w + "/initial_temperature");

  if (j.contains("thermostat")) {
    const auto& t = j["thermostat"];
    const std::string tw = w + "/thermostat";
    auto& th = z.thermostat;
    th.heat_setpoint = number_or(t, "heat_setpoint", th.heat_setpoint, tw);
    th.cool_setpoint = number_or(t, "cool_setpoint", th.cool_setpoint, tw);
    th.heating_enabled = bool_or(t, "heating_enabled", true, tw);
    th.cooling_enabled = bool_or(t, "cooling_enabled", true, tw);
    if (t.contains("cooling_hours")) {
      th.cooling_hours.fill(false);
      for (auto h : hour_list(t["cooling_hours"], tw + "/cooling_hours")) th.cooling_hours[h] = true;
    }
    if (t.contains("venting") && !t["venting"].is_null()) {
      const auto& v = t["venting"];
      const std::string vw = tw + "/venting";
      std::array<double, 24> sched{};
      const double ach = number_at(v, "ach", vw);
      for (auto h : hour_list(member(v, "hours", vw), vw + "/hours")) sched[h] = ach;
      th.venting_schedule = sched;
    }
  }

  const auto& surfaces = array_at(j, "surfaces", w);
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const auto& s = surfaces[i];
    const std::string sw = w + "/surfaces/" + std::to_string(i);
    ZoneSurface zs;
    zs.name = string_or(s, "name", "surface" + std::to_string(i), sw);
    zs.geometry.area = number_at(s, "area", sw);
    zs.geometry.azimuth = number_or(s, "azimuth", 0.0, sw);
    zs.geometry.tilt = number_or(s, "tilt", 90.0, sw);
    zs.construction = named_or_inline(member(s, "construction", sw), lib.constructions, sw + "/construction",
                                      parse_construction);
    zs.construction.exterior_solar_absorptance =
        number_or(s, "exterior_solar_absorptance", zs.construction.exterior_solar_absorptance, sw);
    zs.construction.interior_solar_absorptance =
        number_or(s, "interior_solar_absorptance", zs.construction.interior_solar_absorptance, sw);
    zs.interior_film = number_or(s, "interior_film", zs.interior_film, sw);
    zs.exterior_film = number_or(s, "exterior_film", zs.exterior_film, sw);
    const auto role = string_or(s, "role", "wall", sw);
    if (role == "wall") zs.role = SurfaceRole::Wall;
    else if (role == "roof") zs.role = SurfaceRole::Roof;
    else if (role == "floor") zs.role = SurfaceRole::Floor;
    else fail(sw + "/role", "expected 'wall', 'roof' or 'floor'");
    const auto boundary = string_or(s, "boundary", "outdoor", sw);
    if (boundary == "outdoor") zs.boundary = ExteriorBoundary::Outdoor;
    else if (boundary == "ground") zs.boundary = ExteriorBoundary::Ground;
    else if (boundary == "adiabatic") zs.boundary = ExteriorBoundary::Adiabatic;
    else fail(sw + "/boundary", "expected 'outdoor', 'ground' or 'adiabatic'");
    zs.ground_temperature = number_or(s, "ground_temperature", zs.ground_temperature, sw);
    z.surfaces.push_back(std::move(zs));
  }

  if (j.contains("windows")) {
    const auto& windows = array_at(j, "windows", w);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const auto& s = windows[i];
      const std::string ww = w + "/windows/" + std::to_string(i);
      ZoneWindow win;
      win.name = string_or(s, "name", "window" + std::to_string(i), ww);
      win.glazing = named_or_inline(member(s, "glazing", ww), lib.glazings, ww + "/glazing", parse_glazing);
      win.width = number_at(s, "width", ww);
      win.height = number_at(s, "height", ww);
      win.glazing.area = number_or(s, "area", win.width * win.height, ww);
      win.geometry.area = win.glazing.area;
      win.geometry.azimuth = number_or(s, "azimuth", 180.0, ww);
      win.geometry.tilt = number_or(s, "tilt", 90.0, ww);
      win.interior_absorptance = number_or(s, "interior_absorptance", 0.0, ww);
      if (s.contains("devices")) {
        const auto& devs = array_at(s, "devices", ww);
        for (std::size_t d = 0; d < devs.size(); ++d)
          win.devices.push_back(parse_device(devs[d], ww + "/devices/" + std::to_string(d)));
      }
      z.windows.push_back(std::move(win));
    }
  }
  return z;
}

inline std::optional<Bounds> parse_bounds(const Json& j, const char* lo, const char* hi, const std::string& w) {
  const bool has_lo = j.contains(lo) && !j[lo].is_null();
  const bool has_hi = j.contains(hi) && !j[hi].is_null();
  if (!has_lo && !has_hi) return std::nullopt;
  if (has_lo != has_hi) fail(w, std::string("both '") + lo + "' and '" + hi + "' are required");
  return Bounds{number(j[lo], w + "/" + lo), number(j[hi], w + "/" + hi)};
}

}  // namespace catalog_detail

inline Catalog load_catalog(std::string_view text) {
  using namespace catalog_detail;
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw CatalogError(Kind::ParseError, "byte " + std::to_string(e.byte), std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("", "catalog must be a JSON object");

  Catalog cat;
  cat.provenance = string_or(doc, "provenance", "unspecified", "");

  Library lib;
  if (doc.contains("constructions")) {
    const auto& cs = doc["constructions"];
    if (!cs.is_object()) fail("/constructions", "expected an object");
    for (auto it = cs.begin(); it != cs.end(); ++it)
      lib.constructions[it.key()] = parse_construction(it.value(), "/constructions/" + it.key());
  }
  if (doc.contains("glazings")) {
    const auto& gs = doc["glazings"];
    if (!gs.is_object()) fail("/glazings", "expected an object");
    for (auto it = gs.begin(); it != gs.end(); ++it)
      lib.glazings[it.key()] = parse_glazing(it.value(), "/glazings/" + it.key());
  }

  const auto& cases = array_at(doc, "cases", "");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const std::string w = "/cases/" + std::to_string(i);
    CaseDefinition def;
    def.id = string_at(c, "id", w);
    if (!ids.insert(def.id).second)
      throw CatalogError(Kind::DuplicateCase, def.id, "duplicate case id '" + def.id + "'");
    def.description = string_or(c, "description", "", w);
    const auto model = string_or(c, "default_model", "two_node", w);
    auto m = parse_model(model);
    if (!m) fail(w + "/default_model", "expected 'two_node' or 'discretized'");
    def.default_model = *m;
    if (c.contains("diagnostic_tags")) {
      const auto& tags = array_at(c, "diagnostic_tags", w);
      for (std::size_t t = 0; t < tags.size(); ++t) {
        if (!tags[t].is_string()) fail(w + "/diagnostic_tags/" + std::to_string(t), "expected a string");
        def.diagnostic_tags.push_back(tags[t].get<std::string>());
      }
    }
    def.zone = parse_zone(member(c, "zone", w), lib, w + "/zone");
    try {
      def.zone.validate();
    } catch (const InvalidParameter& e) {
      throw CatalogError(Kind::InvalidCase, w, "case '" + def.id + "': " + e.what());
    }
    cat.cases.push_back(std::move(def));
  }

  if (doc.contains("ranges")) {
    const auto& ranges = array_at(doc, "ranges", "");
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      const auto& r = ranges[i];
      const std::string w = "/ranges/" + std::to_string(i);
      ReferenceRange rr;
      rr.case_id = string_at(r, "case_id", w);
      rr.heating = parse_bounds(r, "heating_min", "heating_max", w);
      rr.cooling = parse_bounds(r, "cooling_min", "cooling_max", w);
      if (r.contains("per_program")) {
        const auto& pp = array_at(r, "per_program", w);
        for (std::size_t p = 0; p < pp.size(); ++p) {
          const std::string pw = w + "/per_program/" + std::to_string(p);
          rr.per_program.push_back(
              {string_at(pp[p], "program", pw), number_at(pp[p], "heating", pw), number_at(pp[p], "cooling", pw)});
        }
      }
      if (!ids.count(rr.case_id))
        throw CatalogError(Kind::UnknownCaseRef, rr.case_id, "range refers to unknown case '" + rr.case_id + "'");
      for (const auto* b : {&rr.heating, &rr.cooling})
        if (*b && !((*b)->min <= (*b)->max))
          throw CatalogError(Kind::InvalidRange, rr.case_id, "range for case '" + rr.case_id + "' has min > max");
      // A stored envelope must be exactly the extremes of the listed programs.
      if (!rr.per_program.empty()) {
        auto check = [&](const std::optional<Bounds>& b, auto field) {
          if (!b) return;
          double lo = std::numeric_limits<double>::infinity(), hi = -lo;
          for (const auto& p : rr.per_program) {
            lo = std::min(lo, p.*field);
            hi = std::max(hi, p.*field);
          }
          if (lo != b->min || hi != b->max)
            throw CatalogError(Kind::InvalidRange, rr.case_id,
                               "range for case '" + rr.case_id + "' does not match its per-program extremes");
        };
        check(rr.heating, &ProgramResult::heating);
        check(rr.cooling, &ProgramResult::cooling);
      }
      if (cat.find_range(rr.case_id))
        throw CatalogError(Kind::InvalidRange, rr.case_id, "more than one range for case '" + rr.case_id + "'");
      cat.ranges.push_back(std::move(rr));
    }
  }

  if (doc.contains("pairs")) {
    const auto& pairs = array_at(doc, "pairs", "");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& p = pairs[i];
      const std::string w = "/pairs/" + std::to_string(i);
      DiagnosticPair dp;
      dp.case_minuend = string_at(p, "minuend", w);
      dp.case_subtrahend = string_at(p, "subtrahend", w);
      auto q = parse_quantity(string_at(p, "quantity", w));
      if (!q) fail(w + "/quantity", "expected 'heating' or 'cooling'");
      dp.quantity = *q;
      dp.expected_delta_range = parse_bounds(p, "expected_delta_min", "expected_delta_max", w);
      for (const auto& id : {dp.case_minuend, dp.case_subtrahend})
        if (!ids.count(id)) throw CatalogError(Kind::UnknownCaseRef, id, "pair refers to unknown case '" + id + "'");
      if (dp.expected_delta_range && !(dp.expected_delta_range->min <= dp.expected_delta_range->max))
        throw CatalogError(Kind::InvalidRange, dp.case_minuend, "pair expected delta range has min > max");
      cat.pairs.push_back(std::move(dp));
    }
  }
  return cat;
}

// ---------------------------------------------------------------------------
// Verdicts and diagnostics.

struct RangeVerdict {
  enum class Kind { Pass, BelowMin, AboveMax };
  Kind kind = Kind::Pass;
  double margin = 0.0;  // MWh to the violated bound; 0 for Pass

  bool pass() const { return kind == Kind::Pass; }
  friend bool operator==(const RangeVerdict&, const RangeVerdict&) = default;
};

inline const char* to_string(RangeVerdict::Kind k) {
  switch (k) {
    case RangeVerdict::Kind::Pass: return "pass";
    case RangeVerdict::Kind::BelowMin: return "below_min";
    case RangeVerdict::Kind::AboveMax: return "above_max";
  }
  return "?";
}

inline RangeVerdict check_range(double value, const Bounds& range) {
  if (value < range.min) return {RangeVerdict::Kind::BelowMin, range.min - value};
  if (value > range.max) return {RangeVerdict::Kind::AboveMax, value - range.max};
  return {};
}

inline double annual(const SimulationResult& r, Quantity q) {
  return q == Quantity::Heating ? r.annual_heating : r.annual_cooling;
}

// Signed a - b of the chosen annual quantity, MWh.
inline double delta_diagnostic(const SimulationResult& a, const SimulationResult& b, Quantity q) {
  return annual(a, q) - annual(b, q);
}

// ---------------------------------------------------------------------------
// Suite.

struct CaseReport {
  std::string id;
  std::string description;
  ConductionModel model = ConductionModel::TwoNode;
  std::string error;  // empty when the case ran
  SimulationResult result;
  std::optional<RangeVerdict> heating_verdict;
  std::optional<RangeVerdict> cooling_verdict;

  bool ok() const { return error.empty(); }
  bool pass() const {
    return ok() && (!heating_verdict || heating_verdict->pass()) && (!cooling_verdict || cooling_verdict->pass());
  }
  friend bool operator==(const CaseReport&, const CaseReport&) = default;
};

struct PairReport {
  std::string case_minuend;
  std::string case_subtrahend;
  Quantity quantity = Quantity::Heating;
  std::optional<double> delta;  // absent when either case failed
  std::optional<Bounds> expected_delta_range;

  bool pass() const {
    if (!expected_delta_range) return true;
    return delta && *delta >= expected_delta_range->min && *delta <= expected_delta_range->max;
  }
  friend bool operator==(const PairReport&, const PairReport&) = default;
};

struct SuiteReport {
  std::string tool = "bestest";
  std::string version = BESTEST_VERSION;
  std::string provenance;
  std::string generated_at;
  std::optional<ConductionModel> model_override;
  std::vector<CaseReport> cases;
  std::vector<PairReport> pairs;
  bool overall_pass = true;

  friend bool operator==(const SuiteReport&, const SuiteReport&) = default;
};

struct SuiteOptions {
  std::optional<ConductionModel> model_override;
  // Subset of case ids to run, in catalog order; empty runs every case.
  std::vector<std::string> only;
  unsigned jobs = 0;  // 0 = hardware concurrency
  SimulationOptions simulation;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline SuiteReport run_suite(const Catalog& catalog, const WeatherSeries& weather, const SuiteOptions& opts = {}) {
  std::vector<const CaseDefinition*> todo;
  for (const auto& c : catalog.cases)
    if (opts.only.empty() || std::find(opts.only.begin(), opts.only.end(), c.id) != opts.only.end())
      todo.push_back(&c);
  for (const auto& id : opts.only)
    if (!catalog.find_case(id)) throw CatalogError(CatalogError::Kind::UnknownCaseRef, id, "unknown case '" + id + "'");

  SuiteReport report;
  report.provenance = catalog.provenance;
  report.generated_at = utc_timestamp();
  report.model_override = opts.model_override;
  report.cases.resize(todo.size());

  auto run_one = [&](std::size_t i) {
    const auto& def = *todo[i];
    auto& cr = report.cases[i];
    cr.id = def.id;
    cr.description = def.description;
    cr.model = opts.model_override.value_or(def.default_model);
    try {
      SimulationOptions so = opts.simulation;
      so.model = cr.model;
      cr.result = simulate_annual(def.zone, weather, so);
      if (const auto* range = catalog.find_range(def.id)) {
        if (range->heating) cr.heating_verdict = check_range(cr.result.annual_heating, *range->heating);
        if (range->cooling) cr.cooling_verdict = check_range(cr.result.annual_cooling, *range->cooling);
      }
    } catch (const std::exception& e) {
      cr.error = e.what();
      cr.result = SimulationResult{};
      cr.result.model = cr.model;
    }
  };

  unsigned jobs = opts.jobs ? opts.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(todo.size(), 1)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < todo.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) run_one(i);
      });
    for (auto& th : pool) th.join();
  }

  auto find = [&](const std::string& id) -> const CaseReport* {
    for (const auto& c : report.cases)
      if (c.id == id) return &c;
    return nullptr;
  };
  for (const auto& p : catalog.pairs) {
    const auto* a = find(p.case_minuend);
    const auto* b = find(p.case_subtrahend);
    if (!a || !b) continue;  // pair not part of this run
    PairReport pr{p.case_minuend, p.case_subtrahend, p.quantity, std::nullopt, p.expected_delta_range};
    if (a->ok() && b->ok()) pr.delta = delta_diagnostic(a->result, b->result, p.quantity);
    report.pairs.push_back(std::move(pr));
  }

  report.overall_pass = true;
  for (const auto& c : report.cases) report.overall_pass = report.overall_pass && c.pass();
  for (const auto& p : report.pairs) report.overall_pass = report.overall_pass && p.pass();
  return report;
}

// ---------------------------------------------------------------------------
// Reports.

enum class ReportFormat { Json, Csv };

struct EmitOptions {
  bool include_hourly = true;  // JSON only
};

namespace report_detail {

inline Json verdict_json(const std::optional<RangeVerdict>& v) {
  if (!v) return nullptr;
  Json j;
  j["verdict"] = to_string(v->kind);
  j["margin_mwh"] = v->margin;
  return j;
}

inline std::optional<RangeVerdict> verdict_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  const auto s = j.at("verdict").get<std::string>();
  RangeVerdict v;
  if (s == "pass") v.kind = RangeVerdict::Kind::Pass;
  else if (s == "below_min") v.kind = RangeVerdict::Kind::BelowMin;
  else if (s == "above_max") v.kind = RangeVerdict::Kind::AboveMax;
  else throw CatalogError(CatalogError::Kind::ParseError, "verdict", "unknown verdict '" + s + "'");
  v.margin = j.at("margin_mwh").get<double>();
  return v;
}

inline Json bounds_json(const std::optional<Bounds>& b) {
  if (!b) return nullptr;
  Json j;
  j["min"] = b->min;
  j["max"] = b->max;
  return j;
}

inline std::optional<Bounds> bounds_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return Bounds{j.at("min").get<double>(), j.at("max").get<double>()};
}

// Six significant digits.
inline std::string sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

}  // namespace report_detail

inline Json report_to_json(const SuiteReport& r, const EmitOptions& opts = {}) {
  using namespace report_detail;
  Json j;
  j["tool"] = r.tool;
  j["version"] = r.version;
  j["provenance"] = r.provenance;
  j["generated_at"] = r.generated_at;
  j["model_override"] = r.model_override ? Json(to_string(*r.model_override)) : Json(nullptr);
  j["overall_pass"] = r.overall_pass;
  j["cases"] = Json::array();
  for (const auto& c : r.cases) {
    Json cj;
    cj["id"] = c.id;
    cj["description"] = c.description;
    cj["model"] = to_string(c.model);
    cj["status"] = c.ok() ? "ok" : "error";
    cj["error"] = c.ok() ? Json(nullptr) : Json(c.error);
    cj["annual_heating_mwh"] = c.result.annual_heating;
    cj["annual_cooling_mwh"] = c.result.annual_cooling;
    cj["heating"] = verdict_json(c.heating_verdict);
    cj["cooling"] = verdict_json(c.cooling_verdict);
    if (opts.include_hourly) {
      Json h;
      h["air_temperature_c"] = c.result.air_temperature;
      h["heating_w"] = c.result.heating;
      h["cooling_w"] = c.result.cooling;
      cj["hourly"] = std::move(h);
    }
    j["cases"].push_back(std::move(cj));
  }
  j["pairs"] = Json::array();
  for (const auto& p : r.pairs) {
    Json pj;
    pj["minuend"] = p.case_minuend;
    pj["subtrahend"] = p.case_subtrahend;
    pj["quantity"] = to_string(p.quantity);
    pj["delta_mwh"] = p.delta ? Json(*p.delta) : Json(nullptr);
    pj["expected_delta_range"] = bounds_json(p.expected_delta_range);
    pj["pass"] = p.pass();
    j["pairs"].push_back(std::move(pj));
  }
  return j;
}

inline SuiteReport report_from_json(const Json& j) {
  using namespace report_detail;
  SuiteReport r;
  try {
    r.tool = j.at("tool").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.provenance = j.at("provenance").get<std::string>();
    r.generated_at = j.at("generated_at").get<std::string>();
    if (!j.at("model_override").is_null()) r.model_override = parse_model(j["model_override"].get<std::string>());
    r.overall_pass = j.at("overall_pass").get<bool>();
    for (const auto& cj : j.at("cases")) {
      CaseReport c;
      c.id = cj.at("id").get<std::string>();
      c.description = cj.at("description").get<std::string>();
      c.model = parse_model(cj.at("model").get<std::string>()).value_or(ConductionModel::TwoNode);
      if (!cj.at("error").is_null()) c.error = cj["error"].get<std::string>();
      c.result.model = c.model;
      c.result.annual_heating = cj.at("annual_heating_mwh").get<double>();
      c.result.annual_cooling = cj.at("annual_cooling_mwh").get<double>();
      c.heating_verdict = verdict_from(cj.at("heating"));
      c.cooling_verdict = verdict_from(cj.at("cooling"));
      if (cj.contains("hourly")) {
        const auto& h = cj["hourly"];
        c.result.air_temperature = h.at("air_temperature_c").get<std::vector<double>>();
        c.result.heating = h.at("heating_w").get<std::vector<double>>();
        c.result.cooling = h.at("cooling_w").get<std::vector<double>>();
      }
      r.cases.push_back(std::move(c));
    }
    for (const auto& pj : j.at("pairs")) {
      PairReport p;
      p.case_minuend = pj.at("minuend").get<std::string>();
      p.case_subtrahend = pj.at("subtrahend").get<std::string>();
      p.quantity = parse_quantity(pj.at("quantity").get<std::string>()).value_or(Quantity::Heating);
      if (!pj.at("delta_mwh").is_null()) p.delta = pj["delta_mwh"].get<double>();
      p.expected_delta_range = bounds_from(pj.at("expected_delta_range"));
      r.pairs.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError(CatalogError::Kind::ParseError, "report", std::string("malformed report: ") + e.what());
  }
  return r;
}

inline constexpr const char* kCsvHeader =
    "case_id,model,status,annual_heating_mwh,annual_cooling_mwh,heating_verdict,heating_margin_mwh,"
    "cooling_verdict,cooling_margin_mwh";

inline std::string report_to_csv(const SuiteReport& r) {
  using report_detail::sig6;
  std::string out = std::string(kCsvHeader) + "\n";
  auto verdict = [](const std::optional<RangeVerdict>& v) {
    return v ? std::string(to_string(v->kind)) + "," + sig6(v->margin) : std::string("n/a,");
  };
  for (const auto& c : r.cases) {
    out += c.id + "," + to_string(c.model) + "," + (c.ok() ? "ok" : "error") + ",";
    out += c.ok() ? sig6(c.result.annual_heating) + "," + sig6(c.result.annual_cooling) : std::string(",");
    out += "," + verdict(c.heating_verdict) + "," + verdict(c.cooling_verdict) + "\n";
  }
  return out;
}

inline std::string emit_report(const SuiteReport& r, ReportFormat format, const EmitOptions& opts = {}) {
  if (format == ReportFormat::Csv) return report_to_csv(r);
  return report_to_json(r, opts).dump(2) + "\n";
}

}  // namespace bestest
