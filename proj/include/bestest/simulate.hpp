#pragma once

#include <bestest/conduction.hpp>
#include <bestest/enclosure.hpp>
#include <bestest/error.hpp>
#include <bestest/solar.hpp>
#include <bestest/weather.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bestest {

inline constexpr double kJoulesPerMWh = 3.6e9;

enum class SurfaceRole { Wall, Roof, Floor };
enum class ExteriorBoundary { Outdoor, Ground, Adiabatic };

// Opaque envelope element. geometry.area is the net opaque area.
struct ZoneSurface {
  std::string name;
  SurfaceGeometry geometry;
  Construction construction;
  double interior_film = 8.29;  // W/m2K, combined convective + longwave
  double exterior_film = 29.3;  // W/m2K
  SurfaceRole role = SurfaceRole::Wall;
  ExteriorBoundary boundary = ExteriorBoundary::Outdoor;
  double ground_temperature = 10.0;  // degC, used with ExteriorBoundary::Ground
};

struct ZoneWindow {
  std::string name;
  Glazing glazing;
  SurfaceGeometry geometry;  // area must equal glazing.area
  double width = 1.0;        // m, for shading geometry
  double height = 1.0;       // m
  std::vector<ShadingDevice> devices;
  // Share of interior-reflected solar absorbed in the glass; goes to the air.
  double interior_absorptance = 0.0;
};

struct Thermostat {
  double heat_setpoint = 20.0;  // degC
  double cool_setpoint = 27.0;  // degC
  bool heating_enabled = true;
  bool cooling_enabled = true;
  // Hours of day during which cooling is available.
  std::array<bool, 24> cooling_hours = all_hours();
  // Extra air changes per hour added during venting hours.
  std::optional<std::array<double, 24>> venting_schedule;

  static constexpr std::array<bool, 24> all_hours() {
    std::array<bool, 24> a{};
    for (auto& v : a) v = true;
    return a;
  }
  bool cooling_at(std::size_t hour_of_day) const { return cooling_enabled && cooling_hours[hour_of_day % 24]; }
  double venting_at(std::size_t hour_of_day) const {
    return venting_schedule ? (*venting_schedule)[hour_of_day % 24] : 0.0;
  }
};

struct ZoneModel {
  double volume = 129.6;  // m3
  // J/K; defaults to air_volumetric_heat_capacity * volume.
  std::optional<double> air_capacitance;
  double air_volumetric_heat_capacity = 1.2 * 1005.0;  // J/m3K, rho*cp of air
  std::vector<ZoneSurface> surfaces;
  std::vector<ZoneWindow> windows;
  std::array<double, 24> infiltration_ach{};  // per hour of day
  double internal_gains = 0.0;                 // W
  double convective_fraction = 0.4;
  Thermostat thermostat;
  // Share of transmitted beam that lands on the floor before reflecting.
  double floor_beam_fraction = 0.0;
  std::optional<double> initial_temperature;  // degC; default midway between setpoints

  double air_heat_capacity() const { return air_capacitance.value_or(air_volumetric_heat_capacity * volume); }

  void validate() const {
    if (!(volume > 0.0)) throw InvalidParameter("zone volume must be > 0");
    if (!(air_heat_capacity() > 0.0)) throw InvalidParameter("air capacitance must be > 0");
    if (surfaces.empty()) throw InvalidParameter("zone needs at least one surface");
    for (const auto& s : surfaces) {
      s.geometry.validate();
      s.construction.validate();
      if (!(s.interior_film > 0.0)) throw InvalidParameter("interior film must be > 0 on " + s.name);
      if (s.boundary != ExteriorBoundary::Adiabatic && !(s.exterior_film > 0.0))
        throw InvalidParameter("exterior film must be > 0 on " + s.name);
    }
    for (const auto& w : windows) {
      w.glazing.validate();
      w.geometry.validate();
      if (std::fabs(w.geometry.area - w.glazing.area) > 1e-9 * w.glazing.area)
        throw InvalidParameter("window geometry area must equal glazing area on " + w.name);
      for (const auto& d : w.devices) d.validate();
      if (!w.devices.empty() && (w.geometry.tilt != 90.0 || !(w.width > 0.0) || !(w.height > 0.0)))
        throw InvalidParameter("shaded windows must be vertical rectangles: " + w.name);
      if (!(w.interior_absorptance >= 0.0) || w.interior_absorptance + w.glazing.diffuse() > 1.0)
        throw InvalidParameter("window interior absorptance plus diffuse transmittance exceeds 1 on " + w.name);
    }
    for (double a : infiltration_ach)
      if (!(a >= 0.0)) throw InvalidParameter("infiltration ACH must be >= 0");
    if (thermostat.venting_schedule)
      for (double a : *thermostat.venting_schedule)
        if (!(a >= 0.0)) throw InvalidParameter("venting ACH must be >= 0");
    if (!(convective_fraction >= 0.0 && convective_fraction <= 1.0))
      throw InvalidParameter("convective fraction must be in [0,1]");
    if (!(internal_gains >= 0.0)) throw InvalidParameter("internal gains must be >= 0");
    if (thermostat.heating_enabled && thermostat.cooling_enabled &&
        !(thermostat.heat_setpoint < thermostat.cool_setpoint))
      throw InvalidParameter("heating setpoint must be below cooling setpoint");
    if (!(floor_beam_fraction >= 0.0 && floor_beam_fraction <= 1.0))
      throw InvalidParameter("floor beam fraction must be in [0,1]");
  }
};

struct SolarGains {
  std::vector<double> exterior_absorbed;  // W per opaque surface
  TransmittedSolar transmitted;           // W into the zone
};

// Exterior absorption on opaque surfaces (unshaded) and transmission through
// the windows with beam shading applied.
inline SolarGains solar_gains(const ZoneModel& zone, const WeatherRecord& record, const SunPosition& sun,
                              double ground_reflectance) {
  SolarGains g;
  g.exterior_absorbed.assign(zone.surfaces.size(), 0.0);
  for (std::size_t i = 0; i < zone.surfaces.size(); ++i) {
    const auto& s = zone.surfaces[i];
    if (s.boundary != ExteriorBoundary::Outdoor) continue;
    const auto p = plane_irradiance(record, sun, s.geometry, ground_reflectance);
    g.exterior_absorbed[i] = s.construction.exterior_solar_absorptance * p.total() * s.geometry.area;
  }
  for (const auto& w : zone.windows) {
    const auto p = plane_irradiance(record, sun, w.geometry, ground_reflectance);
    const double cos_i = incidence_cosine(sun, w.geometry);
    double unshaded = 1.0;
    if (!w.devices.empty() && p.beam > 0.0) {
      const WindowRect rect{w.width, w.height, w.geometry.azimuth};
      unshaded = 1.0 - shaded_fraction(rect, w.devices, sun);
    }
    const auto t = window_transmission_split(w.glazing, p, unshaded, cos_i, diffuse_unblocked(w.devices));
    g.transmitted.beam += t.beam;
    g.transmitted.diffuse += t.diffuse;
  }
  return g;
}

struct SystemState {
  std::vector<double> temperatures;  // every wall node, then zone air last

  double air() const { return temperatures.back(); }
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

struct StepInputs {
  double outdoor_temperature = 0.0;  // degC
  std::size_t hour_of_day = 0;
  SolarGains solar;
};

struct StepResult {
  SystemState state;
  double heating = 0.0;  // W
  double cooling = 0.0;  // W
};

struct SimulationResult {
  ConductionModel model = ConductionModel::TwoNode;
  std::vector<double> air_temperature;  // degC, end of each hour
  std::vector<double> heating;          // W, hourly mean
  std::vector<double> cooling;          // W, hourly mean
  double annual_heating = 0.0;          // MWh
  double annual_cooling = 0.0;          // MWh

  friend bool operator==(const SimulationResult&, const SimulationResult&) = default;
};

struct SimulationOptions {
  ConductionModel model = ConductionModel::TwoNode;
  int substeps = 1;  // implicit steps per hour
  SolarTimeOptions solar_time;
  double warmup_tolerance = 1e-4;  // K
  int warmup_max_days = 30;
};

// Zone heat balance assembled from the wall networks, stepped with implicit
// Euler. The ideal-loads passes are done by superposition: with the linear
// system A T = b, pinning the air at a setpoint is the free-floating solution
// plus the exact power P that moves the air node there along A^-1 e_air.
class ZoneSimulator {
 public:
  ZoneSimulator(ZoneModel zone, ConductionModel model) : zone_(std::move(zone)), model_(model) {
    zone_.validate();
    assemble();
  }

  const ZoneModel& zone() const { return zone_; }
  ConductionModel model() const { return model_; }
  std::size_t node_count() const { return static_cast<std::size_t>(cap_.size()); }
  std::size_t air_node() const { return node_count() - 1; }

  // Total steady conductance from air to outdoors through the envelope, W/K,
  // excluding infiltration.
  double envelope_ua() const { return envelope_ua_; }
  double infiltration_conductance(double ach) const {
    return zone_.air_volumetric_heat_capacity * zone_.volume * ach / 3600.0;
  }

  SystemState initial_state() const {
    const auto& th = zone_.thermostat;
    const double t0 = zone_.initial_temperature.value_or((th.heat_setpoint + th.cool_setpoint) / 2.0);
    return SystemState{std::vector<double>(node_count(), t0)};
  }

  StepResult step(const SystemState& state, const StepInputs& in, double dt) const {
    if (!(dt > 0.0)) throw InvalidParameter("time step must be > 0");
    if (state.temperatures.size() != node_count()) throw InvalidParameter("state dimension mismatch");
    const std::size_t hod = in.hour_of_day % 24;
    const double ach = zone_.infiltration_ach[hod] + zone_.thermostat.venting_at(hod);
    const Factor& f = factor(ach, dt);

    const auto n = static_cast<Eigen::Index>(node_count());
    const Eigen::Map<const Eigen::VectorXd> told(state.temperatures.data(), n);
    Eigen::VectorXd rhs = (cap_ / dt).cwiseProduct(told) + outdoor_coupling_ * in.outdoor_temperature + fixed_source_;
    rhs(n - 1) += infiltration_conductance(ach) * in.outdoor_temperature;
    add_solar(rhs, in.solar);

    Eigen::VectorXd t = f.llt.solve(rhs);
    StepResult r;
    const auto& th = zone_.thermostat;
    const double air = t(n - 1);
    if (th.heating_enabled && air < th.heat_setpoint) {
      r.heating = (th.heat_setpoint - air) / f.air_response(n - 1);
      t += r.heating * f.air_response;
      t(n - 1) = th.heat_setpoint;
    } else if (th.cooling_at(hod) && air > th.cool_setpoint) {
      r.cooling = (air - th.cool_setpoint) / f.air_response(n - 1);
      t -= r.cooling * f.air_response;
      t(n - 1) = th.cool_setpoint;
    }
    for (Eigen::Index i = 0; i < n; ++i)
      if (!std::isfinite(t(i))) throw SimulationError("non-finite temperature in zone solution");
    r.state.temperatures.assign(t.data(), t.data() + n);
    return r;
  }

  SimulationResult run(const WeatherSeries& weather, const SimulationOptions& opts) const {
    if (opts.substeps < 1) throw InvalidParameter("substeps must be >= 1");
    const std::size_t hours = weather.size();
    const auto& site = weather.site();

    std::vector<SolarGains> day1(24);
    for (std::size_t h = 0; h < 24; ++h)
      day1[h] = solar_gains(zone_, weather[h], sun_position(site, weather[h].hour_index, opts.solar_time),
                            site.ground_reflectance);

    SystemState state = initial_state();
    double dummy_h = 0.0, dummy_c = 0.0;
    for (int rep = 0; rep < opts.warmup_max_days; ++rep) {
      const SystemState start = state;
      for (std::size_t h = 0; h < 24; ++h) {
        const double prev = weather[h == 0 ? 23 : h - 1].dry_bulb;
        state = advance_hour(state, prev, weather[h], h, day1[h], opts.substeps, dummy_h, dummy_c);
      }
      double change = 0.0;
      for (std::size_t i = 0; i < state.temperatures.size(); ++i)
        change = std::max(change, std::fabs(state.temperatures[i] - start.temperatures[i]));
      if (change < opts.warmup_tolerance) break;
    }

    SimulationResult res;
    res.model = model_;
    res.air_temperature.resize(hours);
    res.heating.resize(hours);
    res.cooling.resize(hours);
    for (std::size_t h = 0; h < hours; ++h) {
      const auto& rec = weather[h];
      const SolarGains gains =
          h < 24 ? day1[h]
                 : solar_gains(zone_, rec, sun_position(site, rec.hour_index, opts.solar_time),
                               site.ground_reflectance);
      const double prev = h == 0 ? weather[23].dry_bulb : weather[h - 1].dry_bulb;
      state = advance_hour(state, prev, rec, static_cast<std::size_t>(rec.hour_index % 24), gains, opts.substeps,
                           res.heating[h], res.cooling[h]);
      res.air_temperature[h] = state.air();
    }
    double heat_j = 0.0, cool_j = 0.0;
    for (std::size_t h = 0; h < hours; ++h) {
      heat_j += res.heating[h] * 3600.0;
      cool_j += res.cooling[h] * 3600.0;
    }
    res.annual_heating = heat_j / kJoulesPerMWh;
    res.annual_cooling = cool_j / kJoulesPerMWh;
    return res;
  }

 private:
  struct Factor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd air_response;  // A^-1 e_air
  };

  SystemState advance_hour(const SystemState& state, double prev_outdoor, const WeatherRecord& rec,
                           std::size_t hour_of_day, const SolarGains& gains, int substeps, double& heating,
                           double& cooling) const {
    const double dt = 3600.0 / substeps;
    SystemState s = state;
    double hsum = 0.0, csum = 0.0;
    StepInputs in;
    in.hour_of_day = hour_of_day;
    in.solar = gains;
    for (int k = 1; k <= substeps; ++k) {
      const double f = static_cast<double>(k) / substeps;
      in.outdoor_temperature = (1.0 - f) * prev_outdoor + f * rec.dry_bulb;
      auto r = step(s, in, dt);
      s = std::move(r.state);
      hsum += r.heating;
      csum += r.cooling;
    }
    heating = hsum / substeps;
    cooling = csum / substeps;
    return s;
  }

  void assemble() {
    std::size_t n = 0;
    for (const auto& s : zone_.surfaces) {
      networks_.push_back(build_network(s.construction, model_));
      offsets_.push_back(n);
      n += networks_.back().size();
    }
    const std::size_t air = n++;
    const auto N = static_cast<Eigen::Index>(n);
    cap_ = Eigen::VectorXd::Zero(N);
    base_ = Eigen::MatrixXd::Zero(N, N);
    outdoor_coupling_ = Eigen::VectorXd::Zero(N);
    fixed_source_ = Eigen::VectorXd::Zero(N);

    auto couple = [&](std::size_t a, std::size_t b, double g) {
      base_(a, a) += g;
      base_(b, b) += g;
      base_(a, b) -= g;
      base_(b, a) -= g;
    };

    envelope_ua_ = 0.0;
    for (std::size_t k = 0; k < zone_.surfaces.size(); ++k) {
      const auto& s = zone_.surfaces[k];
      const auto& net = networks_[k];
      const double A = s.geometry.area;
      const std::size_t o = offsets_[k];
      for (std::size_t i = 0; i < net.size(); ++i) cap_(o + i) = net.node_capacitances[i] * A;
      for (const auto& g : net.conductances) couple(o + g.a, o + g.b, g.value * A);
      couple(o + net.interior_node, air, s.interior_film * A);
      const std::size_t ext = o + net.exterior_node;
      switch (s.boundary) {
        case ExteriorBoundary::Outdoor:
          base_(ext, ext) += s.exterior_film * A;
          outdoor_coupling_(ext) += s.exterior_film * A;
          envelope_ua_ += A / (1.0 / s.exterior_film + s.construction.total_resistance() + 1.0 / s.interior_film);
          break;
        case ExteriorBoundary::Ground:
          base_(ext, ext) += s.exterior_film * A;
          fixed_source_(ext) += s.exterior_film * A * s.ground_temperature;
          break;
        case ExteriorBoundary::Adiabatic:
          break;
      }
    }
    for (const auto& w : zone_.windows) {
      const double ua = w.glazing.u_value * w.glazing.area;
      base_(air, air) += ua;
      outdoor_coupling_(air) += ua;
      envelope_ua_ += ua;
    }
    cap_(air) = zone_.air_heat_capacity();
    fixed_source_(air) += zone_.internal_gains * zone_.convective_fraction;

    // Interior enclosure: opaque surfaces first, then windows.
    std::vector<EnclosureSurface> encl;
    std::vector<bool> is_floor;
    for (const auto& s : zone_.surfaces) {
      encl.push_back({s.geometry.area, s.construction.interior_solar_absorptance, 0.0});
      is_floor.push_back(s.role == SurfaceRole::Floor);
    }
    for (const auto& w : zone_.windows) {
      encl.push_back({w.glazing.area, w.interior_absorptance, w.glazing.diffuse()});
      is_floor.push_back(false);
    }
    enclosure_surfaces_ = encl;
    if (encl.size() >= 2) {
      bool any = false;
      for (const auto& e : encl) any = any || e.solar_absorptance > 0.0 || e.back_loss_transmittance > 0.0;
      if (any) {
        const auto F = view_factor_matrix(encl);
        response_.emplace(encl, F);
        diffuse_weights_ = default_initial_weights(encl);
        beam_weights_ = default_initial_weights(encl, is_floor, zone_.floor_beam_fraction);
      }
    }

    // Radiative internal gains spread over opaque interior surfaces by area.
    double opaque_area = 0.0;
    for (const auto& s : zone_.surfaces) opaque_area += s.geometry.area;
    const double radiative = zone_.internal_gains * (1.0 - zone_.convective_fraction);
    for (std::size_t k = 0; k < zone_.surfaces.size(); ++k)
      fixed_source_(offsets_[k] + networks_[k].interior_node) +=
          radiative * zone_.surfaces[k].geometry.area / opaque_area;
  }

  void add_solar(Eigen::VectorXd& rhs, const SolarGains& g) const {
    for (std::size_t k = 0; k < zone_.surfaces.size() && k < g.exterior_absorbed.size(); ++k)
      rhs(static_cast<Eigen::Index>(offsets_[k] + networks_[k].exterior_node)) += g.exterior_absorbed[k];
    const double total = g.transmitted.total();
    if (total <= 0.0) return;
    if (!response_) throw SimulationError("solar enters a zone without an absorbing enclosure");
    std::vector<double> q(enclosure_surfaces_.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = g.transmitted.beam * beam_weights_[i] + g.transmitted.diffuse * diffuse_weights_[i];
    const SolarSplit split = response_->distribute(q);
    const std::size_t ns = zone_.surfaces.size();
    for (std::size_t k = 0; k < ns; ++k)
      rhs(static_cast<Eigen::Index>(offsets_[k] + networks_[k].interior_node)) += split.absorbed[k];
    for (std::size_t k = ns; k < split.absorbed.size(); ++k) rhs(rhs.size() - 1) += split.absorbed[k];
  }

  const Factor& factor(double ach, double dt) const {
    const auto key = std::make_pair(ach, dt);
    auto it = factors_.find(key);
    if (it != factors_.end()) return it->second;
    const auto N = static_cast<Eigen::Index>(node_count());
    Eigen::MatrixXd A = base_;
    A.diagonal() += cap_ / dt;
    A(N - 1, N - 1) += infiltration_conductance(ach);
    Factor f;
    f.llt.compute(A);
    if (f.llt.info() != Eigen::Success) throw SimulationError("zone system matrix is singular");
    f.air_response = f.llt.solve(Eigen::VectorXd::Unit(N, N - 1));
    if (!(f.air_response(N - 1) > 0.0)) throw SimulationError("zone system matrix is singular");
    return factors_.emplace(key, std::move(f)).first->second;
  }

  ZoneModel zone_;
  ConductionModel model_;
  std::vector<RcNetwork> networks_;
  std::vector<std::size_t> offsets_;
  Eigen::VectorXd cap_;
  Eigen::MatrixXd base_;
  Eigen::VectorXd outdoor_coupling_;
  Eigen::VectorXd fixed_source_;
  double envelope_ua_ = 0.0;
  std::vector<EnclosureSurface> enclosure_surfaces_;
  std::optional<EnclosureResponse> response_;
  std::vector<double> beam_weights_;
  std::vector<double> diffuse_weights_;
  // Factorisations per (ACH, dt); a simulator instance is not shared between threads.
  mutable std::map<std::pair<double, double>, Factor> factors_;
};

inline StepResult step(const ZoneSimulator& sim, const SystemState& state, const StepInputs& in, double dt) {
  return sim.step(state, in, dt);
}

// Any whole number of days of weather.
inline SimulationResult simulate(const ZoneModel& zone, const WeatherSeries& weather, SimulationOptions opts = {}) {
  return ZoneSimulator(zone, opts.model).run(weather, opts);
}

inline SimulationResult simulate_annual(const ZoneModel& zone, const WeatherSeries& weather,
                                        SimulationOptions opts = {}) {
  if (!weather.is_annual()) throw InvalidParameter("annual simulation needs exactly 8760 hourly records");
  return simulate(zone, weather, opts);
}

}  // namespace bestest
