// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <bestest/bestest.hpp>

#include "fixtures.hpp"
#include "oracles/bounce.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>

namespace {

// Tolerances and budgets, fixed here.
constexpr double kMarginTol = 1e-9;
constexpr double kSteadyRelTol = 1e-9;
constexpr double kModelOrderRatio = 0.5;
constexpr double kViewFactorTol = 1e-12;
constexpr double kConservationRelTol = 1e-9;
constexpr double kBounceTol = 1e-9;
constexpr double kSetpointTol = 1e-6;
constexpr double kLoadRelTol = 1e-6;
constexpr double kMwhRelTol = 1e-9;
constexpr double kSuiteSeconds = 30.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome range_check_regression() {
  const auto& cat = fixtures::bundled_catalog();
  const auto b = bestest::check_range(3.850, *cat.find_range("600")->heating);
  const auto a = bestest::check_range(4.853, *cat.find_range("900")->heating);
  Outcome o;
  o.pass = b.kind == bestest::RangeVerdict::Kind::BelowMin && std::fabs(b.margin - 0.446) <= kMarginTol &&
           a.kind == bestest::RangeVerdict::Kind::AboveMax && std::fabs(a.margin - 2.812) <= kMarginTol;
  char buf[128];
  std::snprintf(buf, sizeof buf, "below_min %.12g, above_max %.12g", b.margin, a.margin);
  o.detail = buf;
  return o;
}

Outcome steady_conduction() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> L(0.005, 0.25), k(0.03, 2.0), rho(10, 2400), cp(500, 1500);
  std::uniform_int_distribution<int> n(1, 5);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    bestest::Construction c;
    for (int j = n(rng); j > 0; --j) c.layers.push_back({L(rng), k(rng), rho(rng), cp(rng)});
    double r = 0.0;
    for (const auto& l : c.layers) r += l.thickness / l.conductivity;
    const double analytic = 10.0 / r;
    const double q[] = {bestest::steady_flux(bestest::two_node_network(c), 10, 0),
                        bestest::steady_flux(bestest::discretized_network(c), 10, 0),
                        bestest::FineGrid(c, 101).steady_flux(10, 0)};
    for (double v : q) worst = std::max(worst, std::fabs(v - analytic) / analytic);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst relative deviation %.2e", worst);
  return {worst <= kSteadyRelTol, buf};
}

double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

Outcome model_order() {
  // 0.2 m dense wall, 10 K exterior step, interior film to fixed air.
  const bestest::Construction c{{{0.2, 1.4, 2000, 900}}, 0.6, 0.6};
  const bestest::WallBoundary bc{[](double t) { return t > 0 ? 10.0 : 0.0; }, [](double) { return 0.0; },
                                 std::numeric_limits<double>::infinity(), 8.0};
  const double horizon = 48 * 3600.0, sample = 600.0;
  bestest::FineGrid grid(c, 101);
  const auto ref = grid.simulate(bc, 0.9 * grid.stable_step(bc.exterior_film, bc.interior_film), horizon, sample);
  const auto two = bestest::network_response(bestest::two_node_network(c), bc, 60, horizon, sample);
  const auto disc = bestest::network_response(bestest::discretized_network(c), bc, 60, horizon, sample);
  const double e2 = rms(two.interior_surface_temperature, ref.interior_surface_temperature);
  const double ed = rms(disc.interior_surface_temperature, ref.interior_surface_temperature);
  char buf[160];
  std::snprintf(buf, sizeof buf, "rms two_node %.4f K, discretized %.4f K, ratio %.3f", e2, ed, ed / e2);
  return {ed < kModelOrderRatio * e2, buf};
}

std::vector<bestest::EnclosureSurface> random_enclosure(std::mt19937_64& rng, bool with_window) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(2, 10);
  std::vector<bestest::EnclosureSurface> s(static_cast<std::size_t>(count(rng)));
  for (auto& x : s) {
    x.area = 0.1 + 40 * u(rng);
    x.solar_absorptance = 0.01 + 0.98 * u(rng);
  }
  if (with_window) s.back().back_loss_transmittance = (1.0 - s.back().solar_absorptance) * u(rng);
  return s;
}

Outcome view_factors() {
  std::mt19937_64 rng(77);
  double worst_row = 0, worst_recip = 0, min_entry = 1;
  for (int t = 0; t < 100; ++t) {
    const auto s = random_enclosure(rng, false);
    const auto F = bestest::view_factor_matrix(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      double row = 0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        row += F(i, j);
        min_entry = std::min(min_entry, F(i, j));
        worst_recip = std::max(worst_recip, std::fabs(s[i].area * F(i, j) - s[j].area * F(j, i)));
      }
      worst_row = std::max(worst_row, std::fabs(row - 1.0));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "row %.2e, reciprocity %.2e, min entry %.3g", worst_row, worst_recip, min_entry);
  return {worst_row <= kViewFactorTol && worst_recip <= kViewFactorTol && min_entry >= 0.0, buf};
}

Outcome solar_distribution() {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_cons = 0, worst_oracle = 0;
  for (int t = 0; t < 100; ++t) {
    const auto s = random_enclosure(rng, true);
    std::vector<double> w(s.size());
    double sum = 0;
    for (auto& v : w) sum += (v = u(rng));
    for (auto& v : w) v /= sum;
    const double q = 1 + 999 * u(rng);
    const auto r = bestest::distribute_interior_solar(q, s, bestest::view_factor_matrix(s), w);
    worst_cons = std::max(worst_cons, std::fabs(r.total_absorbed() + r.lost_out - q) / q);
    const auto o = oracle::bounce_sum(q, s, w);
    for (std::size_t i = 0; i < s.size(); ++i) worst_oracle = std::max(worst_oracle, std::fabs(r.absorbed[i] - o.absorbed[i]));
    worst_oracle = std::max(worst_oracle, std::fabs(r.lost_out - o.lost_out));
  }
  // Every opaque absorptance from 0.1 to 0.9 with a window present.
  bool increasing = true;
  double previous = -1;
  for (int step = 1; step <= 9; ++step) {
    const double a = 0.1 * step;
    const std::vector<bestest::EnclosureSurface> s{{21.6, a}, {16.2, a}, {15.6, a}, {16.2, a}, {48, a}, {48, a},
                                                    {12, 0.0, 0.7}};
    const auto r = bestest::distribute_interior_solar(1000, s, bestest::view_factor_matrix(s),
                                                      bestest::default_initial_weights(s));
    increasing = increasing && r.total_absorbed() > previous;
    previous = r.total_absorbed();
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "conservation %.2e, oracle %.2e, absorbed increasing %s", worst_cons, worst_oracle,
                increasing ? "yes" : "no");
  return {worst_cons <= kConservationRelTol && worst_oracle <= kBounceTol && increasing, buf};
}

Outcome thermostat_contract() {
  const auto& cat = fixtures::bundled_catalog();
  const auto& w = fixtures::synthetic_year();
  const auto& z600 = cat.find_case("600")->zone;
  const auto r = bestest::simulate_annual(z600, w);
  std::size_t bad = 0;
  for (std::size_t h = 0; h < r.heating.size(); ++h) {
    if (r.heating[h] > 0 && std::fabs(r.air_temperature[h] - z600.thermostat.heat_setpoint) > kSetpointTol) ++bad;
    if (r.cooling[h] > 0 && std::fabs(r.air_temperature[h] - z600.thermostat.cool_setpoint) > kSetpointTol) ++bad;
    if (r.heating[h] * r.cooling[h] != 0.0) ++bad;
  }
  const auto r650 = bestest::simulate_annual(cat.find_case("650")->zone, w);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu violating hours, case 650 annual heating %.17g MWh", bad, r650.annual_heating);
  return {bad == 0 && r650.annual_heating == 0.0 && z600.thermostat.heat_setpoint == 20.0 &&
              z600.thermostat.cool_setpoint == 27.0,
          buf};
}

Outcome steady_load() {
  const double ach = 0.5;
  auto z = fixtures::box_zone(fixtures::massless_insulation());
  z.infiltration_ach.fill(ach);
  const bestest::ZoneSimulator sim(z, bestest::ConductionModel::TwoNode);
  const auto w = fixtures::constant_weather(0.0, 365);
  const auto r = sim.run(w, {});
  // Hand balance from the inputs, not from the simulator.
  const double r_path = 1 / 29.3 + 0.066 / 0.04 + 1 / 8.29;
  const double ua = (2 * (8 * 2.7 + 6 * 2.7) + 2 * 48) / r_path;
  const double inf = 1.2 * 1005 * z.volume * ach / 3600;
  const double load = (ua + inf) * 20.0;
  double worst = 0;
  for (double q : r.heating) worst = std::max(worst, std::fabs(q - load) / load);
  double joules = 0;
  for (double q : r.heating) joules += q * 3600;
  const double mwh_err = std::fabs(r.annual_heating - joules / 3.6e9) / r.annual_heating;
  char buf[160];
  std::snprintf(buf, sizeof buf, "load %.6f W vs %.6f W, worst rel %.2e, MWh rel %.2e", r.heating.back(), load, worst,
                mwh_err);
  return {worst <= kLoadRelTol && mwh_err <= kMwhRelTol, buf};
}

Outcome suite_determinism() {
  const auto& cat = fixtures::bundled_catalog();
  const auto& w = fixtures::synthetic_year();
  auto run_both = [&](unsigned jobs) {
    std::string bytes;
    for (auto m : {bestest::ConductionModel::TwoNode, bestest::ConductionModel::Discretized}) {
      bestest::SuiteOptions o;
      o.jobs = jobs;
      o.model_override = m;
      auto r = bestest::run_suite(cat, w, o);
      r.generated_at.clear();
      bytes += bestest::emit_report(r, bestest::ReportFormat::Json);
      bytes += bestest::emit_report(r, bestest::ReportFormat::Csv);
    }
    return bytes;
  };
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = run_both(0);
  const double elapsed = seconds_since(t0);
  const auto b = run_both(0);
  const auto c = run_both(1);
  const auto d = run_both(4);
  const bool same = a == b && a == c && a == d;
  char buf[160];
  std::snprintf(buf, sizeof buf, "18 annual runs in %.2f s, reports identical across runs and jobs 1/4/all: %s",
                elapsed, same ? "yes" : "no");
  return {same && elapsed < kSuiteSeconds, buf};
}

Outcome supplied_catalog() {
  // Stand-in for a user-transcribed catalog: own provenance, ranges, pairs.
  const auto text = fixtures::tiny_catalog(R"([
      {"case_id": "A", "heating_min": 0, "heating_max": 1000, "cooling_min": 0, "cooling_max": 1000,
       "per_program": [{"program": "p1", "heating": 0, "cooling": 0}, {"program": "p2", "heating": 1000, "cooling": 1000}]},
      {"case_id": "B", "heating_min": 500, "heating_max": 600}])",
                                           R"([{"minuend": "A", "subtrahend": "B", "quantity": "heating"}])",
                                           "user-transcribed");
  const auto cat = bestest::load_catalog(text);
  const auto r = bestest::run_suite(cat, fixtures::synthetic_year());
  const auto csv = bestest::report_to_csv(r);
  const bool ok = r.cases.size() == 2 && r.cases[0].pass() && r.cases[1].heating_verdict &&
                  r.cases[1].heating_verdict->kind == bestest::RangeVerdict::Kind::BelowMin && !r.overall_pass &&
                  r.pairs.size() == 1 && r.pairs[0].delta && csv.find("below_min") != std::string::npos;
  return {ok,
          "absolute reference loads are not reproduced with the bundled stand-in inputs; a supplied catalog "
          "yields per-case pass/fail verdicts unchanged"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"range-check regression", range_check_regression},
      {"steady conduction equivalence", steady_conduction},
      {"model-order fidelity", model_order},
      {"view-factor invariants", view_factors},
      {"solar distribution", solar_distribution},
      {"thermostat contract", thermostat_contract},
      {"steady analytic load", steady_load},
      {"suite determinism and runtime", suite_determinism},
      {"supplied-catalog verdicts", supplied_catalog},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
