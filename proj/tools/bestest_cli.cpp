// bestest: run building test cases against reference envelopes.
//
// Exit codes: 0 all checks passed, 1 ran with failures, 2 usage or input error.

#include <bestest/bestest.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

struct RunArgs {
  std::string catalog;
  std::string weather;
  std::string model;
  std::string out;
  std::string format = "json";
  unsigned jobs = 0;
  bool no_hourly = false;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--catalog", a.catalog, "Case catalog (JSON)")->required();
  cmd->add_option("--weather", a.weather, "Hourly weather CSV (8760 rows)")->required();
  cmd->add_option("--model", a.model, "Override conduction model: two-node | discretized");
  cmd->add_option("--out", a.out, "Output path (default stdout)");
  cmd->add_option("--format", a.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--jobs", a.jobs, "Parallel cases (0 = all cores)");
  cmd->add_flag("--no-hourly", a.no_hourly, "Omit hourly series from JSON output");
}

struct Loaded {
  bestest::Catalog catalog;
  bestest::WeatherSeries weather;
  bestest::SuiteOptions opts;
};

Loaded load(const RunArgs& a) {
  auto catalog = bestest::load_catalog(read_file(a.catalog));
  auto weather = bestest::parse_weather(read_file(a.weather));
  if (!weather.is_annual()) throw UsageError("weather file must contain 8760 hourly records");
  bestest::SuiteOptions opts;
  opts.jobs = a.jobs;
  if (!a.model.empty()) {
    auto m = bestest::parse_model(a.model);
    if (!m) throw UsageError("unknown model '" + a.model + "'");
    opts.model_override = *m;
  }
  return {std::move(catalog), std::move(weather), std::move(opts)};
}

int emit(const bestest::SuiteReport& report, const RunArgs& a) {
  const auto fmt = a.format == "csv" ? bestest::ReportFormat::Csv : bestest::ReportFormat::Json;
  bestest::EmitOptions eo;
  eo.include_hourly = !a.no_hourly;
  write_output(a.out, bestest::emit_report(report, fmt, eo));
  for (const auto& c : report.cases)
    if (!c.ok()) std::cerr << "case " << c.id << " failed: " << c.error << "\n";
  return report.overall_pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Building thermal simulation test-case runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BESTEST_VERSION);

  RunArgs run_args;
  std::string case_id;
  auto* run = app.add_subcommand("run", "Simulate one case and check it against its reference range");
  add_run_options(run, run_args);
  run->add_option("--case", case_id, "Case id")->required();

  RunArgs suite_args;
  auto* suite = app.add_subcommand("suite", "Simulate every case in the catalog");
  add_run_options(suite, suite_args);

  RunArgs diag_args;
  std::string pair, quantity = "heating";
  auto* diag = app.add_subcommand("diag", "Annual load difference between two cases (A minus B)");
  add_run_options(diag, diag_args);
  diag->add_option("--pair", pair, "<idA>:<idB>")->required();
  diag->add_option("--quantity", quantity, "heating | cooling")->check(CLI::IsMember({"heating", "cooling"}));

  bestest::Site site;
  bestest::SynthWeatherParams synth;
  std::string synth_out;
  auto* sw = app.add_subcommand("synth-weather", "Write a deterministic synthetic weather year");
  sw->add_option("--mean", synth.mean_temp, "Annual mean dry bulb, C")->required();
  sw->add_option("--daily-amp", synth.daily_amp, "Daily amplitude, K")->required();
  sw->add_option("--seasonal-amp", synth.seasonal_amp, "Seasonal amplitude, K")->required();
  sw->add_option("--clearness", synth.clearness, "Clear-sky fraction 0..1")->required();
  sw->add_option("--seed", synth.seed, "Seed for the optional perturbation")->required();
  sw->add_option("--perturbation", synth.perturbation, "Std-dev of hourly temperature noise, K (0 = off)");
  sw->add_option("--lat", site.latitude, "Latitude, deg");
  sw->add_option("--lon", site.longitude, "Longitude, deg east");
  sw->add_option("--tz-meridian", site.timezone_meridian, "Time zone meridian, deg");
  sw->add_option("--ground-reflectance", site.ground_reflectance, "Ground reflectance 0..1");
  sw->add_option("--out", synth_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*run) {
      auto l = load(run_args);
      l.opts.only = {case_id};
      return emit(bestest::run_suite(l.catalog, l.weather, l.opts), run_args);
    }
    if (*suite) {
      auto l = load(suite_args);
      return emit(bestest::run_suite(l.catalog, l.weather, l.opts), suite_args);
    }
    if (*diag) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == pair.size())
        throw UsageError("--pair must look like <idA>:<idB>");
      const std::string a = pair.substr(0, colon), b = pair.substr(colon + 1);
      const auto q = *bestest::parse_quantity(quantity);
      auto l = load(diag_args);
      l.opts.only = {a, b};
      const auto report = bestest::run_suite(l.catalog, l.weather, l.opts);
      const bestest::CaseReport* ra = nullptr;
      const bestest::CaseReport* rb = nullptr;
      for (const auto& c : report.cases) {
        if (c.id == a) ra = &c;
        if (c.id == b) rb = &c;
        if (!c.ok()) std::cerr << "case " << c.id << " failed: " << c.error << "\n";
      }
      if (!ra->ok() || !rb->ok()) return kExitFail;
      const double delta = bestest::delta_diagnostic(ra->result, rb->result, q);
      std::optional<bestest::Bounds> expected;
      for (const auto& p : l.catalog.pairs)
        if (p.case_minuend == a && p.case_subtrahend == b && p.quantity == q) expected = p.expected_delta_range;
      const bool pass = !expected || (delta >= expected->min && delta <= expected->max);

      if (diag_args.format == "csv") {
        using bestest::report_detail::sig6;
        write_output(diag_args.out, "minuend,subtrahend,quantity,minuend_mwh,subtrahend_mwh,delta_mwh,pass\n" + a +
                                        "," + b + "," + quantity + "," + sig6(bestest::annual(ra->result, q)) + "," +
                                        sig6(bestest::annual(rb->result, q)) + "," + sig6(delta) + "," +
                                        (pass ? "true" : "false") + "\n");
      } else {
        bestest::Json j;
        j["minuend"] = a;
        j["subtrahend"] = b;
        j["quantity"] = quantity;
        j["minuend_model"] = bestest::to_string(ra->model);
        j["subtrahend_model"] = bestest::to_string(rb->model);
        j["minuend_mwh"] = bestest::annual(ra->result, q);
        j["subtrahend_mwh"] = bestest::annual(rb->result, q);
        j["delta_mwh"] = delta;
        j["expected_delta_range"] = bestest::report_detail::bounds_json(expected);
        j["pass"] = pass;
        write_output(diag_args.out, j.dump(2) + "\n");
      }
      return pass ? kExitPass : kExitFail;
    }
    if (*sw) {
      write_output(synth_out, bestest::serialize_weather(bestest::synth_weather(site, synth)));
      return kExitPass;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const bestest::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
