// Runs the bundled low-mass base case with both conduction models on a
// synthetic weather year and prints annual loads.

#include <bestest/bestest.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : BESTEST_DATA_DIR "/catalog.json";
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto catalog = bestest::load_catalog(ss.str());
  const auto* base = catalog.find_case("600");
  if (!base) return 1;

  const auto weather = bestest::synth_weather(bestest::Site{}, bestest::SynthWeatherParams{});
  for (auto model : {bestest::ConductionModel::TwoNode, bestest::ConductionModel::Discretized}) {
    bestest::SimulationOptions opts;
    opts.model = model;
    const auto r = bestest::simulate_annual(base->zone, weather, opts);
    std::printf("%-12s heating %.3f MWh  cooling %.3f MWh\n", bestest::to_string(model), r.annual_heating,
                r.annual_cooling);
  }
  return 0;
}
