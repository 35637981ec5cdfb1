#include <bestest/conduction.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using bestest::Construction;
using bestest::Layer;

Construction single(double L, double k, double rho, double cp) { return Construction{{Layer{L, k, rho, cp}}, 0.6, 0.6}; }

Construction heavy_wall() { return single(0.2, 1.4, 2000, 900); }

Construction random_construction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> L(0.005, 0.25), k(0.03, 2.0), rho(10, 2400), cp(500, 1500);
  std::uniform_int_distribution<int> n(1, 5);
  Construction c;
  for (int i = n(rng); i > 0; --i) c.layers.push_back({L(rng), k(rng), rho(rng), cp(rng)});
  return c;
}

double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

TEST(TwoNode, HandArithmetic) {
  const auto net = bestest::two_node_network(single(0.2, 0.5, 1000, 1000));
  ASSERT_EQ(net.size(), 2u);
  EXPECT_DOUBLE_EQ(net.node_capacitances[0], 100000.0);
  EXPECT_DOUBLE_EQ(net.node_capacitances[1], 100000.0);
  ASSERT_EQ(net.conductances.size(), 1u);
  EXPECT_DOUBLE_EQ(net.conductances[0].value, 2.5);
  EXPECT_NEAR(bestest::steady_flux(net, 30, 20), 25.0, 1e-12);
}

TEST(TwoNode, MasslessIsPureResistor) {
  const auto net = bestest::two_node_network(single(0.1, 0.04, 0, 0));
  EXPECT_EQ(net.total_capacitance(), 0.0);
  bestest::WallBoundary bc{[](double t) { return t > 0 ? 10.0 : 0.0; }, [](double) { return 0.0; },
                           std::numeric_limits<double>::infinity(), 4.0};
  // No storage: the interior surface jumps to its steady value immediately.
  const auto r = bestest::network_response(net, bc, 600, 7200);
  const double ua = 1.0 / (0.1 / 0.04 + 1.0 / 4.0);
  EXPECT_NEAR(r.interior_surface_temperature[1], 10.0 * ua / 4.0, 1e-12);
}

TEST(Discretized, NodeCounts) {
  Construction three{{{0.01, 0.14, 530, 900}, {0.06, 0.04, 12, 840}, {0.012, 0.16, 950, 840}}, 0.6, 0.6};
  EXPECT_EQ(bestest::discretized_network(three).size(), 7u);
  EXPECT_EQ(bestest::discretized_network(single(0.1, 1, 1, 1)).size(), 3u);
}

TEST(Discretized, CapacitanceSplit) {
  const auto net = bestest::discretized_network(single(0.2, 0.5, 1000, 1000));
  EXPECT_DOUBLE_EQ(net.node_capacitances[0], 50000.0);
  EXPECT_DOUBLE_EQ(net.node_capacitances[1], 100000.0);
  EXPECT_DOUBLE_EQ(net.node_capacitances[2], 50000.0);
  EXPECT_DOUBLE_EQ(net.conductances[0].value, 5.0);
}

TEST(Networks, AnalyticTotalsProperty) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_construction(rng);
    const double C = c.total_capacitance(), R = c.total_resistance();
    for (const auto& net : {bestest::two_node_network(c), bestest::discretized_network(c)}) {
      EXPECT_NEAR(net.total_capacitance(), C, 1e-12 * C);
      EXPECT_TRUE(net.connected());
      const double q = bestest::steady_flux(net, 1.0, 0.0);
      EXPECT_NEAR(1.0 / q, R, 1e-12 * R);
    }
  }
}

TEST(SteadyFlux, Examples) {
  const auto net = bestest::two_node_network(single(0.4, 1.0, 1000, 1000));
  EXPECT_EQ(bestest::steady_flux(net, 20, 20), 0.0);
  EXPECT_NEAR(bestest::steady_flux(net, 30, 20), 25.0, 1e-12);
  const auto d = bestest::discretized_network(single(0.4, 1.0, 1000, 1000));
  EXPECT_NEAR(bestest::steady_flux(d, 40, 20), 2 * bestest::steady_flux(d, 30, 20), 1e-12);
}

TEST(SteadyFlux, DisconnectedNetworkIsSingular) {
  bestest::RcNetwork net;
  net.node_capacitances = {1, 1, 1};
  net.conductances = {{0, 1, 2.0}};
  net.exterior_node = 0;
  net.interior_node = 2;
  try {
    bestest::steady_flux(net, 1, 0);
    FAIL();
  } catch (const bestest::ConductionError& e) {
    EXPECT_EQ(e.kind(), bestest::ConductionError::Kind::SingularNetwork);
  }
}

TEST(Construction, Validation) {
  EXPECT_THROW(bestest::two_node_network(Construction{}), bestest::InvalidParameter);
  EXPECT_THROW(bestest::two_node_network(single(0, 1, 1, 1)), bestest::InvalidParameter);
  EXPECT_THROW(bestest::two_node_network(single(0.1, -1, 1, 1)), bestest::InvalidParameter);
  auto c = single(0.1, 1, 1, 1);
  c.interior_solar_absorptance = 1.2;
  EXPECT_THROW(bestest::discretized_network(c), bestest::InvalidParameter);
}

TEST(FineGrid, ConstantBoundaryStaysConstant) {
  const bestest::WallBoundary bc{[](double) { return 17.0; }, [](double) { return 17.0; }};
  const auto r = bestest::fine_grid_oracle(heavy_wall(), 21, 10.0, bc, 86400);
  for (double t : r.interior_surface_temperature) EXPECT_EQ(t, 17.0);
}

TEST(FineGrid, StepConvergesToLinearProfile) {
  const auto c = heavy_wall();
  const double h_in = 8.0;
  const bestest::WallBoundary bc{[](double t) { return t > 0 ? 10.0 : 0.0; }, [](double) { return 0.0; },
                                 std::numeric_limits<double>::infinity(), h_in};
  bestest::FineGrid grid(c, 21);
  const double dt = 0.9 * grid.stable_step(bc.exterior_film, bc.interior_film);
  const auto r = grid.simulate(bc, dt, 40 * 86400.0, 86400.0);
  // Steady interior surface temperature: 10 * (1/h) / (R + 1/h).
  const double expected = 10.0 * (1.0 / h_in) / (c.total_resistance() + 1.0 / h_in);
  EXPECT_NEAR(r.interior_surface_temperature.back(), expected, 1e-6);
}

TEST(FineGrid, SteadyFluxMatchesAnalytic) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto c = random_construction(rng);
    bestest::FineGrid g(c, 101);
    EXPECT_NEAR(g.steady_flux(10, 0), 10.0 / c.total_resistance(), 1e-12 * 10.0 / c.total_resistance());
    EXPECT_NEAR(g.total_resistance(), c.total_resistance(), 1e-12 * c.total_resistance());
    double cap = 0;
    for (double v : g.capacitances()) cap += v;
    EXPECT_NEAR(cap, c.total_capacitance(), 1e-9 * c.total_capacitance());
  }
}

TEST(FineGrid, RejectsUnstableStep) {
  bestest::FineGrid g(heavy_wall(), 101);
  const bestest::WallBoundary bc{[](double) { return 0.0; }, [](double) { return 0.0; }};
  const double dt_max = g.stable_step(bc.exterior_film, bc.interior_film);
  // dx^2 / (2 alpha) for a homogeneous wall.
  const double alpha = 1.4 / (2000.0 * 900.0);
  EXPECT_NEAR(dt_max, g.dx() * g.dx() / (2 * alpha), 1e-9 * dt_max);
  try {
    g.simulate(bc, 1.01 * dt_max, 3600);
    FAIL();
  } catch (const bestest::ConductionError& e) {
    EXPECT_EQ(e.kind(), bestest::ConductionError::Kind::UnstableStep);
    EXPECT_DOUBLE_EQ(e.dt_max(), dt_max);
  }
  EXPECT_THROW(bestest::FineGrid(heavy_wall(), 10), bestest::InvalidParameter);
}

TEST(FineGrid, SelfConvergence) {
  // Halving dt and doubling the resolution moves the 24 h response < 0.5 % RMS.
  const bestest::WallBoundary bc{[](double t) { return t > 0 ? 10.0 : 0.0; }, [](double) { return 0.0; },
                                 std::numeric_limits<double>::infinity(), 8.0};
  const auto c = heavy_wall();
  bestest::FineGrid fine(c, 41);
  const double dt_fine = 0.9 * fine.stable_step(bc.exterior_film, bc.interior_film);
  const auto coarse = bestest::fine_grid_oracle(c, 21, 2 * dt_fine, bc, 86400, 600);
  const auto refined = bestest::fine_grid_oracle(c, 41, dt_fine, bc, 86400, 600);
  double scale = 0;
  for (double t : refined.interior_surface_temperature) scale = std::max(scale, std::fabs(t));
  EXPECT_LT(rms(coarse.interior_surface_temperature, refined.interior_surface_temperature), 0.005 * scale);
}

TEST(ModelOrder, DiscretizedBeatsTwoNodeOnHeavyWall) {
  const auto c = heavy_wall();
  const bestest::WallBoundary bc{[](double t) { return t > 0 ? 10.0 : 0.0; }, [](double) { return 0.0; },
                                 std::numeric_limits<double>::infinity(), 8.0};
  bestest::FineGrid grid(c, 101);
  const double dt = 0.9 * grid.stable_step(bc.exterior_film, bc.interior_film);
  const double horizon = 48 * 3600.0, sample = 600.0;
  const auto ref = grid.simulate(bc, dt, horizon, sample);
  const auto two = bestest::network_response(bestest::two_node_network(c), bc, 60, horizon, sample);
  const auto disc = bestest::network_response(bestest::discretized_network(c), bc, 60, horizon, sample);
  const double e2 = rms(two.interior_surface_temperature, ref.interior_surface_temperature);
  const double ed = rms(disc.interior_surface_temperature, ref.interior_surface_temperature);
  EXPECT_LT(ed, 0.5 * e2) << "two-node " << e2 << " discretized " << ed;
}

}  // namespace
