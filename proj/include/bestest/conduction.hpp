#pragma once

#include <bestest/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

// Wall conduction as per-unit-area RC networks (thermal-electrical analogy).
namespace bestest {

struct Layer {
  double thickness = 0.1;      // m
  double conductivity = 1.0;   // W/mK
  double density = 0.0;        // kg/m3
  double specific_heat = 0.0;  // J/kgK

  double resistance() const { return thickness / conductivity; }           // m2K/W
  double capacitance() const { return density * specific_heat * thickness; }  // J/m2K

  void validate() const {
    if (!(thickness > 0.0) || !std::isfinite(thickness)) throw InvalidParameter("layer thickness must be > 0");
    if (!(conductivity > 0.0) || !std::isfinite(conductivity))
      throw InvalidParameter("layer conductivity must be > 0");
    if (!(density >= 0.0) || !(specific_heat >= 0.0) || !std::isfinite(density) || !std::isfinite(specific_heat))
      throw InvalidParameter("layer density and specific heat must be >= 0");
  }
};

struct Construction {
  std::vector<Layer> layers;  // outside -> inside
  double exterior_solar_absorptance = 0.6;
  double interior_solar_absorptance = 0.6;

  void validate() const {
    if (layers.empty()) throw InvalidParameter("construction needs at least one layer");
    for (const auto& l : layers) l.validate();
    auto frac = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!frac(exterior_solar_absorptance) || !frac(interior_solar_absorptance))
      throw InvalidParameter("solar absorptances must be in [0,1]");
  }

  double total_resistance() const {
    double r = 0.0;
    for (const auto& l : layers) r += l.resistance();
    return r;
  }
  double total_capacitance() const {
    double c = 0.0;
    for (const auto& l : layers) c += l.capacitance();
    return c;
  }
};

enum class ConductionModel { TwoNode, Discretized };

inline const char* to_string(ConductionModel m) {
  return m == ConductionModel::TwoNode ? "two_node" : "discretized";
}

struct Conductance {
  std::size_t a = 0;
  std::size_t b = 0;
  double value = 0.0;  // W/m2K
};

class ConductionError : public Error {
 public:
  enum class Kind { SingularNetwork, UnstableStep };
  ConductionError(Kind kind, const std::string& what, double dt_max = 0.0)
      : Error(what), kind_(kind), dt_max_(dt_max) {}
  Kind kind() const noexcept { return kind_; }
  // Largest stable explicit step, set for UnstableStep.
  double dt_max() const noexcept { return dt_max_; }

 private:
  Kind kind_;
  double dt_max_;
};

// Per-unit-area network. Node exterior_node and interior_node are the wall
// surfaces; surface films are not part of the network.
struct RcNetwork {
  std::vector<double> node_capacitances;  // J/m2K
  std::vector<Conductance> conductances;
  std::size_t exterior_node = 0;
  std::size_t interior_node = 0;

  std::size_t size() const { return node_capacitances.size(); }
  double total_capacitance() const {
    return std::accumulate(node_capacitances.begin(), node_capacitances.end(), 0.0);
  }

  bool connected() const {
    const std::size_t n = size();
    if (n == 0) return false;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
      return parent[i] == i ? i : parent[i] = find(parent[i]);
    };
    for (const auto& g : conductances)
      if (g.value > 0.0 && g.a < n && g.b < n) parent[find(g.a)] = find(g.b);
    const std::size_t root = find(0);
    for (std::size_t i = 1; i < n; ++i)
      if (find(i) != root) return false;
    return true;
  }

  // Symmetric conductance (Laplacian) matrix.
  Eigen::MatrixXd laplacian() const {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(size(), size());
    for (const auto& g : conductances) {
      L(g.a, g.a) += g.value;
      L(g.b, g.b) += g.value;
      L(g.a, g.b) -= g.value;
      L(g.b, g.a) -= g.value;
    }
    return L;
  }
};

// Surface-lumped model: two surface nodes, half the capacitance on each.
inline RcNetwork two_node_network(const Construction& c) {
  c.validate();
  RcNetwork net;
  const double half = c.total_capacitance() / 2.0;
  net.node_capacitances = {half, half};
  net.conductances = {{0, 1, 1.0 / c.total_resistance()}};
  net.exterior_node = 0;
  net.interior_node = 1;
  return net;
}

// Layer-discretised model with 2n+1 nodes: node 2i is the outer face of layer
// i, node 2i+1 its centre, node 2n the interior surface. Each layer carries two
// half-resistances and splits its capacitance 1/4, 1/2, 1/4.
inline RcNetwork discretized_network(const Construction& c) {
  c.validate();
  const std::size_t n = c.layers.size();
  RcNetwork net;
  net.node_capacitances.assign(2 * n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = c.layers[i];
    const double cap = l.capacitance();
    const double g = 2.0 / l.resistance();
    net.node_capacitances[2 * i] += cap / 4.0;
    net.node_capacitances[2 * i + 1] += cap / 2.0;
    net.node_capacitances[2 * i + 2] += cap / 4.0;
    net.conductances.push_back({2 * i, 2 * i + 1, g});
    net.conductances.push_back({2 * i + 1, 2 * i + 2, g});
  }
  net.exterior_node = 0;
  net.interior_node = 2 * n;
  return net;
}

inline RcNetwork build_network(const Construction& c, ConductionModel model) {
  return model == ConductionModel::TwoNode ? two_node_network(c) : discretized_network(c);
}

// Steady flux from the exterior to the interior terminal, W/m2, with both
// terminal temperatures fixed.
inline double steady_flux(const RcNetwork& net, double t_exterior, double t_interior) {
  const std::size_t n = net.size();
  if (n < 2 || net.exterior_node == net.interior_node || net.exterior_node >= n || net.interior_node >= n ||
      !net.connected())
    throw ConductionError(ConductionError::Kind::SingularNetwork, "network is disconnected");
  const Eigen::MatrixXd L = net.laplacian();

  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i)
    if (i != net.exterior_node && i != net.interior_node) free.push_back(i);

  Eigen::VectorXd T = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  T(net.exterior_node) = t_exterior;
  T(net.interior_node) = t_interior;
  if (!free.empty()) {
    const auto m = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd A(m, m);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      b(i) = -(L(free[i], net.exterior_node) * t_exterior + L(free[i], net.interior_node) * t_interior);
      for (Eigen::Index j = 0; j < m; ++j) A(i, j) = L(free[i], free[j]);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw ConductionError(ConductionError::Kind::SingularNetwork, "network matrix is singular");
    const Eigen::VectorXd x = ldlt.solve(b);
    for (Eigen::Index i = 0; i < m; ++i) T(free[i]) = x(i);
  }
  double q = 0.0;
  for (const auto& g : net.conductances) {
    if (g.a == net.exterior_node) q += g.value * (T(g.a) - T(g.b));
    else if (g.b == net.exterior_node) q += g.value * (T(g.b) - T(g.a));
  }
  return q;
}

// Boundary for transient wall runs: environment temperatures on each side,
// coupled to the wall surfaces through film coefficients. An infinite film
// pins the surface to the environment temperature.
struct WallBoundary {
  std::function<double(double)> exterior;  // t [s] -> degC
  std::function<double(double)> interior;
  double exterior_film = std::numeric_limits<double>::infinity();  // W/m2K
  double interior_film = std::numeric_limits<double>::infinity();
};

struct WallResponse {
  std::vector<double> times;                         // s
  std::vector<double> interior_surface_temperature;  // degC
};

namespace conduction_detail {

inline std::size_t steps_per_sample(double sample_interval, double dt) {
  return static_cast<std::size_t>(std::ceil(sample_interval / dt - 1e-9));
}

inline void check_horizon(double dt, double horizon, double sample_interval) {
  if (!(dt > 0.0) || !(horizon >= 0.0) || !(sample_interval > 0.0))
    throw InvalidParameter("dt, horizon and sample interval must be positive");
}

}  // namespace conduction_detail

// Implicit-Euler transient of an RcNetwork between the given boundaries.
// Starts from the steady state at t = 0 and samples every sample_interval.
inline WallResponse network_response(const RcNetwork& net, const WallBoundary& bc, double dt, double horizon,
                                     double sample_interval = 3600.0) {
  conduction_detail::check_horizon(dt, horizon, sample_interval);
  if (!net.connected()) throw ConductionError(ConductionError::Kind::SingularNetwork, "network is disconnected");
  const auto n = static_cast<Eigen::Index>(net.size());
  const Eigen::MatrixXd L = net.laplacian();
  const bool pin_ext = std::isinf(bc.exterior_film);
  const bool pin_int = std::isinf(bc.interior_film);
  const auto ext = static_cast<Eigen::Index>(net.exterior_node);
  const auto in = static_cast<Eigen::Index>(net.interior_node);

  auto solve = [&](const Eigen::VectorXd& cap_over_dt, const Eigen::VectorXd& prev, double t) {
    Eigen::MatrixXd A = L;
    A.diagonal() += cap_over_dt;
    Eigen::VectorXd b = cap_over_dt.cwiseProduct(prev);
    const double te = bc.exterior(t), ti = bc.interior(t);
    if (!pin_ext) {
      A(ext, ext) += bc.exterior_film;
      b(ext) += bc.exterior_film * te;
    }
    if (!pin_int) {
      A(in, in) += bc.interior_film;
      b(in) += bc.interior_film * ti;
    }
    // Pinned rows become identities.
    auto pin = [&](Eigen::Index k, double v) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == k) continue;
        b(j) -= A(j, k) * v;
        A(j, k) = 0.0;
        A(k, j) = 0.0;
      }
      A(k, k) = 1.0;
      b(k) = v;
    };
    if (pin_ext) pin(ext, te);
    if (pin_int) pin(in, ti);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success)
      throw ConductionError(ConductionError::Kind::SingularNetwork, "network matrix is singular");
    return Eigen::VectorXd(ldlt.solve(b));
  };

  Eigen::VectorXd cap(n);
  for (Eigen::Index i = 0; i < n; ++i) cap(i) = net.node_capacitances[static_cast<std::size_t>(i)];

  Eigen::VectorXd T = solve(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0.0);
  const std::size_t sub = conduction_detail::steps_per_sample(sample_interval, dt);
  const double h = sample_interval / static_cast<double>(sub);
  const Eigen::VectorXd cap_dt = cap / h;

  WallResponse out;
  const auto samples = static_cast<std::size_t>(std::floor(horizon / sample_interval + 1e-9));
  out.times.push_back(0.0);
  out.interior_surface_temperature.push_back(T(in));
  for (std::size_t s = 1; s <= samples; ++s) {
    for (std::size_t k = 1; k <= sub; ++k) {
      const double t = (static_cast<double>(s - 1) * static_cast<double>(sub) + static_cast<double>(k)) * h;
      T = solve(cap_dt, T, t);
    }
    out.times.push_back(static_cast<double>(s) * sample_interval);
    out.interior_surface_temperature.push_back(T(in));
  }
  return out;
}

// Uniform-grid finite-difference discretisation of a construction used as a
// brute-force reference. Node j sits at x = j*dx; capacitances integrate
// rho*c over each control volume, conductances are the exact series
// resistance between neighbouring nodes.
class FineGrid {
 public:
  FineGrid(const Construction& c, std::size_t nodes) {
    c.validate();
    if (nodes < 11) throw InvalidParameter("fine grid needs at least 11 nodes");
    const double L = std::accumulate(c.layers.begin(), c.layers.end(), 0.0,
                                     [](double s, const Layer& l) { return s + l.thickness; });
    dx_ = L / static_cast<double>(nodes - 1);

    std::vector<double> bounds{0.0};
    for (const auto& l : c.layers) bounds.push_back(bounds.back() + l.thickness);
    bounds.back() = L;

    // Integrals of 1/k and rho*c over [x0, x1].
    auto integrate = [&](double x0, double x1, bool resist) {
      double s = 0.0;
      for (std::size_t i = 0; i < c.layers.size(); ++i) {
        const double lo = std::max(x0, bounds[i]);
        const double hi = std::min(x1, bounds[i + 1]);
        if (hi <= lo) continue;
        const auto& l = c.layers[i];
        s += (hi - lo) * (resist ? 1.0 / l.conductivity : l.density * l.specific_heat);
      }
      return s;
    };

    cap_.resize(nodes);
    cond_.resize(nodes - 1);
    for (std::size_t j = 0; j < nodes; ++j) {
      const double x = static_cast<double>(j) * dx_;
      cap_[j] = integrate(std::max(0.0, x - dx_ / 2), std::min(L, x + dx_ / 2), false);
    }
    double total_r = 0.0;
    for (std::size_t j = 0; j + 1 < nodes; ++j) {
      const double x0 = static_cast<double>(j) * dx_;
      const double x1 = j + 2 == nodes ? L : x0 + dx_;
      const double r = integrate(x0, x1, true);
      total_r += r;
      cond_[j] = 1.0 / r;
    }
    total_resistance_ = total_r;
  }

  std::size_t nodes() const { return cap_.size(); }
  double dx() const { return dx_; }
  const std::vector<double>& capacitances() const { return cap_; }
  const std::vector<double>& conductances() const { return cond_; }

  // Steady flux, W/m2, through the grid with fixed surface temperatures.
  double steady_flux(double t_exterior, double t_interior) const {
    // Series chain: flux = dT / sum of segment resistances.
    double r = 0.0;
    for (double g : cond_) r += 1.0 / g;
    return (t_exterior - t_interior) / r;
  }

  // Largest stable explicit step for the given films.
  double stable_step(double exterior_film, double interior_film) const {
    const std::size_t n = nodes();
    double dt_max = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      double g = 0.0;
      if (j > 0) g += cond_[j - 1];
      if (j + 1 < n) g += cond_[j];
      if (j == 0) {
        if (std::isinf(exterior_film)) continue;
        g += exterior_film;
      }
      if (j + 1 == n) {
        if (std::isinf(interior_film)) continue;
        g += interior_film;
      }
      dt_max = std::min(dt_max, cap_[j] / g);
    }
    return dt_max;
  }

  // Explicit (forward Euler) transient starting from the steady profile at t = 0.
  WallResponse simulate(const WallBoundary& bc, double dt, double horizon, double sample_interval = 3600.0) const {
    conduction_detail::check_horizon(dt, horizon, sample_interval);
    const double dt_max = stable_step(bc.exterior_film, bc.interior_film);
    if (dt > dt_max)
      throw ConductionError(ConductionError::Kind::UnstableStep,
                            "explicit step " + std::to_string(dt) + " s exceeds stability bound " +
                                std::to_string(dt_max) + " s",
                            dt_max);
    const std::size_t n = nodes();
    const bool pin_ext = std::isinf(bc.exterior_film);
    const bool pin_int = std::isinf(bc.interior_film);

    std::vector<double> T = initial_profile(bc);
    const std::size_t sub = conduction_detail::steps_per_sample(sample_interval, dt);
    const double h = sample_interval / static_cast<double>(sub);

    WallResponse out;
    const auto samples = static_cast<std::size_t>(std::floor(horizon / sample_interval + 1e-9));
    out.times.push_back(0.0);
    out.interior_surface_temperature.push_back(T[n - 1]);
    std::vector<double> next(n);
    for (std::size_t s = 1; s <= samples; ++s) {
      for (std::size_t k = 0; k < sub; ++k) {
        const double t_old = (static_cast<double>(s - 1) * static_cast<double>(sub) + static_cast<double>(k)) * h;
        const double t_new = t_old + h;
        const double te = bc.exterior(t_old), ti = bc.interior(t_old);
        for (std::size_t j = 0; j < n; ++j) {
          double q = 0.0;
          if (j > 0) q += cond_[j - 1] * (T[j - 1] - T[j]);
          if (j + 1 < n) q += cond_[j] * (T[j + 1] - T[j]);
          if (j == 0 && !pin_ext) q += bc.exterior_film * (te - T[j]);
          if (j + 1 == n && !pin_int) q += bc.interior_film * (ti - T[j]);
          next[j] = cap_[j] > 0.0 ? T[j] + h * q / cap_[j] : T[j];
        }
        if (pin_ext) next[0] = bc.exterior(t_new);
        if (pin_int) next[n - 1] = bc.interior(t_new);
        T.swap(next);
      }
      out.times.push_back(static_cast<double>(s) * sample_interval);
      out.interior_surface_temperature.push_back(T[n - 1]);
    }
    return out;
  }

  double total_resistance() const { return total_resistance_; }

 private:
  // Steady tridiagonal solve with the boundary values at t = 0.
  std::vector<double> initial_profile(const WallBoundary& bc) const {
    const std::size_t n = nodes();
    const double te = bc.exterior(0.0), ti = bc.interior(0.0);
    // Surface-to-surface series resistance plus films.
    const double r_ext = std::isinf(bc.exterior_film) ? 0.0 : 1.0 / bc.exterior_film;
    const double r_int = std::isinf(bc.interior_film) ? 0.0 : 1.0 / bc.interior_film;
    const double q = (te - ti) / (r_ext + total_resistance_ + r_int);
    std::vector<double> T(n);
    T[0] = te - q * r_ext;
    for (std::size_t j = 1; j < n; ++j) T[j] = T[j - 1] - q / cond_[j - 1];
    return T;
  }

  double dx_ = 0.0;
  double total_resistance_ = 0.0;
  std::vector<double> cap_;
  std::vector<double> cond_;
};

// Interior-surface temperature of a construction under the given boundary,
// by explicit finite differences on a uniform grid.
inline WallResponse fine_grid_oracle(const Construction& c, std::size_t nodes, double dt, const WallBoundary& bc,
                                     double horizon, double sample_interval = 3600.0) {
  return FineGrid(c, nodes).simulate(bc, dt, horizon, sample_interval);
}

}  // namespace bestest
