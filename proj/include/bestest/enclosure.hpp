#pragma once

#include <bestest/error.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

// Interior distribution of transmitted solar radiation with multiple diffuse
// reflections inside the zone.
namespace bestest {

struct EnclosureSurface {
  double area = 1.0;  // m2
  double solar_absorptance = 0.6;
  // Fraction of incident radiation that leaves the zone (windows only).
  double back_loss_transmittance = 0.0;

  double reflectance() const { return 1.0 - solar_absorptance - back_loss_transmittance; }

  void validate() const {
    if (!(area > 0.0) || !std::isfinite(area)) throw InvalidParameter("enclosure surface area must be > 0");
    if (!(solar_absorptance >= 0.0 && solar_absorptance <= 1.0) ||
        !(back_loss_transmittance >= 0.0 && back_loss_transmittance <= 1.0) ||
        solar_absorptance + back_loss_transmittance > 1.0 + 1e-12)
      throw InvalidParameter("absorptance and back-loss must be fractions summing to at most 1");
  }
};

class EnclosureError : public Error {
 public:
  enum class Kind { TooFewSurfaces, NonAbsorbingEnclosure, BadWeights };
  EnclosureError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// F(i, j): fraction of diffuse radiation leaving i that arrives at j.
class ViewFactorMatrix {
 public:
  ViewFactorMatrix() = default;
  explicit ViewFactorMatrix(Eigen::MatrixXd f) : f_(std::move(f)) {}

  std::size_t size() const { return static_cast<std::size_t>(f_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return f_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& matrix() const { return f_; }

 private:
  Eigen::MatrixXd f_;
};

// Area-weighted factors with self-view, F(i, j) = A_j / sum(A). Rows sum to
// one and A_i F(i, j) = A_j F(j, i) for any set of areas.
inline ViewFactorMatrix view_factor_matrix(std::span<const EnclosureSurface> surfaces) {
  if (surfaces.size() < 2)
    throw EnclosureError(EnclosureError::Kind::TooFewSurfaces, "an enclosure needs at least two surfaces");
  double total = 0.0;
  for (const auto& s : surfaces) {
    s.validate();
    total += s.area;
  }
  const auto n = static_cast<Eigen::Index>(surfaces.size());
  Eigen::MatrixXd f(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double fj = surfaces[static_cast<std::size_t>(j)].area / total;
    for (Eigen::Index i = 0; i < n; ++i) f(i, j) = fj;
  }
  return ViewFactorMatrix(std::move(f));
}

struct SolarSplit {
  std::vector<double> absorbed;  // W per surface
  double lost_out = 0.0;         // W

  double total_absorbed() const { return std::accumulate(absorbed.begin(), absorbed.end(), 0.0); }
};

// Linear response of the enclosure: for first-bounce deposits q (W per
// surface), absorbed = absorption * q and lost = loss.dot(q). Built once and
// reused when the surfaces do not change.
class EnclosureResponse {
 public:
  EnclosureResponse(std::span<const EnclosureSurface> surfaces, const ViewFactorMatrix& F) {
    const std::size_t n = surfaces.size();
    if (n < 2) throw EnclosureError(EnclosureError::Kind::TooFewSurfaces, "an enclosure needs at least two surfaces");
    if (F.size() != n) throw InvalidParameter("view factor matrix size does not match surfaces");
    bool terminates = false;
    for (const auto& s : surfaces) {
      s.validate();
      if (s.solar_absorptance > 0.0 || s.back_loss_transmittance > 0.0) terminates = true;
    }
    if (!terminates)
      throw EnclosureError(EnclosureError::Kind::NonAbsorbingEnclosure,
                           "no surface absorbs or transmits; radiation never leaves the enclosure");

    const auto m = static_cast<Eigen::Index>(n);
    Eigen::VectorXd alpha(m), tau(m), rho(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& s = surfaces[static_cast<std::size_t>(i)];
      alpha(i) = s.solar_absorptance;
      tau(i) = s.back_loss_transmittance;
      rho(i) = std::max(0.0, s.reflectance());
    }
    // Irradiation G satisfies G = q + F^T diag(rho) G.
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m) - F.matrix().transpose() * rho.asDiagonal();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible())
      throw EnclosureError(EnclosureError::Kind::NonAbsorbingEnclosure, "enclosure radiation system is singular");
    const Eigen::MatrixXd G = lu.inverse();
    absorption_ = alpha.asDiagonal() * G;
    loss_ = G.transpose() * tau;
  }

  std::size_t size() const { return static_cast<std::size_t>(absorption_.rows()); }

  SolarSplit distribute(std::span<const double> first_bounce) const {
    const auto m = absorption_.rows();
    if (static_cast<Eigen::Index>(first_bounce.size()) != m) throw InvalidParameter("first-bounce size mismatch");
    const Eigen::Map<const Eigen::VectorXd> q(first_bounce.data(), m);
    const Eigen::VectorXd a = absorption_ * q;
    SolarSplit out;
    out.absorbed.assign(a.data(), a.data() + m);
    out.lost_out = loss_.dot(q);
    return out;
  }

 private:
  Eigen::MatrixXd absorption_;
  Eigen::VectorXd loss_;
};

inline void check_weights(std::span<const double> weights, std::size_t n) {
  if (weights.size() != n) throw EnclosureError(EnclosureError::Kind::BadWeights, "one weight per surface required");
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw EnclosureError(EnclosureError::Kind::BadWeights, "weights must be non-negative");
    s += w;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw EnclosureError(EnclosureError::Kind::BadWeights, "weights must sum to 1");
}

// Injected power lands on surface i with weight initial_weights[i], then is
// absorbed, lost through windows or reflected per F until exhausted.
inline SolarSplit distribute_interior_solar(double injected, std::span<const EnclosureSurface> surfaces,
                                            const ViewFactorMatrix& F, std::span<const double> initial_weights) {
  if (!(injected >= 0.0)) throw InvalidParameter("injected power must be >= 0");
  check_weights(initial_weights, surfaces.size());
  EnclosureResponse resp(surfaces, F);
  std::vector<double> q(initial_weights.begin(), initial_weights.end());
  for (double& v : q) v *= injected;
  return resp.distribute(q);
}

// Area-weighted over opaque surfaces (back_loss == 0). When floor_fraction > 0
// that share goes to the surfaces flagged as floor (area-weighted among them)
// and the rest is spread over the other opaque surfaces.
inline std::vector<double> default_initial_weights(std::span<const EnclosureSurface> surfaces,
                                                   const std::vector<bool>& is_floor = {},
                                                   double floor_fraction = 0.0) {
  const std::size_t n = surfaces.size();
  if (!(floor_fraction >= 0.0 && floor_fraction <= 1.0)) throw InvalidParameter("floor fraction must be in [0,1]");
  auto floor_at = [&](std::size_t i) { return i < is_floor.size() && is_floor[i]; };
  double floor_area = 0.0, other_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (surfaces[i].back_loss_transmittance > 0.0) continue;
    (floor_at(i) ? floor_area : other_area) += surfaces[i].area;
  }
  double f_floor = floor_area > 0.0 ? floor_fraction : 0.0;
  if (other_area <= 0.0) f_floor = 1.0;
  if (floor_area + other_area <= 0.0)
    throw EnclosureError(EnclosureError::Kind::BadWeights, "no opaque surface to receive the first bounce");

  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (surfaces[i].back_loss_transmittance > 0.0) continue;
    if (f_floor == 0.0) {
      w[i] = surfaces[i].area / (floor_area + other_area);
    } else {
      w[i] = floor_at(i) ? f_floor * surfaces[i].area / floor_area
                         : (1.0 - f_floor) * surfaces[i].area / other_area;
    }
  }
  return w;
}

}  // namespace bestest
