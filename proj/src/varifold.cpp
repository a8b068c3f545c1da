#include "confimm/varifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "confimm/error.hpp"
#include "kernels/kernels.hpp"

namespace confimm {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

bool BallProfile::nondecreasing(double slack) const {
  for (std::size_t i = 1; i < g_values.size(); ++i)
    if (g_values[i] < g_values[i - 1] - slack) return false;
  return true;
}

Varifold::Varifold(const SampledImmersion& imm, Exec exec) : imm_(imm), exec_(exec) {
  geom_ = build_geometry(imm_, exec);
  const ParamGrid& grid = *imm_.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index d = imm_.n;
  h_mu_ = geom_.H;
  mult_ = Eigen::VectorXd::Ones(n);
  for (const auto& group : imm_.sheets) {
    if (group.size() < 2) continue;
    const Patch& first = grid.patches.at(group[0]);
    for (std::size_t p : group) {
      const Patch& other = grid.patches.at(p);
      if (other.a1.size() != first.a1.size() || other.a2.size() != first.a2.size())
        throw InvalidInput("declared sheets must share one node layout");
    }
    for (std::size_t local = 0; local < first.size(); ++local) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
      for (std::size_t p : group) sum += geom_.H.col(static_cast<Eigen::Index>(grid.patches[p].offset + local));
      for (std::size_t p : group) {
        const auto k = static_cast<Eigen::Index>(grid.patches[p].offset + local);
        h_mu_.col(k) = sum / static_cast<double>(group.size());
        mult_[k] = static_cast<double>(group.size());
      }
    }
  }
  // Densities per parameter area: area, 1/4 |H_mu|^2 area, <f, H_mu> area, H_mu area.
  Eigen::MatrixXd dens(3 + d, n);
  dens.row(0) = geom_.area.transpose();
  dens.row(1) = (0.25 * h_mu_.colwise().squaredNorm().transpose().cwiseProduct(geom_.area)).transpose();
  dens.row(2) = (imm_.f.cwiseProduct(h_mu_).colwise().sum().transpose().cwiseProduct(geom_.area)).transpose();
  for (Eigen::Index c = 0; c < d; ++c)
    dens.row(3 + c) = h_mu_.row(c).cwiseProduct(geom_.area.transpose());
  area_ = integrate(grid, dens.row(0).transpose());
  willmore_ = 0.25 * integrate(grid, geom_.H.colwise().squaredNorm().transpose().cwiseProduct(geom_.area));
  data_ = std::make_unique<kernels::BallData>(kernels::prepare_ball_data(imm_, std::move(dens), exec));
  data_->imm = &imm_;
}

Varifold::~Varifold() = default;

BallProfile Varifold::ball_profile(const Eigen::VectorXd& x0, const std::vector<double>& radii) const {
  if (x0.size() != imm_.n) throw InvalidInput("centre dimension differs from the immersion");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw InvalidInput("radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw InvalidInput("radii must increase");
  }
  BallProfile prof;
  prof.x0 = x0;
  prof.radii = radii;
  for (double r : radii) {
    const Eigen::VectorXd I = kernels::ball_integrals(*data_, x0, r, exec_);
    const double mass = I[0], wl = I[1];
    const double moment = I[2] - x0.dot(I.tail(imm_.n));
    prof.mass.push_back(mass);
    prof.willmore_local.push_back(wl);
    prof.moment.push_back(moment);
    prof.g_values.push_back(mass / (kPi * r * r) + wl / (4.0 * kPi) + moment / (2.0 * kPi * r * r));
  }
  return prof;
}

double Varifold::mass(const Eigen::VectorXd& x0, double r) const {
  return kernels::ball_integrals(*data_, x0, r, exec_, 1)[0];
}

double Varifold::defect_integral(const Eigen::VectorXd& x0, double sigma, double rho) const {
  if (sigma > rho) throw InvalidInput("sigma must not exceed rho");
  if (sigma == rho) return 0.0;
  const auto n = static_cast<Eigen::Index>(imm_.size());
  Eigen::MatrixXd dens(1, n);
  // Inside the inner ball the density only has to be smooth: both ball
  // integrals see the same values there. A C2 floor on |y|^2 removes the
  // spike at y = 0 that would pollute the interpolants on the annulus.
  const double floor2 = 0.5625 * sigma * sigma;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::VectorXd y = imm_.f.col(k) - x0;
    double y2 = y.squaredNorm();
    if (y2 < floor2) {
      const double x = y2 / floor2;
      y2 = floor2 * (x + 0.5 * (1.0 - x) * (1.0 - x) * (1.0 - x));
    }
    // Normal part of y via the orthonormal tangent frame of G.
    const Eigen::VectorXd e1 = std::sqrt(2.0) * geom_.G.col(k).real();
    const Eigen::VectorXd e2 = std::sqrt(2.0) * geom_.G.col(k).imag();
    const Eigen::VectorXd perp = y - y.dot(e1) * e1 - y.dot(e2) * e2;
    const Eigen::VectorXd v = h_mu_.col(k) + (y2 > 0.0 ? 4.0 / y2 : 0.0) * perp;
    dens(0, k) = v.squaredNorm() * geom_.area[k] / (16.0 * kPi);
  }
  const kernels::BallData data = kernels::prepare_ball_data(imm_, std::move(dens), exec_, data_->geo);
  return kernels::ball_integrals(data, x0, rho, exec_)[0] -
         kernels::ball_integrals(data, x0, sigma, exec_)[0];
}

BallProfile ball_profile(const SampledImmersion& imm, const Eigen::VectorXd& x0,
                         const std::vector<double>& radii, Exec exec) {
  return Varifold(imm, exec).ball_profile(x0, radii);
}

MonotonicityDefect monotonicity_defect(const BallProfile& profile, const Varifold& varifold,
                                       double sigma, double rho) {
  if (sigma > rho) throw InvalidInput("monotonicity defect needs sigma <= rho");
  auto find = [&](double r) {
    for (std::size_t i = 0; i < profile.radii.size(); ++i)
      if (std::abs(profile.radii[i] - r) <= 1e-12 * r) return i;
    throw InvalidInput("radius " + std::to_string(r) + " is not in the profile");
  };
  const std::size_t is = find(sigma), ir = find(rho);
  MonotonicityDefect out;
  out.lhs = profile.g_values[ir] - profile.g_values[is];
  out.rhs = varifold.defect_integral(profile.x0, sigma, rho);
  out.gap = std::abs(out.lhs - out.rhs);
  out.relative_gap = out.gap / std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-3});
  return out;
}

DensityEstimate density_estimate(const Varifold& varifold, const Eigen::VectorXd& point) {
  const double diam = extrinsic_diameter(varifold.immersion().f);
  DensityEstimate est;
  est.point = point;
  for (double s : {0.025, 0.05, 0.1}) {
    const double r = s * diam;
    est.radii.push_back(r);
    est.ratios.push_back(varifold.mass(point, r) / (kPi * r * r));
  }
  // Quadratic through the three (r, ratio) pairs, evaluated at r = 0.
  double theta = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    double l = 1.0;
    for (std::size_t b = 0; b < 3; ++b)
      if (b != a) l *= (0.0 - est.radii[b]) / (est.radii[a] - est.radii[b]);
    theta += l * est.ratios[a];
  }
  est.theta2 = theta;
  return est;
}

LiYauReport li_yau_check(const Varifold& varifold, const std::vector<Eigen::VectorXd>& points,
                         double tol) {
  LiYauReport rep;
  rep.willmore_bound = varifold.willmore() / (4.0 * kPi);
  rep.bound_holds = true;
  rep.embedded_unit_density = true;
  const Eigen::MatrixXd& f = varifold.immersion().f;
  const double diam = extrinsic_diameter(f);
  for (const auto& x : points) {
    DensityEstimate e = density_estimate(varifold, x);
    rep.bound_holds = rep.bound_holds && e.theta2 <= rep.willmore_bound + tol;
    const double gap = (f.colwise() - x).colwise().norm().minCoeff();
    const bool on_surface = gap < 1e-3 * diam;
    if (on_surface && varifold.immersion().sheets.empty())
      rep.embedded_unit_density = rep.embedded_unit_density && std::abs(e.theta2 - 1.0) <= tol;
    rep.points.push_back(std::move(e));
  }
  return rep;
}

DiameterBounds diameter_bounds_check(const Varifold& varifold) {
  DiameterBounds b;
  const double w = varifold.willmore(), a = varifold.area();
  b.diam = extrinsic_diameter(varifold.immersion().f);
  b.lower = std::sqrt(a / w);
  b.upper_ratio = b.diam / std::sqrt(a * w);
  b.lower_holds = b.lower <= b.diam * (1.0 + 1e-9);
  return b;
}

}  // namespace confimm
