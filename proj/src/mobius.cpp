#include "confimm/mobius.hpp"

#include <cmath>
#include <numbers>

#include "confimm/error.hpp"
#include "confimm/geometry.hpp"

namespace confimm {

namespace {

constexpr double kCenterTolerance = 1e-8;

}  // namespace

MobiusMap MobiusMap::identity(int n) {
  MobiusMap m;
  m.rotation = Eigen::MatrixXd::Identity(n, n);
  m.translation = Eigen::VectorXd::Zero(n);
  return m;
}

MobiusMap MobiusMap::inversion(const Eigen::VectorXd& x0) {
  MobiusMap m = identity(static_cast<int>(x0.size()));
  m.inversion_center = x0;
  return m;
}

MobiusMap MobiusMap::similarity(double scale, Eigen::MatrixXd rotation, Eigen::VectorXd translation) {
  MobiusMap m;
  m.scale = scale;
  m.rotation = std::move(rotation);
  m.translation = std::move(translation);
  validate(m);
  return m;
}

Eigen::VectorXd MobiusMap::operator()(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = scale * (rotation * x) + translation;
  if (inversion_center) {
    const Eigen::VectorXd d = y - *inversion_center;
    y = *inversion_center + d / d.squaredNorm();
  }
  return y;
}

void validate(const MobiusMap& map) {
  const Eigen::Index n = map.translation.size();
  if (!(map.scale > 0.0) || !std::isfinite(map.scale)) throw InvalidInput("Mobius scale must be positive");
  if (map.rotation.rows() != n || map.rotation.cols() != n)
    throw InvalidInput("rotation shape does not match the translation");
  const double err = (map.rotation.transpose() * map.rotation -
                      Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (err > 1e-12) throw InvalidInput("rotation is not orthogonal to 1e-12");
  if (map.inversion_center && map.inversion_center->size() != n)
    throw InvalidInput("inversion centre has the wrong dimension");
}

MobiusMap compose(const MobiusMap& m2, const MobiusMap& m1) {
  if (m1.inversion_center || m2.inversion_center)
    throw InvalidInput("composition is implemented for similarities only");
  if (m1.dim() != m2.dim()) throw InvalidInput("dimension mismatch in composition");
  MobiusMap m;
  m.scale = m2.scale * m1.scale;
  m.rotation = m2.rotation * m1.rotation;
  m.translation = m2.scale * (m2.rotation * m1.translation) + m2.translation;
  return m;
}

SampledImmersion apply(const MobiusMap& map, const SampledImmersion& imm, Exec exec) {
  validate(map);
  if (map.dim() != imm.n) throw InvalidInput("map dimension differs from the immersion");
  SampledImmersion out = imm;
  const Eigen::MatrixXd L = map.scale * map.rotation;
  out.f = (L * imm.f).colwise() + map.translation;
  out.f1 = L * imm.f1;
  out.f2 = L * imm.f2;
  out.f11 = L * imm.f11;
  out.f12 = L * imm.f12;
  out.f22 = L * imm.f22;
  if (!map.inversion_center) return out;

  const Eigen::VectorXd& x0 = *map.inversion_center;
  // Recentre first: all inversion formulas use d = y - x0.
  const Eigen::MatrixXd d = out.f.colwise() - x0;
  const Eigen::VectorXd dist = d.colwise().norm().transpose();
  Eigen::Index closest;
  const double dmin = dist.minCoeff(&closest);
  if (dmin <= kCenterTolerance) throw CenterOnSurface(static_cast<std::size_t>(closest), dmin);

  const SampledImmersion sim = out;
  for_each_index(exec, imm.size(), [&](std::size_t node) {
    const auto k = static_cast<Eigen::Index>(node);
    const Eigen::VectorXd dk = d.col(k);
    const double r2 = dk.squaredNorm(), r4 = r2 * r2, r6 = r4 * r2;
    auto DI = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return v / r2 - (2.0 * dk.dot(v) / r4) * dk;
    };
    auto D2I = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& w) -> Eigen::VectorXd {
      const double dv = dk.dot(v), dw = dk.dot(w);
      return (-2.0 / r4) * (dw * v + dv * w + v.dot(w) * dk) + (8.0 * dv * dw / r6) * dk;
    };
    const Eigen::VectorXd a = sim.f1.col(k), b = sim.f2.col(k);
    out.f.col(k) = x0 + dk / r2;
    out.f1.col(k) = DI(a);
    out.f2.col(k) = DI(b);
    out.f11.col(k) = DI(sim.f11.col(k)) + D2I(a, a);
    out.f12.col(k) = DI(sim.f12.col(k)) + D2I(a, b);
    out.f22.col(k) = DI(sim.f22.col(k)) + D2I(b, b);
  });
  return out;
}

Eigen::VectorXd predicted_conformal_factor(const MobiusMap& map, const SampledImmersion& imm) {
  const Eigen::VectorXd e2u =
      0.5 * (imm.f1.colwise().squaredNorm() + imm.f2.colwise().squaredNorm()).transpose();
  Eigen::VectorXd u = 0.5 * e2u.array().log().matrix();
  u.array() += std::log(map.scale);
  if (map.inversion_center) {
    const Eigen::MatrixXd y = ((map.scale * map.rotation) * imm.f).colwise() + map.translation;
    const Eigen::MatrixXd d = y.colwise() - *map.inversion_center;
    u -= d.colwise().squaredNorm().transpose().array().log().matrix();
  }
  return u;
}

double tracefree_invariance_check(const SampledImmersion& imm, const MobiusMap& map, Exec exec) {
  const GeometryFields g = build_geometry(imm, exec);
  const GeometryFields h = build_geometry(apply(map, imm, exec), exec);
  return (h.A0sq.cwiseProduct(h.area) - g.A0sq.cwiseProduct(g.area)).cwiseAbs().maxCoeff();
}

InversionIdentity inversion_energy_identity(const SampledImmersion& imm, const Eigen::VectorXd& x0,
                                            const std::vector<Preimage>& preimages, Exec exec) {
  if (x0.size() != imm.n) throw InvalidInput("centre dimension differs from the immersion");
  const ParamGrid& grid = *imm.grid;
  InversionIdentity out;
  const GeometryFields g = build_geometry(imm, exec);
  const Eigen::VectorXd hsq = g.H.colwise().squaredNorm().transpose();
  const double w = 0.25 * integrate(grid, hsq.cwiseProduct(g.area));
  double sum = 0.0;
  for (const auto& p : preimages) {
    if (p.patch >= grid.patches.size()) throw InvalidInput("preimage patch out of range");
    if (p.order < 0) throw InvalidInput("preimage order must be non-negative");
    const double miss = (interpolate(grid, p.patch, imm.f, p.z) - x0).norm();
    if (miss > 1e-6 * (1.0 + x0.norm()))
      throw DomainError("declared preimage is not on the surface (distance " + std::to_string(miss) + ")");
    sum += p.order + 1;
  }
  out.rhs = w - 4.0 * std::numbers::pi * sum;

  const MobiusMap inv = MobiusMap::inversion(x0);
  if (preimages.empty()) {
    const GeometryFields h = build_geometry(apply(inv, imm, exec), exec);
    const Eigen::VectorXd hh = h.H.colwise().squaredNorm().transpose();
    out.lhs = 0.25 * integrate(grid, hh.cwiseProduct(h.area));
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
  }

  // The centre lies on the surface: drop nodes within each excision radius of
  // a declared preimage, then extrapolate W to zero radius.
  const std::size_t n = grid.size();
  const double rmin = kExcisionRadii.back();
  std::vector<bool> near(n, false);
  for (std::size_t k = 0; k < n; ++k)
    for (const auto& p : preimages)
      if (grid.patch_of(k) == p.patch && (grid.nodes[k] - p.z).norm() < rmin) near[k] = true;
  // Nodes inside the smallest disk are never used; move them away from the
  // centre so the chain rule stays finite there.
  SampledImmersion kept = imm;
  Eigen::VectorXd far = x0;
  far[0] += 1.0 + imm.f.cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k < n; ++k)
    if (near[k]) kept.f.col(static_cast<Eigen::Index>(k)) = far;
  const GeometryFields h = build_geometry(apply(inv, kept, exec), exec);
  const Eigen::VectorXd density = 0.25 * h.H.colwise().squaredNorm().transpose().cwiseProduct(h.area);
  for (double rho : kExcisionRadii) {
    Eigen::VectorXd masked = density;
    for (std::size_t k = 0; k < n; ++k)
      for (const auto& p : preimages)
        if (grid.patch_of(k) == p.patch && (grid.nodes[k] - p.z).norm() < rho)
          masked[static_cast<Eigen::Index>(k)] = 0.0;
    out.excision_radii.push_back(rho);
    out.excised_willmore.push_back(integrate(grid, masked));
  }
  // Richardson extrapolation, error O(rho^2), radii halving.
  const std::size_t m = out.excised_willmore.size();
  const double a = out.excised_willmore[m - 2], b = out.excised_willmore[m - 1];
  out.lhs = (4.0 * b - a) / 3.0;
  out.extrapolation_error = std::abs(out.lhs - b);
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace confimm
