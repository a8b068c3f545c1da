#include "confimm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "confimm/error.hpp"
#include "kernels/kernels.hpp"

namespace confimm {

GeometryFields build_geometry(const SampledImmersion& imm, Exec exec) {
  validate(imm);
  const auto n = static_cast<Eigen::Index>(imm.size());
  const Eigen::Index d = imm.n;
  GeometryFields g;
  g.u.resize(n);
  g.e2u.resize(n);
  g.area.resize(n);
  g.Asq.resize(n);
  g.A0sq.resize(n);
  g.K.resize(n);
  g.frame.resize(n);
  g.A11.resize(d, n);
  g.A12.resize(d, n);
  g.A22.resize(d, n);
  g.H.resize(d, n);
  g.G.resize(d, n);
  const std::ptrdiff_t bad = kernels::node_geometry(imm, g, exec);
  if (bad >= 0) throw DegenerateImmersion(static_cast<std::size_t>(bad), g.frame[bad]);
  return g;
}

Eigen::VectorXd gauss_map_density(const SampledImmersion& imm, const GeometryFields& geom,
                                  Exec exec) {
  const Eigen::Index d = imm.n;
  const auto n = static_cast<Eigen::Index>(imm.size());
  Eigen::MatrixXd ri(2 * d, n);
  ri.topRows(d) = geom.G.real();
  ri.bottomRows(d) = geom.G.imag();
  const CartesianDerivatives dg = cartesian_derivatives(*imm.grid, ri, false, exec);
  Eigen::VectorXd out(n);
  for_each_index(exec, static_cast<std::size_t>(n), [&](std::size_t node) {
    const auto k = static_cast<Eigen::Index>(node);
    const Eigen::VectorXcd g = geom.G.col(k);
    double s = 0.0;
    for (const Eigen::MatrixXd* m : {&dg.dx, &dg.dy}) {
      Eigen::VectorXcd dk(d);
      for (Eigen::Index c = 0; c < d; ++c) dk[c] = {(*m)(c, k), (*m)(c + d, k)};
      s += dk.squaredNorm() - std::norm(g.dot(dk));
    }
    out[k] = s;
  });
  return out;
}

double extrinsic_diameter(const Eigen::MatrixXd& f) {
  const Eigen::Index dim = f.rows(), n = f.cols();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal;
  std::vector<Eigen::Index> candidates;
  for (int t = 0; t < 256 + 2 * dim; ++t) {
    Eigen::VectorXd dir(dim);
    if (t < dim) {
      dir.setZero();
      dir[t] = 1.0;
    } else {
      for (Eigen::Index c = 0; c < dim; ++c) dir[c] = normal(rng);
    }
    const Eigen::VectorXd proj = f.transpose() * dir;
    Eigen::Index lo, hi;
    proj.minCoeff(&lo);
    proj.maxCoeff(&hi);
    candidates.push_back(lo);
    candidates.push_back(hi);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  double best = 0.0;
  for (Eigen::Index c : candidates)
    best = std::max(best, (f.colwise() - f.col(c)).colwise().squaredNorm().maxCoeff());
  return std::sqrt(best);
}

EnergyReport energy_report(const SampledImmersion& imm, const GeometryFields& geom, Exec exec) {
  const ParamGrid& grid = *imm.grid;
  EnergyReport r;
  const Eigen::VectorXd& dmu = geom.area;
  const Eigen::VectorXd hsq = geom.H.colwise().squaredNorm().transpose();
  r.willmore = 0.25 * integrate(grid, hsq.cwiseProduct(dmu));
  r.total_A = integrate(grid, geom.Asq.cwiseProduct(dmu));
  r.tracefree_A = integrate(grid, geom.A0sq.cwiseProduct(dmu));
  r.area = integrate(grid, dmu);
  r.gauss_bonnet = integrate(grid, geom.K.cwiseProduct(dmu));
  r.gauss_map_energy = integrate(grid, gauss_map_density(imm, geom, exec));
  r.diam = extrinsic_diameter(imm.f);
  return r;
}

PointwiseChecks pointwise_checks(const SampledImmersion& imm, const GeometryFields& geom) {
  PointwiseChecks c;
  for (Eigen::Index k = 0; k < geom.K.size(); ++k) {
    const double hsq = geom.H.col(k).squaredNorm();
    const double gauss = geom.K[k] - 0.25 * hsq + 0.5 * geom.A0sq[k];
    const double scale = std::abs(geom.K[k]) + 0.25 * hsq + 0.5 * std::abs(geom.A0sq[k]);
    if (scale > 0.0) c.gauss_equation = std::max(c.gauss_equation, std::abs(gauss) / scale);
    c.decomposition = std::max(
        c.decomposition, std::abs(geom.Asq[k] - geom.A0sq[k] - 0.5 * hsq) / (geom.Asq[k] + 1.0));
    const Eigen::MatrixXd* raw[3] = {&imm.f11, &imm.f12, &imm.f22};
    const Eigen::MatrixXd* a[3] = {&geom.A11, &geom.A12, &geom.A22};
    for (int ij = 0; ij < 3; ++ij) {
      const double nij = raw[ij]->col(k).norm();
      if (nij == 0.0) continue;
      for (const Eigen::MatrixXd* fk : {&imm.f1, &imm.f2}) {
        const double nk = fk->col(k).norm();
        c.orthogonality =
            std::max(c.orthogonality, std::abs(a[ij]->col(k).dot(fk->col(k))) / (nij * nk));
      }
    }
    c.mean_curvature = std::max(c.mean_curvature, std::sqrt(hsq * geom.e2u[k]));
  }
  return c;
}

double gamma_n(int n) { return n == 3 ? 8.0 * std::numbers::pi : 4.0 * std::numbers::pi; }

GaussMapIdentity gauss_map_identity_check(const SampledImmersion& imm, const GeometryFields& geom,
                                          Exec exec) {
  GaussMapIdentity r;
  r.lhs = integrate(*imm.grid, gauss_map_density(imm, geom, exec));
  r.total_A = integrate(*imm.grid, geom.Asq.cwiseProduct(geom.area));
  r.rhs = 0.5 * r.total_A;
  r.gap = std::abs(r.lhs - r.rhs);
  r.relative_gap = r.gap / std::max(std::abs(r.rhs), 1e-300);
  if (r.rhs == 0.0) r.relative_gap = r.gap;
  r.gamma = gamma_n(imm.n);
  r.below_threshold = r.total_A < r.gamma;
  return r;
}

}  // namespace confimm
