#include "confimm/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "confimm/error.hpp"
#include "kernels/kernels.hpp"

namespace confimm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const Patch& disk_patch(const ParamGrid& grid) {
  if (grid.patches.size() != 1 || grid.patches[0].coords != ChartCoords::polar ||
      grid.patches[0].a1.rule() != AxisRule::gl_panels || grid.patches[0].a1.lo() != 0.0)
    throw DomainError("the potential solver needs a single-chart polar disk grid");
  return grid.patches[0];
}

const Patch& polar_patch(const ParamGrid& grid) {
  if (grid.patches.size() != 1 || grid.patches[0].coords != ChartCoords::polar)
    throw DomainError("a single-chart polar grid is required");
  return grid.patches[0];
}

// Distance from a parameter point of a patch to the chart boundary
// (infinite across periodic directions).
double boundary_distance(const Patch& p, const Eigen::Vector2d& z) {
  double d = std::numeric_limits<double>::infinity();
  const Eigen::Vector2d c = p.to_grid(z);
  if (p.coords == ChartCoords::polar) {
    d = std::min(d, p.a1.hi() - c.x());
    if (p.a1.lo() > 0.0) d = std::min(d, c.x() - p.a1.lo());
    return d;
  }
  if (!p.a1.periodic()) d = std::min({d, c.x() - p.a1.lo(), p.a1.hi() - c.x()});
  if (!p.a2.periodic()) d = std::min({d, c.y() - p.a2.lo(), p.a2.hi() - c.y()});
  return d;
}

// True if the field is non-negligible on the two outermost node layers of
// any non-periodic chart edge.
bool touches_boundary(const ParamGrid& grid, const Eigen::VectorXd& phi) {
  const double tol = 1e-12 * std::max(phi.cwiseAbs().maxCoeff(), 1e-300);
  for (const auto& p : grid.patches) {
    auto check_axis1 = [&](std::size_t i) {
      for (std::size_t j = 0; j < p.a2.size(); ++j)
        if (std::abs(phi[static_cast<Eigen::Index>(p.index(i, j))]) > tol) return true;
      return false;
    };
    auto check_axis2 = [&](std::size_t j) {
      for (std::size_t i = 0; i < p.a1.size(); ++i)
        if (std::abs(phi[static_cast<Eigen::Index>(p.index(i, j))]) > tol) return true;
      return false;
    };
    const std::size_t n1 = p.a1.size(), n2 = p.a2.size();
    if (!p.a1.periodic()) {
      const bool inner = !(p.coords == ChartCoords::polar && p.a1.lo() == 0.0);
      if (check_axis1(n1 - 1) || check_axis1(n1 - 2)) return true;
      if (inner && (check_axis1(0) || check_axis1(1))) return true;
    }
    if (!p.a2.periodic()) {
      if (check_axis2(0) || check_axis2(1) || check_axis2(n2 - 1) || check_axis2(n2 - 2)) return true;
    }
  }
  return false;
}

}  // namespace

Eigen::VectorXd bump_function(const ParamGrid& grid, std::size_t patch,
                              const Eigen::Vector2d& center, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("bump radius must be positive");
  const Patch& p = grid.patches.at(patch);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = p.offset; k < p.offset + p.size(); ++k) {
    const double s = (grid.nodes[k] - center).norm() / radius;
    if (s < 1.0) phi[static_cast<Eigen::Index>(k)] = std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  return phi;
}

double liouville_residual(const SampledImmersion& imm, const GeometryFields& geom,
                          const Eigen::VectorXd& testfn, Exec exec) {
  const ParamGrid& grid = *imm.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (testfn.size() != n) throw InvalidInput("test function does not match the grid");
  if (touches_boundary(grid, testfn))
    throw DomainError("invalid test function: support touches the chart boundary");
  Eigen::VectorXd w(n), e2w(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    e2w[k] = grid.background_metric[static_cast<std::size_t>(k)](0, 0);
    w[k] = 0.5 * std::log(e2w[k]);
  }
  Eigen::MatrixXd fields(2, n);
  fields.row(0) = (geom.u - w).transpose();
  fields.row(1) = testfn.transpose();
  const CartesianDerivatives d = cartesian_derivatives(grid, fields, false, exec);
  Eigen::VectorXd density(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double grad = d.dx(0, k) * d.dx(1, k) + d.dy(0, k) * d.dy(1, k);
    const double src = geom.K[k] * geom.area[k] - grid.background_curvature[k] * e2w[k];
    density[k] = grad - src * testfn[k];
  }
  return integrate(grid, density);
}

PotentialSolver::PotentialSolver(const ParamGrid& grid, const Eigen::VectorXd& source, Exec exec)
    : grid_(&grid), exec_(exec), source_(source) {
  const Patch& p = disk_patch(grid);
  if (source.size() != static_cast<Eigen::Index>(grid.size()))
    throw InvalidInput("source does not match the grid");
  if (!source.allFinite()) throw InvalidInput("source has non-finite values");
  const std::size_t nr = p.a1.size(), nt = p.a2.size();
  const auto modes = static_cast<Eigen::Index>(nt / 2 + 1);
  std::vector<std::complex<double>> table(nt);
  for (std::size_t j = 0; j < nt; ++j) table[j] = std::polar(1.0, -kTwoPi * double(j) / double(nt));
  spectra_.resize(static_cast<Eigen::Index>(nr), modes);
  for_each_index(exec, nr, [&](std::size_t i) {
    for (Eigen::Index m = 0; m < modes; ++m) {
      std::complex<double> acc = 0.0;
      for (std::size_t j = 0; j < nt; ++j)
        acc += source[static_cast<Eigen::Index>(p.index(i, j))] *
               table[(static_cast<std::size_t>(m) * j) % nt];
      spectra_(static_cast<Eigen::Index>(i), m) = acc / double(nt);
    }
  });
  Eigen::MatrixXcd vm;
  kernels::radial_mode_integrals(p.a1, spectra_, p.a1.nodes(), vm, exec);
  v_.resize(static_cast<Eigen::Index>(grid.size()));
  for_each_index(exec, nr, [&](std::size_t i) {
    for (std::size_t j = 0; j < nt; ++j) {
      double val = 0.0;
      for (Eigen::Index m = 0; m < modes; ++m) {
        const double factor = (m == 0 || (nt % 2 == 0 && m == modes - 1)) ? 1.0 : 2.0;
        val += factor * (vm(static_cast<Eigen::Index>(i), m) *
                         std::conj(table[(static_cast<std::size_t>(m) * j) % nt])).real();
      }
      v_[static_cast<Eigen::Index>(p.index(i, j))] = val;
    }
  });
}

Eigen::VectorXd PotentialSolver::evaluate(const std::vector<Eigen::Vector2d>& z) const {
  const Patch& p = grid_->patches[0];
  const std::size_t nt = p.a2.size();
  const Eigen::Index modes = spectra_.cols();
  std::vector<double> radii(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    radii[k] = z[k].norm();
    if (radii[k] > p.a1.hi() * (1 + 1e-12)) throw DomainError("evaluation point outside the disk");
  }
  Eigen::MatrixXcd vm;
  kernels::radial_mode_integrals(p.a1, spectra_, radii, vm, exec_);
  Eigen::VectorXd out(static_cast<Eigen::Index>(z.size()));
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double th = std::atan2(z[k].y(), z[k].x());
    double val = 0.0;
    for (Eigen::Index m = 0; m < modes; ++m) {
      const double factor = (m == 0 || (nt % 2 == 0 && m == modes - 1)) ? 1.0 : 2.0;
      val += factor * (vm(static_cast<Eigen::Index>(k), m) * std::polar(1.0, double(m) * th)).real();
    }
    out[static_cast<Eigen::Index>(k)] = val;
  }
  return out;
}

double PotentialSolver::evaluate(const Eigen::Vector2d& z) const {
  return evaluate(std::vector<Eigen::Vector2d>{z})[0];
}

PotentialSolution PotentialSolver::solution() const {
  PotentialSolution s;
  s.v = v_;
  s.sup_norm = v_.cwiseAbs().maxCoeff();
  const CartesianDerivatives d = cartesian_derivatives(*grid_, v_.transpose(), false, exec_);
  const Eigen::VectorXd g2 =
      (d.dx.row(0).array().square() + d.dy.row(0).array().square()).matrix().transpose();
  s.grad_l2 = std::sqrt(integrate(*grid_, g2));
  s.source_l1 = integrate(*grid_, source_.cwiseAbs());
  return s;
}

PotentialSolution solve_potential(const ParamGrid& grid, const Eigen::VectorXd& source, Exec exec) {
  return PotentialSolver(grid, source, exec).solution();
}

Eigen::VectorXd solve_potential_direct(const ParamGrid& grid, const Eigen::VectorXd& source,
                                       Exec exec) {
  const Patch& p = disk_patch(grid);
  if (source.size() != static_cast<Eigen::Index>(grid.size()))
    throw InvalidInput("source does not match the grid");
  Eigen::VectorXd v;
  kernels::direct_log_sum(grid, p.a1.hi(), source, v, exec);
  return v;
}

double interior_laplacian_residual(const PotentialSolver& solver, const ParamGrid& grid,
                                   const Eigen::VectorXd& source, double h, double r_lo,
                                   double r_hi, std::size_t max_samples) {
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = grid.nodes[k].norm();
    if (r >= r_lo && r <= r_hi) nodes.push_back(k);
  }
  if (nodes.empty()) throw DomainError("no interior sample nodes in the requested radius range");
  const std::size_t stride = std::max<std::size_t>(1, (nodes.size() + max_samples - 1) / max_samples);
  std::vector<std::size_t> picked;
  for (std::size_t k = 0; k < nodes.size(); k += stride) picked.push_back(nodes[k]);
  std::vector<Eigen::Vector2d> pts;
  const double offs[4] = {-2.0, -1.0, 1.0, 2.0};
  for (std::size_t k : picked) {
    const Eigen::Vector2d z = grid.nodes[k];
    pts.push_back(z);
    for (double o : offs) pts.push_back(z + Eigen::Vector2d(o * h, 0.0));
    for (double o : offs) pts.push_back(z + Eigen::Vector2d(0.0, o * h));
  }
  const Eigen::VectorXd v = solver.evaluate(pts);
  const double c[4] = {-1.0, 16.0, 16.0, -1.0};
  double worst = 0.0;
  for (std::size_t s = 0; s < picked.size(); ++s) {
    const Eigen::Index b = static_cast<Eigen::Index>(9 * s);
    double lap = -60.0 * v[b];
    for (int q = 0; q < 4; ++q) lap += c[q] * (v[b + 1 + q] + v[b + 5 + q]);
    lap /= 12.0 * h * h;
    worst = std::max(worst, std::abs(-lap - source[static_cast<Eigen::Index>(picked[s])]));
  }
  return worst;
}

double harmonic_defect(const ParamGrid& grid, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                       double margin, std::size_t max_nodes, Exec exec) {
  if (!(margin > 0.0)) throw InvalidInput("margin must be positive");
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (u.size() != n || v.size() != n) throw InvalidInput("fields do not match the grid");
  const Eigen::MatrixXd d = (u - v).transpose();
  std::vector<std::size_t> interior;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Patch& p = grid.patches[grid.patch_of(k)];
    if (boundary_distance(p, grid.nodes[k]) > margin) interior.push_back(k);
  }
  if (interior.empty()) throw DomainError("margin too large: no interior nodes remain");
  const std::size_t stride = std::max<std::size_t>(1, (interior.size() + max_nodes - 1) / max_nodes);
  std::vector<std::size_t> picked;
  for (std::size_t k = 0; k < interior.size(); k += stride) picked.push_back(interior[k]);
  constexpr int kCircle = 64;
  std::vector<double> defect(picked.size());
  for_each_index(exec, picked.size(), [&](std::size_t s) {
    const std::size_t k = picked[s];
    const std::size_t patch = grid.patch_of(k);
    double mean = 0.0;
    for (int q = 0; q < kCircle; ++q) {
      const double phi = kTwoPi * q / kCircle;
      const Eigen::Vector2d z = grid.nodes[k] + margin * Eigen::Vector2d(std::cos(phi), std::sin(phi));
      mean += interpolate(grid, patch, d, z)[0];
    }
    mean /= kCircle;
    defect[s] = std::abs(d(0, static_cast<Eigen::Index>(k)) - mean);
  });
  return *std::max_element(defect.begin(), defect.end());
}

LogCoefficient log_coefficient(const ParamGrid& grid, const Eigen::VectorXd& w,
                               const std::vector<double>& radii) {
  const Patch& p = polar_patch(grid);
  if (w.size() != static_cast<Eigen::Index>(grid.size())) throw InvalidInput("field does not match the grid");
  if (radii.empty()) throw InvalidInput("no radii given");
  LogCoefficient out;
  std::vector<StencilEntry> val, der;
  for (double r : radii) {
    if (!(r > p.a1.lo() && r < p.a1.hi())) throw DomainError("radius outside the annulus");
    p.a1.interpolation(r, val, &der);
    double sum = 0.0;
    for (std::size_t j = 0; j < p.a2.size(); ++j) {
      double dr = 0.0;
      for (const auto& e : der) dr += e.weight * w[static_cast<Eigen::Index>(p.index(e.index, j))];
      sum += dr * p.a2.weight(j);
    }
    out.per_radius.push_back(r * sum / kTwoPi);
  }
  const auto [lo, hi] = std::minmax_element(out.per_radius.begin(), out.per_radius.end());
  out.spread = *hi - *lo;
  double total = 0.0;
  for (double a : out.per_radius) total += a;
  out.alpha = total / static_cast<double>(out.per_radius.size());
  return out;
}

}  // namespace confimm
