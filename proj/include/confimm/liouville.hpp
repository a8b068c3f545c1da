#pragma once

#include <vector>

#include <Eigen/Dense>

#include "confimm/geometry.hpp"

namespace confimm {

/// Smooth bump exp(1 - 1/(1 - s^2)), s = |z - center| / radius, supported in
/// one patch of the grid (zero on the others).
Eigen::VectorXd bump_function(const ParamGrid& grid, std::size_t patch,
                              const Eigen::Vector2d& center, double radius);

/// int <D(u - w), D phi> - int (K e^{2u} - K0 e^{2w}) phi dx dy, where
/// g0 = e^{2w} (dx^2 + dy^2) is the background metric. Throws DomainError if
/// phi does not vanish near the chart boundaries.
double liouville_residual(const SampledImmersion& imm, const GeometryFields& geom,
                          const Eigen::VectorXd& testfn, Exec exec = Exec::parallel);

struct PotentialSolution {
  Eigen::VectorXd v;
  double sup_norm = 0.0;
  double grad_l2 = 0.0;
  double source_l1 = 0.0;
};

/// Logarithmic potential v(z) = -(1/2pi) int_D log|z - w| s(w) dA(w) on a
/// polar disk grid. The source is expanded in angular Fourier modes per ring
/// and each mode is integrated against the exact radial kernel, so v can be
/// evaluated at arbitrary points of the disk.
class PotentialSolver {
 public:
  PotentialSolver(const ParamGrid& grid, const Eigen::VectorXd& source, Exec exec = Exec::parallel);

  const Eigen::VectorXd& values() const { return v_; }
  double evaluate(const Eigen::Vector2d& z) const;
  /// Evaluates at many points (parallel over points).
  Eigen::VectorXd evaluate(const std::vector<Eigen::Vector2d>& z) const;
  PotentialSolution solution() const;

 private:
  const ParamGrid* grid_;
  Exec exec_;
  Eigen::VectorXd source_;
  Eigen::MatrixXcd spectra_;  // rings x modes
  Eigen::VectorXd v_;
};

PotentialSolution solve_potential(const ParamGrid& grid, const Eigen::VectorXd& source,
                                  Exec exec = Exec::parallel);

/// Dense O(N^2) kernel sum with the diagonal singularity subtracted against
/// the exact disk integral of log|z - w|. Independent reference for the
/// spectral solver.
Eigen::VectorXd solve_potential_direct(const ParamGrid& grid, const Eigen::VectorXd& source,
                                       Exec exec = Exec::parallel);

/// Fourth-order five-point Cartesian Laplacian of the solver's v with step h,
/// compared with the source at grid nodes with r_lo <= |z| <= r_hi (at most
/// max_samples of them, evenly strided). Returns max |-Lap_h v - s|.
double interior_laplacian_residual(const PotentialSolver& solver, const ParamGrid& grid,
                                   const Eigen::VectorXd& source, double h, double r_lo,
                                   double r_hi, std::size_t max_samples = 64);

/// Max over interior nodes (distance to the grid boundary > margin) of the
/// mean-value defect |d(z) - mean of d on the circle of radius margin about z|
/// with d = u - v. At most max_nodes evenly strided nodes are tested.
double harmonic_defect(const ParamGrid& grid, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                       double margin, std::size_t max_nodes = 4096, Exec exec = Exec::parallel);

struct LogCoefficient {
  double alpha = 0.0;
  std::vector<double> per_radius;
  double spread = 0.0;
};

/// Flux (r / 2pi) int d_r w dtheta on the circles |z| = r.
LogCoefficient log_coefficient(const ParamGrid& grid, const Eigen::VectorXd& w,
                               const std::vector<double>& radii);

/// Harness bound on sup_norm + grad_l2 relative to total_A (placeholder for
/// the non-explicit constant C(gamma)).
inline constexpr double kEstimateHarnessBound = 10.0;

}  // namespace confimm
