#pragma once

#include <vector>

#include <memory>

#include <Eigen/Dense>

#include "confimm/geometry.hpp"

namespace confimm::kernels {

/// Fills every per-node field of `out` (already sized). Returns the index of
/// the first degenerate node or -1.
std::ptrdiff_t node_geometry(const SampledImmersion& imm, GeometryFields& out, Exec exec);

}  // namespace confimm::kernels

namespace confimm::kernels {

/// Radial parts of the logarithmic potential: for each target radius r and
/// mode m, out(t, m) = -int_0^R rho s_m(rho) k_m(r, rho) drho with
/// k_0 = log max(r, rho) and k_m = -(min/max)^m / (2m). `spectra` holds the
/// angular Fourier coefficients of the source on the rings of `radial`.
void radial_mode_integrals(const Axis& radial, const Eigen::MatrixXcd& spectra,
                           const std::vector<double>& targets, Eigen::MatrixXcd& out, Exec exec);

/// Dense kernel sum over all node pairs of a disk of radius R.
void direct_log_sum(const ParamGrid& grid, double radius, const Eigen::VectorXd& source,
                    Eigen::VectorXd& v, Exec exec);

}  // namespace confimm::kernels

namespace confimm::kernels {

/// Density-independent part of BallData.
struct BallGeometry {
  /// a2 grid derivatives of f (panel a1 axes refine cuts with the a1
  /// interpolant of the t-Taylor expansion).
  Eigen::MatrixXd ft, ftt;
  /// Upper bound on |f(c) - f(node)| over each node cell.
  Eigen::VectorXd reach;
};

/// Precomputed per-node data for integrals over f^{-1}(B_r(x0)).
struct BallData {
  const SampledImmersion* imm = nullptr;
  std::shared_ptr<const BallGeometry> geo;
  /// q x N densities per unit grid-coordinate area, and their grid gradients.
  Eigen::MatrixXd density, grad1, grad2;
  /// Second derivatives along periodic axes (zero on other axes).
  Eigen::MatrixXd curv1, curv2;
  /// Contribution of each node when its whole cell lies inside the ball. On
  /// panel axes this is the cell integral of the panel interpolant, so that
  /// straddling cells (integrated with the same interpolant) stay consistent.
  /// Periodic axes integrate the local quadratic model over the centred cell.
  Eigen::MatrixXd full;
};

std::shared_ptr<const BallGeometry> prepare_ball_geometry(const SampledImmersion& imm, Exec exec);

/// `geo` is computed when null.
BallData prepare_ball_data(const SampledImmersion& imm, Eigen::MatrixXd density_per_param_area,
                           Exec exec, std::shared_ptr<const BallGeometry> geo = nullptr);

/// Integrals of every density over the part of the parameter domain mapped
/// into the open ball |x - x0| < r. Only the first `rows` densities when
/// rows >= 0.
Eigen::VectorXd ball_integrals(const BallData& data, const Eigen::VectorXd& x0, double r, Exec exec,
                               Eigen::Index rows = -1);

}  // namespace confimm::kernels
