#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "confimm/immersion.hpp"

namespace confimm {

struct BranchEstimate {
  double alpha_raw = 0.0;  // least-squares slope of the circle mean of u against log r
  int m = 0;
  double intercept = 0.0;  // least-squares intercept
  double omega0 = 0.0;     // circle mean of u - m log r extrapolated to r = 0
  double density_limit = 0.0;
  double fit_residual = 0.0;
  bool unbranched = false;
  std::vector<double> radii;
  std::vector<double> circle_means;
};

/// Classifies the singularity at the parameter origin of a polar grid.
/// Throws NotFiniteArea (alpha < -0.5) or ClassificationFailed (|alpha - m| > 0.2).
BranchEstimate estimate_branch_order(const SampledImmersion& imm, double exclusion);

/// Circle mean of the nodal field u over |z| = r on a polar grid.
double circle_mean(const ParamGrid& grid, const Eigen::VectorXd& u, double r);

/// Area of the parameter disk D_rho under the induced metric.
double disk_area(const SampledImmersion& imm, double rho);

struct DensityProfile {
  std::vector<double> rho;
  std::vector<double> ratio;
  double limit = 0.0;
};

/// mu_g(D_rho) / (pi r(rho)^2) with r(rho) = e^{omega0} rho^{m+1} / (m+1);
/// the limit is a linear extrapolation in rho through the three smallest rho.
DensityProfile density_ratio_profile(const SampledImmersion& imm, const BranchEstimate& est,
                                     const std::vector<double>& rho);

struct BlowupRow {
  double lambda = 0.0;
  double distance = 0.0;
};

struct BlowupTable {
  std::vector<BlowupRow> rows;
  bool decreasing = false;
};

/// Distances between the rescaled maps lambda^{-(m+1)} (f(lambda z) - f(lambda z0))
/// and the model e^{omega0} (z^{m+1} - z0^{m+1}) / (m+1), after optimal
/// orthogonal alignment of the model plane (Procrustes). Test points lie on
/// circles of radius {0.5, 1, 1.5}|z0|.
BlowupTable blowup_check(const SampledImmersion& imm, const BranchEstimate& est,
                         const Eigen::Vector2d& z0, const std::vector<double>& lambdas);

}  // namespace confimm
