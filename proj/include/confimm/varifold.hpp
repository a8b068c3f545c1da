#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "confimm/geometry.hpp"

namespace confimm {

namespace kernels {
struct BallData;
}

struct BallProfile {
  Eigen::VectorXd x0;
  std::vector<double> radii;
  std::vector<double> mass;
  std::vector<double> willmore_local;
  std::vector<double> moment;
  std::vector<double> g_values;

  /// g nondecreasing in r up to an absolute slack.
  bool nondecreasing(double slack) const;
};

/// Pushforward-measure statistics of a sampled closed immersion. Holds the
/// geometry and the precomputed cell data shared by all centres and radii.
class Varifold {
 public:
  explicit Varifold(const SampledImmersion& imm, Exec exec = Exec::parallel);
  ~Varifold();
  Varifold(const Varifold&) = delete;
  Varifold& operator=(const Varifold&) = delete;

  const SampledImmersion& immersion() const { return imm_; }
  const GeometryFields& geometry() const { return geom_; }
  /// H_mu per node: H averaged over declared coincident sheets.
  const Eigen::MatrixXd& mean_curvature() const { return h_mu_; }
  /// Number of sheets through each node (1 when embedded).
  const Eigen::VectorXd& multiplicity() const { return mult_; }
  double willmore() const { return willmore_; }
  double area() const { return area_; }

  BallProfile ball_profile(const Eigen::VectorXd& x0, const std::vector<double>& radii) const;
  double mass(const Eigen::VectorXd& x0, double r) const;
  /// (1/16pi) int_{B_rho \ B_sigma} |H_mu + 4 (x - x0)^perp / |x - x0|^2|^2 dmu.
  double defect_integral(const Eigen::VectorXd& x0, double sigma, double rho) const;

 private:
  SampledImmersion imm_;
  Exec exec_;
  GeometryFields geom_;
  Eigen::MatrixXd h_mu_;
  Eigen::VectorXd mult_;
  double willmore_ = 0.0, area_ = 0.0;
  std::unique_ptr<kernels::BallData> data_;
};

BallProfile ball_profile(const SampledImmersion& imm, const Eigen::VectorXd& x0,
                         const std::vector<double>& radii, Exec exec = Exec::parallel);

struct MonotonicityDefect {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;  // gap / max(|lhs|, |rhs|, 1e-3)
};

/// lhs = g(rho) - g(sigma) from the profile; rhs by direct annulus quadrature.
MonotonicityDefect monotonicity_defect(const BallProfile& profile, const Varifold& varifold,
                                       double sigma, double rho);

struct DensityEstimate {
  Eigen::VectorXd point;
  std::vector<double> radii;
  std::vector<double> ratios;
  double theta2 = 0.0;
};

struct LiYauReport {
  double willmore_bound = 0.0;  // W / 4pi
  std::vector<DensityEstimate> points;
  bool bound_holds = false;
  bool embedded_unit_density = false;  // every on-surface point has theta^2 = 1
};

/// theta^2 at each sample point by quadratic extrapolation of mass/(pi r^2)
/// from the radii diam * {0.025, 0.05, 0.1}.
DensityEstimate density_estimate(const Varifold& varifold, const Eigen::VectorXd& point);
LiYauReport li_yau_check(const Varifold& varifold, const std::vector<Eigen::VectorXd>& points,
                         double tol = 1e-2);

struct DiameterBounds {
  double lower = 0.0;  // sqrt(area / W)
  double diam = 0.0;
  double upper_ratio = 0.0;  // diam / sqrt(area W)
  bool lower_holds = false;
};
DiameterBounds diameter_bounds_check(const Varifold& varifold);

}  // namespace confimm
