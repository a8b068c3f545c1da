#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "confimm/parallel.hpp"

namespace confimm {

enum class DomainKind { disk, annulus, flat_torus, collar_cylinder, atlas };
enum class ChartCoords { polar, cartesian };
enum class AxisRule { periodic_uniform, gl_panels, scattered };

const char* to_string(DomainKind kind);

struct StencilEntry {
  std::size_t index;
  double weight;
};

/// One coordinate direction of a tensor-product chart: nodes, quadrature
/// weights, the cell each node owns, and derivative/interpolation stencils.
///
/// Three rules exist. Periodic uniform axes use 4th-order central differences
/// and the trapezoid rule. Panel axes carry Gauss-Legendre nodes on each panel
/// and differentiate/interpolate with the panel's Lagrange polynomial.
/// Scattered axes (ingested, non-uniform, non-periodic) use local 5-point
/// Lagrange stencils and a composite interpolatory quadrature.
class Axis {
 public:
  Axis() = default;

  static Axis periodic(std::size_t n, double period, double start = 0.0);
  static Axis panels(std::vector<double> breaks, int points_per_panel);
  static Axis scattered(std::vector<double> nodes, double lo, double hi);

  AxisRule rule() const noexcept { return rule_; }
  std::size_t size() const noexcept { return x_.size(); }
  double node(std::size_t i) const { return x_[i]; }
  double weight(std::size_t i) const { return w_[i]; }
  double cell_lo(std::size_t i) const { return cell_lo_[i]; }
  double cell_hi(std::size_t i) const { return cell_hi_[i]; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool periodic() const noexcept { return rule_ == AxisRule::periodic_uniform; }
  double period() const noexcept { return hi_ - lo_; }
  const std::vector<double>& nodes() const noexcept { return x_; }
  const std::vector<double>& weights() const noexcept { return w_; }
  const std::vector<double>& breaks() const noexcept { return breaks_; }
  int points_per_panel() const noexcept { return ppp_; }

  std::span<const StencilEntry> d1(std::size_t i) const {
    return {d1_.data() + d1_off_[i], d1_off_[i + 1] - d1_off_[i]};
  }
  std::span<const StencilEntry> d2(std::size_t i) const {
    return {d2_.data() + d2_off_[i], d2_off_[i + 1] - d2_off_[i]};
  }

  /// Interpolation weights (and optionally derivative weights) at coordinate x.
  void interpolation(double x, std::vector<StencilEntry>& value,
                     std::vector<StencilEntry>* deriv = nullptr) const;

  /// Weights w_i such that sum_i w_i g(x_i) approximates the integral of g
  /// over [lo, x]. Non-periodic axes only.
  void partial_integral(double x, std::vector<StencilEntry>& out) const;

  /// Index of the panel holding coordinate x (panel axes only).
  std::size_t panel_of(double x) const;

 private:
  void set_stencils(std::vector<std::vector<StencilEntry>> first,
                    std::vector<std::vector<StencilEntry>> second);
  double wrap(double x) const;
  std::pair<std::size_t, std::size_t> window(double x, std::size_t width) const;

  AxisRule rule_ = AxisRule::periodic_uniform;
  std::vector<double> x_, w_, cell_lo_, cell_hi_;
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<double> breaks_;
  int ppp_ = 0;
  std::vector<std::vector<double>> panel_bw_;
  std::vector<StencilEntry> d1_, d2_;
  std::vector<std::size_t> d1_off_, d2_off_;
};

/// A tensor-product chart. Node (i, j) has grid coordinates
/// (a1.node(i), a2.node(j)) and global index offset + i * a2.size() + j.
/// Polar charts use (r, theta); cartesian charts use (s, t).
struct Patch {
  ChartCoords coords = ChartCoords::cartesian;
  Axis a1, a2;
  std::size_t offset = 0;

  std::size_t size() const { return a1.size() * a2.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return offset + i * a2.size() + j; }
  Eigen::Vector2d to_param(double c1, double c2) const;
  Eigen::Vector2d to_grid(const Eigen::Vector2d& z) const;
  double jacobian(double c1) const { return coords == ChartCoords::polar ? c1 : 1.0; }
};

/// Parameter domain of a sampled immersion: one or more tensor-product charts
/// with per-node quadrature weights (parameter-area units), the background
/// conformal metric g0 and its Gauss curvature.
struct ParamGrid {
  DomainKind kind = DomainKind::disk;
  std::vector<Patch> patches;
  std::vector<Eigen::Vector2d> nodes;
  Eigen::VectorXd quad_weights;
  std::vector<Eigen::Matrix2d> background_metric;
  Eigen::VectorXd background_curvature;
  std::optional<int> euler_char;
  /// Geodesic length of collar cylinders.
  std::optional<double> collar_ell;

  std::size_t size() const { return nodes.size(); }
  bool closed() const {
    return kind == DomainKind::flat_torus || kind == DomainKind::atlas;
  }
  std::size_t patch_of(std::size_t node) const;
  /// (i, j) grid indices of a node inside its patch.
  std::pair<std::size_t, std::size_t> local_index(std::size_t node) const;
  bool flat_background() const;
};

struct PolarGridOptions {
  double r_inner = 0.0;
  double r_outer = 1.0;
  int radial_panels = 8;
  int points_per_panel = 16;
  /// Ratio of consecutive panel widths toward the inner radius (disk) or
  /// log-uniform panels (annulus, when grading <= 0).
  double grading = 0.5;
  std::size_t angular = 128;
  /// Radii that must coincide with panel boundaries.
  std::vector<double> extra_breaks;
};

/// Default polar layout for a resolution R: R angular nodes and about R
/// radial nodes in geometrically graded panels of max(16, R/8) points.
PolarGridOptions polar_options(int resolution);
std::vector<double> radial_breaks(const PolarGridOptions& opt);

ParamGrid assemble_grid(DomainKind kind, std::vector<Patch> patches,
                        std::optional<int> euler_char = std::nullopt);
ParamGrid make_polar_grid(const PolarGridOptions& opt);
ParamGrid make_torus_grid(std::size_t n1, std::size_t n2, double l1, double l2);
/// Collar cylinder [0,1] x [-t_half, t_half] with background metric
/// l^2 / cos^2(l t) (ds^2 + dt^2) of Gauss curvature -1.
ParamGrid make_collar_grid(double ell, double t_half, std::size_t ns, int t_panels,
                           int points_per_panel = 16);
/// Closed surface tiled by several charts (sharp partition of unity).
ParamGrid make_atlas(std::vector<ParamGrid> charts, int euler_char);

/// Throws InvalidInput when a ParamGrid invariant fails.
void validate(const ParamGrid& grid);
double parameter_area(const ParamGrid& grid);

/// Derivatives of a field (rows = components, columns = nodes) with respect
/// to the grid coordinates of each patch.
struct GridDerivatives {
  Eigen::MatrixXd d1, d2, d11, d12, d22;
};
GridDerivatives grid_derivatives(const ParamGrid& grid, const Eigen::MatrixXd& field,
                                 bool second, Exec exec = Exec::parallel);

/// Derivatives with respect to the cartesian parameter z = x + iy.
struct CartesianDerivatives {
  Eigen::MatrixXd dx, dy, dxx, dxy, dyy;
};
CartesianDerivatives cartesian_derivatives(const ParamGrid& grid, const Eigen::MatrixXd& field,
                                           bool second, Exec exec = Exec::parallel);

/// Sum of w_i * density_i.
double integrate(const ParamGrid& grid, const Eigen::VectorXd& density);

/// Tensor-product interpolation stencil at a parameter point of a patch.
void interpolation_stencil(const ParamGrid& grid, std::size_t patch, const Eigen::Vector2d& z,
                           std::vector<StencilEntry>& out);

/// Interpolates rows of `field` at parameter point z of a patch.
Eigen::VectorXd interpolate(const ParamGrid& grid, std::size_t patch, const Eigen::MatrixXd& field,
                            const Eigen::Vector2d& z);

}  // namespace confimm
