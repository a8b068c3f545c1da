#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confimm/parallel.hpp"

namespace confimm {

/// Lattice Z + Z(a + ib).
struct Lattice {
  double a = 0.0;
  double b = 1.0;
  bool normalized(double slack = 0.0) const;
};

enum class LatticeMove { shift_plus, shift_minus, invert, reflect };
const char* to_string(LatticeMove move);

struct LatticeReduction {
  Lattice lattice;
  std::vector<LatticeMove> moves;
  /// Integer change of basis: tau_out = (p tau + q) / (r tau + s) when the
  /// determinant is +1, and the same map applied to conj(tau) when it is -1.
  Eigen::Matrix2i basis;
};

/// Reduces tau (Im tau > 0) to 0 <= a <= 1/2, a^2 + b^2 >= 1 by shifts,
/// tau -> -1/tau and a final reflection a -> |a|. Throws InvalidInput.
LatticeReduction normalize_lattice(std::complex<double> tau);

/// Applies an integer basis change as documented on LatticeReduction.
std::complex<double> apply_basis(const Eigen::Matrix2i& m, std::complex<double> tau);

/// Collar half-length T(l) = arccot(sinh(l/2)) / l.
double collar_half_length(double ell);

struct CollarPoint {
  double metric_factor = 0.0;  // l^2 / cos^2(l t)
  double curvature = 0.0;      // sin(l t)
  double length = 0.0;         // l / cos(l t)
};

/// Closed forms along the collar; DomainError when |t| > T(l) - 1e-9.
CollarPoint collar_geometry(double ell, double t);

/// Max relative gap between g_l and the pullback of |dz|^2 / (Im z)^2 under
/// (s, t) -> i exp(l (s + it)) at the given (s, t) points.
double collar_isometry_check(double ell, const std::vector<Eigen::Vector2d>& points);

/// n points uniform in [0, 1] x [-T + margin, T - margin].
std::vector<Eigen::Vector2d> collar_sample_points(double ell, std::size_t n, unsigned seed,
                                                  double margin = 1e-6);

struct DegenerationRow {
  double b = 0.0;
  double willmore = 0.0;
  double total_A = 0.0;
  double min_circle_diam = 0.0;  // after rescaling; 1 by construction
  double raw_min_circle_diam = 0.0;
  double scale = 1.0;
};

struct DegenerationSeries {
  std::string label = "family evidence";
  std::vector<DegenerationRow> rows;
  bool willmore_nondecreasing = false;
  bool final_above_8pi = false;
};

/// Product-torus immersions of C / (Z + ibZ) for an increasing b sequence,
/// each rescaled so that the smallest circle f([0,1] x {v}) has diameter 1.
DegenerationSeries degeneration_series(const std::vector<double>& b_values, int resolution,
                                       Exec exec = Exec::parallel);

}  // namespace confimm
