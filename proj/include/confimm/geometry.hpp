#pragma once

#include <Eigen/Dense>

#include "confimm/immersion.hpp"

namespace confimm {

/// Pointwise geometry of a sampled immersion. Vector fields are n x N.
struct GeometryFields {
  Eigen::VectorXd u;     // 1/2 log(1/2 |Df|^2)
  Eigen::VectorXd e2u;   // 1/2 |Df|^2
  Eigen::VectorXd area;  // sqrt(det g), equal to e2u for conformal input
  Eigen::MatrixXd A11, A12, A22, H;
  Eigen::VectorXd Asq, A0sq, K;
  Eigen::MatrixXcd G;     // (e1 + i e2)/sqrt(2)
  Eigen::VectorXd frame;  // second Gram-Schmidt pivot over first
};

/// Throws DegenerateImmersion at the first node whose frame collapses.
GeometryFields build_geometry(const SampledImmersion& imm, Exec exec = Exec::parallel);

struct EnergyReport {
  double willmore = 0.0;
  double total_A = 0.0;
  double tracefree_A = 0.0;
  double area = 0.0;
  double gauss_bonnet = 0.0;
  double gauss_map_energy = 0.0;
  double diam = 0.0;
};

EnergyReport energy_report(const SampledImmersion& imm, const GeometryFields& geom,
                           Exec exec = Exec::parallel);

/// Phase-invariant |DG|^2 = sum_k |d_k G|^2 - |<d_k G, G>|^2 per node, with
/// derivatives of G taken on the grid.
Eigen::VectorXd gauss_map_density(const SampledImmersion& imm, const GeometryFields& geom,
                                  Exec exec = Exec::parallel);

/// Extrinsic diameter of the sampled image.
double extrinsic_diameter(const Eigen::MatrixXd& f);

struct PointwiseChecks {
  double gauss_equation = 0.0;  // max |K - 1/4|H|^2 + 1/2|A0|^2| / (|K| + 1/4|H|^2 + 1/2|A0|^2)
  double decomposition = 0.0;   // max ||A|^2 - |A0|^2 - 1/2|H|^2| / (|A|^2 + 1)
  double orthogonality = 0.0;   // max |<A_ij, d_k f>| / (|d_ij f| |d_k f|)
  double mean_curvature = 0.0;  // max |H| e^u
};
PointwiseChecks pointwise_checks(const SampledImmersion& imm, const GeometryFields& geom);

/// 8 pi for n = 3, 4 pi for n >= 4.
double gamma_n(int n);

struct GaussMapIdentity {
  double lhs = 0.0;  // int |DG|^2
  double rhs = 0.0;  // 1/2 int |A|^2 dmu
  double gap = 0.0;
  double relative_gap = 0.0;
  double total_A = 0.0;
  double gamma = 0.0;
  bool below_threshold = false;
};
GaussMapIdentity gauss_map_identity_check(const SampledImmersion& imm, const GeometryFields& geom,
                                          Exec exec = Exec::parallel);

}  // namespace confimm
