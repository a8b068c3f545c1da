#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "confimm/immersion.hpp"

namespace confimm {

/// x -> lambda R x + t, optionally followed by the inversion
/// I_{x0}(y) = x0 + (y - x0) / |y - x0|^2.
struct MobiusMap {
  double scale = 1.0;
  Eigen::MatrixXd rotation;
  Eigen::VectorXd translation;
  std::optional<Eigen::VectorXd> inversion_center;

  static MobiusMap identity(int n);
  static MobiusMap inversion(const Eigen::VectorXd& x0);
  static MobiusMap similarity(double scale, Eigen::MatrixXd rotation, Eigen::VectorXd translation);

  int dim() const { return static_cast<int>(translation.size()); }
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
};

/// Throws InvalidInput if the map violates its invariants.
void validate(const MobiusMap& map);

/// m2 after m1; both must be similarities.
MobiusMap compose(const MobiusMap& m2, const MobiusMap& m1);

/// Transformed positions and chain-ruled first and second derivatives.
/// Throws CenterOnSurface if a node lies within 1e-8 of the inversion centre.
SampledImmersion apply(const MobiusMap& map, const SampledImmersion& imm, Exec exec = Exec::parallel);

/// Conformal factor predicted by the update rule: u + log lambda, minus
/// log |lambda R f + t - x0|^2 when an inversion is present.
Eigen::VectorXd predicted_conformal_factor(const MobiusMap& map, const SampledImmersion& imm);

/// Max over nodes of | |A0_hat|^2 dmu_hat - |A0|^2 dmu | (densities per parameter area).
double tracefree_invariance_check(const SampledImmersion& imm, const MobiusMap& map,
                                  Exec exec = Exec::parallel);

/// A point of f^{-1}{x0} with its branching order.
struct Preimage {
  std::size_t patch = 0;
  Eigen::Vector2d z = Eigen::Vector2d::Zero();
  int order = 0;
};

struct InversionIdentity {
  double lhs = 0.0;  // W(f_hat), excision-extrapolated when preimages are declared
  double rhs = 0.0;  // W(f) - 4 pi sum (m + 1)
  double gap = 0.0;
  std::vector<double> excision_radii;
  std::vector<double> excised_willmore;
  double extrapolation_error = 0.0;
};

/// Parameter radii removed around declared preimages.
inline const std::vector<double> kExcisionRadii = {0.2, 0.1, 0.05};

InversionIdentity inversion_energy_identity(const SampledImmersion& imm, const Eigen::VectorXd& x0,
                                            const std::vector<Preimage>& preimages,
                                            Exec exec = Exec::parallel);

}  // namespace confimm
