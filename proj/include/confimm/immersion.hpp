#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "confimm/grid.hpp"

namespace confimm {

enum class DerivativeSource { analytic, finite_difference };

/// Positions and first/second parameter derivatives of a map into R^n,
/// sampled on a ParamGrid. Each field is n x N (one column per node).
struct SampledImmersion {
  std::shared_ptr<const ParamGrid> grid;
  int n = 3;
  Eigen::MatrixXd f, f1, f2, f11, f12, f22;
  DerivativeSource source = DerivativeSource::analytic;
  /// Groups of patches that parametrize overlapping sheets of the image
  /// (caller-declared; empty means embedded).
  std::vector<std::vector<std::size_t>> sheets;

  std::size_t size() const { return grid ? grid->size() : 0; }
};

/// Builds an immersion from positions alone, differentiating on the grid.
SampledImmersion from_positions(std::shared_ptr<const ParamGrid> grid, Eigen::MatrixXd f,
                                Exec exec = Exec::parallel);

/// Re-derives df, d2f from the positions of `imm` by grid differentiation.
SampledImmersion with_grid_derivatives(const SampledImmersion& imm, Exec exec = Exec::parallel);

/// Scales positions and derivatives by c > 0.
SampledImmersion scaled(const SampledImmersion& imm, double c);

/// Max over nodes of (|g11 - g22| + 2|g12|) / (g11 + g22).
double conformality_check(const SampledImmersion& imm);

/// Throws InvalidInput if field shapes disagree with the grid.
void validate(const SampledImmersion& imm);

}  // namespace confimm
