#include "confimm/immersion.hpp"

#include <algorithm>
#include <cmath>

#include "confimm/error.hpp"

namespace confimm {

SampledImmersion from_positions(std::shared_ptr<const ParamGrid> grid, Eigen::MatrixXd f,
                                Exec exec) {
  if (!grid) throw InvalidInput("immersion needs a grid");
  if (static_cast<std::size_t>(f.cols()) != grid->size())
    throw InvalidInput("position field does not match the grid");
  if (f.rows() < 3) throw InvalidInput("ambient dimension must be at least 3");
  SampledImmersion imm;
  imm.grid = std::move(grid);
  imm.n = static_cast<int>(f.rows());
  CartesianDerivatives d = cartesian_derivatives(*imm.grid, f, true, exec);
  imm.f = std::move(f);
  imm.f1 = std::move(d.dx);
  imm.f2 = std::move(d.dy);
  imm.f11 = std::move(d.dxx);
  imm.f12 = std::move(d.dxy);
  imm.f22 = std::move(d.dyy);
  imm.source = DerivativeSource::finite_difference;
  return imm;
}

SampledImmersion with_grid_derivatives(const SampledImmersion& imm, Exec exec) {
  SampledImmersion out = from_positions(imm.grid, imm.f, exec);
  out.sheets = imm.sheets;
  return out;
}

SampledImmersion scaled(const SampledImmersion& imm, double c) {
  SampledImmersion out = imm;
  out.f *= c;
  out.f1 *= c;
  out.f2 *= c;
  out.f11 *= c;
  out.f12 *= c;
  out.f22 *= c;
  return out;
}

double conformality_check(const SampledImmersion& imm) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < imm.f1.cols(); ++k) {
    const double g11 = imm.f1.col(k).squaredNorm();
    const double g22 = imm.f2.col(k).squaredNorm();
    const double g12 = imm.f1.col(k).dot(imm.f2.col(k));
    const double tr = g11 + g22;
    if (tr <= 0.0) continue;
    worst = std::max(worst, (std::abs(g11 - g22) + 2.0 * std::abs(g12)) / tr);
  }
  return worst;
}

void validate(const SampledImmersion& imm) {
  if (!imm.grid) throw InvalidInput("immersion has no grid");
  const auto n = static_cast<Eigen::Index>(imm.grid->size());
  for (const Eigen::MatrixXd* m : {&imm.f, &imm.f1, &imm.f2, &imm.f11, &imm.f12, &imm.f22}) {
    if (m->cols() != n || m->rows() != imm.n)
      throw InvalidInput("immersion field shape does not match grid and dimension");
    if (!m->allFinite()) throw InvalidInput("immersion field has non-finite entries");
  }
  if (imm.n < 3) throw InvalidInput("ambient dimension must be at least 3");
}

}  // namespace confimm
