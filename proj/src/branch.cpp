#include "confimm/branch.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "confimm/error.hpp"

namespace confimm {

namespace {

const Patch& polar_chart(const ParamGrid& grid) {
  if (grid.patches.size() != 1 || grid.patches[0].coords != ChartCoords::polar)
    throw DomainError("branch analysis needs a single-chart polar grid centred at the singularity");
  return grid.patches[0];
}

Eigen::VectorXd conformal_factor(const SampledImmersion& imm) {
  const Eigen::VectorXd e2u =
      0.5 * (imm.f1.colwise().squaredNorm() + imm.f2.colwise().squaredNorm()).transpose();
  return 0.5 * e2u.array().log().matrix();
}

}  // namespace

double circle_mean(const ParamGrid& grid, const Eigen::VectorXd& u, double r) {
  const Patch& p = polar_chart(grid);
  std::vector<StencilEntry> st;
  p.a1.interpolation(r, st);
  double sum = 0.0;
  for (std::size_t j = 0; j < p.a2.size(); ++j) {
    double val = 0.0;
    for (const auto& e : st) val += e.weight * u[static_cast<Eigen::Index>(p.index(e.index, j))];
    sum += val * p.a2.weight(j);
  }
  return sum / p.a2.period();
}

BranchEstimate estimate_branch_order(const SampledImmersion& imm, double exclusion) {
  const Patch& p = polar_chart(*imm.grid);
  if (!(exclusion > 0.0)) throw InvalidInput("exclusion radius must be positive");
  const Eigen::VectorXd u = conformal_factor(imm);
  if (!u.allFinite()) throw DomainError("conformal factor is not finite on the grid");
  BranchEstimate est;
  for (int j = 1; j < 60; ++j) {
    const double r = std::ldexp(1.0, -j);
    if (r < exclusion || r <= p.a1.lo()) break;
    if (r >= p.a1.hi()) continue;
    est.radii.push_back(r);
    est.circle_means.push_back(circle_mean(*imm.grid, u, r));
  }
  const std::size_t k = est.radii.size();
  if (k < 3) throw DomainError("fewer than three dyadic radii between the exclusion radius and 1/2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log(est.radii[i]), y = est.circle_means[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double kd = static_cast<double>(k);
  est.alpha_raw = (kd * sxy - sx * sy) / (kd * sxx - sx * sx);
  est.intercept = (sy - est.alpha_raw * sx) / kd;
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = est.circle_means[i] - est.alpha_raw * std::log(est.radii[i]) - est.intercept;
    rss += e * e;
  }
  est.fit_residual = std::sqrt(rss / kd);
  if (est.alpha_raw < -0.5)
    throw NotFiniteArea("log coefficient " + std::to_string(est.alpha_raw) +
                        " < -1/2: the area near the singularity is infinite");
  est.m = std::max(0, static_cast<int>(std::lround(est.alpha_raw)));
  if (std::abs(est.alpha_raw - est.m) > 0.2)
    throw ClassificationFailed("log coefficient " + std::to_string(est.alpha_raw) +
                               " is not within 0.2 of an integer");
  est.unbranched = est.m == 0;
  // omega(r) = mean u - m log r = omega(0) + c r^2 + ...: Richardson through
  // the two smallest radii (ratio 2).
  const double r1 = est.radii[k - 1], r2 = est.radii[k - 2];
  const double w1 = est.circle_means[k - 1] - est.m * std::log(r1);
  const double w2 = est.circle_means[k - 2] - est.m * std::log(r2);
  est.omega0 = (4.0 * w1 - w2) / 3.0;
  std::vector<double> rho;
  for (double r = 0.25; r >= std::max(exclusion, p.a1.breaks()[1]) && rho.size() < 6; r *= 0.5)
    rho.push_back(r);
  if (p.a1.lo() == 0.0 && rho.size() >= 3) est.density_limit = density_ratio_profile(imm, est, rho).limit;
  return est;
}

double disk_area(const SampledImmersion& imm, double rho) {
  const Patch& p = polar_chart(*imm.grid);
  if (p.a1.lo() != 0.0) throw DomainError("disk areas need a grid containing the origin");
  std::vector<StencilEntry> st;
  p.a1.partial_integral(rho, st);
  double total = 0.0;
  for (const auto& e : st) {
    double ring = 0.0;
    for (std::size_t j = 0; j < p.a2.size(); ++j) {
      const auto k = static_cast<Eigen::Index>(p.index(e.index, j));
      const double g11 = imm.f1.col(k).squaredNorm(), g22 = imm.f2.col(k).squaredNorm();
      const double g12 = imm.f1.col(k).dot(imm.f2.col(k));
      ring += std::sqrt(std::max(0.0, g11 * g22 - g12 * g12)) * p.a2.weight(j);
    }
    total += e.weight * p.a1.node(e.index) * ring;
  }
  return total;
}

DensityProfile density_ratio_profile(const SampledImmersion& imm, const BranchEstimate& est,
                                     const std::vector<double>& rho) {
  const Patch& p = polar_chart(*imm.grid);
  if (rho.empty()) throw InvalidInput("empty rho list");
  DensityProfile out;
  const double smallest = p.a1.breaks().size() > 1 ? p.a1.breaks()[1] : p.a1.hi();
  for (double r : rho) {
    if (!(r >= smallest * (1 - 1e-12)) || r > p.a1.hi())
      throw DomainError("rho below the grid resolution or outside the chart");
    const double rr = std::exp(est.omega0) * std::pow(r, est.m + 1) / (est.m + 1);
    out.rho.push_back(r);
    out.ratio.push_back(disk_area(imm, r) / (std::numbers::pi * rr * rr));
  }
  std::vector<std::size_t> idx(out.rho.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return out.rho[a] < out.rho[b]; });
  const std::size_t k = std::min<std::size_t>(3, idx.size());
  if (k == 1) {
    out.limit = out.ratio[idx[0]];
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = out.rho[idx[i]], y = out.ratio[idx[i]];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double kd = static_cast<double>(k);
  const double slope = (kd * sxy - sx * sy) / (kd * sxx - sx * sx);
  out.limit = (sy - slope * sx) / kd;
  return out;
}

BlowupTable blowup_check(const SampledImmersion& imm, const BranchEstimate& est,
                         const Eigen::Vector2d& z0, const std::vector<double>& lambdas) {
  const Patch& p = polar_chart(*imm.grid);
  if (z0.norm() == 0.0) throw InvalidInput("blow-up base point must be nonzero");
  using cd = std::complex<double>;
  const int m = est.m;
  const cd w0(z0.x(), z0.y());
  std::vector<Eigen::Vector2d> pts;
  for (double s : {0.5, 1.0, 1.5})
    for (int q = 0; q < 16; ++q) {
      const double phi = 2.0 * std::numbers::pi * q / 16 + 0.1;
      pts.push_back(s * z0.norm() * Eigen::Vector2d(std::cos(phi), std::sin(phi)));
    }
  const auto np = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd model(2, np);
  const double scale = std::exp(est.omega0) / (m + 1);
  for (Eigen::Index k = 0; k < np; ++k) {
    const cd z(pts[static_cast<std::size_t>(k)].x(), pts[static_cast<std::size_t>(k)].y());
    const cd v = scale * (std::pow(z, m + 1) - std::pow(w0, m + 1));
    model(0, k) = v.real();
    model(1, k) = v.imag();
  }
  BlowupTable table;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0) || lambda * 1.5 * z0.norm() >= p.a1.hi() ||
        lambda * 0.5 * z0.norm() <= p.a1.lo())
      throw DomainError("lambda moves the test points outside the chart");
    const Eigen::VectorXd base = interpolate(*imm.grid, 0, imm.f, lambda * z0);
    Eigen::MatrixXd F(imm.n, np);
    const double factor = std::pow(lambda, -(m + 1));
    for (Eigen::Index k = 0; k < np; ++k)
      F.col(k) = factor * (interpolate(*imm.grid, 0, imm.f, lambda * pts[static_cast<std::size_t>(k)]) - base);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(F * model.transpose(),
                                                Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd Q = svd.matrixU() * svd.matrixV().transpose();
    const double dist = (F - Q * model).colwise().norm().maxCoeff();
    table.rows.push_back({lambda, dist});
  }
  table.decreasing = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const bool smaller_lambda = table.rows[i].lambda < table.rows[i - 1].lambda;
    const double a = table.rows[i].distance, b = table.rows[i - 1].distance;
    const bool ok = smaller_lambda ? a <= b * (1 + 1e-9) + 1e-12 : b <= a * (1 + 1e-9) + 1e-12;
    table.decreasing = table.decreasing && ok;
  }
  return table;
}

}  // namespace confimm
