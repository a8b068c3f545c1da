#include <algorithm>
#include <cmath>
#include <limits>

#include "confimm/quadrature.hpp"
#include "kernels.hpp"

namespace confimm::kernels {

namespace {

constexpr int kLines = 4;
constexpr int kSamples = 9;

struct CellFrame {
  double lo1, hi1, lo2, hi2, c1, c2;
};

CellFrame cell_of(const Patch& p, std::size_t i, std::size_t j) {
  return {p.a1.cell_lo(i), p.a1.cell_hi(i), p.a2.cell_lo(j), p.a2.cell_hi(j), p.a1.node(i),
          p.a2.node(j)};
}

}  // namespace

std::shared_ptr<const BallGeometry> prepare_ball_geometry(const SampledImmersion& imm, Exec exec) {
  const ParamGrid& grid = *imm.grid;
  auto geo = std::make_shared<BallGeometry>();
  GridDerivatives gf = grid_derivatives(grid, imm.f, true, exec);
  geo->ft = std::move(gf.d2);
  geo->ftt = std::move(gf.d22);
  geo->reach.resize(static_cast<Eigen::Index>(grid.size()));
  for (const auto& p : grid.patches) {
    const std::size_t n2 = p.a2.size();
    for_each_index(exec, p.size(), [&](std::size_t local) {
      const std::size_t i = local / n2, j = local % n2;
      const auto k = static_cast<Eigen::Index>(p.index(i, j));
      const CellFrame c = cell_of(p, i, j);
      double dz;
      if (p.coords == ChartCoords::polar) {
        const double dr = std::max(c.c1 - c.lo1, c.hi1 - c.c1);
        const double dt = std::max(c.c2 - c.lo2, c.hi2 - c.c2);
        dz = std::hypot(dr, c.hi1 * dt);
      } else {
        dz = std::hypot(std::max(c.c1 - c.lo1, c.hi1 - c.c1), std::max(c.c2 - c.lo2, c.hi2 - c.c2));
      }
      const double first = std::max(imm.f1.col(k).norm(), imm.f2.col(k).norm()) * std::sqrt(2.0);
      const double second = std::sqrt(imm.f11.col(k).squaredNorm() + 2.0 * imm.f12.col(k).squaredNorm() +
                                      imm.f22.col(k).squaredNorm());
      geo->reach[k] = 1.25 * (first * dz + 0.5 * second * dz * dz);
    });
  }
  return geo;
}

BallData prepare_ball_data(const SampledImmersion& imm, Eigen::MatrixXd density, Exec exec,
                           std::shared_ptr<const BallGeometry> geo) {
  const ParamGrid& grid = *imm.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  BallData d;
  d.imm = &imm;
  d.geo = geo ? std::move(geo) : prepare_ball_geometry(imm, exec);
  for (const auto& p : grid.patches)
    for (std::size_t i = 0; i < p.a1.size(); ++i)
      for (std::size_t j = 0; j < p.a2.size(); ++j)
        density.col(static_cast<Eigen::Index>(p.index(i, j))) *= p.jacobian(p.a1.node(i));
  GridDerivatives g = grid_derivatives(grid, density, true, exec);
  d.density = std::move(density);
  d.grad1 = std::move(g.d1);
  d.grad2 = std::move(g.d2);
  d.curv1 = Eigen::MatrixXd::Zero(d.density.rows(), n);
  d.curv2 = Eigen::MatrixXd::Zero(d.density.rows(), n);
  for (const auto& p : grid.patches) {
    const auto first = static_cast<Eigen::Index>(p.offset), count = static_cast<Eigen::Index>(p.size());
    if (p.a1.periodic()) d.curv1.middleCols(first, count) = g.d11.middleCols(first, count);
    if (p.a2.periodic()) d.curv2.middleCols(first, count) = g.d22.middleCols(first, count);
  }
  d.full.resize(d.density.rows(), n);
  for (const auto& p : grid.patches) {
    const std::size_t n2 = p.a2.size();
    const bool panels = p.a1.rule() == AxisRule::gl_panels;
    for_each_index(exec, p.size(), [&](std::size_t local) {
      const std::size_t i = local / n2, j = local % n2;
      const auto k = static_cast<Eigen::Index>(p.index(i, j));
      const double h1 = p.a1.cell_hi(i) - p.a1.cell_lo(i), h2 = p.a2.cell_hi(j) - p.a2.cell_lo(j);
      if (!panels) {
        d.full.col(k) = (p.a1.weight(i) * p.a2.weight(j)) *
                        (d.density.col(k) + (h1 * h1 / 24.0) * d.curv1.col(k) + (h2 * h2 / 24.0) * d.curv2.col(k));
        return;
      }
      // Cell integral of the panel interpolant along a1.
      const Rule1d rule = gauss_legendre(std::max(p.a1.points_per_panel(), 2), p.a1.cell_lo(i), p.a1.cell_hi(i));
      std::vector<StencilEntry> st;
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(d.density.rows());
      for (std::size_t m = 0; m < rule.x.size(); ++m) {
        p.a1.interpolation(rule.x[m], st);
        for (const auto& e : st) {
          const auto kk = static_cast<Eigen::Index>(p.index(e.index, j));
          acc += (rule.w[m] * e.weight) * (d.density.col(kk) + (h2 * h2 / 24.0) * d.curv2.col(kk));
        }
      }
      d.full.col(k) = p.a2.weight(j) * acc;
    });
  }
  return d;
}

Eigen::VectorXd ball_integrals(const BallData& data, const Eigen::VectorXd& x0, double r, Exec exec,
                               Eigen::Index rows) {
  const SampledImmersion& imm = *data.imm;
  const ParamGrid& grid = *imm.grid;
  const Eigen::Index q = rows >= 0 ? std::min(rows, data.density.rows()) : data.density.rows();
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd contrib = Eigen::MatrixXd::Zero(q, n);
  const Rule1d lines = gauss_legendre(kLines, 0.0, 1.0);
  const double r2 = r * r;
  // Sub-intervals of lines and cut samples scale with cell size over r.
  auto count = [r](double extent, double lo, double hi) {
    return static_cast<int>(std::clamp(std::ceil(8.0 * extent / r), lo, hi));
  };
  for (const auto& p : grid.patches) {
    const std::size_t n2 = p.a2.size();
    const bool panels = p.a1.rule() == AxisRule::gl_panels;
    for_each_index_dynamic(exec, p.size(), [&](std::size_t local) {
      const std::size_t i = local / n2, j = local % n2;
      const auto k = static_cast<Eigen::Index>(p.index(i, j));
      const double dist = (imm.f.col(k) - x0).norm();
      const double reach = data.geo->reach[k];
      if (dist + reach < r) {
        contrib.col(k) = data.full.col(k).head(q);
        return;
      }
      if (dist - reach >= r) return;
      // Straddling cell: second-order Taylor model of f about the node, cut
      // along kLines Gauss-Legendre lines in whichever grid direction is more
      // transverse to the sphere |x - x0| = r.
      const CellFrame c = cell_of(p, i, j);
      const Eigen::Vector2d zk = grid.nodes[static_cast<std::size_t>(k)];
      const Eigen::VectorXd base = imm.f.col(k) - x0;
      auto model = [&](double s, double t) -> Eigen::VectorXd {
        const Eigen::Vector2d dz = p.to_param(s, t) - zk;
        return base + dz.x() * imm.f1.col(k) + dz.y() * imm.f2.col(k) +
               0.5 * (dz.x() * dz.x() * imm.f11.col(k) + 2.0 * dz.x() * dz.y() * imm.f12.col(k) +
                      dz.y() * dz.y() * imm.f22.col(k));
      };
      auto phi = [&](double s, double t) { return model(s, t).squaredNorm() - r2; };
      const double h1 = c.hi1 - c.lo1, h2 = c.hi2 - c.lo2;
      const double extent1 = (model(c.hi1, c.c2) - model(c.lo1, c.c2)).norm();
      const double extent2 = (model(c.c1, c.hi2) - model(c.c1, c.lo2)).norm();
      int pieces = 1, samples = kSamples;
      const double scale1 = panels ? 1.0 : p.a1.weight(i) / h1;
      const double scale2 = p.a2.weight(j) / h2;
      // Density and its t-slope along the a1 direction at column j.
      std::vector<StencilEntry> st;
      Eigen::VectorXd psi(q), slope(q), bend(q);
      auto density_at = [&](double s) {
        if (!panels) {
          const double ds1 = s - c.c1;
          psi = data.density.col(k).head(q) + ds1 * data.grad1.col(k).head(q) +
                (0.5 * ds1 * ds1) * data.curv1.col(k).head(q);
          slope = data.grad2.col(k).head(q);
          bend = data.curv2.col(k).head(q);
          return;
        }
        p.a1.interpolation(s, st);
        psi.setZero();
        slope.setZero();
        bend.setZero();
        for (const auto& e : st) {
          const auto kk = static_cast<Eigen::Index>(p.index(e.index, j));
          psi += e.weight * data.density.col(kk).head(q);
          slope += e.weight * data.grad2.col(kk).head(q);
          bend += e.weight * data.curv2.col(kk).head(q);
        }
      };
      // Accurate model on panel axes: a1 interpolant of f + dt f_t + dt^2/2 f_tt.
      std::vector<StencilEntry> fst;
      double fst_s = std::numeric_limits<double>::quiet_NaN();
      Eigen::VectorXd y(imm.n);
      auto phi_fine = [&](double s, double t) {
        if (!(s == fst_s)) {
          p.a1.interpolation(s, fst);
          fst_s = s;
        }
        const double dtt = t - c.c2;
        y = -x0;
        for (const auto& e : fst) {
          const auto kk = static_cast<Eigen::Index>(p.index(e.index, j));
          y += e.weight * (imm.f.col(kk) + dtt * data.geo->ft.col(kk) + 0.5 * dtt * dtt * data.geo->ftt.col(kk));
        }
        return y.squaredNorm() - r2;
      };
      std::vector<double> cuts;
      auto find_cuts = [&](double lo, double hi, auto&& along, auto&& fine) {
        const double h = hi - lo;
        double prev_x = lo, prev_v = along(lo);
        cuts.assign(1, lo);
        for (int m = 1; m <= samples; ++m) {
          const double x = lo + h * m / samples;
          const double v = along(x);
          if ((v < 0) != (prev_v < 0)) {
            double a = prev_x, b = x, va = prev_v;
            for (int it = 0; it < 40; ++it) {
              const double mid = 0.5 * (a + b);
              const double vm = along(mid);
              if ((vm < 0) == (va < 0)) {
                a = mid;
                va = vm;
              } else {
                b = mid;
              }
            }
            double root = 0.5 * (a + b);
            if (panels) {
              // Secant polish on the accurate model, kept inside the sample bracket.
              double x1 = root, x2 = root + 1e-6 * h;
              double v1 = fine(x1), v2 = fine(x2);
              for (int it = 0; it < 6 && v2 != v1; ++it) {
                const double x3 = std::clamp(x2 - v2 * (x2 - x1) / (v2 - v1), prev_x, x);
                x1 = x2;
                v1 = v2;
                x2 = x3;
                v2 = fine(x2);
                if (std::abs(x2 - x1) < 1e-14 * h) break;
              }
              root = x2;
            }
            cuts.push_back(root);
          }
          prev_x = x;
          prev_v = v;
        }
        cuts.push_back(hi);
      };
      const double ds = 1e-3 * h1, dt = 1e-3 * h2;
      const double vary1 = std::abs(phi(c.c1 + ds, c.c2) - phi(c.c1 - ds, c.c2)) / ds * h1;
      const double vary2 = std::abs(phi(c.c1, c.c2 + dt) - phi(c.c1, c.c2 - dt)) / dt * h2;
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(q);
      const int seg_points = panels ? std::max(p.a1.points_per_panel(), 2) : 2;
      if (vary1 * extent2 >= vary2 * extent1) {
        pieces = count(extent2, 1.0, 64.0);
        samples = count(extent1, kSamples, 64.0);
        for (int l = 0; l < kLines * pieces; ++l) {
          const double t = c.lo2 + h2 * (l / kLines + lines.x[static_cast<std::size_t>(l % kLines)]) / pieces;
          const double wt = scale1 * scale2 * h2 * lines.w[static_cast<std::size_t>(l % kLines)] / pieces;
          find_cuts(c.lo1, c.hi1, [&](double s) { return phi(s, t); },
                    [&](double s) { return phi_fine(s, t); });
          for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
            const double a = cuts[seg], b = cuts[seg + 1];
            if (b <= a || phi(0.5 * (a + b), t) >= 0.0) continue;
            const Rule1d rule = gauss_legendre(seg_points, a, b);
            for (std::size_t m = 0; m < rule.x.size(); ++m) {
              density_at(rule.x[m]);
              acc += (wt * rule.w[m]) * (psi + (t - c.c2) * slope + (0.5 * (t - c.c2) * (t - c.c2)) * bend);
            }
          }
        }
      } else {
        pieces = count(extent1, 1.0, 64.0);
        samples = count(extent2, kSamples, 64.0);
        for (int l = 0; l < kLines * pieces; ++l) {
          const double s = c.lo1 + h1 * (l / kLines + lines.x[static_cast<std::size_t>(l % kLines)]) / pieces;
          const double ws = scale1 * scale2 * h1 * lines.w[static_cast<std::size_t>(l % kLines)] / pieces;
          find_cuts(c.lo2, c.hi2, [&](double t) { return phi(s, t); },
                    [&](double t) { return phi_fine(s, t); });
          bool evaluated = false;
          for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
            const double a = cuts[seg], b = cuts[seg + 1];
            if (b <= a || phi(s, 0.5 * (a + b)) >= 0.0) continue;
            if (!evaluated) density_at(s);
            evaluated = true;
            const double mid = 0.5 * (a + b) - c.c2, len = b - a;
            acc += (ws * len) * (psi + mid * slope + (0.5 * (mid * mid + len * len / 12.0)) * bend);
          }
        }
      }
      contrib.col(k) = acc;
    });
  }
  Eigen::VectorXd out(q);
  for (Eigen::Index a = 0; a < q; ++a) {
    const Eigen::VectorXd row = contrib.row(a).transpose();
    out[a] = ordered_sum({row.data(), static_cast<std::size_t>(row.size())});
  }
  return out;
}

}  // namespace confimm::kernels
