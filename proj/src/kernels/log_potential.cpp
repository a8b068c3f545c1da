#include <algorithm>
#include <cmath>
#include <numbers>

#include "confimm/quadrature.hpp"
#include "kernels.hpp"

namespace confimm::kernels {

namespace {

constexpr int kRefine = 10;
constexpr int kOrder = 16;

// Breakpoints for integrating against a kernel with a kink at r: panel
// boundaries plus geometric refinement toward r from both sides.
std::vector<double> breakpoints(const Axis& radial, double r) {
  const double R = radial.hi();
  std::vector<double> b(radial.breaks().begin(), radial.breaks().end());
  if (r <= 0.0) {
    const double first = radial.breaks()[1];
    for (int j = 1; j <= kRefine; ++j) b.push_back(first * std::ldexp(1.0, -j));
  } else {
    b.push_back(r);
    for (int k = 1; k <= kRefine; ++k) b.push_back(r * (1.0 - std::ldexp(1.0, -k)));
    for (int k = 0; k <= kRefine; ++k) b.push_back(r * (1.0 + std::ldexp(1.0, -k)));
    for (double x = 4.0 * r; x < R; x *= 2.0) b.push_back(x);
  }
  std::vector<double> kept;
  for (double x : b)
    if (x >= 0.0 && x <= R) kept.push_back(x);
  std::sort(kept.begin(), kept.end());
  std::vector<double> out;
  for (double x : kept)
    if (out.empty() || x - out.back() > 1e-14 * R) out.push_back(x);
  return out;
}

}  // namespace

void radial_mode_integrals(const Axis& radial, const Eigen::MatrixXcd& spectra,
                           const std::vector<double>& targets, Eigen::MatrixXcd& out, Exec exec) {
  const Eigen::Index modes = spectra.cols();
  out.resize(static_cast<Eigen::Index>(targets.size()), modes);
  const Rule1d ref = gauss_legendre(kOrder, 0.0, 1.0);
  for_each_index_dynamic(exec, targets.size(), [&](std::size_t t) {
    const double r = targets[t];
    const std::vector<double> b = breakpoints(radial, r);
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(modes);
    Eigen::VectorXcd interp(modes);
    std::vector<StencilEntry> st;
    for (std::size_t p = 0; p + 1 < b.size(); ++p) {
      const double a = b[p], len = b[p + 1] - b[p];
      for (int q = 0; q < kOrder; ++q) {
        const double x = a + len * ref.x[static_cast<std::size_t>(q)];
        const double wx = len * ref.w[static_cast<std::size_t>(q)] * x;
        const double big = std::max(r, x), small = std::min(r, x);
        const double ratio = small / big;
        // Modes whose kernel factor ratio^m has underflowed below 1e-18 are skipped.
        Eigen::Index used = modes;
        if (ratio < 1.0) {
          const double cut = ratio > 0.0 ? std::log(1e-18) / std::log(ratio) : 0.0;
          used = std::min<Eigen::Index>(modes, static_cast<Eigen::Index>(cut) + 2);
        }
        radial.interpolation(x, st);
        interp.head(used).setZero();
        for (const auto& e : st)
          interp.head(used) +=
              e.weight * spectra.row(static_cast<Eigen::Index>(e.index)).head(used).transpose();
        acc[0] += wx * std::log(big) * interp[0];
        double power = 1.0;
        for (Eigen::Index m = 1; m < used; ++m) {
          power *= ratio;
          acc[m] -= wx * power / (2.0 * static_cast<double>(m)) * interp[m];
        }
      }
    }
    out.row(static_cast<Eigen::Index>(t)) = -acc.transpose();
  });
}

void direct_log_sum(const ParamGrid& grid, double radius, const Eigen::VectorXd& source,
                    Eigen::VectorXd& v, Exec exec) {
  const std::size_t n = grid.size();
  v.resize(static_cast<Eigen::Index>(n));
  const double pi = std::numbers::pi;
  for_each_index(exec, n, [&](std::size_t i) {
    const Eigen::Vector2d zi = grid.nodes[i];
    const double si = source[static_cast<Eigen::Index>(i)];
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d2 = (grid.nodes[j] - zi).squaredNorm();
      sum += 0.5 * std::log(d2) * (source[static_cast<Eigen::Index>(j)] - si) *
             grid.quad_weights[static_cast<Eigen::Index>(j)];
    }
    const double exact = pi * (zi.squaredNorm() - radius * radius) / 2.0 +
                         pi * radius * radius * std::log(radius);
    v[static_cast<Eigen::Index>(i)] = -(sum + si * exact) / (2.0 * pi);
  });
}

}  // namespace confimm::kernels
