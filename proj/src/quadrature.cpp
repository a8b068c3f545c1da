#include "confimm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace confimm {

namespace {

Rule1d legendre_reference(int n) {
  Rule1d r;
  r.x.resize(n);
  r.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

}  // namespace

Rule1d gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<int, Rule1d> cache;
  Rule1d ref;
  {
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, legendre_reference(n)).first;
    ref = it->second;
  }
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    ref.x[i] = c + h * ref.x[i];
    ref.w[i] *= h;
  }
  return ref;
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> w(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) w[j] *= (nodes[j] - nodes[k]);
    w[j] = 1.0 / w[j];
  }
  // Normalize to avoid overflow for narrow panels.
  double scale = 0.0;
  for (double v : w) scale = std::max(scale, std::abs(v));
  for (double& v : w) v /= scale;
  return w;
}

void lagrange_basis(std::span<const double> nodes, std::span<const double> bw, double x,
                    std::span<double> value, std::span<double> deriv) {
  const std::size_t n = nodes.size();
  double span_len = std::abs(nodes[n - 1] - nodes[0]);
  if (span_len == 0.0) span_len = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(x - nodes[j]) <= 1e-13 * span_len) {
      for (std::size_t k = 0; k < n; ++k) value[k] = (k == j) ? 1.0 : 0.0;
      if (!deriv.empty()) {
        // l_k'(x_j) from the barycentric differentiation formula.
        double diag = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == j) continue;
          deriv[k] = (bw[k] / bw[j]) / (nodes[j] - nodes[k]);
          diag -= deriv[k];
        }
        deriv[j] = diag;
      }
      return;
    }
  }
  double s = 0.0, ds = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = x - nodes[j];
    s += bw[j] / d;
    ds -= bw[j] / (d * d);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double d = x - nodes[j];
    value[j] = bw[j] / (d * s);
    if (!deriv.empty()) deriv[j] = -bw[j] / (d * d * s) - bw[j] * ds / (d * s * s);
  }
}

Eigen::MatrixXd differentiation_matrix(std::span<const double> nodes) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  const auto bw = barycentric_weights(nodes);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (bw[j] / bw[i]) / (nodes[i] - nodes[j]);
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

}  // namespace confimm
