#include <atomic>
#include <cmath>
#include <complex>

#include "kernels.hpp"

namespace confimm::kernels {

namespace {

constexpr double kPivotRatio = 1e-10;

}  // namespace

std::ptrdiff_t node_geometry(const SampledImmersion& imm, GeometryFields& out, Exec exec) {
  const std::size_t n = imm.size();
  const Eigen::Index dim = imm.n;
  std::atomic<std::ptrdiff_t> bad{-1};
  for_each_index(exec, n, [&](std::size_t node) {
    const auto k = static_cast<Eigen::Index>(node);
    const Eigen::VectorXd f1 = imm.f1.col(k), f2 = imm.f2.col(k);
    const double n1 = f1.norm(), n2 = f2.norm();

    // e1 follows d1 f unless it is much shorter than d2 f, so the Gauss-map
    // representative varies smoothly between neighbouring nodes.
    const bool swap = n1 < 1e-3 * n2;
    const Eigen::VectorXd& p = swap ? f2 : f1;
    const Eigen::VectorXd& q = swap ? f1 : f2;
    const double pn = swap ? n2 : n1;
    Eigen::VectorXd a = p / pn;
    Eigen::VectorXd b = q - q.dot(a) * a;
    const double ratio = pn > 0.0 ? b.norm() / pn : 0.0;
    out.frame[k] = ratio;
    if (!(ratio >= kPivotRatio)) {
      std::ptrdiff_t expected = -1;
      bad.compare_exchange_strong(expected, static_cast<std::ptrdiff_t>(node));
      return;
    }
    b /= b.norm();
    Eigen::VectorXd e1 = swap ? b : a;
    Eigen::VectorXd e2 = swap ? a : b;
    if (f1.dot(e1) * f2.dot(e2) - f1.dot(e2) * f2.dot(e1) < 0.0) e2 = -e2;

    auto normal = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return v - v.dot(e1) * e1 - v.dot(e2) * e2;
    };
    const Eigen::VectorXd a11 = normal(imm.f11.col(k));
    const Eigen::VectorXd a12 = normal(imm.f12.col(k));
    const Eigen::VectorXd a22 = normal(imm.f22.col(k));

    const double g11 = n1 * n1, g22 = n2 * n2, g12 = f1.dot(f2);
    const double det = g11 * g22 - g12 * g12;
    const double i11 = g22 / det, i22 = g11 / det, i12 = -g12 / det;
    const Eigen::VectorXd h = i11 * a11 + 2.0 * i12 * a12 + i22 * a22;

    // |A|_g^2 = g^{ik} g^{jl} <A_ij, A_kl>
    const double s11 = a11.squaredNorm(), s22 = a22.squaredNorm(), s12 = a12.squaredNorm();
    const double p1122 = a11.dot(a22), p1112 = a11.dot(a12), p1222 = a12.dot(a22);
    const double asq = i11 * i11 * s11 + i22 * i22 * s22 + 2.0 * (i11 * i22 + i12 * i12) * s12 +
                       2.0 * i12 * i12 * p1122 + 4.0 * i11 * i12 * p1112 + 4.0 * i22 * i12 * p1222;

    out.A11.col(k) = a11;
    out.A12.col(k) = a12;
    out.A22.col(k) = a22;
    out.H.col(k) = h;
    out.e2u[k] = 0.5 * (g11 + g22);
    out.u[k] = 0.5 * std::log(out.e2u[k]);
    out.area[k] = std::sqrt(det);
    out.K[k] = (p1122 - s12) / det;
    out.Asq[k] = asq;
    out.A0sq[k] = asq - 0.5 * h.squaredNorm();
    const double inv = 1.0 / std::sqrt(2.0);
    for (Eigen::Index c = 0; c < dim; ++c) out.G(c, k) = std::complex<double>(e1[c], e2[c]) * inv;
  });
  return bad.load();
}

}  // namespace confimm::kernels
