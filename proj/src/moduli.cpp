#include "confimm/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "confimm/catalog.hpp"
#include "confimm/error.hpp"
#include "confimm/geometry.hpp"

namespace confimm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxMoves = 1000;

}  // namespace

bool Lattice::normalized(double slack) const {
  return b > 0.0 && a >= -slack && a <= 0.5 + slack && a * a + b * b >= 1.0 - slack;
}

const char* to_string(LatticeMove move) {
  switch (move) {
    case LatticeMove::shift_plus: return "tau+1";
    case LatticeMove::shift_minus: return "tau-1";
    case LatticeMove::invert: return "-1/tau";
    case LatticeMove::reflect: return "reflect";
  }
  return "?";
}

LatticeReduction normalize_lattice(std::complex<double> tau) {
  if (!std::isfinite(tau.real()) || !std::isfinite(tau.imag()) || !(tau.imag() > 0.0))
    throw InvalidInput("lattice parameter needs finite tau with Im tau > 0");
  LatticeReduction out;
  Eigen::Matrix2i m = Eigen::Matrix2i::Identity();
  auto push = [&](LatticeMove mv, const Eigen::Matrix2i& g) {
    if (out.moves.size() >= kMaxMoves) throw InvalidInput("lattice reduction did not terminate");
    out.moves.push_back(mv);
    m = g * m;
  };
  Eigen::Matrix2i plus, minus, inv, refl;
  plus << 1, 1, 0, 1;
  minus << 1, -1, 0, 1;
  inv << 0, -1, 1, 0;
  refl << -1, 0, 0, 1;
  for (;;) {
    while (tau.real() > 0.5) {
      tau -= 1.0;
      push(LatticeMove::shift_minus, minus);
    }
    while (tau.real() < -0.5) {
      tau += 1.0;
      push(LatticeMove::shift_plus, plus);
    }
    if (std::norm(tau) < 1.0) {
      tau = -1.0 / tau;
      push(LatticeMove::invert, inv);
      continue;
    }
    break;
  }
  if (tau.real() < 0.0) {
    tau = {-tau.real(), tau.imag()};
    push(LatticeMove::reflect, refl);
  }
  out.lattice = {tau.real(), tau.imag()};
  out.basis = m;
  return out;
}

std::complex<double> apply_basis(const Eigen::Matrix2i& m, std::complex<double> tau) {
  const int det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (det != 1 && det != -1) throw InvalidInput("basis change is not unimodular");
  if (det == -1) tau = std::conj(tau);
  return (double(m(0, 0)) * tau + double(m(0, 1))) / (double(m(1, 0)) * tau + double(m(1, 1)));
}

double collar_half_length(double ell) {
  if (!(ell > 0.0) || !std::isfinite(ell)) throw InvalidInput("collar length must be positive");
  return (0.5 * kPi - std::atan(std::sinh(0.5 * ell))) / ell;
}

CollarPoint collar_geometry(double ell, double t) {
  const double T = collar_half_length(ell);
  if (!(std::abs(t) <= T - 1e-9))
    throw DomainError("t = " + std::to_string(t) + " lies outside the collar (T = " + std::to_string(T) + ")");
  const double c = std::cos(ell * t);
  return {ell * ell / (c * c), std::sin(ell * t), ell / c};
}

double collar_isometry_check(double ell, const std::vector<Eigen::Vector2d>& points) {
  double gap = 0.0;
  const std::complex<double> i(0.0, 1.0);
  for (const auto& p : points) {
    const std::complex<double> w(p.x(), p.y());
    const std::complex<double> z = i * std::exp(ell * w);
    const std::complex<double> dz = i * ell * std::exp(ell * w);
    const double pulled = std::norm(dz) / (z.imag() * z.imag());
    const double g = collar_geometry(ell, p.y()).metric_factor;
    gap = std::max(gap, std::abs(pulled - g) / g);
  }
  return gap;
}

std::vector<Eigen::Vector2d> collar_sample_points(double ell, std::size_t n, unsigned seed,
                                                  double margin) {
  const double T = collar_half_length(ell) - std::max(margin, 1e-9);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> s(0.0, 1.0), t(-T, T);
  std::vector<Eigen::Vector2d> pts(n);
  for (auto& p : pts) {
    const double a = s(rng);
    p = {a, t(rng)};
  }
  return pts;
}

DegenerationSeries degeneration_series(const std::vector<double>& b_values, int resolution,
                                       Exec exec) {
  for (std::size_t i = 0; i < b_values.size(); ++i) {
    if (!(b_values[i] > 0.0)) throw InvalidInput("b values must be positive");
    if (i > 0 && !(b_values[i] > b_values[i - 1])) throw InvalidInput("b values must increase");
  }
  DegenerationSeries out;
  out.rows.resize(b_values.size());
  // Entries are independent; each one already parallelizes internally.
  for (std::size_t e = 0; e < b_values.size(); ++e) {
    SurfaceSpec spec = parse_surface_spec("product-torus(b=" + std::to_string(b_values[e]) + ")");
    spec.params["b"] = b_values[e];
    SampledImmersion imm = instantiate(spec, resolution, exec);
    const Patch& p = imm.grid->patches.front();
    double min_diam = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p.a2.size(); ++j) {
      double diam = 0.0;
      for (std::size_t a = 0; a < p.a1.size(); ++a)
        for (std::size_t c = a + 1; c < p.a1.size(); ++c)
          diam = std::max(diam, (imm.f.col(static_cast<Eigen::Index>(p.index(a, j))) -
                                 imm.f.col(static_cast<Eigen::Index>(p.index(c, j))))
                                    .norm());
      min_diam = std::min(min_diam, diam);
    }
    const double scale = 1.0 / min_diam;
    SampledImmersion scaled_imm = scaled(imm, scale);
    const GeometryFields geom = build_geometry(scaled_imm, exec);
    const EnergyReport rep = energy_report(scaled_imm, geom, exec);
    DegenerationRow& row = out.rows[e];
    row.b = b_values[e];
    row.willmore = rep.willmore;
    row.total_A = rep.total_A;
    row.raw_min_circle_diam = min_diam;
    row.min_circle_diam = min_diam * scale;
    row.scale = scale;
  }
  out.willmore_nondecreasing = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    out.willmore_nondecreasing = out.willmore_nondecreasing && out.rows[i].willmore >= out.rows[i - 1].willmore;
  out.final_above_8pi = !out.rows.empty() && out.rows.back().willmore >= 8.0 * kPi;
  return out;
}

}  // namespace confimm
