#include "confimm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "confimm/error.hpp"
#include "confimm/quadrature.hpp"

namespace confimm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Row `row` of the first and second differentiation matrices of a node window.
void window_derivative_rows(const std::vector<double>& xs, std::size_t first, std::size_t count,
                            std::size_t row, std::vector<StencilEntry>& d1,
                            std::vector<StencilEntry>& d2) {
  std::vector<double> local(xs.begin() + static_cast<std::ptrdiff_t>(first),
                            xs.begin() + static_cast<std::ptrdiff_t>(first + count));
  const Eigen::MatrixXd d = differentiation_matrix(local);
  const Eigen::MatrixXd dd = d * d;
  for (std::size_t k = 0; k < count; ++k) {
    d1.push_back({first + k, d(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k))});
    d2.push_back({first + k, dd(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k))});
  }
}

}  // namespace

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::disk: return "disk";
    case DomainKind::annulus: return "annulus";
    case DomainKind::flat_torus: return "flat-torus";
    case DomainKind::collar_cylinder: return "collar-cylinder";
    case DomainKind::atlas: return "atlas";
  }
  return "unknown";
}

void Axis::set_stencils(std::vector<std::vector<StencilEntry>> first,
                        std::vector<std::vector<StencilEntry>> second) {
  d1_.clear();
  d2_.clear();
  d1_off_.assign(1, 0);
  d2_off_.assign(1, 0);
  for (auto& s : first) {
    d1_.insert(d1_.end(), s.begin(), s.end());
    d1_off_.push_back(d1_.size());
  }
  for (auto& s : second) {
    d2_.insert(d2_.end(), s.begin(), s.end());
    d2_off_.push_back(d2_.size());
  }
}

Axis Axis::periodic(std::size_t n, double period, double start) {
  if (n < 5) throw InvalidInput("periodic axis needs at least 5 nodes");
  if (!(period > 0.0)) throw InvalidInput("periodic axis needs a positive period");
  Axis a;
  a.rule_ = AxisRule::periodic_uniform;
  a.lo_ = start;
  a.hi_ = start + period;
  const double h = period / static_cast<double>(n);
  a.x_.resize(n);
  a.w_.assign(n, h);
  a.cell_lo_.resize(n);
  a.cell_hi_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.x_[i] = start + h * static_cast<double>(i);
    a.cell_lo_[i] = a.x_[i] - 0.5 * h;
    a.cell_hi_[i] = a.x_[i] + 0.5 * h;
  }
  std::vector<std::vector<StencilEntry>> first(n), second(n);
  const double c1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  const double c2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = -2; k <= 2; ++k) {
      const std::size_t j = (i + n + static_cast<std::size_t>(k + 2) - 2) % n;
      if (k != 0) first[i].push_back({j, c1[k + 2] / h});
      second[i].push_back({j, c2[k + 2] / (h * h)});
    }
  }
  a.set_stencils(std::move(first), std::move(second));
  return a;
}

Axis Axis::panels(std::vector<double> breaks, int points_per_panel) {
  if (breaks.size() < 2) throw InvalidInput("panel axis needs at least one panel");
  if (points_per_panel < 2) throw InvalidInput("panel axis needs at least 2 points per panel");
  for (std::size_t k = 1; k < breaks.size(); ++k)
    if (!(breaks[k] > breaks[k - 1])) throw InvalidInput("panel breaks must increase");
  Axis a;
  a.rule_ = AxisRule::gl_panels;
  a.breaks_ = std::move(breaks);
  a.ppp_ = points_per_panel;
  a.lo_ = a.breaks_.front();
  a.hi_ = a.breaks_.back();
  const std::size_t np = a.breaks_.size() - 1;
  const auto p = static_cast<std::size_t>(points_per_panel);
  std::vector<std::vector<StencilEntry>> first, second;
  for (std::size_t k = 0; k < np; ++k) {
    const Rule1d r = gauss_legendre(points_per_panel, a.breaks_[k], a.breaks_[k + 1]);
    const std::size_t base = a.x_.size();
    double edge = a.breaks_[k];
    for (std::size_t i = 0; i < p; ++i) {
      a.x_.push_back(r.x[i]);
      a.w_.push_back(r.w[i]);
      a.cell_lo_.push_back(edge);
      edge += r.w[i];
      a.cell_hi_.push_back(i + 1 == p ? a.breaks_[k + 1] : edge);
    }
    a.panel_bw_.push_back(barycentric_weights(r.x));
    const Eigen::MatrixXd d = differentiation_matrix(r.x);
    const Eigen::MatrixXd dd = d * d;
    for (std::size_t i = 0; i < p; ++i) {
      std::vector<StencilEntry> s1, s2;
      for (std::size_t j = 0; j < p; ++j) {
        s1.push_back({base + j, d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
        s2.push_back({base + j, dd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
      }
      first.push_back(std::move(s1));
      second.push_back(std::move(s2));
    }
  }
  a.set_stencils(std::move(first), std::move(second));
  return a;
}

Axis Axis::scattered(std::vector<double> nodes, double lo, double hi) {
  const std::size_t n = nodes.size();
  if (n < 5) throw InvalidInput("scattered axis needs at least 5 nodes");
  for (std::size_t k = 1; k < n; ++k)
    if (!(nodes[k] > nodes[k - 1])) throw InvalidInput("axis coordinates must increase");
  if (lo > nodes.front() || hi < nodes.back()) throw InvalidInput("axis range must contain nodes");
  Axis a;
  a.rule_ = AxisRule::scattered;
  a.x_ = std::move(nodes);
  a.lo_ = lo;
  a.hi_ = hi;
  a.cell_lo_.resize(n);
  a.cell_hi_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.cell_lo_[i] = i == 0 ? lo : 0.5 * (a.x_[i - 1] + a.x_[i]);
    a.cell_hi_[i] = i + 1 == n ? hi : 0.5 * (a.x_[i] + a.x_[i + 1]);
  }
  std::vector<std::vector<StencilEntry>> first(n), second(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = std::min(i >= 2 ? i - 2 : 0, n - 5);
    window_derivative_rows(a.x_, start, 5, i - start, first[i], second[i]);
  }
  a.set_stencils(std::move(first), std::move(second));
  std::vector<StencilEntry> full;
  a.partial_integral(hi, full);
  a.w_.assign(n, 0.0);
  for (const auto& e : full) a.w_[e.index] += e.weight;
  return a;
}

double Axis::wrap(double x) const {
  const double p = period();
  double y = std::fmod(x - lo_, p);
  if (y < 0) y += p;
  return lo_ + y;
}

std::pair<std::size_t, std::size_t> Axis::window(double x, std::size_t width) const {
  const std::size_t n = x_.size();
  width = std::min(width, n);
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto right = static_cast<std::size_t>(it - x_.begin());
  std::size_t start = right >= width / 2 ? right - width / 2 : 0;
  start = std::min(start, n - width);
  return {start, width};
}

std::size_t Axis::panel_of(double x) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  auto k = static_cast<std::ptrdiff_t>(it - breaks_.begin()) - 1;
  k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(breaks_.size()) - 2);
  return static_cast<std::size_t>(k);
}

void Axis::interpolation(double x, std::vector<StencilEntry>& value,
                         std::vector<StencilEntry>* deriv) const {
  value.clear();
  if (deriv) deriv->clear();
  std::vector<double> local, bw, val, der;
  std::vector<std::size_t> idx;
  switch (rule_) {
    case AxisRule::periodic_uniform: {
      const std::size_t n = x_.size();
      const double h = period() / static_cast<double>(n);
      const double y = wrap(x);
      const std::size_t width = std::min<std::size_t>(8, n);
      const auto k = static_cast<std::ptrdiff_t>(std::floor((y - lo_) / h));
      const std::ptrdiff_t first = k - static_cast<std::ptrdiff_t>(width / 2) + 1;
      for (std::size_t m = 0; m < width; ++m) {
        const std::ptrdiff_t g = first + static_cast<std::ptrdiff_t>(m);
        local.push_back(lo_ + h * static_cast<double>(g));
        const auto nn = static_cast<std::ptrdiff_t>(n);
        idx.push_back(static_cast<std::size_t>(((g % nn) + nn) % nn));
      }
      x = y;
      bw = barycentric_weights(local);
      break;
    }
    case AxisRule::gl_panels: {
      const std::size_t k = panel_of(x);
      const auto p = static_cast<std::size_t>(ppp_);
      for (std::size_t m = 0; m < p; ++m) {
        local.push_back(x_[k * p + m]);
        idx.push_back(k * p + m);
      }
      bw = panel_bw_[k];
      break;
    }
    case AxisRule::scattered: {
      const auto [start, width] = window(x, 6);
      for (std::size_t m = 0; m < width; ++m) {
        local.push_back(x_[start + m]);
        idx.push_back(start + m);
      }
      bw = barycentric_weights(local);
      break;
    }
  }
  val.resize(local.size());
  der.resize(local.size());
  lagrange_basis(local, bw, x, val, deriv ? std::span<double>(der) : std::span<double>());
  for (std::size_t m = 0; m < local.size(); ++m) {
    value.push_back({idx[m], val[m]});
    if (deriv) deriv->push_back({idx[m], der[m]});
  }
}

void Axis::partial_integral(double x, std::vector<StencilEntry>& out) const {
  out.clear();
  if (rule_ == AxisRule::periodic_uniform)
    throw DomainError("partial integrals are defined on non-periodic axes only");
  x = std::clamp(x, lo_, hi_);
  std::vector<double> val;
  auto add_piece = [&](double a, double b, const std::vector<double>& local,
                       const std::vector<double>& bw, std::size_t first, int order) {
    if (b <= a) return;
    const Rule1d r = gauss_legendre(order, a, b);
    val.resize(local.size());
    for (std::size_t q = 0; q < r.x.size(); ++q) {
      lagrange_basis(local, bw, r.x[q], val);
      for (std::size_t m = 0; m < local.size(); ++m) out.push_back({first + m, r.w[q] * val[m]});
    }
  };
  if (rule_ == AxisRule::gl_panels) {
    const std::size_t k = panel_of(x);
    const auto p = static_cast<std::size_t>(ppp_);
    for (std::size_t i = 0; i < k * p; ++i) out.push_back({i, w_[i]});
    std::vector<double> local(x_.begin() + static_cast<std::ptrdiff_t>(k * p),
                              x_.begin() + static_cast<std::ptrdiff_t>((k + 1) * p));
    if (x >= breaks_[k + 1]) {
      for (std::size_t i = k * p; i < (k + 1) * p; ++i) out.push_back({i, w_[i]});
    } else {
      add_piece(breaks_[k], x, local, panel_bw_[k], k * p, ppp_);
    }
    return;
  }
  // Scattered: composite rule over the intervals between consecutive nodes
  // (plus the end intervals to lo and hi), each integrated exactly for the
  // cubic through the four nearest nodes.
  const std::size_t n = x_.size();
  std::vector<double> edges;
  edges.push_back(lo_);
  for (double v : x_)
    if (v > edges.back()) edges.push_back(v);
  if (hi_ > edges.back()) edges.push_back(hi_);
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e], b = std::min(edges[e + 1], x);
    if (b <= a) break;
    const auto [start, width] = window(0.5 * (a + edges[e + 1]), 4);
    (void)n;
    std::vector<double> local(x_.begin() + static_cast<std::ptrdiff_t>(start),
                              x_.begin() + static_cast<std::ptrdiff_t>(start + width));
    add_piece(a, b, local, barycentric_weights(local), start, 3);
  }
}

Eigen::Vector2d Patch::to_param(double c1, double c2) const {
  if (coords == ChartCoords::polar) return {c1 * std::cos(c2), c1 * std::sin(c2)};
  return {c1, c2};
}

Eigen::Vector2d Patch::to_grid(const Eigen::Vector2d& z) const {
  if (coords == ChartCoords::cartesian) return z;
  double theta = std::atan2(z.y(), z.x());
  const double lo = a2.lo();
  while (theta < lo) theta += kTwoPi;
  while (theta >= lo + kTwoPi) theta -= kTwoPi;
  return {z.norm(), theta};
}

std::size_t ParamGrid::patch_of(std::size_t node) const {
  std::size_t p = 0;
  while (p + 1 < patches.size() && patches[p + 1].offset <= node) ++p;
  return p;
}

std::pair<std::size_t, std::size_t> ParamGrid::local_index(std::size_t node) const {
  const Patch& pt = patches[patch_of(node)];
  const std::size_t k = node - pt.offset;
  return {k / pt.a2.size(), k % pt.a2.size()};
}

bool ParamGrid::flat_background() const {
  return kind != DomainKind::collar_cylinder;
}

PolarGridOptions polar_options(int resolution) {
  if (resolution < 16) throw InvalidInput("grid resolution must be at least 16");
  PolarGridOptions o;
  // Up to 8 graded panels; beyond that, refine the order of every panel.
  o.points_per_panel = std::max(16, resolution / 8);
  o.radial_panels = std::max(1, resolution / o.points_per_panel);
  o.angular = static_cast<std::size_t>(resolution);
  return o;
}

std::vector<double> radial_breaks(const PolarGridOptions& opt) {
  std::vector<double> b;
  const int np = opt.radial_panels;
  if (opt.r_inner == 0.0) {
    b.push_back(0.0);
    if (opt.grading > 0.0 && opt.grading < 1.0) {
      for (int k = np - 1; k >= 0; --k) b.push_back(opt.r_outer * std::pow(opt.grading, k));
    } else {
      for (int k = 1; k <= np; ++k) b.push_back(opt.r_outer * k / np);
    }
  } else {
    const double ratio = opt.r_outer / opt.r_inner;
    for (int k = 0; k <= np; ++k) b.push_back(opt.r_inner * std::pow(ratio, double(k) / np));
  }
  b.back() = opt.r_outer;
  for (double e : opt.extra_breaks) {
    if (!(e > opt.r_inner && e < opt.r_outer)) continue;
    bool present = false;
    for (double v : b) present = present || std::abs(v - e) < 1e-12 * opt.r_outer;
    if (!present) b.push_back(e);
  }
  std::sort(b.begin(), b.end());
  return b;
}

ParamGrid assemble_grid(DomainKind kind, std::vector<Patch> patches,
                        std::optional<int> euler_char) {
  ParamGrid g;
  g.kind = kind;
  g.euler_char = euler_char;
  std::size_t offset = 0;
  for (auto& p : patches) {
    p.offset = offset;
    offset += p.size();
  }
  g.nodes.resize(offset);
  g.quad_weights.resize(static_cast<Eigen::Index>(offset));
  for (const auto& p : patches) {
    for (std::size_t i = 0; i < p.a1.size(); ++i) {
      for (std::size_t j = 0; j < p.a2.size(); ++j) {
        const std::size_t k = p.index(i, j);
        g.nodes[k] = p.to_param(p.a1.node(i), p.a2.node(j));
        g.quad_weights[static_cast<Eigen::Index>(k)] =
            p.a1.weight(i) * p.a2.weight(j) * p.jacobian(p.a1.node(i));
      }
    }
  }
  g.background_metric.assign(offset, Eigen::Matrix2d::Identity());
  g.background_curvature = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(offset));
  g.patches = std::move(patches);
  return g;
}

ParamGrid make_polar_grid(const PolarGridOptions& opt) {
  if (!(opt.r_outer > opt.r_inner) || opt.r_inner < 0.0)
    throw InvalidInput("polar grid needs 0 <= r_inner < r_outer");
  Patch p;
  p.coords = ChartCoords::polar;
  p.a1 = Axis::panels(radial_breaks(opt), opt.points_per_panel);
  p.a2 = Axis::periodic(opt.angular, kTwoPi);
  const DomainKind kind = opt.r_inner == 0.0 ? DomainKind::disk : DomainKind::annulus;
  return assemble_grid(kind, {std::move(p)});
}

ParamGrid make_torus_grid(std::size_t n1, std::size_t n2, double l1, double l2) {
  Patch p;
  p.coords = ChartCoords::cartesian;
  p.a1 = Axis::periodic(n1, l1);
  p.a2 = Axis::periodic(n2, l2);
  return assemble_grid(DomainKind::flat_torus, {std::move(p)}, 0);
}

ParamGrid make_collar_grid(double ell, double t_half, std::size_t ns, int t_panels,
                           int points_per_panel) {
  if (!(ell > 0.0)) throw InvalidInput("collar length must be positive");
  if (!(t_half > 0.0) || ell * t_half >= std::numbers::pi / 2)
    throw InvalidInput("collar half-width must satisfy 0 < l t < pi/2");
  std::vector<double> breaks;
  for (int k = 0; k <= t_panels; ++k) breaks.push_back(-t_half + 2.0 * t_half * k / t_panels);
  Patch p;
  p.coords = ChartCoords::cartesian;
  p.a1 = Axis::periodic(ns, 1.0);
  p.a2 = Axis::panels(breaks, points_per_panel);
  ParamGrid g = assemble_grid(DomainKind::collar_cylinder, {std::move(p)});
  g.collar_ell = ell;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double c = std::cos(ell * g.nodes[k].y());
    g.background_metric[k] = Eigen::Matrix2d::Identity() * (ell * ell / (c * c));
    g.background_curvature[static_cast<Eigen::Index>(k)] = -1.0;
  }
  return g;
}

ParamGrid make_atlas(std::vector<ParamGrid> charts, int euler_char) {
  ParamGrid g;
  g.kind = DomainKind::atlas;
  g.euler_char = euler_char;
  std::size_t total = 0;
  for (const auto& c : charts) total += c.size();
  g.quad_weights.resize(static_cast<Eigen::Index>(total));
  g.background_curvature.resize(static_cast<Eigen::Index>(total));
  std::size_t offset = 0;
  for (auto& c : charts) {
    for (auto p : c.patches) {
      p.offset += offset;
      g.patches.push_back(std::move(p));
    }
    g.nodes.insert(g.nodes.end(), c.nodes.begin(), c.nodes.end());
    g.background_metric.insert(g.background_metric.end(), c.background_metric.begin(),
                               c.background_metric.end());
    const auto n = static_cast<Eigen::Index>(c.size());
    g.quad_weights.segment(static_cast<Eigen::Index>(offset), n) = c.quad_weights;
    g.background_curvature.segment(static_cast<Eigen::Index>(offset), n) = c.background_curvature;
    offset += c.size();
  }
  return g;
}

void validate(const ParamGrid& g) {
  const std::size_t n = g.size();
  if (n == 0) throw InvalidInput("grid has no nodes");
  if (static_cast<std::size_t>(g.quad_weights.size()) != n || g.background_metric.size() != n ||
      static_cast<std::size_t>(g.background_curvature.size()) != n)
    throw InvalidInput("grid field sizes disagree with node count");
  std::size_t expect = 0;
  for (const auto& p : g.patches) {
    if (p.offset != expect) throw InvalidInput("patch offsets are not contiguous");
    expect += p.size();
  }
  if (expect != n) throw InvalidInput("patches do not cover the nodes");
  for (std::size_t k = 0; k < n; ++k) {
    const double w = g.quad_weights[static_cast<Eigen::Index>(k)];
    if (!(w > 0.0) || !std::isfinite(w))
      throw InvalidInput("non-positive quadrature weight at node " + std::to_string(k));
    const Eigen::Matrix2d& m = g.background_metric[k];
    if (!(m(0, 0) > 0.0) || !(m.determinant() > 0.0) || std::abs(m(0, 1) - m(1, 0)) > 1e-12)
      throw InvalidInput("background metric not positive definite at node " + std::to_string(k));
  }
  if (g.kind == DomainKind::flat_torus) {
    for (const auto& p : g.patches)
      if (!p.a1.periodic() || !p.a2.periodic() || p.coords != ChartCoords::cartesian)
        throw InvalidInput("flat torus grids must be uniform periodic lattices");
  }
  if (g.closed() && !g.euler_char) throw InvalidInput("closed domain without Euler characteristic");
}

double parameter_area(const ParamGrid& g) { return g.quad_weights.sum(); }

GridDerivatives grid_derivatives(const ParamGrid& g, const Eigen::MatrixXd& f, bool second,
                                 Exec exec) {
  const Eigen::Index m = f.rows();
  const auto n = static_cast<Eigen::Index>(g.size());
  GridDerivatives out;
  out.d1 = Eigen::MatrixXd::Zero(m, n);
  out.d2 = Eigen::MatrixXd::Zero(m, n);
  if (second) {
    out.d11 = Eigen::MatrixXd::Zero(m, n);
    out.d12 = Eigen::MatrixXd::Zero(m, n);
    out.d22 = Eigen::MatrixXd::Zero(m, n);
  }
  for (const auto& p : g.patches) {
    const std::size_t n2 = p.a2.size();
    for_each_index(exec, p.size(), [&](std::size_t local) {
      const std::size_t i = local / n2, j = local % n2;
      const auto col = static_cast<Eigen::Index>(p.index(i, j));
      for (const auto& e : p.a1.d1(i))
        out.d1.col(col) += e.weight * f.col(static_cast<Eigen::Index>(p.index(e.index, j)));
      for (const auto& e : p.a2.d1(j))
        out.d2.col(col) += e.weight * f.col(static_cast<Eigen::Index>(p.index(i, e.index)));
      if (!second) return;
      for (const auto& e : p.a1.d2(i))
        out.d11.col(col) += e.weight * f.col(static_cast<Eigen::Index>(p.index(e.index, j)));
      for (const auto& e : p.a2.d2(j))
        out.d22.col(col) += e.weight * f.col(static_cast<Eigen::Index>(p.index(i, e.index)));
      for (const auto& e1 : p.a1.d1(i))
        for (const auto& e2 : p.a2.d1(j))
          out.d12.col(col) +=
              (e1.weight * e2.weight) * f.col(static_cast<Eigen::Index>(p.index(e1.index, e2.index)));
    });
  }
  return out;
}

CartesianDerivatives cartesian_derivatives(const ParamGrid& g, const Eigen::MatrixXd& f,
                                           bool second, Exec exec) {
  GridDerivatives d = grid_derivatives(g, f, second, exec);
  CartesianDerivatives out;
  out.dx = std::move(d.d1);
  out.dy = std::move(d.d2);
  if (second) {
    out.dxx = std::move(d.d11);
    out.dxy = std::move(d.d12);
    out.dyy = std::move(d.d22);
  }
  for (const auto& p : g.patches) {
    if (p.coords != ChartCoords::polar) continue;
    const std::size_t n2 = p.a2.size();
    for_each_index(exec, p.size(), [&](std::size_t local) {
      const std::size_t i = local / n2, j = local % n2;
      const auto col = static_cast<Eigen::Index>(p.index(i, j));
      const double r = p.a1.node(i), th = p.a2.node(j);
      const double c = std::cos(th), s = std::sin(th);
      const Eigen::VectorXd fr = out.dx.col(col), ft = out.dy.col(col);
      out.dx.col(col) = c * fr - (s / r) * ft;
      out.dy.col(col) = s * fr + (c / r) * ft;
      if (!second) return;
      const Eigen::VectorXd frr = out.dxx.col(col), frt = out.dxy.col(col),
                            ftt = out.dyy.col(col);
      const double r2 = r * r;
      out.dxx.col(col) = c * c * frr - (2 * c * s / r) * frt + (s * s / r2) * ftt +
                         (s * s / r) * fr + (2 * c * s / r2) * ft;
      out.dyy.col(col) = s * s * frr + (2 * c * s / r) * frt + (c * c / r2) * ftt +
                         (c * c / r) * fr - (2 * c * s / r2) * ft;
      out.dxy.col(col) = c * s * frr + ((c * c - s * s) / r) * frt - (c * s / r2) * ftt -
                         (c * s / r) * fr - ((c * c - s * s) / r2) * ft;
    });
  }
  return out;
}

double integrate(const ParamGrid& g, const Eigen::VectorXd& density) {
  const Eigen::VectorXd terms = g.quad_weights.cwiseProduct(density);
  return ordered_sum({terms.data(), static_cast<std::size_t>(terms.size())});
}

void interpolation_stencil(const ParamGrid& g, std::size_t patch, const Eigen::Vector2d& z,
                           std::vector<StencilEntry>& out) {
  const Patch& p = g.patches.at(patch);
  const Eigen::Vector2d c = p.to_grid(z);
  std::vector<StencilEntry> s1, s2;
  p.a1.interpolation(c.x(), s1);
  p.a2.interpolation(c.y(), s2);
  out.clear();
  for (const auto& e1 : s1)
    for (const auto& e2 : s2) out.push_back({p.index(e1.index, e2.index), e1.weight * e2.weight});
}

Eigen::VectorXd interpolate(const ParamGrid& g, std::size_t patch, const Eigen::MatrixXd& field,
                            const Eigen::Vector2d& z) {
  std::vector<StencilEntry> st;
  interpolation_stencil(g, patch, z, st);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(field.rows());
  for (const auto& e : st) v += e.weight * field.col(static_cast<Eigen::Index>(e.index));
  return v;
}

}  // namespace confimm
