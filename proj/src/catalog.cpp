#include "confimm/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>

#include "confimm/error.hpp"
#include "confimm/geometry.hpp"

namespace confimm {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

Jet zero_jet(int n) {
  Jet j;
  for (Eigen::VectorXd* v : {&j.f, &j.f1, &j.f2, &j.f11, &j.f12, &j.f22}) *v = Eigen::VectorXd::Zero(n);
  return j;
}

// Value, first and second derivative of a polynomial at z.
void horner(const Polynomial& p, cd z, cd& v, cd& d1, cd& d2) {
  v = d1 = d2 = 0.0;
  for (auto k = static_cast<std::ptrdiff_t>(p.size()) - 1; k >= 0; --k) {
    d2 = d2 * z + 2.0 * d1;
    d1 = d1 * z + v;
    v = v * z + p[static_cast<std::size_t>(k)];
  }
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double parse_number(const std::string& text, const std::string& key) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(v))
    throw InvalidInput("invalid value '" + text + "' for parameter '" + key + "'");
  return v;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"sphere", {"r"}},
      {"clifford-torus", {}},
      {"product-torus", {"b"}},
      {"f_eps", {"eps", "n"}},
      {"enneper", {}},
      {"enneper-blowdown", {"lambda"}},
      {"power-branch", {"m", "n"}},
      {"plane", {"n"}},
  };
  return keys;
}

std::vector<Polynomial> enneper_coefficients(double lambda) {
  // Phi = 1/2 (z - z^3/3, i (z + z^3/3), z^2), rescaled as lambda^-3 Phi(lambda z).
  std::vector<Polynomial> c = {{0.0, 0.5, 0.0, -1.0 / 6.0},
                               {0.0, cd(0, 0.5), 0.0, cd(0, 1.0 / 6.0)},
                               {0.0, 0.0, 0.5}};
  for (auto& p : c)
    for (std::size_t j = 0; j < p.size(); ++j) p[j] *= std::pow(lambda, static_cast<double>(j) - 3.0);
  return c;
}

}  // namespace

HolomorphicCurve::HolomorphicCurve(std::vector<Polynomial> components, int n)
    : comps_(std::move(components)), n_(n) {
  if (n_ < static_cast<int>(2 * comps_.size()) || n_ < 3)
    throw InvalidInput("ambient dimension too small for holomorphic curve");
}

Jet HolomorphicCurve::evaluate(std::size_t, const Eigen::Vector2d& z) const {
  Jet j = zero_jet(n_);
  const cd w(z.x(), z.y());
  const cd I(0.0, 1.0);
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    cd v, d1, d2;
    horner(comps_[c], w, v, d1, d2);
    const auto r = static_cast<Eigen::Index>(2 * c);
    auto put = [&](Eigen::VectorXd& out, cd value) {
      out[r] = value.real();
      out[r + 1] = value.imag();
    };
    put(j.f, v);
    put(j.f1, d1);
    put(j.f2, I * d1);
    put(j.f11, d2);
    put(j.f12, I * d2);
    put(j.f22, -d2);
  }
  return j;
}

RealPartCurve::RealPartCurve(std::vector<Polynomial> components) : comps_(std::move(components)) {
  if (comps_.size() < 3) throw InvalidInput("real-part curve needs at least 3 components");
}

Jet RealPartCurve::evaluate(std::size_t, const Eigen::Vector2d& z) const {
  Jet j = zero_jet(dim());
  const cd w(z.x(), z.y());
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    cd v, d1, d2;
    horner(comps_[c], w, v, d1, d2);
    const auto r = static_cast<Eigen::Index>(c);
    j.f[r] = v.real();
    j.f1[r] = d1.real();
    j.f2[r] = -d1.imag();
    j.f11[r] = d2.real();
    j.f12[r] = -d2.imag();
    j.f22[r] = -d2.real();
  }
  return j;
}

StereographicSphere::StereographicSphere(double radius, Eigen::Vector3d center)
    : r_(radius), c_(std::move(center)) {
  if (!(radius > 0.0)) throw InvalidInput("sphere radius must be positive");
}

Jet StereographicSphere::evaluate(std::size_t chart, const Eigen::Vector2d& z) const {
  const double x = z.x(), y = z.y();
  const double s = chart == 0 ? 1.0 : -1.0;
  const double q = 1.0 / (1.0 + x * x + y * y);
  const double qx = -2.0 * x * q * q, qy = -2.0 * y * q * q;
  const double qxx = -2.0 * q * q + 8.0 * x * x * q * q * q;
  const double qxy = 8.0 * x * y * q * q * q;
  const double qyy = -2.0 * q * q + 8.0 * y * y * q * q * q;
  Jet j = zero_jet(3);
  j.f << 2 * x * q, 2 * y * q, s * (2 * q - 1);
  j.f1 << 2 * q + 2 * x * qx, 2 * y * qx, 2 * s * qx;
  j.f2 << 2 * x * qy, 2 * q + 2 * y * qy, 2 * s * qy;
  j.f11 << 4 * qx + 2 * x * qxx, 2 * y * qxx, 2 * s * qxx;
  j.f12 << 2 * qy + 2 * x * qxy, 2 * qx + 2 * y * qxy, 2 * s * qxy;
  j.f22 << 2 * x * qyy, 4 * qy + 2 * y * qyy, 2 * s * qyy;
  for (Eigen::VectorXd* v : {&j.f, &j.f1, &j.f2, &j.f11, &j.f12, &j.f22}) *v *= r_;
  j.f += c_;
  return j;
}

Jet CircleProduct::evaluate(std::size_t, const Eigen::Vector2d& z) const {
  Jet j = zero_jet(4);
  const double cs = std::cos(k1_ * z.x()), ss = std::sin(k1_ * z.x());
  const double ct = std::cos(k2_ * z.y()), st = std::sin(k2_ * z.y());
  j.f << r1_ * cs, r1_ * ss, r2_ * ct, r2_ * st;
  j.f1 << -r1_ * k1_ * ss, r1_ * k1_ * cs, 0, 0;
  j.f2 << 0, 0, -r2_ * k2_ * st, r2_ * k2_ * ct;
  j.f11 << -r1_ * k1_ * k1_ * cs, -r1_ * k1_ * k1_ * ss, 0, 0;
  j.f22 << 0, 0, -r2_ * k2_ * k2_ * ct, -r2_ * k2_ * k2_ * st;
  return j;
}

double SurfaceSpec::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

SurfaceSpec parse_surface_spec(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) throw InvalidInput("empty surface spec");
  SurfaceSpec spec;
  const auto open = t.find('(');
  std::string args;
  if (open == std::string::npos) {
    spec.name = t;
  } else {
    if (t.back() != ')') throw InvalidInput("surface spec '" + t + "' is missing ')'");
    spec.name = trim(std::string_view(t).substr(0, open));
    args = t.substr(open + 1, t.size() - open - 2);
  }
  const auto& keys = allowed_keys();
  const auto entry = keys.find(spec.name);
  if (entry == keys.end()) throw InvalidInput("unknown surface '" + spec.name + "'");
  if (!trim(args).empty()) {
    std::size_t pos = 0;
    while (pos <= args.size()) {
      const std::size_t comma = std::min(args.find(',', pos), args.size());
      const std::string item = trim(std::string_view(args).substr(pos, comma - pos));
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InvalidInput("expected key=value in '" + item + "'");
      const std::string key = trim(std::string_view(item).substr(0, eq));
      const std::string val = trim(std::string_view(item).substr(eq + 1));
      if (!entry->second.count(key))
        throw InvalidInput("surface '" + spec.name + "' has no parameter '" + key + "'");
      if (spec.params.count(key)) throw InvalidInput("duplicate parameter '" + key + "'");
      spec.params[key] = parse_number(val, key);
      pos = comma + 1;
    }
  }
  if (spec.name == "f_eps") spec.n = 4;
  if (spec.name == "clifford-torus" || spec.name == "product-torus") spec.n = 4;
  if (spec.params.count("n")) {
    const double n = spec.params.at("n");
    if (n != std::floor(n)) throw InvalidInput("ambient dimension must be an integer");
    spec.n = static_cast<int>(n);
    spec.params.erase("n");
  }
  validate(spec);
  return spec;
}

std::string to_string(const SurfaceSpec& spec) {
  std::string s = spec.name;
  std::vector<std::string> items;
  for (const auto& [k, v] : spec.params) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%.17g", k.c_str(), v);
    items.emplace_back(buf);
  }
  const auto& keys = allowed_keys().at(spec.name);
  if (keys.count("n")) items.push_back("n=" + std::to_string(spec.n));
  if (!items.empty()) {
    s += "(";
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + items[i];
    s += ")";
  }
  return s;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : allowed_keys()) out.push_back(k);
  return out;
}

void validate(const SurfaceSpec& spec) {
  const auto& n = spec.name;
  if (!allowed_keys().count(n)) throw InvalidInput("unknown surface '" + n + "'");
  if (n == "sphere" && !(spec.param("r", 1.0) > 0.0)) throw InvalidInput("sphere needs r > 0");
  if (n == "product-torus" && !(spec.param("b", 1.0) > 0.0))
    throw InvalidInput("product-torus needs b > 0");
  if (n == "f_eps") {
    if (!(spec.param("eps", 1.0) > 0.0)) throw InvalidInput("f_eps needs eps > 0");
    if (spec.n < 4) throw InvalidInput("f_eps needs n >= 4");
  }
  if (n == "enneper-blowdown" && !(spec.param("lambda", 1.0) >= 1.0))
    throw InvalidInput("enneper-blowdown needs lambda >= 1");
  if (n == "power-branch") {
    const double m = spec.param("m", 1.0);
    if (m != std::floor(m) || m < 0 || m > 4) throw InvalidInput("power-branch needs m in {0,...,4}");
  }
  if (n == "clifford-torus" || n == "product-torus") {
    if (spec.n != 4) throw InvalidInput(n + " lives in R^4");
  }
  if ((n == "sphere" || n == "enneper" || n == "enneper-blowdown") && spec.n != 3)
    throw InvalidInput(n + " lives in R^3");
  if (spec.n < 3) throw InvalidInput("ambient dimension must be at least 3");
}

SurfaceTraits traits(const SurfaceSpec& spec) {
  SurfaceTraits t;
  const auto& n = spec.name;
  if (n == "sphere") {
    t.closed = true;
    t.euler_char = 2;
    t.exact_willmore = 4 * kPi;
    t.exact_total_A = 8 * kPi;
  } else if (n == "clifford-torus" || n == "product-torus") {
    const double b = n == "clifford-torus" ? 1.0 : spec.param("b", 1.0);
    t.closed = true;
    t.euler_char = 0;
    t.exact_willmore = kPi * kPi * (b + 1.0 / b);
    t.exact_total_A = 4.0 * *t.exact_willmore;
  } else if (n == "f_eps") {
    const double e = spec.param("eps", 1.0);
    t.minimal = true;
    t.exact_willmore = 0.0;
    t.exact_total_A = 4 * kPi / (1 + e * e);
    t.origin_order = 0;
  } else if (n == "enneper" || n == "enneper-blowdown") {
    const double l = n == "enneper" ? 1.0 : spec.param("lambda", 1.0);
    t.minimal = true;
    t.embedded = l < std::sqrt(3.0);
    t.exact_willmore = 0.0;
    t.exact_total_A = 8 * kPi * l * l / (1 + l * l);
    t.origin_order = 0;
  } else if (n == "power-branch") {
    const int m = static_cast<int>(spec.param("m", 1.0));
    t.minimal = true;
    t.embedded = m == 0;
    t.exact_willmore = 0.0;
    t.exact_total_A = 0.0;
    t.origin_order = m;
  } else if (n == "plane") {
    t.minimal = true;
    t.exact_willmore = 0.0;
    t.exact_total_A = 0.0;
    t.origin_order = 0;
  }
  return t;
}

std::shared_ptr<const SurfaceModel> make_model(const SurfaceSpec& spec) {
  validate(spec);
  const auto& n = spec.name;
  if (n == "sphere") return std::make_shared<StereographicSphere>(spec.param("r", 1.0), Eigen::Vector3d::Zero());
  if (n == "clifford-torus") {
    const double r = 1.0 / std::sqrt(2.0);
    return std::make_shared<CircleProduct>(r, 2 * kPi, r, 2 * kPi);
  }
  if (n == "product-torus") {
    const double b = spec.param("b", 1.0);
    return std::make_shared<CircleProduct>(1.0 / (2 * kPi), 2 * kPi, b / (2 * kPi), 2 * kPi / b);
  }
  if (n == "f_eps") {
    const double e = spec.param("eps", 1.0);
    return std::make_shared<HolomorphicCurve>(std::vector<Polynomial>{{0.0, 0.0, 0.5}, {0.0, e}}, spec.n);
  }
  if (n == "enneper") return std::make_shared<RealPartCurve>(enneper_coefficients(1.0));
  if (n == "enneper-blowdown")
    return std::make_shared<RealPartCurve>(enneper_coefficients(spec.param("lambda", 1.0)));
  if (n == "power-branch") {
    const int m = static_cast<int>(spec.param("m", 1.0));
    Polynomial p(static_cast<std::size_t>(m + 2), 0.0);
    p[static_cast<std::size_t>(m + 1)] = 1.0 / (m + 1);
    return std::make_shared<HolomorphicCurve>(std::vector<Polynomial>{p}, spec.n);
  }
  return std::make_shared<HolomorphicCurve>(std::vector<Polynomial>{{0.0, 1.0}}, spec.n);
}

ParamGrid default_grid(const SurfaceSpec& spec, int resolution) {
  if (resolution < 16) throw InvalidInput("grid resolution must be at least 16");
  const auto& n = spec.name;
  const auto r = static_cast<std::size_t>(resolution);
  if (n == "sphere") {
    const PolarGridOptions o = polar_options(resolution);
    return make_atlas({make_polar_grid(o), make_polar_grid(o)}, 2);
  }
  if (n == "clifford-torus") return make_torus_grid(r, r, 1.0, 1.0);
  if (n == "product-torus") {
    const double b = spec.param("b", 1.0);
    const auto r2 = static_cast<std::size_t>(std::max(16.0, std::round(resolution * b)));
    return make_torus_grid(r, r2, 1.0, b);
  }
  return make_polar_grid(polar_options(resolution));
}

SampledImmersion sample(const SurfaceModel& model, std::shared_ptr<const ParamGrid> grid,
                        Exec exec) {
  SampledImmersion imm;
  const auto n = static_cast<Eigen::Index>(grid->size());
  imm.n = model.dim();
  for (Eigen::MatrixXd* m : {&imm.f, &imm.f1, &imm.f2, &imm.f11, &imm.f12, &imm.f22}) m->resize(imm.n, n);
  const ParamGrid& g = *grid;
  for (std::size_t p = 0; p < g.patches.size(); ++p) {
    const Patch& patch = g.patches[p];
    for_each_index(exec, patch.size(), [&](std::size_t local) {
      const auto k = static_cast<Eigen::Index>(patch.offset + local);
      const Jet j = model.evaluate(p, g.nodes[static_cast<std::size_t>(k)]);
      imm.f.col(k) = j.f;
      imm.f1.col(k) = j.f1;
      imm.f2.col(k) = j.f2;
      imm.f11.col(k) = j.f11;
      imm.f12.col(k) = j.f12;
      imm.f22.col(k) = j.f22;
    });
  }
  imm.grid = std::move(grid);
  imm.source = DerivativeSource::analytic;
  return imm;
}

SampledImmersion instantiate(const SurfaceSpec& spec, int resolution, Exec exec) {
  auto grid = std::make_shared<const ParamGrid>(default_grid(spec, resolution));
  return sample(*make_model(spec), std::move(grid), exec);
}

double model_u(const SurfaceModel& model, std::size_t chart, const Eigen::Vector2d& z) {
  const Jet j = model.evaluate(chart, z);
  return 0.5 * std::log(0.5 * (j.f1.squaredNorm() + j.f2.squaredNorm()));
}

HeleinProbe helein_dichotomy_probe(const std::vector<double>& eps, int resolution, Exec exec) {
  if (eps.empty()) throw InvalidInput("empty eps sequence");
  for (std::size_t i = 1; i < eps.size(); ++i)
    if (!(eps[i] < eps[i - 1])) throw InvalidInput("eps sequence must decrease");
  HeleinProbe probe;
  for (double e : eps) {
    SurfaceSpec spec;
    spec.name = "f_eps";
    spec.params["eps"] = e;
    spec.n = 4;
    const auto model = make_model(spec);
    const SampledImmersion imm = instantiate(spec, resolution, exec);
    const GeometryFields geom = build_geometry(imm, exec);
    HeleinRow row;
    row.eps = e;
    row.u0 = model_u(*model, 0, {0.0, 0.0});
    row.u_half = model_u(*model, 0, {0.5, 0.0});
    row.total_A = integrate(*imm.grid, geom.Asq.cwiseProduct(geom.area));
    probe.rows.push_back(row);
  }
  probe.u0_diverging = probe.total_A_increasing = probe.u_half_bounded = probe.total_A_below_4pi = true;
  for (std::size_t i = 0; i < probe.rows.size(); ++i) {
    const auto& r = probe.rows[i];
    probe.u_half_bounded = probe.u_half_bounded && std::abs(r.u_half) < 1.0;
    probe.total_A_below_4pi = probe.total_A_below_4pi && r.total_A < 4 * kPi;
    if (i == 0) continue;
    probe.u0_diverging = probe.u0_diverging && r.u0 < probe.rows[i - 1].u0;
    probe.total_A_increasing = probe.total_A_increasing && r.total_A > probe.rows[i - 1].total_A;
  }
  probe.neither_alternative = probe.u0_diverging && probe.u_half_bounded &&
                              probe.total_A_increasing && probe.total_A_below_4pi;
  return probe;
}

}  // namespace confimm
