#include "confimm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "confimm/branch.hpp"
#include "confimm/catalog.hpp"
#include "confimm/error.hpp"
#include "confimm/geometry.hpp"
#include "confimm/gridfile.hpp"
#include "confimm/liouville.hpp"
#include "confimm/mobius.hpp"
#include "confimm/moduli.hpp"
#include "confimm/report.hpp"
#include "confimm/varifold.hpp"

namespace confimm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kResolvedAnnulus = 10000;
constexpr const char* kOutEnv = "CONFIMM_OUT";

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tol = {
      {"willmore", 1e-4},        // relative
      {"total_A", 1e-3},         // absolute
      {"gauss_bonnet", 1e-3},    // absolute
      {"gauss_map", 1e-2},       // relative
      {"pointwise", 1e-6},       // relative, per node
      {"conformality", 1e-8},
      {"liouville", 1e-3},
      {"tracefree", 1e-6},       // relative to the largest density
      {"inversion", 1e-3},
      {"inversion_excised", 0.05},
      {"branch_density", 0.02},  // relative to m + 1
      {"monotone_slack", 1e-3},
      {"annulus", 1e-2},         // relative
      {"sphere_equality", 1e-3},
      {"li_yau", 1e-2},
      {"lattice", 1e-12},
      {"collar_isometry", 1e-8},
      {"collar_limit", 1e-3},
      {"circle_diam", 1e-12},
      {"roundtrip", 1e-3},
  };
  return tol;
}

struct RunConfig {
  std::string experiment;
  std::string surface;
  int resolution = 128;
  std::map<std::string, double> tol = default_tolerances();
  std::filesystem::path out = "confimm_out";
  int threads = 0;
  std::uint64_t seed = 20240601;
  // Experiment-specific inputs.
  std::string file;
  std::vector<double> values;
  std::vector<double> center;
  bool on_surface = false;
  double ell = 0.1;
  int count = 0;
};

double tol(const RunConfig& c, const std::string& name) { return c.tol.at(name); }

Json echo(const RunConfig& c) {
  Json j;
  if (!c.surface.empty()) j["surface"] = c.surface;
  j["grid"] = c.resolution;
  j["seed"] = c.seed;
  Json t = Json::object();
  for (const auto& [k, v] : c.tol) t[k] = v;
  j["tolerances"] = t;
  return j;
}

void grid_provenance(Report& rep, const SampledImmersion& imm) {
  const ParamGrid& g = *imm.grid;
  Json j;
  j["domain"] = to_string(g.kind);
  j["nodes"] = g.size();
  j["charts"] = g.patches.size();
  j["derivatives"] = imm.source == DerivativeSource::analytic ? "analytic" : "finite-difference";
  rep.provenance("grid", j);
}

Json energies_json(const EnergyReport& e) {
  return {{"willmore", e.willmore},         {"total_A", e.total_A},
          {"tracefree_A", e.tracefree_A},   {"area", e.area},
          {"gauss_bonnet", e.gauss_bonnet}, {"gauss_map_energy", e.gauss_map_energy},
          {"diameter", e.diam}};
}

// Energy checks against the catalog's closed forms.
void energy_checks(Report& rep, const RunConfig& c, const SurfaceTraits& tr, const EnergyReport& e,
                   const ParamGrid& grid) {
  if (tr.exact_willmore) {
    const double ex = *tr.exact_willmore;
    const double err = ex != 0.0 ? std::abs(e.willmore - ex) / ex : std::abs(e.willmore);
    rep.check("willmore_exact", err < tol(c, "willmore"), err, tol(c, "willmore"),
              "|W - W_exact| (relative when W_exact > 0)");
  }
  if (tr.exact_total_A) {
    const double err = std::abs(e.total_A - *tr.exact_total_A);
    rep.check("total_A_exact", err < tol(c, "total_A"), err, tol(c, "total_A"));
  }
  if (grid.closed() && grid.euler_char) {
    const double err = std::abs(e.gauss_bonnet - 2.0 * kPi * *grid.euler_char);
    rep.check("gauss_bonnet", err < tol(c, "gauss_bonnet"), err, tol(c, "gauss_bonnet"));
  }
}

Report run_energy(const RunConfig& c) {
  Report rep("energy");
  const SurfaceSpec spec = parse_surface_spec(c.surface);
  const SampledImmersion imm = instantiate(spec, c.resolution);
  const GeometryFields geom = build_geometry(imm);
  const EnergyReport e = energy_report(imm, geom);
  grid_provenance(rep, imm);
  rep.result("energies", energies_json(e));
  rep.result("conformality", conformality_check(imm));
  energy_checks(rep, c, traits(spec), e, *imm.grid);
  return rep;
}

// int |<grad u, grad phi>| + int |K e^{2u} phi|, floored at 1.
double liouville_scale(const SampledImmersion& imm, const GeometryFields& geom, const Eigen::VectorXd& phi) {
  const ParamGrid& grid = *imm.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd fields(2, n);
  fields.row(0) = geom.u.transpose();
  fields.row(1) = phi.transpose();
  const CartesianDerivatives d = cartesian_derivatives(grid, fields, false);
  Eigen::VectorXd a(n);
  for (Eigen::Index k = 0; k < n; ++k)
    a[k] = std::abs(d.dx(0, k) * d.dx(1, k) + d.dy(0, k) * d.dy(1, k)) + std::abs(geom.K[k] * geom.area[k] * phi[k]);
  return std::max(1.0, integrate(grid, a));
}

// Identities that hold on every catalog member.
void identity_checks(Report& rep, const RunConfig& c, const SampledImmersion& imm,
                     const std::optional<SurfaceTraits>& tr) {
  const GeometryFields geom = build_geometry(imm);
  const EnergyReport e = energy_report(imm, geom);
  rep.result("energies", energies_json(e));
  const ParamGrid& grid = *imm.grid;

  if (imm.source == DerivativeSource::analytic) {
    const double conf = conformality_check(imm);
    rep.check("conformality", conf < tol(c, "conformality"), conf, tol(c, "conformality"));
  }
  const PointwiseChecks pw = pointwise_checks(imm, geom);
  rep.check("decomposition", pw.decomposition < tol(c, "pointwise"), pw.decomposition, tol(c, "pointwise"),
            "|A|^2 = |A0|^2 + 1/2 |H|^2");
  rep.check("gauss_equation", pw.gauss_equation < tol(c, "pointwise"), pw.gauss_equation,
            tol(c, "pointwise"), "K = 1/4 |H|^2 - 1/2 |A0|^2");
  rep.check("normality", pw.orthogonality < tol(c, "pointwise"), pw.orthogonality, tol(c, "pointwise"),
            "A is normal");
  if (tr && tr->minimal)
    rep.check("minimal", pw.mean_curvature < tol(c, "pointwise"), pw.mean_curvature, tol(c, "pointwise"),
              "H = 0 on minimal surfaces");

  const GaussMapIdentity gm = gauss_map_identity_check(imm, geom);
  const double gm_err = gm.rhs > 1e-8 ? gm.relative_gap : gm.gap;
  rep.result("gauss_map", {{"lhs", gm.lhs}, {"rhs", gm.rhs}, {"gamma_n", gm.gamma},
                           {"below_threshold", gm.below_threshold}});
  rep.check("gauss_map_identity", gm_err < tol(c, "gauss_map"), gm_err, tol(c, "gauss_map"),
            "int |DG|^2 = 1/2 int |A|^2");

  if (grid.closed() && grid.euler_char) {
    const double err = std::abs(e.gauss_bonnet - 2.0 * kPi * *grid.euler_char);
    rep.check("gauss_bonnet", err < tol(c, "gauss_bonnet"), err, tol(c, "gauss_bonnet"));
  }

  // Weak Liouville equation against a bump inside the first chart.
  const Patch& p = grid.patches.front();
  Eigen::Vector2d centre;
  double radius;
  if (p.coords == ChartCoords::polar) {
    // Off the origin, which may be a branch point.
    centre = {0.5 * (p.a1.lo() + p.a1.hi()), 0.0};
    radius = 0.45 * (p.a1.hi() - p.a1.lo());
  } else {
    centre = {0.5 * (p.a1.lo() + p.a1.hi()), 0.5 * (p.a2.lo() + p.a2.hi())};
    radius = 0.3 * std::min(p.a1.hi() - p.a1.lo(), p.a2.hi() - p.a2.lo());
  }
  const Eigen::VectorXd bump = bump_function(grid, 0, centre, radius);
  const double lr = std::abs(liouville_residual(imm, geom, bump)) / liouville_scale(imm, geom, bump);
  rep.check("liouville_weak", lr < tol(c, "liouville"), lr, tol(c, "liouville"),
            "int <grad u, grad phi> - K e^{2u} phi, relative to the size of either term");

  // Trace-free energy density is Moebius invariant: invert about a far point.
  Eigen::VectorXd x0 = imm.f.rowwise().mean();
  x0[0] += 2.0 * e.diam + 1.0;
  const double scale = (geom.A0sq.cwiseProduct(geom.area)).cwiseAbs().maxCoeff();
  const double tf = tracefree_invariance_check(imm, MobiusMap::inversion(x0)) / std::max(scale, 1.0);
  rep.check("tracefree_invariance", tf < tol(c, "tracefree"), tf, tol(c, "tracefree"),
            "|A0|^2 dmu unchanged by inversion");
}

Report run_identity_suite(const RunConfig& c) {
  Report rep("identity-suite");
  const SurfaceSpec spec = parse_surface_spec(c.surface);
  const SampledImmersion imm = instantiate(spec, c.resolution);
  grid_provenance(rep, imm);
  identity_checks(rep, c, imm, traits(spec));
  return rep;
}

Report run_branch(const RunConfig& c) {
  Report rep("branch");
  const SurfaceSpec spec = parse_surface_spec(c.surface);
  const SurfaceTraits tr = traits(spec);
  if (tr.closed) throw InvalidInput("branch classification needs a disk surface");
  const SampledImmersion imm = instantiate(spec, c.resolution);
  grid_provenance(rep, imm);
  const double exclusion = c.values.empty() ? std::ldexp(1.0, -8) : c.values.front();
  const BranchEstimate est = estimate_branch_order(imm, exclusion);
  rep.result("m", est.m);
  rep.result("alpha_raw", est.alpha_raw);
  rep.result("omega0", est.omega0);
  rep.result("intercept", est.intercept);
  rep.result("density_limit", est.density_limit);
  rep.result("fit_residual", est.fit_residual);
  rep.result("unbranched", est.unbranched);
  if (tr.origin_order) {
    rep.check("branch_order", est.m == *tr.origin_order, est.m, 0.0,
              "expected m = " + std::to_string(*tr.origin_order));
    const double want = *tr.origin_order + 1.0;
    const double err = std::abs(est.density_limit - want) / want;
    rep.check("density_limit", err < tol(c, "branch_density"), err, tol(c, "branch_density"),
              "theta^2 = m + 1");
  }
  const BlowupTable blow = blowup_check(imm, est, {0.05, 0.0}, {1.0, 2.0, 4.0, 8.0});
  Json rows = Json::array();
  for (const auto& r : blow.rows) rows.push_back({{"lambda", r.lambda}, {"distance", r.distance}});
  rep.result("blowup", rows);
  rep.check("blowup_converges", blow.decreasing, blow.rows.empty() ? 0.0 : blow.rows.back().distance, 0.0,
            "distance to the limit decreases with lambda");
  std::vector<std::vector<double>> csv;
  for (std::size_t i = 0; i < est.radii.size(); ++i) csv.push_back({est.radii[i], est.circle_means[i]});
  write_csv(c.out / "branch_circle_means.csv", {"r", "circle_mean_u"}, csv);
  return rep;
}

Report run_invert(const RunConfig& c) {
  Report rep("invert");
  const SurfaceSpec spec = parse_surface_spec(c.surface);
  const SampledImmersion imm = instantiate(spec, c.resolution);
  grid_provenance(rep, imm);
  std::vector<Preimage> pre;
  Eigen::VectorXd x0;
  if (c.on_surface) {
    // Invert at the image of a fixed interior parameter point of chart 0.
    const Eigen::Vector2d z(0.3, 0.2);
    x0 = interpolate(*imm.grid, 0, imm.f, z);
    const SurfaceTraits tr = traits(spec);
    pre.push_back({0, z, 0});
    if (!tr.embedded) throw InvalidInput("on-surface inversion needs an embedded surface");
  } else if (!c.center.empty()) {
    x0 = Eigen::Map<const Eigen::VectorXd>(c.center.data(), static_cast<Eigen::Index>(c.center.size()));
    if (x0.size() != imm.n) throw InvalidInput("--center needs " + std::to_string(imm.n) + " coordinates");
    const double gap = (imm.f.colwise() - x0).colwise().norm().minCoeff();
    const double area = integrate(*imm.grid, build_geometry(imm).area);
    if (gap < 2.0 * std::sqrt(area / static_cast<double>(imm.size())))
      throw InvalidInput("inversion centre lies on the surface; use --on-surface");
  } else {
    x0 = imm.f.rowwise().mean();
    x0[imm.n - 1] += 0.75 * extrinsic_diameter(imm.f) + 1.0;
  }
  const InversionIdentity id = inversion_energy_identity(imm, x0, pre);
  rep.input("center", std::vector<double>(x0.data(), x0.data() + x0.size()));
  rep.result("lhs", id.lhs);
  rep.result("rhs", id.rhs);
  rep.result("gap", id.gap);
  if (!id.excision_radii.empty()) {
    rep.result("excision_radii", id.excision_radii);
    rep.result("excised_willmore", id.excised_willmore);
    rep.result("extrapolation_error", id.extrapolation_error);
  }
  const std::string name = pre.empty() ? "inversion" : "inversion_excised";
  rep.check(pre.empty() ? "inversion_identity" : "inversion_identity_excised", id.gap < tol(c, name), id.gap,
            tol(c, name), "W(I f) = W(f) - 4 pi sum (m + 1)");
  return rep;
}

Report run_monotonicity(const RunConfig& c) {
  Report rep("monotonicity");
  const SurfaceSpec spec = parse_surface_spec(c.surface);
  const SurfaceTraits tr = traits(spec);
  if (!tr.closed) throw InvalidInput("monotonicity needs a closed surface");
  const SampledImmersion imm = instantiate(spec, c.resolution);
  grid_provenance(rep, imm);
  const Varifold var(imm);
  const int centres = c.count > 0 ? c.count : 20;
  const double diam = extrinsic_diameter(imm.f);
  std::vector<double> radii;
  for (int i = 1; i <= 24; ++i) radii.push_back(diam * 0.05 * i);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> box(-1.5, 1.5);
  double worst_drop = 0.0, worst_gap = 0.0;
  int resolved = 0;
  Json annuli = Json::array();
  std::vector<std::vector<double>> csv;
  for (int k = 0; k < centres; ++k) {
    Eigen::VectorXd x0(imm.n);
    for (int d = 0; d < imm.n; ++d) x0[d] = box(rng);
    const BallProfile prof = var.ball_profile(x0, radii);
    for (std::size_t i = 1; i < prof.g_values.size(); ++i)
      worst_drop = std::max(worst_drop, prof.g_values[i - 1] - prof.g_values[i]);
    const double sigma = radii[4], rho = radii[14];
    const MonotonicityDefect md = monotonicity_defect(prof, var, sigma, rho);
    std::size_t nodes = 0;
    for (Eigen::Index i = 0; i < imm.f.cols(); ++i) {
      const double d = (imm.f.col(i) - x0).norm();
      nodes += d > sigma && d < rho;
    }
    if (nodes >= kResolvedAnnulus) {
      worst_gap = std::max(worst_gap, md.relative_gap);
      ++resolved;
    }
    annuli.push_back({{"center", k}, {"lhs", md.lhs}, {"rhs", md.rhs}, {"relative_gap", md.relative_gap},
                      {"nodes", nodes}});
    for (std::size_t i = 0; i < radii.size(); ++i)
      csv.push_back({double(k), radii[i], prof.mass[i], prof.willmore_local[i], prof.moment[i], prof.g_values[i]});
  }
  write_csv(c.out / "monotonicity_profiles.csv", {"center", "r", "mass", "willmore_local", "moment", "g"}, csv);
  rep.result("centers", centres);
  rep.result("annuli", annuli);
  rep.result("resolved_annuli", resolved);
  rep.result("willmore", var.willmore());
  rep.result("area", var.area());
  rep.check("g_nondecreasing", worst_drop <= tol(c, "monotone_slack"), worst_drop, tol(c, "monotone_slack"),
            "largest drop of g between consecutive radii");
  rep.check("annulus_identity", worst_gap < tol(c, "annulus"), worst_gap, tol(c, "annulus"),
            "g(rho) - g(sigma) = defect integral, relative, annuli with >= 1e4 nodes");

  // Li-Yau at image points of the surface and diameter bounds.
  std::vector<Eigen::VectorXd> pts;
  for (int k = 0; k < 5; ++k) pts.push_back(imm.f.col(static_cast<Eigen::Index>(k * imm.size() / 5 + imm.size() / 10)));
  const LiYauReport ly = li_yau_check(var, pts, tol(c, "li_yau"));
  Json dens = Json::array();
  for (const auto& p : ly.points) dens.push_back(p.theta2);
  rep.result("theta2", dens);
  rep.result("willmore_over_4pi", ly.willmore_bound);
  rep.check("li_yau", ly.bound_holds, ly.points.empty() ? 0.0 : ly.points.front().theta2, ly.willmore_bound,
            "theta^2 <= W / 4 pi");
  if (tr.embedded)
    rep.check("unit_density", ly.embedded_unit_density, ly.points.empty() ? 0.0 : ly.points.front().theta2,
              tol(c, "li_yau"), "theta^2 = 1 on embedded surfaces");
  const DiameterBounds db = diameter_bounds_check(var);
  rep.result("diameter_bounds", {{"lower", db.lower}, {"diam", db.diam}, {"upper_ratio", db.upper_ratio}});
  rep.check("diameter_lower_bound", db.lower_holds, db.diam, db.lower, "sqrt(area / W) <= diam");

  if (spec.name == "sphere") {
    // Equality case: g == 1 for centres on the sphere.
    double worst = 0.0;
    const double rad = spec.param("r", 1.0);
    std::vector<double> rr;
    for (int i = 0; i < 18; ++i) rr.push_back(rad * (0.1 + 0.1 * i + 0.0125));
    for (int k = 0; k < 4; ++k) {
      const double th = 0.3 + 0.6 * k, ph = 0.7 * k;
      Eigen::VectorXd x0(3);
      x0 << rad * std::sin(th) * std::cos(ph), rad * std::sin(th) * std::sin(ph), rad * std::cos(th);
      const BallProfile prof = var.ball_profile(x0, rr);
      for (double g : prof.g_values) worst = std::max(worst, std::abs(g - 1.0));
    }
    rep.check("sphere_equality", worst < tol(c, "sphere_equality"), worst, tol(c, "sphere_equality"),
              "g = 1 for centres on the sphere");
  }
  return rep;
}

Report run_lattice(const RunConfig& c) {
  Report rep("lattice");
  std::vector<std::complex<double>> taus;
  if (c.values.size() >= 2) {
    taus.emplace_back(c.values[0], c.values[1]);
  } else {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.1, 5.0);
    const int count = c.count > 0 ? c.count : 1000;
    for (int i = 0; i < count; ++i) {
      const double a = re(rng);
      taus.emplace_back(a, im(rng));
    }
  }
  bool invariants = true, unimodular = true;
  double worst = 0.0;
  std::vector<std::vector<double>> csv;
  Json first;
  for (const auto& tau : taus) {
    const LatticeReduction red = normalize_lattice(tau);
    invariants = invariants && red.lattice.normalized();
    const int det = red.basis.determinant();
    unimodular = unimodular && (det == 1 || det == -1);
    const std::complex<double> back = apply_basis(red.basis, tau);
    worst = std::max(worst, std::abs(back - std::complex<double>(red.lattice.a, red.lattice.b)));
    csv.push_back({tau.real(), tau.imag(), red.lattice.a, red.lattice.b, double(red.moves.size()), double(det)});
    if (first.is_null()) {
      Json moves = Json::array();
      for (auto m : red.moves) moves.push_back(to_string(m));
      first = {{"tau", {tau.real(), tau.imag()}}, {"a", red.lattice.a}, {"b", red.lattice.b}, {"moves", moves}};
    }
  }
  write_csv(c.out / "lattice.csv", {"re_tau", "im_tau", "a", "b", "moves", "det"}, csv);
  rep.result("samples", taus.size());
  rep.result("first", first);
  rep.check("fundamental_domain", invariants, 0.0, 0.0, "0 <= a <= 1/2, a^2 + b^2 >= 1");
  rep.check("unimodular", unimodular, 0.0, 0.0, "det of the basis change is +-1");
  rep.check("basis_reproduces", worst < tol(c, "lattice"), worst, tol(c, "lattice"));
  return rep;
}

Report run_collar(const RunConfig& c) {
  Report rep("collar");
  const double ell = c.ell;
  const double T = collar_half_length(ell);
  rep.input("ell", ell);
  rep.result("T", T);
  rep.result("ell_T", ell * T);
  std::vector<std::vector<double>> csv;
  double identity = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double t = (T - 1e-6) * (-1.0 + i / 100.0);
    const CollarPoint p = collar_geometry(ell, t);
    const double cl = std::cos(ell * t);
    identity = std::max({identity, std::abs(p.curvature * p.curvature + cl * cl - 1.0),
                         std::abs(p.length * cl - ell) / ell});
    csv.push_back({t, p.metric_factor, p.curvature, p.length});
  }
  write_csv(c.out / "collar.csv", {"t", "metric_factor", "curvature", "length"}, csv);
  rep.check("closed_form_identities", identity < 1e-12, identity, 1e-12,
            "kappa^2 + cos^2 = 1 and L cos = l");
  const double gap = collar_isometry_check(ell, collar_sample_points(ell, 1000, static_cast<unsigned>(c.seed)));
  rep.check("isometry", gap < tol(c, "collar_isometry"), gap, tol(c, "collar_isometry"),
            "pullback of the hyperbolic metric under i exp(l w)");
  // Limits as l -> 0 at distance t0 from the collar end.
  const double small = 1e-3, Ts = collar_half_length(small);
  double worst = 0.0;
  Json lim = Json::array();
  for (double t0 : {0.5, 1.0, 2.0}) {
    for (double sgn : {1.0, -1.0}) {
      const CollarPoint p = collar_geometry(small, sgn * (Ts - t0));
      worst = std::max({worst, std::abs(std::abs(p.curvature) - 1.0), std::abs(p.length - 1.0 / (t0 + 0.5))});
      if (sgn > 0) lim.push_back({{"t0", t0}, {"curvature", p.curvature}, {"length", p.length}});
    }
  }
  rep.result("limits_at_small_ell", lim);
  rep.check("collar_limits", worst < tol(c, "collar_limit"), worst, tol(c, "collar_limit"),
            "kappa -> 1 and L -> 1/(t0 + 1/2) at l = 1e-3");
  return rep;
}

Report run_degeneration(const RunConfig& c) {
  Report rep("degeneration");
  const std::vector<double> b = c.values.empty() ? std::vector<double>{1.0, 2.0, 4.0, 8.0} : c.values;
  const DegenerationSeries s = degeneration_series(b, c.resolution);
  rep.result("label", s.label);
  Json rows = Json::array();
  std::vector<std::vector<double>> csv;
  double diam_err = 0.0;
  for (const auto& r : s.rows) {
    rows.push_back({{"b", r.b}, {"willmore", r.willmore}, {"total_A", r.total_A},
                    {"min_circle_diam", r.min_circle_diam}});
    csv.push_back({r.b, r.willmore, r.total_A, r.min_circle_diam});
    diam_err = std::max(diam_err, std::abs(r.min_circle_diam - 1.0));
  }
  write_csv(c.out / "degeneration.csv", {"b", "willmore", "total_A", "min_circle_diam"}, csv);
  rep.result("rows", rows);
  rep.result("willmore_nondecreasing", s.willmore_nondecreasing);
  rep.result("final_above_8pi", s.final_above_8pi);
  rep.check("min_circle_normalized", diam_err < tol(c, "circle_diam"), diam_err, tol(c, "circle_diam"));
  rep.check("willmore_trend", s.willmore_nondecreasing, s.rows.empty() ? 0.0 : s.rows.back().willmore, 8.0 * kPi,
            "family evidence: W nondecreasing in b");
  return rep;
}

Report run_helein(const RunConfig& c) {
  Report rep("helein-probe");
  const std::vector<double> eps = c.values.empty() ? std::vector<double>{1.0, 0.5, 0.25, 0.125} : c.values;
  const HeleinProbe probe = helein_dichotomy_probe(eps, c.resolution);
  Json rows = Json::array();
  std::vector<std::vector<double>> csv;
  for (const auto& r : probe.rows) {
    rows.push_back({{"eps", r.eps}, {"u0", r.u0}, {"u_half", r.u_half}, {"total_A", r.total_A}});
    csv.push_back({r.eps, r.u0, r.u_half, r.total_A});
  }
  write_csv(c.out / "helein_probe.csv", {"eps", "u0", "u_half", "total_A"}, csv);
  rep.result("rows", rows);
  rep.check("total_A_below_4pi", probe.total_A_below_4pi, probe.rows.back().total_A, 4.0 * kPi);
  rep.check("u0_diverges", probe.u0_diverging, probe.rows.back().u0, 0.0);
  rep.check("u_half_bounded", probe.u_half_bounded, probe.rows.back().u_half, 1.0);
  rep.check("neither_alternative", probe.neither_alternative, 0.0, 0.0,
            "u neither bounded nor uniformly divergent below the threshold");
  return rep;
}

Report run_ingest(const RunConfig& c) {
  Report rep("ingest");
  if (c.file.empty()) throw InvalidInput("ingest needs --file");
  rep.input("file", c.file);
  const SampledImmersion imm = read_grid_file(c.file);
  grid_provenance(rep, imm);
  const GeometryFields geom = build_geometry(imm);
  const EnergyReport e = energy_report(imm, geom);
  rep.result("energies", energies_json(e));
  rep.result("conformality", conformality_check(imm));
  const ParamGrid& grid = *imm.grid;
  if (grid.closed() && grid.euler_char) {
    const double err = std::abs(e.gauss_bonnet - 2.0 * kPi * *grid.euler_char);
    rep.check("gauss_bonnet", err < tol(c, "roundtrip"), err, tol(c, "roundtrip"));
  }
  return rep;
}

Report run_export(const RunConfig& c) {
  Report rep("export");
  if (c.file.empty()) throw InvalidInput("export needs --file");
  const SurfaceSpec spec = parse_surface_spec(c.surface);
  const SampledImmersion imm = instantiate(spec, c.resolution);
  grid_provenance(rep, imm);
  write_grid_file(c.file, imm);
  rep.result("file", c.file);
  return rep;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw InvalidInput("not a number: '" + tok + "'");
    }
    if (used != tok.size() || !std::isfinite(v)) throw InvalidInput("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

void apply_config_file(RunConfig& cfg, const std::string& path, bool has_surface, bool has_grid,
                       bool has_out, bool has_threads, bool has_seed, std::map<std::string, double>& tol) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const Json& v = it.value();
    try {
      if (k == "surface") {
        if (!has_surface) cfg.surface = v.get<std::string>();
      } else if (k == "grid") {
        if (!has_grid) cfg.resolution = v.get<int>();
      } else if (k == "out") {
        if (!has_out) cfg.out = v.get<std::string>();
      } else if (k == "threads") {
        if (!has_threads) cfg.threads = v.get<int>();
      } else if (k == "seed") {
        if (!has_seed) cfg.seed = v.get<std::uint64_t>();
      } else if (k == "tol") {
        for (auto t = v.begin(); t != v.end(); ++t)
          if (!tol.count(t.key())) tol[t.key()] = t.value().get<double>();
      } else {
        throw InvalidInput("unknown config key '" + k + "'");
      }
    } catch (const nlohmann::json::exception&) {
      throw InvalidInput("config key '" + k + "' has the wrong type");
    }
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical experiments on conformally immersed surfaces", "confimm"};
  app.require_subcommand(1);
  std::string surface, tol_text, out_dir, config, center_text, list_text, file;
  std::vector<std::string> tols;
  int grid = 0, threads = 0, count = 0;
  std::uint64_t seed = 0;
  double ell = 0.1;
  bool on_surface = false;

  struct Sub {
    const char* name;
    const char* help;
    const char* default_surface;
    int default_grid;
  };
  const std::vector<Sub> subs = {
      {"energy", "Willmore and curvature energies of a catalog surface", "sphere", 128},
      {"identity-suite", "Pointwise and integral identities on a catalog surface", "sphere", 128},
      {"branch", "Branch-point classification at the parameter origin", "power-branch(m=1)", 128},
      {"invert", "Energy accounting under a sphere inversion", "sphere", 128},
      {"monotonicity", "Monotonicity function, Li-Yau and diameter bounds", "sphere", 128},
      {"lattice", "Lattice normalization for tori", "", 0},
      {"collar", "Collar geometry of a short geodesic", "", 0},
      {"degeneration", "Product-torus family with b -> infinity", "", 64},
      {"helein-probe", "f_eps family below the energy threshold", "", 128},
      {"ingest", "Energies of an externally sampled immersion", "", 0},
      {"export", "Write a catalog surface in the grid file format", "sphere", 128},
  };
  std::map<std::string, CLI::App*> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    apps[s.name] = sub;
    sub->add_option("--surface", surface, "Surface spec, e.g. f_eps(eps=0.5)");
    sub->add_option("--grid", grid, "Grid resolution (>= 16)");
    sub->add_option("--tol", tols, "Tolerance override name=value")->allow_extra_args(false);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (default: all cores)");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--config", config, "JSON config file");
  }
  apps["branch"]->add_option("--exclusion", list_text, "Smallest circle radius");
  apps["invert"]->add_option("--center", center_text, "Inversion centre x1,x2,...");
  apps["invert"]->add_flag("--on-surface", on_surface, "Invert at a surface point");
  apps["monotonicity"]->add_option("--centers", count, "Number of random centres");
  apps["lattice"]->add_option("--tau", list_text, "re,im of tau (default: random sample)");
  apps["lattice"]->add_option("--count", count, "Random sample size");
  apps["collar"]->add_option("--ell", ell, "Geodesic length");
  apps["degeneration"]->add_option("--b", list_text, "Increasing b values, comma separated");
  apps["helein-probe"]->add_option("--eps", list_text, "Decreasing eps values, comma separated");
  apps["ingest"]->add_option("file,--file", file, "Grid file")->required();
  apps["export"]->add_option("--file", file, "Destination grid file")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  RunConfig cfg;
  CLI::App* chosen = app.get_subcommands().front();
  cfg.experiment = chosen->get_name();
  const Sub& meta = *std::find_if(subs.begin(), subs.end(), [&](const Sub& s) { return cfg.experiment == s.name; });
  try {
    std::map<std::string, double> flag_tol;
    for (const auto& t : tols) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw InvalidInput("--tol expects name=value, got '" + t + "'");
      const auto v = parse_list(t.substr(eq + 1));
      if (v.size() != 1) throw InvalidInput("--tol expects one value");
      flag_tol[t.substr(0, eq)] = v[0];
    }
    cfg.surface = meta.default_surface;
    cfg.resolution = meta.default_grid;
    auto given = [&](const char* name) { return chosen->count(name) > 0; };
    std::map<std::string, double> merged = flag_tol;
    if (!config.empty())
      apply_config_file(cfg, config, given("--surface"), given("--grid"), given("--out"), given("--threads"),
                        given("--seed"), merged);
    if (given("--surface")) cfg.surface = surface;
    if (given("--grid")) cfg.resolution = grid;
    if (given("--threads")) cfg.threads = threads;
    if (given("--seed")) cfg.seed = seed;
    // Output directory: flag, then environment, then config, then default.
    if (given("--out")) {
      cfg.out = out_dir;
    } else if (const char* env = std::getenv(kOutEnv); env && *env) {
      cfg.out = env;
    }
    for (const auto& [k, v] : merged) {
      if (!default_tolerances().count(k)) throw InvalidInput("unknown tolerance '" + k + "'");
      if (!(v > 0.0)) throw InvalidInput("tolerance '" + k + "' must be positive");
      cfg.tol[k] = v;
    }
    if (meta.default_grid > 0 && cfg.resolution < 16) throw InvalidInput("grid resolution must be at least 16");
    if (cfg.threads < 0) throw InvalidInput("threads must be non-negative");
    if (!list_text.empty()) cfg.values = parse_list(list_text);
    if (!center_text.empty()) cfg.center = parse_list(center_text);
    cfg.on_surface = on_surface;
    cfg.ell = ell;
    cfg.count = count;
    cfg.file = file;
    if (!(cfg.ell > 0.0)) throw InvalidInput("--ell must be positive");
    if (cfg.count < 0) throw InvalidInput("counts must be non-negative");
    if (cfg.experiment == "lattice" && !list_text.empty() && cfg.values.size() != 2)
      throw InvalidInput("--tau expects re,im");
    if (!cfg.surface.empty()) validate(parse_surface_spec(cfg.surface));
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (cfg.threads > 0) set_threads(cfg.threads);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::filesystem::create_directories(cfg.out);
    std::optional<Report> rep;
    const std::string& x = cfg.experiment;
    if (x == "energy") rep = run_energy(cfg);
    else if (x == "identity-suite") rep = run_identity_suite(cfg);
    else if (x == "branch") rep = run_branch(cfg);
    else if (x == "invert") rep = run_invert(cfg);
    else if (x == "monotonicity") rep = run_monotonicity(cfg);
    else if (x == "lattice") rep = run_lattice(cfg);
    else if (x == "collar") rep = run_collar(cfg);
    else if (x == "degeneration") rep = run_degeneration(cfg);
    else if (x == "helein-probe") rep = run_helein(cfg);
    else if (x == "ingest") rep = run_ingest(cfg);
    else rep = run_export(cfg);
    const Json inputs = echo(cfg);
    for (const auto& [k, v] : inputs.items()) rep->input(k, v);
    rep->provenance("threads", cfg.threads > 0 ? cfg.threads : max_threads());
    rep->set_runtime(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    const auto path = cfg.out / (cfg.experiment + ".json");
    rep->write(path);
    for (const auto& c : rep->checks())
      out << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << c.value << " tol=" << c.tolerance << "\n";
    out << "report: " << path.string() << "\n";
    return rep->all_pass() ? 0 : 1;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const CenterOnSurface& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NotFiniteArea& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "failed: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace confimm
