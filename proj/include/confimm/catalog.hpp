#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "confimm/immersion.hpp"

namespace confimm {

/// Position and parameter derivatives of a map at one point.
struct Jet {
  Eigen::VectorXd f, f1, f2, f11, f12, f22;
};

/// A closed-form immersion. `chart` selects the chart of multi-chart domains
/// (the patch index of the sampling grid).
class SurfaceModel {
 public:
  virtual ~SurfaceModel() = default;
  virtual int dim() const = 0;
  virtual Jet evaluate(std::size_t chart, const Eigen::Vector2d& z) const = 0;
};

using Polynomial = std::vector<std::complex<double>>;  // coefficient of z^k at index k

/// z -> (Re F_1, Im F_1, Re F_2, Im F_2, ...) padded with zeros to dimension n.
class HolomorphicCurve : public SurfaceModel {
 public:
  HolomorphicCurve(std::vector<Polynomial> components, int n);
  int dim() const override { return n_; }
  Jet evaluate(std::size_t chart, const Eigen::Vector2d& z) const override;

 private:
  std::vector<Polynomial> comps_;
  int n_;
};

/// z -> Re Phi(z) for a vector of polynomials Phi (a minimal surface when
/// Phi' is a null curve).
class RealPartCurve : public SurfaceModel {
 public:
  explicit RealPartCurve(std::vector<Polynomial> components);
  int dim() const override { return static_cast<int>(comps_.size()); }
  Jet evaluate(std::size_t chart, const Eigen::Vector2d& z) const override;

 private:
  std::vector<Polynomial> comps_;
};

/// Round sphere of radius r centred at c; chart 0 covers the upper
/// hemisphere from the unit disk, chart 1 the lower one.
class StereographicSphere : public SurfaceModel {
 public:
  StereographicSphere(double radius, Eigen::Vector3d center);
  int dim() const override { return 3; }
  Jet evaluate(std::size_t chart, const Eigen::Vector2d& z) const override;

 private:
  double r_;
  Eigen::Vector3d c_;
};

/// Product of two circles in R^4:
/// (r1 cos(k1 s), r1 sin(k1 s), r2 cos(k2 t), r2 sin(k2 t)), conformal when r1 k1 = r2 k2.
class CircleProduct : public SurfaceModel {
 public:
  CircleProduct(double r1, double k1, double r2, double k2) : r1_(r1), k1_(k1), r2_(r2), k2_(k2) {}
  int dim() const override { return 4; }
  Jet evaluate(std::size_t chart, const Eigen::Vector2d& z) const override;

 private:
  double r1_, k1_, r2_, k2_;
};

struct SurfaceSpec {
  std::string name;
  std::map<std::string, double> params;
  int n = 3;

  double param(const std::string& key, double fallback) const;
};

/// Parses "name" or "name(k=v, ...)". Throws InvalidInput.
SurfaceSpec parse_surface_spec(std::string_view text);
std::string to_string(const SurfaceSpec& spec);
std::vector<std::string> catalog_names();

struct SurfaceTraits {
  bool closed = false;
  bool embedded = true;
  bool minimal = false;
  std::optional<int> euler_char;
  std::optional<double> exact_willmore;
  std::optional<double> exact_total_A;
  /// Branching order at the parameter origin (disk surfaces).
  std::optional<int> origin_order;
};

/// Checks parameter ranges; throws InvalidInput.
void validate(const SurfaceSpec& spec);
SurfaceTraits traits(const SurfaceSpec& spec);
std::shared_ptr<const SurfaceModel> make_model(const SurfaceSpec& spec);
ParamGrid default_grid(const SurfaceSpec& spec, int resolution);

/// Samples a model on a grid with analytic derivatives.
SampledImmersion sample(const SurfaceModel& model, std::shared_ptr<const ParamGrid> grid,
                        Exec exec = Exec::parallel);
SampledImmersion instantiate(const SurfaceSpec& spec, int resolution, Exec exec = Exec::parallel);

/// Conformal factor u = 1/2 log(1/2 |Df|^2) of a model at one point.
double model_u(const SurfaceModel& model, std::size_t chart, const Eigen::Vector2d& z);

struct HeleinRow {
  double eps = 0.0;
  double u0 = 0.0;
  double u_half = 0.0;
  double total_A = 0.0;
};

struct HeleinProbe {
  std::vector<HeleinRow> rows;
  bool u0_diverging = false;      // u(0) strictly decreasing along the sequence
  bool u_half_bounded = false;    // |u(1/2)| stays below 1
  bool total_A_increasing = false;
  bool total_A_below_4pi = false;
  bool neither_alternative = false;
};

/// Runs the f_eps family along a decreasing eps sequence.
HeleinProbe helein_dichotomy_probe(const std::vector<double>& eps, int resolution,
                                   Exec exec = Exec::parallel);

}  // namespace confimm
