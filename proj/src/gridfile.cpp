#include "confimm/gridfile.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "confimm/error.hpp"

namespace confimm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw InvalidInput("line " + std::to_string(line) + ": " + what);
}

std::vector<double> numbers(const std::string& text, std::size_t line) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
      fail(line, "not a finite number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Block {
  std::optional<std::size_t> rows, cols;
  std::vector<double> period, range, breaks;
  std::optional<int> ppp;
  std::size_t header_line = 0;
};

std::size_t positive_count(const std::string& v, std::size_t line, const char* key) {
  const auto xs = numbers(v, line);
  if (xs.size() != 1 || xs[0] < 1 || xs[0] != std::floor(xs[0]))
    fail(line, std::string(key) + " must be a positive integer");
  return static_cast<std::size_t>(xs[0]);
}

// Periodic axis from sampled coordinates; validates uniform spacing.
Axis periodic_axis(const std::vector<double>& x, double period, const char* what,
                   const std::vector<std::size_t>& lines) {
  const std::size_t n = x.size();
  const double h = period / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double expect = x[0] + h * static_cast<double>(i);
    if (std::abs(x[i] - expect) > 1e-9 * period)
      fail(lines[i], std::string(what) + " " + std::to_string(i) + " has coordinate " +
                         std::to_string(x[i]) + ", expected " + std::to_string(expect) +
                         " for period " + std::to_string(period));
  }
  return Axis::periodic(n, period, x[0]);
}

Axis open_axis(const std::vector<double>& x, const Block& b, const char* what,
               const std::vector<std::size_t>& lines, std::optional<double> lo_default) {
  if (!b.breaks.empty()) {
    if (!b.ppp) fail(b.header_line, "breaks given without ppp");
    Axis a = Axis::panels(b.breaks, *b.ppp);
    if (a.size() != x.size())
      fail(b.header_line, std::string("panel layout has ") + std::to_string(a.size()) + " nodes but the " +
                              what + " count is " + std::to_string(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
      if (std::abs(a.node(i) - x[i]) > 1e-9 * (1.0 + std::abs(x[i])))
        fail(lines[i], std::string(what) + " " + std::to_string(i) + " does not match the panel nodes");
    return a;
  }
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) fail(lines[i], std::string(what) + " coordinates must increase");
  double lo = lo_default.value_or(x.front()), hi = x.back();
  if (!b.range.empty()) {
    lo = b.range[0];
    hi = b.range[1];
  }
  if (lo > x.front() || hi < x.back()) fail(b.header_line, "range does not contain the nodes");
  return Axis::scattered(x, lo, hi);
}

}  // namespace

SampledImmersion read_grid(std::istream& in, Exec exec) {
  std::string raw;
  std::size_t line_no = 0;
  std::optional<DomainKind> kind;
  std::optional<int> n, euler;
  std::optional<std::size_t> charts;
  std::optional<double> ell;
  Block block;
  std::vector<Patch> patches;
  std::vector<Eigen::VectorXd> positions;
  bool any = false;

  auto next_data = [&](std::vector<double>& vals) {
    while (std::getline(in, raw)) {
      ++line_no;
      const std::string s = trim(raw);
      if (s.empty() || s[0] == '#') continue;
      if (s.find('=') != std::string::npos) fail(line_no, "expected a data row, found a header line");
      vals = numbers(s, line_no);
      return true;
    }
    return false;
  };

  auto read_block = [&](std::vector<double> first) {
    if (!kind || !n) fail(line_no, "data before domain= and n=");
    if (!block.rows || !block.cols) fail(line_no, "data before rows= and cols=");
    const std::size_t rows = *block.rows, cols = *block.cols;
    const std::size_t width = 2 + static_cast<std::size_t>(*n);
    std::vector<double> s(rows), t(cols);
    std::vector<std::size_t> row_lines(rows), col_lines(cols);
    Eigen::MatrixXd f(*n, static_cast<Eigen::Index>(rows * cols));
    std::vector<double> vals = std::move(first);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        if (i + j > 0 && !next_data(vals))
          fail(line_no, "file ends after " + std::to_string(i * cols + j) + " of " +
                            std::to_string(rows * cols) + " data rows");
        if (vals.size() != width)
          fail(line_no, "expected " + std::to_string(width) + " values, found " + std::to_string(vals.size()));
        if (j == 0) {
          s[i] = vals[0];
          row_lines[i] = line_no;
        } else if (vals[0] != s[i]) {
          fail(line_no, "s changes within row " + std::to_string(i) + " (grid is not a tensor product)");
        }
        if (i == 0) {
          t[j] = vals[1];
          col_lines[j] = line_no;
        } else if (vals[1] != t[j]) {
          fail(line_no, "t of column " + std::to_string(j) + " differs from the first row");
        }
        for (int c = 0; c < *n; ++c)
          f(c, static_cast<Eigen::Index>(i * cols + j)) = vals[2 + static_cast<std::size_t>(c)];
      }
    }
    Patch p;
    switch (*kind) {
      case DomainKind::disk:
      case DomainKind::annulus:
      case DomainKind::atlas: {
        p.coords = ChartCoords::polar;
        const double period = block.period.empty() ? kTwoPi : block.period[0];
        if (std::abs(period - kTwoPi) > 1e-9) fail(block.header_line, "polar charts need period 2*pi");
        p.a2 = periodic_axis(t, kTwoPi, "column", col_lines);
        const std::optional<double> lo0 =
            *kind == DomainKind::annulus ? std::nullopt : std::optional<double>(0.0);
        p.a1 = open_axis(s, block, "row", row_lines, lo0);
        if (*kind != DomainKind::annulus && p.a1.lo() != 0.0)
          fail(block.header_line, "disk charts must start at r = 0");
        if (*kind == DomainKind::annulus && !(p.a1.lo() > 0.0))
          fail(block.header_line, "annulus needs a positive inner radius");
        break;
      }
      case DomainKind::flat_torus:
        if (block.period.size() != 2) fail(block.header_line, "flat_torus needs period=<L1> <L2>");
        p.a1 = periodic_axis(s, block.period[0], "row", row_lines);
        p.a2 = periodic_axis(t, block.period[1], "column", col_lines);
        break;
      case DomainKind::collar_cylinder:
        p.a1 = periodic_axis(s, block.period.empty() ? 1.0 : block.period[0], "row", row_lines);
        p.a2 = open_axis(t, block, "column", col_lines, std::nullopt);
        break;
    }
    patches.push_back(std::move(p));
    positions.push_back(Eigen::Map<Eigen::VectorXd>(f.data(), f.size()));
    block = Block{};
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    any = true;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      read_block(numbers(s, line_no));
      continue;
    }
    const std::string key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
    if (key == "domain") {
      if (!patches.empty()) fail(line_no, "domain= must precede the data");
      if (val == "disk") kind = DomainKind::disk;
      else if (val == "annulus") kind = DomainKind::annulus;
      else if (val == "flat-torus") kind = DomainKind::flat_torus;
      else if (val == "collar-cylinder") kind = DomainKind::collar_cylinder;
      else if (val == "atlas") kind = DomainKind::atlas;
      else fail(line_no, "unknown domain '" + val + "'");
    } else if (key == "n") {
      const std::size_t v = positive_count(val, line_no, "n");
      if (v < 3) fail(line_no, "target dimension n must be at least 3");
      n = static_cast<int>(v);
    } else if (key == "rows" || key == "cols") {
      if (!block.header_line) block.header_line = line_no;
      (key == "rows" ? block.rows : block.cols) = positive_count(val, line_no, key.c_str());
    } else if (key == "period") {
      block.period = numbers(val, line_no);
      if (block.period.empty() || block.period.size() > 2) fail(line_no, "period takes one or two values");
      for (double v : block.period)
        if (!(v > 0.0)) fail(line_no, "period must be positive");
    } else if (key == "range") {
      block.range = numbers(val, line_no);
      if (block.range.size() != 2 || !(block.range[1] > block.range[0])) fail(line_no, "range needs lo < hi");
    } else if (key == "breaks") {
      block.breaks = numbers(val, line_no);
    } else if (key == "ppp") {
      block.ppp = static_cast<int>(positive_count(val, line_no, "ppp"));
    } else if (key == "ell") {
      const auto xs = numbers(val, line_no);
      if (xs.size() != 1 || !(xs[0] > 0.0)) fail(line_no, "ell must be positive");
      ell = xs[0];
    } else if (key == "charts") {
      charts = positive_count(val, line_no, "charts");
    } else if (key == "euler_char") {
      const auto xs = numbers(val, line_no);
      if (xs.size() != 1 || xs[0] != std::floor(xs[0])) fail(line_no, "euler_char must be an integer");
      euler = static_cast<int>(xs[0]);
    } else {
      fail(line_no, "unknown header key '" + key + "'");
    }
  }
  if (!any) throw InvalidInput("empty grid file");
  if (patches.empty()) fail(line_no, "no data rows");
  const std::size_t want = *kind == DomainKind::atlas ? charts.value_or(0) : 1;
  if (*kind == DomainKind::atlas && !charts) fail(line_no, "atlas needs charts=");
  if (patches.size() != want)
    fail(line_no, "expected " + std::to_string(want) + " chart blocks, found " + std::to_string(patches.size()));
  if (*kind == DomainKind::atlas && !euler) fail(line_no, "atlas needs euler_char=");
  if (*kind == DomainKind::collar_cylinder && !ell) fail(line_no, "collar_cylinder needs ell=");

  std::optional<int> chi = euler;
  if (*kind == DomainKind::flat_torus) chi = 0;
  ParamGrid grid;
  if (*kind == DomainKind::atlas) {
    std::vector<ParamGrid> parts;
    for (auto& p : patches) parts.push_back(assemble_grid(DomainKind::disk, {std::move(p)}));
    grid = make_atlas(std::move(parts), *chi);
  } else {
    grid = assemble_grid(*kind, std::move(patches), chi);
  }
  if (*kind == DomainKind::collar_cylinder) {
    grid.collar_ell = ell;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double c = std::cos(*ell * grid.nodes[k].y());
      if (!(c > 0.0)) fail(line_no, "collar coordinate t outside |l t| < pi/2");
      grid.background_metric[k] = Eigen::Matrix2d::Identity() * (*ell * *ell / (c * c));
      grid.background_curvature[static_cast<Eigen::Index>(k)] = -1.0;
    }
  }
  validate(grid);
  Eigen::MatrixXd f(*n, static_cast<Eigen::Index>(grid.size()));
  Eigen::Index col = 0;
  for (const auto& block_f : positions) {
    const Eigen::Index cols = block_f.size() / *n;
    f.middleCols(col, cols) = Eigen::Map<const Eigen::MatrixXd>(block_f.data(), *n, cols);
    col += cols;
  }
  return from_positions(std::make_shared<const ParamGrid>(std::move(grid)), std::move(f), exec);
}

SampledImmersion read_grid_file(const std::string& path, Exec exec) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open grid file '" + path + "'");
  return read_grid(in, exec);
}

void write_grid(std::ostream& out, const SampledImmersion& imm) {
  const ParamGrid& g = *imm.grid;
  out << std::setprecision(17);
  out << "domain=" << to_string(g.kind) << "\n";
  out << "n=" << imm.n << "\n";
  if (g.kind == DomainKind::atlas) {
    out << "charts=" << g.patches.size() << "\n";
    out << "euler_char=" << g.euler_char.value_or(0) << "\n";
  }
  if (g.kind == DomainKind::collar_cylinder) {
    if (!g.collar_ell) throw InvalidInput("collar grid without a geodesic length");
    out << "ell=" << *g.collar_ell << "\n";
  }
  auto axis_keys = [&](const Axis& a) {
    switch (a.rule()) {
      case AxisRule::periodic_uniform: break;
      case AxisRule::gl_panels:
        out << "ppp=" << a.points_per_panel() << "\n";
        out << "breaks=";
        for (std::size_t k = 0; k < a.breaks().size(); ++k) out << (k ? " " : "") << a.breaks()[k];
        out << "\n";
        break;
      case AxisRule::scattered: out << "range=" << a.lo() << " " << a.hi() << "\n"; break;
    }
  };
  for (const auto& p : g.patches) {
    out << "rows=" << p.a1.size() << "\ncols=" << p.a2.size() << "\n";
    if (g.kind == DomainKind::flat_torus)
      out << "period=" << p.a1.period() << " " << p.a2.period() << "\n";
    else if (g.kind == DomainKind::collar_cylinder)
      out << "period=" << p.a1.period() << "\n";
    axis_keys(p.a1);
    if (!p.a2.periodic()) axis_keys(p.a2);
    for (std::size_t i = 0; i < p.a1.size(); ++i)
      for (std::size_t j = 0; j < p.a2.size(); ++j) {
        out << p.a1.node(i) << " " << p.a2.node(j);
        const auto k = static_cast<Eigen::Index>(p.index(i, j));
        for (int c = 0; c < imm.n; ++c) out << " " << imm.f(c, k);
        out << "\n";
      }
  }
}

void write_grid_file(const std::string& path, const SampledImmersion& imm) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write grid file '" + path + "'");
  write_grid(out, imm);
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace confimm
