#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace confimm {

struct Rule1d {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [a, b].
Rule1d gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Barycentric weights of a node set (for Lagrange interpolation).
std::vector<double> barycentric_weights(std::span<const double> nodes);

/// Values (and optionally derivatives) of the Lagrange basis at x.
void lagrange_basis(std::span<const double> nodes, std::span<const double> bw, double x,
                    std::span<double> value, std::span<double> deriv = {});

/// D(i, j) = l_j'(x_i).
Eigen::MatrixXd differentiation_matrix(std::span<const double> nodes);

}  // namespace confimm
