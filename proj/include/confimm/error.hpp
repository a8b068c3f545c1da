#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace confimm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: surface specs, grid files, option values.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The tangent frame collapsed at a node (second Gram-Schmidt pivot too small).
class DegenerateImmersion : public Error {
 public:
  DegenerateImmersion(std::size_t node, double ratio)
      : Error("degenerate immersion at node " + std::to_string(node) +
              " (pivot ratio " + std::to_string(ratio) + ")"),
        node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// A precondition on a numerical experiment was violated (bad radius, support, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ClassificationFailed : public Error {
 public:
  using Error::Error;
};

class NotFiniteArea : public Error {
 public:
  using Error::Error;
};

class CenterOnSurface : public Error {
 public:
  CenterOnSurface(std::size_t node, double distance)
      : Error("inversion center lies on the surface: node " + std::to_string(node) +
              " at distance " + std::to_string(distance)),
        node_(node),
        distance_(distance) {}
  std::size_t node() const noexcept { return node_; }
  double distance() const noexcept { return distance_; }

 private:
  std::size_t node_;
  double distance_;
};

}  // namespace confimm
