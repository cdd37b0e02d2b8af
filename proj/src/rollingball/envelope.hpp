#pragma once

// Convex envelope (lower convex hull of lifted samples) on 1D and 2D node
// sets, and symmetric second differences.

#include <array>
#include <functional>
#include <vector>

#include "rollingball/common.hpp"

namespace rollingball {

class EnvelopeFunction {
 public:
  int dimension = 0;
  std::vector<Vector> nodes;
  std::vector<double> phi;
  std::vector<double> F;              // envelope value at each node
  std::vector<bool> hull_vertex;      // node is a vertex of a lower facet
  // Lower facets as node index tuples (pairs in 1D, triangles in 2D) and
  // their planes F = slope'x + intercept.
  std::vector<std::array<std::size_t, 3>> facets;
  std::vector<Vector> slopes;
  std::vector<double> intercepts;
  Vector lower;                       // bounding box of the nodes
  Vector upper;

  bool contains(const Vector& x) const;
  // Piecewise-linear envelope; kDomainExceeded outside the node bounding box.
  double operator()(const Vector& x) const;
};

// Throws kDegenerateGrid when the nodes do not span their dimension (fewer
// than two distinct abscissae in 1D, collinear nodes in 2D).
EnvelopeFunction convex_envelope(const std::vector<Vector>& nodes, const std::vector<double>& values);

// E_h(x) = F(x + h) + F(x - h) - 2 F(x).
double second_difference(const std::function<double(const Vector&)>& F, const Vector& x,
                         const Vector& h);
// Same, with kDomainExceeded when x +- h leaves the envelope's node box.
double second_difference(const EnvelopeFunction& F, const Vector& x, const Vector& h);

}  // namespace rollingball
