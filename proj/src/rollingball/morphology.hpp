#pragma once

// Ball-openings of convex bodies: inner parallel bodies K_r, the opening
// K(r) = K_r (+) rB, its inner normal field, the dilation factor lambda(r),
// and exact / Monte Carlo measures of how much of the boundary survives.

#include <cstdint>
#include <vector>

#include "rollingball/convex_core.hpp"

namespace rollingball {

// {x in K : dist(x, boundary K) >= r}. Throws kDegenerateBody for r >= r_o.
HPolytope inner_parallel(const HPolytope& body, double r);
Ball inner_parallel(const Ball& body, double r);

// Union of all closed r-balls contained in the body.
BallBody opening(const HPolytope& body, double r);
BallBody opening(const Ball& body, double r);

// Inner unit normal (pi_core(p) - p) / r at a boundary point of W.
Vector boundary_normal(const BallBody& body, const Vector& p, double tol = 1e-9);

struct LambdaFactor {
  double lambda = 1.0;
  // Shift applied to put the Chebyshev center at the origin.
  Vector translation;
};

// inf{lambda > 0 : K subset lambda * K_r} after translating the Chebyshev
// center to the origin.
LambdaFactor lambda_factor(const HPolytope& body, double r);
LambdaFactor lambda_factor(const Ball& body, double r);

struct ContactSegment {
  Eigen::Vector2d start;
  Eigen::Vector2d end;
  double length = 0.0;
};

struct ContactArc {
  Eigen::Vector2d center;
  double radius = 0.0;
  double start_angle = 0.0;  // angle of the outward normal where the arc begins
  double sweep = 0.0;        // counterclockwise
  double length() const { return radius * sweep; }
};

// Exact decomposition of the boundary of a polygon opening. The contact part
// of edge i is the matching edge of K_r translated outward by r, so the
// decomposition stays exact when corner truncations overlap on short edges.
struct ContactDecomposition2D {
  double radius = 0.0;
  std::vector<Eigen::Vector2d> core_vertices;  // K_r, counterclockwise
  // Traversal order around boundary K(r): arcs[k] precedes segments[k].
  std::vector<ContactArc> arcs;
  std::vector<ContactSegment> segments;
  double boundary = 0.0;          // H^1(dK)
  double contact = 0.0;           // H^1(dK cap dK(r))
  double lost = 0.0;              // H^1(dK \ dK(r))
  double gained = 0.0;            // H^1(dK(r) \ dK)
  double symmetric_difference = 0.0;

  // Point of boundary K(r) at arclength s (taken modulo the total length).
  Eigen::Vector2d point_at(double s) const;
  double opening_perimeter() const { return contact + gained; }
};

ContactDecomposition2D contact_set_2d(const VPolygon& polygon, double r);

// The same five measures for a polytope in dimension 2 or 3, exact:
// contact is H^{n-1}(boundary K_r) facet by facet and the gained part comes
// from the Steiner formula for K_r (+) rB.
struct OpeningMeasures {
  double boundary = 0.0;
  double contact = 0.0;
  double lost = 0.0;
  double gained = 0.0;
  double symmetric_difference = 0.0;
};

OpeningMeasures exact_opening_measures(const HPolytope& body, double r);

struct BoundaryEstimate {
  double estimate = 0.0;        // H^{n-1}(dK \ dK(r))
  double standard_error = 0.0;
  double boundary = 0.0;        // exact H^{n-1}(dK)
  std::uint64_t samples = 0;
  std::uint64_t misses = 0;     // samples off dK(r)
};

inline constexpr double kBoundaryClassificationTol = 1e-9;

// Uniform boundary samples (facet chosen by exact area, then uniform on the
// facet); a sample lies on dK(r) iff dist(x, K_r) <= r + 1e-9. Sample i uses
// the random stream (seed, i), so the result is independent of worker count.
BoundaryEstimate boundary_measure_mc(const HPolytope& body, double r, std::uint64_t samples,
                                     std::uint64_t seed);

}  // namespace rollingball
