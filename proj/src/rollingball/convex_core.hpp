#pragma once

// Convex bodies and the basic kernel over them: membership, support,
// projection, distance, Minkowski gauge and Chebyshev center.

#include <variant>
#include <vector>

#include "rollingball/common.hpp"

namespace rollingball {

struct ChebyshevBall {
  Vector center;
  double radius = 0.0;
};

// {x : <a_i, x> <= b_i for all i} with unit normals a_i stored as the rows of
// normals(). Construction normalizes every row and rejects empty, unbounded
// and lower-dimensional systems.
class HPolytope {
 public:
  HPolytope(Matrix normals, Vector offsets);

  static HPolytope box(const Vector& lower, const Vector& upper);
  // Regular polygon with `sides` edges and apothem-to-vertex radius
  // `circumradius`, centered at `center`.
  static HPolytope regular_polygon(int sides, double circumradius,
                                   const Vector& center = Vector::Zero(2));

  int dimension() const { return static_cast<int>(normals_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(normals_.rows()); }
  const Matrix& normals() const { return normals_; }
  const Vector& offsets() const { return offsets_; }
  const ChebyshevBall& chebyshev() const { return chebyshev_; }

  bool contains(const Vector& x, double tol = 1e-12) const;
  HPolytope translated(const Vector& shift) const;

 private:
  struct Trusted {};
  HPolytope(Trusted, Matrix normals, Vector offsets, ChebyshevBall cheb);
  friend HPolytope offset_halfspaces(const HPolytope&, double);

  Matrix normals_;
  Vector offsets_;
  ChebyshevBall chebyshev_;
};

// Every offset reduced by r. Throws kDegenerateBody when r >= the Chebyshev
// radius (the result would have empty interior).
HPolytope offset_halfspaces(const HPolytope& body, double r);

// Counterclockwise strictly convex polygon.
class VPolygon {
 public:
  explicit VPolygon(std::vector<Eigen::Vector2d> vertices);

  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double perimeter() const;
  double area() const;
  bool contains(const Vector& x, double tol = 1e-12) const;
  HPolytope to_hpolytope() const;

 private:
  std::vector<Eigen::Vector2d> vertices_;
};

// Convex hull of a 2D point cloud (Andrew's monotone chain), collinear points
// dropped.
VPolygon convex_hull_2d(std::vector<Eigen::Vector2d> points);

// Closed Euclidean ball. Radius zero is allowed so a single point can serve
// as the core of a BallBody.
struct Ball {
  Vector center;
  double radius = 0.0;
  Ball(Vector c, double r);
};

using CoreBody = std::variant<HPolytope, Ball>;

// core (+) r*B, the Minkowski sum of a core body with a closed ball.
class BallBody {
 public:
  BallBody(CoreBody core, double radius);

  const CoreBody& core() const { return core_; }
  double radius() const { return radius_; }
  int dimension() const;

 private:
  CoreBody core_;
  double radius_;
};

using ConvexBody = std::variant<HPolytope, VPolygon, Ball, BallBody>;

struct SupportValue {
  double value = 0.0;
  Vector argmax;
};

struct SupportingHyperplane {
  Vector point;
  Vector normal;  // outward unit normal
};

int dimension(const ConvexBody& body);
ChebyshevBall chebyshev_center(const HPolytope& body);
ChebyshevBall chebyshev_center(const ConvexBody& body);

Vector project(const ConvexBody& body, const Vector& x);
Vector project(const HPolytope& body, const Vector& x);
Vector project(const CoreBody& core, const Vector& x);
double distance(const ConvexBody& body, const Vector& x);
double distance(const CoreBody& core, const Vector& x);
bool contains(const ConvexBody& body, const Vector& x, double tol = 1e-12);

// Gradient of dist(., K)^2, which is 2 (x - pi_K(x)).
Vector dist_sq_gradient(const ConvexBody& body, const Vector& x);

// max over K of <u, x>; u must be a unit vector.
SupportValue support(const ConvexBody& body, const Vector& u);
SupportValue support(const HPolytope& body, const Vector& u);

// inf{t > 0 : x / t in K}. Requires the origin in the interior of K.
double minkowski_functional(const ConvexBody& body, const Vector& x);

// Supporting hyperplane at a boundary point p (within tolerance).
SupportingHyperplane supporting_hyperplane(const ConvexBody& body, const Vector& p);

// Vertices of a polytope. Counterclockwise in 2D; unordered in 3D.
std::vector<Vector> vertices(const HPolytope& body);
VPolygon to_vpolygon(const HPolytope& body);

// One facet per distinct halfspace that supports a facet of positive
// measure. `halfspace` indexes the generating row so facets of K and of an
// offset of K correspond by index. Available for dimension 2 and 3.
struct Facet {
  std::size_t halfspace = 0;
  Vector normal;
  std::vector<Vector> vertices;  // segment endpoints (2D) or ordered polygon (3D)
  double measure = 0.0;
};

std::vector<Facet> facets(const HPolytope& body);

// H^{n-1} of the boundary (perimeter in 2D, surface area in 3D).
double boundary_measure(const HPolytope& body);

// Sum over edges of edge length times exterior dihedral angle (3D), the
// coefficient of r in the Steiner formula for the surface of P (+) rB.
double edge_angle_sum(const HPolytope& body);

}  // namespace rollingball
