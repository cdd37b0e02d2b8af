#include "rollingball/convex_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rollingball/solvers.hpp"

namespace rollingball {
namespace {

constexpr double kMinNormal = 1e-14;
constexpr double kDegenerateRadius = 1e-10;
constexpr double kVertexTol = 1e-9;

std::string halfspace_field(Eigen::Index i) {
  return "halfspaces[" + std::to_string(i) + "]";
}

solvers::LpSolution support_lp(const Matrix& A, const Vector& b, const Vector& u) {
  return solvers::maximize(A, b, u);
}

ChebyshevBall solve_chebyshev(const Matrix& A, const Vector& b) {
  const Eigen::Index n = A.cols();
  Matrix lifted(A.rows(), n + 1);
  lifted << A, Vector::Ones(A.rows());
  Vector objective = Vector::Zero(n + 1);
  objective(n) = 1.0;
  const auto sol = solvers::maximize(lifted, b, objective);
  if (sol.status == solvers::LpStatus::kInfeasible)
    fail(ErrorCode::kInfeasibleBody, "halfspace system is empty");
  if (sol.status == solvers::LpStatus::kUnbounded)
    fail(ErrorCode::kUnboundedBody, "inscribed ball radius is unbounded");
  return {sol.x.head(n), sol.x(n)};
}

// Sutherland-Hodgman clip of a counterclockwise convex polygon by <a,x> <= b.
std::vector<Eigen::Vector2d> clip(const std::vector<Eigen::Vector2d>& poly,
                                  const Eigen::Vector2d& a, double b) {
  std::vector<Eigen::Vector2d> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d& p = poly[i];
    const Eigen::Vector2d& q = poly[(i + 1) % m];
    const double sp = a.dot(p) - b;
    const double sq_ = a.dot(q) - b;
    if (sp <= 0.0) out.push_back(p);
    if ((sp < 0.0 && sq_ > 0.0) || (sp > 0.0 && sq_ < 0.0)) {
      const double t = sp / (sp - sq_);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Drops near-duplicate and collinear vertices from a closed polygon.
std::vector<Eigen::Vector2d> simplify_polygon(std::vector<Eigen::Vector2d> poly, double scale) {
  const double dup_tol = 1e-12 * std::max(1.0, scale);
  bool changed = true;
  while (changed && poly.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const std::size_t m = poly.size();
      const auto& prev = poly[(i + m - 1) % m];
      const auto& cur = poly[i];
      const auto& next = poly[(i + 1) % m];
      const bool duplicate = (cur - next).norm() <= dup_tol;
      const double len = (next - prev).norm();
      const bool collinear = len > 0.0 && std::abs(cross2(prev, cur, next)) <= 1e-13 * len * std::max(1.0, scale);
      if (duplicate || collinear) {
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return poly;
}

std::vector<Vector> vertices_3d(const HPolytope& body) {
  const Matrix& A = body.normals();
  const Vector& b = body.offsets();
  const Eigen::Index m = A.rows();
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  std::vector<Vector> out;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      for (Eigen::Index k = j + 1; k < m; ++k) {
        Eigen::Matrix3d M;
        M.row(0) = A.row(i);
        M.row(1) = A.row(j);
        M.row(2) = A.row(k);
        if (std::abs(M.determinant()) < 1e-12) continue;
        const Eigen::Vector3d rhs(b(i), b(j), b(k));
        const Vector v = M.partialPivLu().solve(rhs);
        if (!body.contains(v, kVertexTol * scale)) continue;
        const bool seen = std::any_of(out.begin(), out.end(), [&](const Vector& w) {
          return (w - v).norm() <= 1e-8 * scale;
        });
        if (!seen) out.push_back(v);
      }
    }
  }
  return out;
}

bool same_halfspace(const HPolytope& body, Eigen::Index i, Eigen::Index j) {
  return (body.normals().row(i) - body.normals().row(j)).norm() < 1e-12 &&
         std::abs(body.offsets()(i) - body.offsets()(j)) < 1e-12;
}

}  // namespace

// ---------------------------------------------------------------------------
// HPolytope

HPolytope::HPolytope(Matrix normals, Vector offsets)
    : normals_(std::move(normals)), offsets_(std::move(offsets)) {
  if (normals_.rows() == 0 || normals_.cols() == 0)
    fail(ErrorCode::kValidation, "polytope needs at least one halfspace", "halfspaces");
  if (offsets_.size() != normals_.rows())
    fail(ErrorCode::kValidation, "offset count does not match normal count", "halfspaces");
  for (Eigen::Index i = 0; i < normals_.rows(); ++i) {
    if (!normals_.row(i).allFinite() || !std::isfinite(offsets_(i)))
      fail(ErrorCode::kValidation, "non-finite halfspace coefficient", halfspace_field(i));
    const double len = normals_.row(i).norm();
    if (len < kMinNormal)
      fail(ErrorCode::kValidation, "halfspace normal has zero length", halfspace_field(i));
    normals_.row(i) /= len;
    offsets_(i) /= len;
  }
  const Eigen::Index n = normals_.cols();
  std::vector<Vector> directions;
  for (Eigen::Index j = 0; j < n; ++j) {
    directions.push_back(Vector::Unit(n, j));
    directions.push_back(-Vector::Unit(n, j));
  }
  directions.push_back(-Vector::Ones(n) / std::sqrt(static_cast<double>(n)));
  for (const Vector& u : directions) {
    const auto sol = support_lp(normals_, offsets_, u);
    if (sol.status == solvers::LpStatus::kInfeasible)
      fail(ErrorCode::kInfeasibleBody, "halfspace system is empty", "halfspaces");
    if (sol.status == solvers::LpStatus::kUnbounded)
      fail(ErrorCode::kUnboundedBody, "halfspace system is unbounded", "halfspaces");
  }
  chebyshev_ = solve_chebyshev(normals_, offsets_);
  if (chebyshev_.radius <= kDegenerateRadius)
    fail(ErrorCode::kDegenerateBody, "polytope has empty interior", "halfspaces");
}

HPolytope::HPolytope(Trusted, Matrix normals, Vector offsets, ChebyshevBall cheb)
    : normals_(std::move(normals)), offsets_(std::move(offsets)), chebyshev_(std::move(cheb)) {}

HPolytope HPolytope::box(const Vector& lower, const Vector& upper) {
  const Eigen::Index n = lower.size();
  Matrix A(2 * n, n);
  Vector b(2 * n);
  A.setZero();
  for (Eigen::Index j = 0; j < n; ++j) {
    A(2 * j, j) = 1.0;
    b(2 * j) = upper(j);
    A(2 * j + 1, j) = -1.0;
    b(2 * j + 1) = -lower(j);
  }
  return HPolytope(A, b);
}

HPolytope HPolytope::regular_polygon(int sides, double circumradius, const Vector& center) {
  if (sides < 3) fail(ErrorCode::kInvalidArgument, "regular polygon needs >= 3 sides");
  Matrix A(sides, 2);
  Vector b(sides);
  const double apothem = circumradius * std::cos(M_PI / sides);
  for (int i = 0; i < sides; ++i) {
    const double angle = 2.0 * M_PI * (i + 0.5) / sides;
    A(i, 0) = std::cos(angle);
    A(i, 1) = std::sin(angle);
    b(i) = apothem + A.row(i).dot(center);
  }
  return HPolytope(A, b);
}

bool HPolytope::contains(const Vector& x, double tol) const {
  return ((normals_ * x - offsets_).array() <= tol).all();
}

HPolytope HPolytope::translated(const Vector& shift) const {
  ChebyshevBall cheb{chebyshev_.center + shift, chebyshev_.radius};
  return HPolytope(Trusted{}, normals_, offsets_ + normals_ * shift, cheb);
}

HPolytope offset_halfspaces(const HPolytope& body, double r) {
  if (!(r > 0.0)) fail(ErrorCode::kInvalidArgument, "offset radius must be positive", "radius");
  const double r_o = body.chebyshev().radius;
  if (r >= r_o - kDegenerateRadius)
    fail(ErrorCode::kDegenerateBody,
         "inner parallel body at r=" + std::to_string(r) +
             " has empty interior (Chebyshev radius " + std::to_string(r_o) + ")",
         "radius");
  // Every normal is unit, so the Chebyshev center survives with radius r_o - r.
  ChebyshevBall cheb{body.chebyshev().center, r_o - r};
  return HPolytope(HPolytope::Trusted{}, body.normals(),
                   body.offsets() - Vector::Constant(body.offsets().size(), r), cheb);
}

// ---------------------------------------------------------------------------
// VPolygon

VPolygon::VPolygon(std::vector<Eigen::Vector2d> vertices) : vertices_(std::move(vertices)) {
  const std::size_t m = vertices_.size();
  if (m < 3) fail(ErrorCode::kValidation, "polygon needs at least 3 vertices", "vertices");
  for (std::size_t i = 0; i < m; ++i) {
    if (!vertices_[i].allFinite())
      fail(ErrorCode::kValidation, "non-finite vertex", "vertices[" + std::to_string(i) + "]");
    for (std::size_t j = 0; j < i; ++j)
      if ((vertices_[i] - vertices_[j]).norm() < 1e-14)
        fail(ErrorCode::kValidation, "duplicate vertex", "vertices[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double c = cross2(vertices_[i], vertices_[(i + 1) % m], vertices_[(i + 2) % m]);
    if (!(c > 0.0))
      fail(ErrorCode::kValidation,
           "vertex sequence is not strictly convex and counterclockwise",
           "vertices[" + std::to_string((i + 1) % m) + "]");
  }
}

double VPolygon::perimeter() const {
  double total = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    total += (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm();
  return total;
}

double VPolygon::area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& p = vertices_[i];
    const auto& q = vertices_[(i + 1) % vertices_.size()];
    twice += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * twice;
}

bool VPolygon::contains(const Vector& x, double tol) const {
  const Eigen::Vector2d p = x.head<2>();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % vertices_.size()];
    if (cross2(a, b, p) < -tol * (b - a).norm()) return false;
  }
  return true;
}

HPolytope VPolygon::to_hpolytope() const {
  const auto m = static_cast<Eigen::Index>(vertices_.size());
  Matrix A(m, 2);
  Vector b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& p = vertices_[i];
    const auto& q = vertices_[(i + 1) % m];
    const Eigen::Vector2d edge = q - p;
    const Eigen::Vector2d outward(edge.y(), -edge.x());
    A.row(i) = outward.transpose();
    b(i) = outward.dot(p);
  }
  return HPolytope(A, b);
}

VPolygon convex_hull_2d(std::vector<Eigen::Vector2d> points) {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) fail(ErrorCode::kDegenerateBody, "hull needs 3 distinct points");
  std::vector<Eigen::Vector2d> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return VPolygon(std::move(hull));
}

// ---------------------------------------------------------------------------
// Ball / BallBody

Ball::Ball(Vector c, double r) : center(std::move(c)), radius(r) {
  if (!center.allFinite() || !(radius >= 0.0) || !std::isfinite(radius))
    fail(ErrorCode::kValidation, "ball needs a finite center and radius >= 0", "radius");
}

BallBody::BallBody(CoreBody core, double radius) : core_(std::move(core)), radius_(radius) {
  if (!(radius_ > 0.0) || !std::isfinite(radius_))
    fail(ErrorCode::kValidation, "rolling radius must be positive", "radius");
}

int BallBody::dimension() const {
  return std::visit(
      [](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HPolytope>) return c.dimension();
        else return static_cast<int>(c.center.size());
      },
      core_);
}

// ---------------------------------------------------------------------------
// Kernel operations

int dimension(const ConvexBody& body) {
  return std::visit(
      [](const auto& k) -> int {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, HPolytope>) return k.dimension();
        else if constexpr (std::is_same_v<T, VPolygon>) return 2;
        else if constexpr (std::is_same_v<T, Ball>) return static_cast<int>(k.center.size());
        else return k.dimension();
      },
      body);
}

ChebyshevBall chebyshev_center(const HPolytope& body) { return body.chebyshev(); }

ChebyshevBall chebyshev_center(const ConvexBody& body) {
  return std::visit(
      [](const auto& k) -> ChebyshevBall {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, HPolytope>) {
          return k.chebyshev();
        } else if constexpr (std::is_same_v<T, VPolygon>) {
          return k.to_hpolytope().chebyshev();
        } else if constexpr (std::is_same_v<T, Ball>) {
          return {k.center, k.radius};
        } else {
          const ChebyshevBall inner = std::visit(
              [](const auto& c) -> ChebyshevBall {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, HPolytope>) return c.chebyshev();
                else return {c.center, c.radius};
              },
              k.core());
          return {inner.center, inner.radius + k.radius()};
        }
      },
      body);
}

Vector project(const HPolytope& body, const Vector& x) {
  if (body.contains(x, 0.0)) return x;
  return solvers::project_halfspaces(body.normals(), body.offsets(), x);
}

namespace {

Vector project_ball(const Ball& ball, const Vector& x) {
  const Vector d = x - ball.center;
  const double len = d.norm();
  if (len <= ball.radius) return x;
  return ball.center + (ball.radius / len) * d;
}

Vector project_polygon(const VPolygon& poly, const Vector& x) {
  if (poly.contains(x, 0.0)) return x;
  const Eigen::Vector2d p = x.head<2>();
  Eigen::Vector2d best = poly.vertices().front();
  double best_d = std::numeric_limits<double>::infinity();
  const auto& v = poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Eigen::Vector2d a = v[i];
    const Eigen::Vector2d e = v[(i + 1) % v.size()] - a;
    const double t = std::clamp((p - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    const Eigen::Vector2d c = a + t * e;
    const double d = (p - c).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return Vector(best);
}

Vector project_ball_body(const BallBody& body, const Vector& x) {
  const Vector c = project(body.core(), x);
  const Vector d = x - c;
  const double len = d.norm();
  if (len <= body.radius()) return x;
  return c + (body.radius() / len) * d;
}

}  // namespace

Vector project(const CoreBody& core, const Vector& x) {
  return std::visit(
      [&](const auto& c) -> Vector {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, HPolytope>) return project(c, x);
        else return project_ball(c, x);
      },
      core);
}

double distance(const CoreBody& core, const Vector& x) { return (x - project(core, x)).norm(); }

Vector project(const ConvexBody& body, const Vector& x) {
  if (x.size() != dimension(body))
    fail(ErrorCode::kInvalidArgument, "point dimension does not match body dimension", "point");
  return std::visit(
      [&](const auto& k) -> Vector {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, HPolytope>) return project(k, x);
        else if constexpr (std::is_same_v<T, VPolygon>) return project_polygon(k, x);
        else if constexpr (std::is_same_v<T, Ball>) return project_ball(k, x);
        else return project_ball_body(k, x);
      },
      body);
}

double distance(const ConvexBody& body, const Vector& x) { return (x - project(body, x)).norm(); }

bool contains(const ConvexBody& body, const Vector& x, double tol) {
  return std::visit(
      [&](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, HPolytope>) return k.contains(x, tol);
        else if constexpr (std::is_same_v<T, VPolygon>) return k.contains(x, tol);
        else if constexpr (std::is_same_v<T, Ball>) return (x - k.center).norm() <= k.radius + tol;
        else return distance(k.core(), x) <= k.radius() + tol;
      },
      body);
}

Vector dist_sq_gradient(const ConvexBody& body, const Vector& x) {
  return 2.0 * (x - project(body, x));
}

SupportValue support(const HPolytope& body, const Vector& u) {
  const auto sol = solvers::maximize(body.normals(), body.offsets(), u);
  if (sol.status == solvers::LpStatus::kUnbounded)
    fail(ErrorCode::kUnboundedBody, "support function is infinite in this direction");
  if (sol.status == solvers::LpStatus::kInfeasible)
    fail(ErrorCode::kInfeasibleBody, "body is empty");
  return {sol.value, sol.x};
}

SupportValue support(const ConvexBody& body, const Vector& u) {
  if (std::abs(u.norm() - 1.0) > 1e-9)
    fail(ErrorCode::kInvalidArgument, "support direction must be a unit vector", "direction");
  return std::visit(
      [&](const auto& k) -> SupportValue {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, HPolytope>) {
          return support(k, u);
        } else if constexpr (std::is_same_v<T, VPolygon>) {
          const auto& v = k.vertices();
          std::size_t best = 0;
          for (std::size_t i = 1; i < v.size(); ++i)
            if (u.head<2>().dot(v[i]) > u.head<2>().dot(v[best])) best = i;
          return {u.head<2>().dot(v[best]), Vector(v[best])};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return {u.dot(k.center) + k.radius, k.center + k.radius * u};
        } else {
          const SupportValue inner = std::visit(
              [&](const auto& c) -> SupportValue {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, HPolytope>) return support(c, u);
                else return {u.dot(c.center) + c.radius, c.center + c.radius * u};
              },
              k.core());
          return {inner.value + k.radius(), inner.argmax + k.radius() * u};
        }
      },
      body);
}

double minkowski_functional(const ConvexBody& body, const Vector& x) {
  const Vector origin = Vector::Zero(dimension(body));
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, HPolytope> || std::is_same_v<T, VPolygon>) {
          HPolytope h = [&] {
            if constexpr (std::is_same_v<T, HPolytope>) return k;
            else return k.to_hpolytope();
          }();
          if (h.offsets().minCoeff() <= kDegenerateRadius)
            fail(ErrorCode::kOriginNotInterior, "origin is not an interior point", "body");
          const Vector ratios = (h.normals() * x).cwiseQuotient(h.offsets());
          return std::max(0.0, ratios.maxCoeff());
        } else if constexpr (std::is_same_v<T, Ball>) {
          const double c2 = k.center.squaredNorm();
          if (std::sqrt(c2) >= k.radius - kDegenerateRadius)
            fail(ErrorCode::kOriginNotInterior, "origin is not an interior point", "body");
          const double x2 = x.squaredNorm();
          if (x2 == 0.0) return 0.0;
          const double xc = x.dot(k.center);
          const double s = (xc + std::sqrt(xc * xc - x2 * (c2 - sq(k.radius)))) / x2;
          return 1.0 / s;
        } else {
          if (distance(k.core(), origin) > k.radius() - kDegenerateRadius)
            fail(ErrorCode::kOriginNotInterior, "origin is not an interior point", "body");
          if (x.norm() == 0.0) return 0.0;
          // x / t lies in the body iff t >= gauge; bracket then bisect.
          auto inside = [&](double t) { return distance(k.core(), x / t) <= k.radius(); };
          double hi = 1.0;
          while (!inside(hi)) hi *= 2.0;
          double lo = hi;
          while (lo > 1e-300 && inside(lo)) lo *= 0.5;
          if (lo <= 1e-300) return 0.0;
          for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (inside(mid) ? hi : lo) = mid;
          }
          return hi;
        }
      },
      body);
}

SupportingHyperplane supporting_hyperplane(const ConvexBody& body, const Vector& p) {
  return std::visit(
      [&](const auto& k) -> SupportingHyperplane {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, HPolytope> || std::is_same_v<T, VPolygon>) {
          HPolytope h = [&] {
            if constexpr (std::is_same_v<T, HPolytope>) return k;
            else return k.to_hpolytope();
          }();
          const Vector slack = h.offsets() - h.normals() * p;
          const double scale = 1.0 + h.offsets().cwiseAbs().maxCoeff();
          if (slack.minCoeff() < -1e-9 * scale || slack.minCoeff() > 1e-9 * scale)
            fail(ErrorCode::kNotOnBoundary, "point is not on the polytope boundary", "point");
          // Any normal in the normal cone supports; the mean of the active
          // normals lies in it.
          Vector n = Vector::Zero(h.dimension());
          for (Eigen::Index i = 0; i < slack.size(); ++i)
            if (slack(i) <= 1e-9 * scale) n += h.normals().row(i).transpose();
          return {p, n.normalized()};
        } else if constexpr (std::is_same_v<T, Ball>) {
          if (std::abs((p - k.center).norm() - k.radius) > 1e-9 || k.radius == 0.0)
            fail(ErrorCode::kNotOnBoundary, "point is not on the ball boundary", "point");
          return {p, (p - k.center).normalized()};
        } else {
          const Vector c = project(k.core(), p);
          if (std::abs((p - c).norm() - k.radius()) > 1e-9)
            fail(ErrorCode::kNotOnBoundary, "point is not on the body boundary", "point");
          return {p, (p - c) / k.radius()};
        }
      },
      body);
}

std::vector<Vector> vertices(const HPolytope& body) {
  const int n = body.dimension();
  if (n == 1) {
    const Vector e = Vector::Ones(1);
    return {Vector::Constant(1, -support(body, -e).value), Vector::Constant(1, support(body, e).value)};
  }
  if (n == 2) {
    double scale = 1.0;
    Eigen::Vector2d lo, hi;
    for (int j = 0; j < 2; ++j) {
      hi(j) = support(body, Vector::Unit(2, j)).value;
      lo(j) = -support(body, -Vector::Unit(2, j)).value;
      scale = std::max({scale, std::abs(hi(j)), std::abs(lo(j))});
    }
    const Eigen::Vector2d pad = Eigen::Vector2d::Constant(0.1 * scale + 1.0);
    lo -= pad;
    hi += pad;
    std::vector<Eigen::Vector2d> poly = {
        {lo.x(), lo.y()}, {hi.x(), lo.y()}, {hi.x(), hi.y()}, {lo.x(), hi.y()}};
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(body.size()); ++i)
      poly = clip(poly, body.normals().row(i).transpose(), body.offsets()(i));
    poly = simplify_polygon(std::move(poly), scale);
    std::vector<Vector> out;
    out.reserve(poly.size());
    for (const auto& p : poly) out.emplace_back(p);
    return out;
  }
  if (n == 3) return vertices_3d(body);
  fail(ErrorCode::kInvalidArgument, "vertex enumeration supports dimension <= 3", "dimension");
}

VPolygon to_vpolygon(const HPolytope& body) {
  if (body.dimension() != 2)
    fail(ErrorCode::kInvalidArgument, "polygon conversion needs a 2D polytope", "dimension");
  std::vector<Eigen::Vector2d> pts;
  for (const Vector& v : vertices(body)) pts.emplace_back(v(0), v(1));
  return VPolygon(std::move(pts));
}

std::vector<Facet> facets(const HPolytope& body) {
  const int n = body.dimension();
  if (n != 2 && n != 3)
    fail(ErrorCode::kInvalidArgument, "facet structure supports dimension 2 and 3", "dimension");
  const std::vector<Vector> verts = vertices(body);
  const double scale = 1.0 + body.offsets().cwiseAbs().maxCoeff();
  std::vector<Facet> out;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(body.size()); ++i) {
    bool duplicate = false;
    for (Eigen::Index j = 0; j < i && !duplicate; ++j) duplicate = same_halfspace(body, i, j);
    if (duplicate) continue;
    const Vector a = body.normals().row(i).transpose();
    std::vector<Vector> on;
    for (const Vector& v : verts)
      if (std::abs(a.dot(v) - body.offsets()(i)) <= 1e-8 * scale) on.push_back(v);
    if (on.size() < static_cast<std::size_t>(n)) continue;
    Facet f;
    f.halfspace = static_cast<std::size_t>(i);
    f.normal = a;
    if (n == 2) {
      const Vector t(Eigen::Vector2d(-a(1), a(0)));
      auto [mn, mx] = std::minmax_element(on.begin(), on.end(), [&](const Vector& p, const Vector& q) {
        return t.dot(p) < t.dot(q);
      });
      f.vertices = {*mn, *mx};
      f.measure = (*mx - *mn).norm();
    } else {
      Vector centroid = Vector::Zero(3);
      for (const Vector& v : on) centroid += v;
      centroid /= static_cast<double>(on.size());
      const Eigen::Vector3d normal = a;
      Eigen::Vector3d e1 = normal.unitOrthogonal();
      Eigen::Vector3d e2 = normal.cross(e1);
      std::sort(on.begin(), on.end(), [&](const Vector& p, const Vector& q) {
        const Eigen::Vector3d dp = p - centroid, dq = q - centroid;
        return std::atan2(dp.dot(e2), dp.dot(e1)) < std::atan2(dq.dot(e2), dq.dot(e1));
      });
      double area = 0.0;
      for (std::size_t k = 1; k + 1 < on.size(); ++k) {
        const Eigen::Vector3d u = on[k] - on[0], w = on[k + 1] - on[0];
        area += 0.5 * u.cross(w).dot(normal);
      }
      f.vertices = std::move(on);
      f.measure = area;
    }
    if (f.measure > 0.0) out.push_back(std::move(f));
  }
  return out;
}

double boundary_measure(const HPolytope& body) {
  double total = 0.0;
  for (const Facet& f : facets(body)) total += f.measure;
  return total;
}

double edge_angle_sum(const HPolytope& body) {
  if (body.dimension() != 3)
    fail(ErrorCode::kInvalidArgument, "edge angle sum is defined for 3D polytopes", "dimension");
  const std::vector<Facet> fs = facets(body);
  const double scale = 1.0 + body.offsets().cwiseAbs().maxCoeff();
  double total = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      std::vector<Vector> shared;
      for (const Vector& p : fs[i].vertices)
        for (const Vector& q : fs[j].vertices)
          if ((p - q).norm() <= 1e-8 * scale) shared.push_back(p);
      if (shared.size() < 2) continue;
      double length = 0.0;
      for (const Vector& p : shared)
        for (const Vector& q : shared) length = std::max(length, (p - q).norm());
      const double angle = std::acos(std::clamp(fs[i].normal.dot(fs[j].normal), -1.0, 1.0));
      total += length * angle;
    }
  }
  return total;
}

}  // namespace rollingball
