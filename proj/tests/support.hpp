#pragma once

// Test-only helpers: random bodies and brute-force oracles that avoid the
// library's own solvers.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rollingball/convex_core.hpp"
#include "rollingball/funcreg.hpp"

namespace testing {

using rollingball::Matrix;
using rollingball::Vector;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vector random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  Vector v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = N(rng);
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline Vector random_in_box(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = U(rng);
  return v;
}

// Random bounded polytope: random tangent halfspaces around the origin plus
// an axis box so the system is always bounded.
inline rollingball::HPolytope random_polytope(std::mt19937_64& rng, int n, int extra = 8) {
  std::uniform_real_distribution<double> U(0.6, 1.4);
  Matrix A(extra + 2 * n, n);
  Vector b(extra + 2 * n);
  for (int i = 0; i < extra; ++i) {
    A.row(i) = random_unit(rng, n).transpose();
    b(i) = U(rng);
  }
  for (int j = 0; j < n; ++j) {
    A.row(extra + 2 * j).setZero();
    A(extra + 2 * j, j) = 1.0;
    b(extra + 2 * j) = 1.5;
    A.row(extra + 2 * j + 1).setZero();
    A(extra + 2 * j + 1, j) = -1.0;
    b(extra + 2 * j + 1) = 1.5;
  }
  return rollingball::HPolytope(A, b);
}

// Random convex polygon as the hull of points on a perturbed circle.
inline rollingball::VPolygon random_polygon(std::mt19937_64& rng, int points = 9) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> radius(0.7, 1.3);
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < points; ++i) {
    const double t = angle(rng), r = radius(rng);
    pts.emplace_back(r * std::cos(t), r * std::sin(t));
  }
  return rollingball::convex_hull_2d(pts);
}

// Vertices of a 2D polytope by brute force over all pairs of boundary lines.
inline std::vector<Eigen::Vector2d> brute_vertices_2d(const rollingball::HPolytope& P) {
  std::vector<Eigen::Vector2d> out;
  const Matrix& A = P.normals();
  const Vector& b = P.offsets();
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = i + 1; j < A.rows(); ++j) {
      Eigen::Matrix2d M;
      M << A(i, 0), A(i, 1), A(j, 0), A(j, 1);
      if (std::abs(M.determinant()) < 1e-12) continue;
      const Eigen::Vector2d x = M.inverse() * (Eigen::Vector2d(b(i), b(j)));
      if (((A * Vector(x)) - b).maxCoeff() <= 1e-9) out.push_back(x);
    }
  return out;
}

// Distance from x to the segment [p, q].
inline Eigen::Vector2d closest_on_segment(const Eigen::Vector2d& x, const Eigen::Vector2d& p,
                                          const Eigen::Vector2d& q) {
  const Eigen::Vector2d d = q - p;
  const double t = std::clamp((x - p).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return p + t * d;
}

// Projection onto a convex polygon by brute force over its edges.
inline Eigen::Vector2d brute_project_polygon(const std::vector<Eigen::Vector2d>& ccw,
                                             const Eigen::Vector2d& x) {
  bool inside = true;
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const Eigen::Vector2d e = ccw[(i + 1) % ccw.size()] - ccw[i];
    const Eigen::Vector2d w = x - ccw[i];
    if (e.x() * w.y() - e.y() * w.x() < 0) inside = false;
  }
  if (inside) return x;
  Eigen::Vector2d best = ccw[0];
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const Eigen::Vector2d c = closest_on_segment(x, ccw[i], ccw[(i + 1) % ccw.size()]);
    if ((c - x).norm() < (best - x).norm()) best = c;
  }
  return best;
}

// max over a dense grid of the closed ball |u| <= delta of obj(u), 1D or 2D.
inline double brute_ball_max(int n, double delta, const std::function<double(const Vector&)>& obj,
                             int steps = 2000) {
  double best = -1e300;
  Vector u(n);
  if (n == 1) {
    for (int i = 0; i <= steps; ++i) {
      u(0) = -delta + 2.0 * delta * i / steps;
      best = std::max(best, obj(u));
    }
    return best;
  }
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps; ++j) {
      u << -delta + 2.0 * delta * i / steps, -delta + 2.0 * delta * j / steps;
      if (u.norm() <= delta) best = std::max(best, obj(u));
    }
  return best;
}

// Sets ROLLINGBALL_THREADS for the lifetime of the object.
class ThreadCount {
 public:
  explicit ThreadCount(int n) {
    if (const char* old = std::getenv("ROLLINGBALL_THREADS")) previous_ = old, had_ = true;
    setenv("ROLLINGBALL_THREADS", std::to_string(n).c_str(), 1);
  }
  ~ThreadCount() {
    if (had_)
      setenv("ROLLINGBALL_THREADS", previous_.c_str(), 1);
    else
      unsetenv("ROLLINGBALL_THREADS");
  }

 private:
  std::string previous_;
  bool had_ = false;
};

inline rollingball::PCQFunction abs1() {
  return rollingball::PCQFunction::max_affine({vec({1.0}), vec({-1.0})}, {0.0, 0.0});
}

inline rollingball::PCQFunction l1_2d() {
  return rollingball::PCQFunction::max_affine(
      {vec({1, 1}), vec({1, -1}), vec({-1, 1}), vec({-1, -1})}, {0, 0, 0, 0});
}

}  // namespace testing
