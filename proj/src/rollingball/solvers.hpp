#pragma once

// Small dense solvers used by the convex-body kernel. Problem sizes are tiny
// (a handful of variables, at most a few hundred constraints).

#include <functional>
#include <utility>

#include "rollingball/common.hpp"

namespace rollingball::solvers {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  Vector x;
};

// maximize <c, x> subject to A x <= b, x free. Two-phase tableau simplex with
// lowest-index tie breaking.
LpSolution maximize(const Matrix& A, const Vector& b, const Vector& c);

struct QpOptions {
  int max_iterations = 10000;
  double feasibility_tol = 1e-12;
};

// Euclidean projection of x onto {z : A z <= b}, rows of A unit length.
// Dual active-set method (Goldfarb-Idnani with identity Hessian): starts at
// the unconstrained minimizer x and adds violated constraints until primal
// feasibility, keeping the active normals linearly independent.
// Throws kInfeasibleBody if the set is empty and kConvergenceFailure when the
// iteration budget runs out.
Vector project_halfspaces(const Matrix& A, const Vector& b, const Vector& x,
                          const QpOptions& options = {});

struct BallMinimum {
  Vector argmin;
  double value = 0.0;
};

// Minimizes a convex function over the closed ball B(center, radius) by
// nested golden-section search over coordinates: the partial minimum of a
// convex function over a convex slice is convex, so each level is unimodal.
// `iterations` golden steps per level (75 shrink the bracket below 1e-15).
BallMinimum minimize_convex_on_ball(const std::function<double(const Vector&)>& objective,
                                    const Vector& center, double radius, int iterations = 75);

// Golden-section minimum of a unimodal function on [lo, hi]; returns the best
// abscissa seen and its value.
std::pair<double, double> golden_section(const std::function<double(double)>& objective,
                                         double lo, double hi, int iterations = 75);

}  // namespace rollingball::solvers
