#pragma once

// Gluing convex functions: a smooth maximum that agrees with max away from
// the diagonal, the C^{1,1} convex extension of a function from a ball, and
// the annulus patchwork whose convex envelope globalizes local regularizers.

#include <functional>
#include <vector>

#include "rollingball/funcreg.hpp"

namespace rollingball {

using ScalarField = std::function<double(const Vector&)>;

// theta(t) = (t^2 + 1)/2 for |t| <= 1, |t| otherwise.
double theta(double t);
double theta_derivative(double t);

// M(x, y) = (x + y + theta(x - y)) / 2.
double smooth_max(double x, double y);

ScalarField smooth_max_compose(ScalarField u, ScalarField v);

// Largest value of `fn` on the sphere |x| = radius: both endpoints in 1D,
// 4096 angles plus golden refinement in 2D, a Fibonacci lattice plus pattern
// search in 3D.
double sphere_max(const ScalarField& fn, int dimension, double radius);

// H = M(h, q) on |x| <= rho and H = q outside, q(x) = a|x|^2 - b.
class GluedFunction {
 public:
  double r = 0.0;
  double R = 0.0;
  double rho = 0.0;
  double margin = 0.5;
  double m = 0.0;        // inf of h on |x| <= r
  double M = 0.0;        // sup of h on |x| = rho
  double a = 0.0;
  double b = 0.0;
  double epsilon = 0.0;  // q - h >= 1 on rho <= |x| <= rho + epsilon
  // Smallest radius t <= rho with q - h >= 1 on every sampled sphere in
  // [t, rho]: H = q exactly for |x| >= q_radius.
  double q_radius = 0.0;
  int dimension = 0;

  double q(const Vector& x) const { return a * x.squaredNorm() - b; }
  double inner(const Vector& x) const { return h_(x); }
  double operator()(const Vector& x) const;

 private:
  friend GluedFunction extend(ScalarField, int, double, double, const PCQFunction*);
  ScalarField h_;
};

// Convex extension of h from B(0, r). Margins m and M are exact for affine
// pieces, by nested golden search (m) and sphere sampling (M) otherwise; both
// strict inequalities h - q > 1 on |x| <= r and q - h > 1 on |x| = rho are
// probed before returning (kMarginFailure otherwise).
GluedFunction extend(const PCQFunction& h, double r, double R);
GluedFunction extend(ScalarField h, int dimension, double r, double R,
                     const PCQFunction* pieces = nullptr);

// psi(s) = 0 for s <= 0, s^2 / (1 - s) for 0 <= s < 1.
double barrier_psi(double s);
// theta_k(t) = psi(k - 1 - t) + psi(t - k) on (k - 2, k + 1).
double barrier(int k, double t);

class PatchworkFunction {
 public:
  PatchworkFunction(PCQFunction f, std::vector<RegularizedFunction> regularizers);

  int max_index() const { return static_cast<int>(g_.size()); }
  const PCQFunction& source() const { return f_; }
  const RegularizedFunction& regularizer(int k) const { return g_.at(k - 1); }

  // phi_k(x) = g_k(x) + theta_k(|x|) on k - 2 < |x| < k + 1, +inf elsewhere.
  double component(int k, const Vector& x) const;
  double operator()(const Vector& x) const;
  // Indices k with phi_k finite at x.
  std::vector<int> finite_components(const Vector& x) const;

  // min f on |x| = K did not exceed min f on |x| <= 1.
  bool coercivity_warning = false;

 private:
  PCQFunction f_;
  std::vector<RegularizedFunction> g_;
};

// g_k = regularize(f, epsilon / 2^k) on B(0, 2k), k = 1..K.
PatchworkFunction patchwork(const PCQFunction& f, double epsilon, int K);

}  // namespace rollingball
