#pragma once

// Second-order expansions of convex functions at touch points of the
// regularizer: Hessian extraction from grad g and residual sequences over
// shrinking spheres.

#include <string>
#include <vector>

#include "rollingball/funcreg.hpp"

namespace rollingball {

// r_k = 0.1 * 2^-k, k = 0..8.
std::vector<double> default_radii();

// Central differences of grad g with step h, symmetrized. Richardson
// extrapolation (h, h/2) when delta < 1e-2. Throws kNotTouchPoint if
// g(x) - f(x) > 1e-9 and kStepUnderflow if h >= delta / 4.
Matrix hessian_at_touch(const PCQFunction& f, double delta, const Vector& x, double h = 1e-4);
Matrix hessian_at_touch(const RegularizedFunction& g, const Vector& x, double h = 1e-4);

// rho(r) = max over |y - x| = r of
//   |f(y) - f(x) - <sigma, y - x> - 1/2 (y - x)'D(y - x)| / r^2.
// Throws kKinkAtCenter unless subdiff(f, x) is a singleton.
std::vector<double> second_order_residual(const PCQFunction& f, const Vector& x, const Matrix& D,
                                          const std::vector<double>& radii);

// tau(r) = max over |y - x| = r and sigma_y in subdiff(f, y) of
//   |sigma_y - sigma_x - D(y - x)| / r.
// The first form takes sigma_x as the singleton subgradient (kKinkAtCenter
// otherwise); the second uses the given sigma_x, for probing kinks.
std::vector<double> subgradient_residual(const PCQFunction& f, const Vector& x, const Matrix& D,
                                         const std::vector<double>& radii);
std::vector<double> subgradient_residual(const PCQFunction& f, const Vector& x,
                                         const Vector& sigma_x, const Matrix& D,
                                         const std::vector<double>& radii);

// Sphere directions: both signs in 1D, 64 in 2D, 256 in 3D.
std::vector<Vector> residual_directions(int dimension);

struct CertificationRule {
  double decay = 0.1;    // last <= decay * first
  double floor = 1e-8;   // or last <= floor
  bool passes(const std::vector<double>& sequence) const;
};

enum class NodeClass { kCertified, kKink, kInconclusive };
const char* node_class_name(NodeClass c);

struct AlexandrovNode {
  Vector x;
  bool touch = false;
  bool singleton = false;
  Matrix D;
  std::vector<double> rho;   // second-order residuals
  std::vector<double> tau;   // subgradient residuals
  bool second_order_pass = false;
  bool subgradient_pass = false;
  NodeClass classification = NodeClass::kInconclusive;
  std::string note;
};

struct AlexandrovOptions {
  std::vector<double> radii = default_radii();
  double step = 1e-4;
  CertificationRule rule;
};

struct AlexandrovReport {
  std::vector<double> radii;
  std::vector<AlexandrovNode> nodes;
  std::uint64_t resolution = 0;
  double cell_volume = 0.0;
  std::uint64_t touch = 0;
  std::uint64_t certified = 0;
  std::uint64_t kinks = 0;
  std::uint64_t inconclusive = 0;
  double certified_fraction = 0.0;
  double non_touch_measure = 0.0;  // (#non-touch cells) * cell volume
};

// Cell-centred grid of `resolution` points per axis; nodes are reported in
// index order (axis 0 fastest) whatever the worker count.
AlexandrovReport alexandrov_scan(const PCQFunction& f, const Box& region, double delta,
                                 std::uint64_t resolution, const AlexandrovOptions& options = {});

}  // namespace rollingball
