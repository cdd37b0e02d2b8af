#pragma once

// Convex functions given as a maximum of convex quadratics and the rolling
// ball regularizer: the epigraph is eroded by a delta-ball (sup-convolution
// with the upper hemisphere) and dilated back (inf-convolution with the lower
// hemisphere). The result g is convex, C^{1,1}, g >= f, and g = f wherever a
// delta-ball rolls along the graph.

#include <cstdint>
#include <vector>

#include "rollingball/common.hpp"

namespace rollingball {

struct QuadraticPiece {
  Matrix Q;  // symmetric positive semidefinite
  Vector a;
  double b = 0.0;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
};

// f(x) = max_i 1/2 x'Q_i x + a_i'x + b_i.
class PCQFunction {
 public:
  // Validates shapes, symmetry (1e-12) and PSD (smallest eigenvalue >= -1e-10).
  explicit PCQFunction(std::vector<QuadraticPiece> pieces);

  static PCQFunction max_affine(const std::vector<Vector>& slopes, const std::vector<double>& offsets);
  static PCQFunction quadratic(const Matrix& Q, const Vector& a = {}, double b = 0.0);

  int dimension() const { return dimension_; }
  const std::vector<QuadraticPiece>& pieces() const { return pieces_; }
  bool is_max_affine() const { return max_affine_; }
  // Largest eigenvalue of Q_i, per piece.
  const std::vector<double>& curvatures() const { return curvature_; }

  double operator()(const Vector& x) const;

 private:
  int dimension_ = 0;
  bool max_affine_ = true;
  std::vector<QuadraticPiece> pieces_;
  std::vector<double> curvature_;
};

inline constexpr double kActiveTol = 1e-10;

// Gradients of the pieces active at x (value within active_tol of the max),
// with duplicates within 1e-12 merged.
struct SubdifferentialSet {
  std::vector<Vector> generators;
  double active_tol = kActiveTol;

  bool singleton() const { return generators.size() == 1; }
};

double eval(const PCQFunction& f, const Vector& x);
SubdifferentialSet subdiff(const PCQFunction& f, const Vector& x, double active_tol = kActiveTol);

// f^delta(x) = max_{|u| <= delta} f(x + u) + sqrt(delta^2 - |u|^2): the lowest
// height at which a delta-ball centred above x fits in the epigraph.
double erode(const PCQFunction& f, double delta, const Vector& x);

struct RegularizedPoint {
  double value = 0.0;   // g(x)
  Vector gradient;      // grad g(x)
  bool touch = false;   // the ball tangent to the graph at (x, f(x)) fits: g(x) = f(x)
  Vector center;        // abscissa of the delta-ball whose lower cap realises g at x
  double center_height = 0.0;
};

class RegularizedFunction {
 public:
  // Evaluation is allowed for |x| + delta <= domain_radius.
  RegularizedFunction(PCQFunction f, double delta, double domain_radius);

  const PCQFunction& source() const { return f_; }
  double delta() const { return delta_; }
  double domain_radius() const { return domain_; }

  double erosion(const Vector& x) const;
  RegularizedPoint evaluate(const Vector& x) const;
  double value(const Vector& x) const { return evaluate(x).value; }
  Vector gradient(const Vector& x) const { return evaluate(x).gradient; }
  double operator()(const Vector& x) const { return value(x); }

 private:
  void check_domain(const Vector& x) const;
  bool touch_test(const Vector& x, RegularizedPoint& out) const;
  void minimize_affine(const Vector& x, RegularizedPoint& out) const;
  void minimize_general(const Vector& x, RegularizedPoint& out) const;

  PCQFunction f_;
  double delta_;
  double domain_;
};

RegularizedFunction regularize(const PCQFunction& f, double delta, double domain_radius);

// Threshold defining "g differs from f".
inline constexpr double kDisagreementTol = 1e-9;

enum class MeasureMethod { kGrid, kMonteCarlo };

struct MeasureOptions {
  MeasureMethod method = MeasureMethod::kGrid;
  std::uint64_t resolution = 1000;  // grid cells per axis
  std::uint64_t samples = 100000;   // Monte Carlo points
  std::uint64_t seed = 0;
};

struct MeasureEstimate {
  double measure = 0.0;
  // Grid: total volume of cells with a differently classified axis neighbour.
  // Monte Carlo: one standard error.
  double error = 0.0;
  std::uint64_t points = 0;
  std::uint64_t flagged = 0;
};

// Lebesgue measure of {x in region : g(x) - f(x) > 1e-9}. Grid points are
// cell centres.
MeasureEstimate disagreement_measure(const RegularizedFunction& g, const Box& region,
                                     const MeasureOptions& options = {});

// Of `budget` uniform probes (stream (seed, i)), those with g - f <= tol.
std::vector<Vector> touch_points(const RegularizedFunction& g, const Box& region, double tol,
                                 std::uint64_t budget, std::uint64_t seed = 0);

}  // namespace rollingball
