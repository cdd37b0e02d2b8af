#include "rollingball/alexandrov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rollingball {

std::vector<double> default_radii() {
  std::vector<double> out;
  for (int k = 0; k <= 8; ++k) out.push_back(0.1 * std::ldexp(1.0, -k));
  return out;
}

std::vector<Vector> residual_directions(int dimension) {
  std::vector<Vector> out;
  if (dimension == 1) {
    out.push_back(Vector::Constant(1, 1.0));
    out.push_back(Vector::Constant(1, -1.0));
  } else if (dimension == 2) {
    for (int i = 0; i < 64; ++i) {
      const double t = 2.0 * M_PI * i / 64.0;
      Vector d(2);
      d << std::cos(t), std::sin(t);
      out.push_back(d);
    }
  } else if (dimension == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < 256; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / 256.0;
      const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vector d(3);
      d << rr * std::cos(golden * i), rr * std::sin(golden * i), z;
      out.push_back(d);
    }
  } else {
    fail(ErrorCode::kInvalidArgument, "residual sampling supports dimension 1 to 3", "dimension");
  }
  return out;
}

namespace {

Matrix gradient_jacobian(const RegularizedFunction& g, const Vector& x, double h) {
  const Eigen::Index n = x.size();
  Matrix D(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector e = h * Vector::Unit(n, j);
    D.col(j) = (g.gradient(x + e) - g.gradient(x - e)) / (2.0 * h);
  }
  return D;
}

void check_radii(const std::vector<double>& radii) {
  if (radii.empty()) fail(ErrorCode::kInvalidArgument, "radius schedule is empty", "radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0))
      fail(ErrorCode::kInvalidArgument, "radii must be positive", "radii");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      fail(ErrorCode::kInvalidArgument, "radii must be strictly decreasing", "radii");
  }
}

Vector singleton_subgradient(const PCQFunction& f, const Vector& x) {
  const SubdifferentialSet sd = subdiff(f, x);
  if (!sd.singleton())
    fail(ErrorCode::kKinkAtCenter,
         "subdifferential at the centre has " + std::to_string(sd.generators.size()) +
             " generators");
  return sd.generators.front();
}

}  // namespace

Matrix hessian_at_touch(const RegularizedFunction& g, const Vector& x, double h) {
  const double delta = g.delta();
  if (!(h > 0.0)) fail(ErrorCode::kInvalidArgument, "step must be positive", "step");
  if (h >= delta / 4.0)
    fail(ErrorCode::kStepUnderflow,
         "step " + std::to_string(h) + " is not small against delta " + std::to_string(delta),
         "step");
  const RegularizedPoint p = g.evaluate(x);
  if (p.value - g.source()(x) > kDisagreementTol)
    fail(ErrorCode::kNotTouchPoint, "g exceeds f at this point", "x");
  Matrix D = gradient_jacobian(g, x, h);
  if (delta < 1e-2) D = (4.0 * gradient_jacobian(g, x, 0.5 * h) - D) / 3.0;
  return 0.5 * (D + D.transpose());
}

Matrix hessian_at_touch(const PCQFunction& f, double delta, const Vector& x, double h) {
  const double R = (x.norm() + 2.0 * h) * (1.0 + 1e-9) + delta + 1e-9;
  return hessian_at_touch(regularize(f, delta, R), x, h);
}

std::vector<double> second_order_residual(const PCQFunction& f, const Vector& x, const Matrix& D,
                                          const std::vector<double>& radii) {
  check_radii(radii);
  const Vector sigma = singleton_subgradient(f, x);
  const double fx = f(x);
  const auto dirs = residual_directions(f.dimension());
  // Per piece, p_i(x + w) - f(x) - <sigma, w> - w'Dw/2 expands exactly to
  // gap_i + <slope_i, w> + w'(Q_i - D)w/2; evaluating it in this form avoids
  // the cancellation that dominates once divided by r^2.
  const auto& pieces = f.pieces();
  std::vector<double> gap;
  std::vector<Vector> slope;
  std::vector<Matrix> curvature;
  for (const auto& p : pieces) {
    gap.push_back(p.value(x) - fx);
    slope.push_back(p.gradient(x) - sigma);
    curvature.push_back(p.Q - D);
  }
  std::vector<double> out;
  for (double r : radii) {
    double worst = 0.0;
    for (const Vector& d : dirs) {
      const Vector w = r * d;
      double rem = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < pieces.size(); ++i)
        rem = std::max(rem, gap[i] + slope[i].dot(w) + 0.5 * w.dot(curvature[i] * w));
      worst = std::max(worst, std::abs(rem) / (r * r));
    }
    out.push_back(worst);
  }
  return out;
}

std::vector<double> subgradient_residual(const PCQFunction& f, const Vector& x,
                                         const Vector& sigma_x, const Matrix& D,
                                         const std::vector<double>& radii) {
  check_radii(radii);
  const auto dirs = residual_directions(f.dimension());
  std::vector<double> out;
  for (double r : radii) {
    double worst = 0.0;
    for (const Vector& d : dirs) {
      const Vector w = r * d;
      const Vector predicted = sigma_x + D * w;
      for (const Vector& s : subdiff(f, x + w).generators)
        worst = std::max(worst, (s - predicted).norm() / r);
    }
    out.push_back(worst);
  }
  return out;
}

std::vector<double> subgradient_residual(const PCQFunction& f, const Vector& x, const Matrix& D,
                                         const std::vector<double>& radii) {
  return subgradient_residual(f, x, singleton_subgradient(f, x), D, radii);
}

bool CertificationRule::passes(const std::vector<double>& sequence) const {
  if (sequence.empty()) return false;
  const double first = sequence.front(), last = sequence.back();
  return last <= decay * first || last <= floor;
}

const char* node_class_name(NodeClass c) {
  switch (c) {
    case NodeClass::kCertified: return "certified";
    case NodeClass::kKink: return "kink";
    case NodeClass::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

AlexandrovReport alexandrov_scan(const PCQFunction& f, const Box& region, double delta,
                                 std::uint64_t resolution, const AlexandrovOptions& options) {
  const int n = region.dimension();
  if (n != f.dimension())
    fail(ErrorCode::kInvalidArgument, "region dimension differs from the function", "region");
  if (resolution == 0) fail(ErrorCode::kInvalidArgument, "grid resolution must be >= 1", "grid");
  check_radii(options.radii);
  std::uint64_t total = 1;
  for (int j = 0; j < n; ++j) {
    if (total > (std::uint64_t{1} << 26) / resolution)
      fail(ErrorCode::kInvalidArgument, "scan grid has too many nodes", "grid");
    total *= resolution;
  }
  const double R = (region.circumradius() + 4.0 * options.step) * (1.0 + 1e-9) + delta + 1e-9;
  const RegularizedFunction g = regularize(f, delta, R);
  const Vector step = (region.upper - region.lower) / static_cast<double>(resolution);

  AlexandrovReport report;
  report.radii = options.radii;
  report.resolution = resolution;
  report.cell_volume = step.prod();
  report.nodes.resize(total);

  parallel_for(total, [&](std::size_t i) {
    AlexandrovNode& node = report.nodes[i];
    node.x.resize(n);
    std::uint64_t rest = i;
    for (int j = 0; j < n; ++j) {
      node.x(j) = region.lower(j) + (static_cast<double>(rest % resolution) + 0.5) * step(j);
      rest /= resolution;
    }
    const SubdifferentialSet sd = subdiff(f, node.x);
    node.singleton = sd.singleton();
    const RegularizedPoint p = g.evaluate(node.x);
    node.touch = p.value - f(node.x) <= kDisagreementTol;
    if (!node.singleton) {
      node.classification = NodeClass::kKink;
      node.note = "subdifferential has " + std::to_string(sd.generators.size()) + " generators";
      return;
    }
    if (!node.touch) {
      node.note = "not a touch point";
      return;
    }
    try {
      node.D = hessian_at_touch(g, node.x, options.step);
      node.rho = second_order_residual(f, node.x, node.D, options.radii);
      node.tau = subgradient_residual(f, node.x, node.D, options.radii);
    } catch (const Error& e) {
      node.note = std::string(error_name(e.code())) + ": " + e.what();
      return;
    }
    node.second_order_pass = options.rule.passes(node.rho);
    node.subgradient_pass = options.rule.passes(node.tau);
    node.classification =
        node.second_order_pass ? NodeClass::kCertified : NodeClass::kInconclusive;
    if (!node.second_order_pass) node.note = "second-order residual did not decay";
  });

  for (const AlexandrovNode& node : report.nodes) {
    if (node.touch) ++report.touch;
    switch (node.classification) {
      case NodeClass::kCertified: ++report.certified; break;
      case NodeClass::kKink: ++report.kinks; break;
      case NodeClass::kInconclusive: ++report.inconclusive; break;
    }
  }
  report.certified_fraction = static_cast<double>(report.certified) / static_cast<double>(total);
  report.non_touch_measure = static_cast<double>(total - report.touch) * report.cell_volume;
  return report;
}

}  // namespace rollingball
