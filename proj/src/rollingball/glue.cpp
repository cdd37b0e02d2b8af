#include "rollingball/glue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rollingball/solvers.hpp"

namespace rollingball {

double theta(double t) {
  const double at = std::abs(t);
  return at >= 1.0 ? at : 0.5 * (t * t + 1.0);
}

double theta_derivative(double t) {
  if (t >= 1.0) return 1.0;
  if (t <= -1.0) return -1.0;
  return t;
}

double smooth_max(double x, double y) {
  // Exact max off the band so the identity survives rounding.
  if (std::abs(x - y) >= 1.0) return std::max(x, y);
  return 0.5 * (x + y + theta(x - y));
}

ScalarField smooth_max_compose(ScalarField u, ScalarField v) {
  return [u = std::move(u), v = std::move(v)](const Vector& x) { return smooth_max(u(x), v(x)); };
}

namespace {

std::vector<Vector> sphere_directions(int dimension, int count) {
  std::vector<Vector> out;
  if (dimension == 1) {
    out.push_back(Vector::Constant(1, -1.0));
    out.push_back(Vector::Constant(1, 1.0));
  } else if (dimension == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * M_PI * i / count;
      Vector d(2);
      d << std::cos(t), std::sin(t);
      out.push_back(d);
    }
  } else if (dimension == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vector d(3);
      d << rr * std::cos(golden * i), rr * std::sin(golden * i), z;
      out.push_back(d);
    }
  } else {
    fail(ErrorCode::kInvalidArgument, "sphere sampling supports dimension 1 to 3", "dimension");
  }
  return out;
}

Vector spherical(double polar, double azimuth) {
  Vector d(3);
  d << std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar);
  return d;
}

}  // namespace

double sphere_max(const ScalarField& fn, int dimension, double radius) {
  if (dimension == 1) return std::max(fn(Vector::Constant(1, -radius)), fn(Vector::Constant(1, radius)));
  if (dimension == 2) {
    constexpr int kCount = 4096;
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    const auto dirs = sphere_directions(2, kCount);
    for (int i = 0; i < kCount; ++i) {
      const double v = fn(radius * dirs[i]);
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    const double step = 2.0 * M_PI / kCount;
    auto neg = [&](double t) {
      Vector x(2);
      x << radius * std::cos(t), radius * std::sin(t);
      return -fn(x);
    };
    const auto [t, v] = solvers::golden_section(neg, (best - 1) * step, (best + 1) * step, 60);
    (void)t;
    return std::max(best_value, -v);
  }
  const auto dirs = sphere_directions(dimension, 8192);
  Vector best_dir = dirs.front();
  double best_value = -std::numeric_limits<double>::infinity();
  for (const Vector& d : dirs) {
    const double v = fn(radius * d);
    if (v > best_value) {
      best_value = v;
      best_dir = d;
    }
  }
  double polar = std::acos(std::clamp(best_dir(2), -1.0, 1.0));
  double azimuth = std::atan2(best_dir(1), best_dir(0));
  for (double step = 0.05; step > 1e-10; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (const auto& [dp, da] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
        const double v = fn(radius * spherical(polar + dp, azimuth + da));
        if (v > best_value) {
          best_value = v;
          polar += dp;
          azimuth += da;
          moved = true;
        }
      }
    }
  }
  return best_value;
}

double GluedFunction::operator()(const Vector& x) const {
  if (x.norm() > rho) return q(x);
  return smooth_max(h_(x), q(x));
}

namespace {

double pcq_sphere_max(const PCQFunction& f, double radius) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.pieces().size(); ++i) {
    const QuadraticPiece& p = f.pieces()[i];
    if (f.curvatures()[i] == 0.0) {
      best = std::max(best, p.b + radius * p.a.norm());
    } else {
      best = std::max(best, sphere_max([&](const Vector& x) { return p.value(x); }, f.dimension(),
                                       radius));
    }
  }
  return best;
}

// Radii at which the sphere condition is checked in 1D/2D/3D.
int probe_directions(int dimension) { return dimension == 1 ? 2 : dimension == 2 ? 720 : 2048; }

bool q_dominates_on_sphere(const GluedFunction& H, const std::vector<Vector>& dirs, double t) {
  for (const Vector& d : dirs) {
    const Vector x = t * d;
    if (!(H.q(x) - H.inner(x) >= 1.0)) return false;
  }
  return true;
}

}  // namespace

GluedFunction extend(const PCQFunction& h, double r, double R) {
  return extend([h](const Vector& x) { return h(x); }, h.dimension(), r, R, &h);
}

GluedFunction extend(ScalarField h, int dimension, double r, double R, const PCQFunction* pieces) {
  if (!(r > 0.0) || !(R > r) || !std::isfinite(R))
    fail(ErrorCode::kInvalidArgument, "extension needs 0 < r < R", "r");
  if (dimension < 1 || dimension > 3)
    fail(ErrorCode::kInvalidArgument, "extension supports dimension 1 to 3", "dimension");
  GluedFunction H;
  H.h_ = std::move(h);
  H.dimension = dimension;
  H.r = r;
  H.R = R;
  H.rho = 0.5 * (r + R);
  H.m = solvers::minimize_convex_on_ball(H.h_, Vector::Zero(dimension), r).value;
  H.M = pieces ? pcq_sphere_max(*pieces, H.rho) : sphere_max(H.h_, dimension, H.rho);
  const double s = H.margin;
  H.a = (H.M - H.m + 2.0 + s) / (H.rho * H.rho - r * r);
  H.b = H.a * r * r - (H.m - 1.0 - s / 2.0);

  // Probe the two strict inequalities: h - q > 1 inside the small ball and
  // q - h > 1 on the switching sphere.
  const auto dirs = sphere_directions(dimension, probe_directions(dimension));
  for (int shell = 0; shell <= 16; ++shell) {
    const double t = r * shell / 16.0;
    for (const Vector& d : dirs) {
      const Vector x = t * d;
      if (!(H.h_(x) - H.q(x) > 1.0))
        fail(ErrorCode::kMarginFailure,
             "q is not below h - 1 inside |x| <= r; the estimate of inf h is too coarse");
    }
  }
  if (!q_dominates_on_sphere(H, dirs, H.rho))
    fail(ErrorCode::kMarginFailure,
         "q is not above h + 1 on |x| = rho; the estimate of sup h is too coarse");

  // epsilon: first failing radius scanning outward to R, refined by bisection.
  constexpr int kScan = 64;
  double good = H.rho;
  double bad = -1.0;
  for (int j = 1; j <= kScan; ++j) {
    const double t = H.rho + (R - H.rho) * j / kScan;
    if (q_dominates_on_sphere(H, dirs, t)) {
      good = t;
    } else {
      bad = t;
      break;
    }
  }
  if (bad > 0.0) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (good + bad);
      (q_dominates_on_sphere(H, dirs, mid) ? good : bad) = mid;
    }
  }
  H.epsilon = good - H.rho;

  // q_radius: innermost radius from which q dominates all the way to rho.
  good = H.rho;
  bad = r;
  for (int j = 1; j <= kScan; ++j) {
    const double t = H.rho - (H.rho - r) * j / kScan;
    if (q_dominates_on_sphere(H, dirs, t)) {
      good = t;
    } else {
      bad = t;
      break;
    }
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (good + bad);
    (q_dominates_on_sphere(H, dirs, mid) ? good : bad) = mid;
  }
  H.q_radius = good;
  return H;
}

double barrier_psi(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return std::numeric_limits<double>::infinity();
  return s * s / (1.0 - s);
}

double barrier(int k, double t) {
  if (!(t > k - 2.0) || !(t < k + 1.0))
    fail(ErrorCode::kDomainExceeded,
         "barrier " + std::to_string(k) + " is defined on (" + std::to_string(k - 2) + ", " +
             std::to_string(k + 1) + ")",
         "t");
  return barrier_psi(k - 1.0 - t) + barrier_psi(t - k);
}

PatchworkFunction::PatchworkFunction(PCQFunction f, std::vector<RegularizedFunction> regularizers)
    : f_(std::move(f)), g_(std::move(regularizers)) {
  if (g_.empty()) fail(ErrorCode::kInvalidArgument, "patchwork needs at least one regularizer", "K");
  for (std::size_t i = 0; i < g_.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    if (g_[i].domain_radius() < k + 1.0 + g_[i].delta())
      fail(ErrorCode::kInvalidArgument,
           "regularizer " + std::to_string(i + 1) + " does not cover its annulus", "regularizers");
  }
  const int K = max_index();
  const int n = f_.dimension();
  const double inner = solvers::minimize_convex_on_ball(
                           [&](const Vector& x) { return f_(x); }, Vector::Zero(n), 1.0)
                           .value;
  double outer = std::numeric_limits<double>::infinity();
  for (const Vector& d : sphere_directions(n, n == 2 ? 1024 : 4096))
    outer = std::min(outer, f_(static_cast<double>(K) * d));
  coercivity_warning = !(outer > inner);
}

double PatchworkFunction::component(int k, const Vector& x) const {
  const double t = x.norm();
  if (k < 1 || k > max_index() || !(t > k - 2.0) || !(t < k + 1.0))
    return std::numeric_limits<double>::infinity();
  const double wall = barrier(k, t);
  if (!std::isfinite(wall)) return wall;
  return regularizer(k).value(x) + wall;
}

std::vector<int> PatchworkFunction::finite_components(const Vector& x) const {
  const double t = x.norm();
  std::vector<int> out;
  for (int k = std::max(1, static_cast<int>(std::floor(t)) - 1);
       k <= std::min(max_index(), static_cast<int>(std::floor(t)) + 2); ++k)
    if (t > k - 2.0 && t < k + 1.0) out.push_back(k);
  return out;
}

double PatchworkFunction::operator()(const Vector& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (int k : finite_components(x)) best = std::min(best, component(k, x));
  return best;
}

PatchworkFunction patchwork(const PCQFunction& f, double epsilon, int K) {
  if (!(epsilon > 0.0)) fail(ErrorCode::kInvalidArgument, "epsilon must be positive", "epsilon");
  if (K < 1) fail(ErrorCode::kInvalidArgument, "K must be >= 1", "K");
  std::vector<RegularizedFunction> gs;
  for (int k = 1; k <= K; ++k) {
    const double delta = epsilon / std::ldexp(1.0, k);
    gs.push_back(regularize(f, delta, 2.0 * k + delta));
  }
  return PatchworkFunction(f, std::move(gs));
}

}  // namespace rollingball
