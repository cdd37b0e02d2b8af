#include "rollingball/funcreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rollingball/solvers.hpp"

namespace rollingball {

double QuadraticPiece::value(const Vector& x) const {
  return 0.5 * x.dot(Q * x) + a.dot(x) + b;
}

Vector QuadraticPiece::gradient(const Vector& x) const { return Q * x + a; }

PCQFunction::PCQFunction(std::vector<QuadraticPiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) fail(ErrorCode::kValidation, "function needs at least one piece", "pieces");
  dimension_ = static_cast<int>(pieces_.front().a.size());
  if (dimension_ < 1) fail(ErrorCode::kValidation, "slope vector is empty", "pieces[0].a");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    QuadraticPiece& p = pieces_[i];
    const std::string where = "pieces[" + std::to_string(i) + "]";
    if (p.a.size() != dimension_)
      fail(ErrorCode::kValidation, "slope has the wrong dimension", where + ".a");
    if (p.Q.size() == 0) p.Q = Matrix::Zero(dimension_, dimension_);
    if (p.Q.rows() != dimension_ || p.Q.cols() != dimension_)
      fail(ErrorCode::kValidation, "Q must be a square matrix matching the slope", where + ".Q");
    if (!p.Q.allFinite() || !p.a.allFinite() || !std::isfinite(p.b))
      fail(ErrorCode::kValidation, "coefficients must be finite", where);
    if ((p.Q - p.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      fail(ErrorCode::kValidation, "Q is not symmetric", where + ".Q");
    p.Q = 0.5 * (p.Q + p.Q.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(p.Q, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
      fail(ErrorCode::kValidation, "Q is not positive semidefinite", where + ".Q");
    curvature_.push_back(std::max(0.0, eig.eigenvalues().maxCoeff()));
    if (p.Q.cwiseAbs().maxCoeff() > 0.0) max_affine_ = false;
  }
}

PCQFunction PCQFunction::max_affine(const std::vector<Vector>& slopes,
                                    const std::vector<double>& offsets) {
  if (slopes.size() != offsets.size())
    fail(ErrorCode::kValidation, "slopes and offsets differ in count", "pieces");
  std::vector<QuadraticPiece> pieces;
  for (std::size_t i = 0; i < slopes.size(); ++i)
    pieces.push_back({Matrix::Zero(slopes[i].size(), slopes[i].size()), slopes[i], offsets[i]});
  return PCQFunction(std::move(pieces));
}

PCQFunction PCQFunction::quadratic(const Matrix& Q, const Vector& a, double b) {
  return PCQFunction({{Q, a.size() ? a : Vector::Zero(Q.rows()), b}});
}

double PCQFunction::operator()(const Vector& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) best = std::max(best, p.value(x));
  return best;
}

double eval(const PCQFunction& f, const Vector& x) { return f(x); }

SubdifferentialSet subdiff(const PCQFunction& f, const Vector& x, double active_tol) {
  SubdifferentialSet out;
  out.active_tol = active_tol;
  const double top = f(x);
  for (const auto& p : f.pieces()) {
    if (p.value(x) < top - active_tol) continue;
    Vector g = p.gradient(x);
    const bool seen = std::any_of(out.generators.begin(), out.generators.end(),
                                  [&](const Vector& h) { return (h - g).norm() <= 1e-12; });
    if (!seen) out.generators.push_back(std::move(g));
  }
  return out;
}

namespace {

double hemisphere(double delta, const Vector& u) {
  return std::sqrt(std::max(0.0, delta * delta - u.squaredNorm()));
}

struct BallMax {
  double value;
  Vector u;
};

// Affine piece: the maximizer is where the hemisphere slope matches a.
BallMax erode_affine(const QuadraticPiece& p, const Vector& c, double delta) {
  const double w = std::sqrt(1.0 + p.a.squaredNorm());
  return {p.a.dot(c) + p.b + delta * w, (delta / w) * p.a};
}

// delta * lambda_max(Q) < 1: the objective is strictly concave on the ball.
BallMax erode_newton(const QuadraticPiece& p, const Vector& c, double delta) {
  const Eigen::Index n = c.size();
  auto objective = [&](const Vector& u) { return p.value(c + u) + hemisphere(delta, u); };
  const Vector g0 = p.gradient(c);
  Vector u = (delta / std::sqrt(1.0 + g0.squaredNorm())) * g0;
  double fu = objective(u);
  for (int it = 0; it < 100; ++it) {
    const double s = hemisphere(delta, u);
    const Vector grad = p.gradient(c + u) - u / s;
    const Matrix neg_hess =
        Matrix::Identity(n, n) / s + (u * u.transpose()) / (s * s * s) - p.Q;
    const Vector step = neg_hess.llt().solve(grad);
    double t = 1.0;
    for (;;) {
      const Vector cand = u + t * step;
      if (cand.norm() < delta) {
        const double fc = objective(cand);
        if (fc >= fu) {
          u = cand;
          fu = fc;
          break;
        }
      }
      t *= 0.5;
      if (t < 1e-12) return {fu, u};
    }
    if (t * step.norm() <= 1e-15 * delta) break;
  }
  return {fu, u};
}

// Curvature too large for concavity: multi-start projected gradient ascent.
BallMax erode_multistart(const QuadraticPiece& p, const Vector& c, double delta,
                         std::size_t piece_index) {
  const Eigen::Index n = c.size();
  auto objective = [&](const Vector& u) { return p.value(c + u) + hemisphere(delta, u); };
  std::vector<Vector> starts{Vector::Zero(n)};
  for (Eigen::Index j = 0; j < n && starts.size() < 7; ++j) {
    starts.push_back(Vector::Unit(n, j) * 0.9 * delta);
    starts.push_back(-Vector::Unit(n, j) * 0.9 * delta);
  }
  CounterRng rng(0x726f6c6c62616c6cULL, piece_index);
  while (starts.size() < 8) {
    Vector v(n);
    for (Eigen::Index j = 0; j < n; ++j) v(j) = rng.normal();
    starts.push_back(v.normalized() * delta * std::pow(rng.uniform(), 1.0 / n) * 0.9);
  }
  const double limit = delta * (1.0 - 1e-12);
  BallMax best{-std::numeric_limits<double>::infinity(), Vector::Zero(n)};
  for (Vector u : starts) {
    double fu = objective(u);
    double eta = 0.1 * delta;
    for (int it = 0; it < 200; ++it) {
      const double s = hemisphere(delta, u);
      const Vector grad = p.gradient(c + u) - u / std::max(s, 1e-300);
      const double gn = grad.norm();
      if (gn == 0.0 || eta * gn < 1e-15 * delta) break;
      Vector cand = u + (eta / std::max(gn, 1.0)) * grad;
      if (cand.norm() > limit) cand *= limit / cand.norm();
      const double fc = objective(cand);
      if (fc > fu) {
        u = cand;
        fu = fc;
        eta *= 2.0;
      } else {
        eta *= 0.5;
      }
    }
    if (fu > best.value) best = {fu, u};
  }
  if (!std::isfinite(best.value))
    fail(ErrorCode::kInnerSolveFailure, "ball maximization produced a non-finite value");
  return best;
}

double erode_piece(const PCQFunction& f, std::size_t i, const Vector& c, double delta) {
  const QuadraticPiece& p = f.pieces()[i];
  const double k = f.curvatures()[i];
  if (k == 0.0) return erode_affine(p, c, delta).value;
  if (delta * k < 1.0 - 1e-9) return erode_newton(p, c, delta).value;
  return erode_multistart(p, c, delta, i).value;
}

}  // namespace

double erode(const PCQFunction& f, double delta, const Vector& x) {
  if (!(delta > 0.0)) fail(ErrorCode::kInvalidArgument, "delta must be positive", "delta");
  if (x.size() != f.dimension())
    fail(ErrorCode::kInvalidArgument, "point has the wrong dimension", "x");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.pieces().size(); ++i)
    best = std::max(best, erode_piece(f, i, x, delta));
  if (!std::isfinite(best))
    fail(ErrorCode::kInnerSolveFailure, "erosion produced a non-finite value");
  return best;
}

RegularizedFunction::RegularizedFunction(PCQFunction f, double delta, double domain_radius)
    : f_(std::move(f)), delta_(delta), domain_(domain_radius) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    fail(ErrorCode::kInvalidArgument, "delta must be positive", "delta");
  if (!(domain_radius > delta) || !std::isfinite(domain_radius))
    fail(ErrorCode::kInvalidArgument, "domain radius must exceed delta", "domain");
}

RegularizedFunction regularize(const PCQFunction& f, double delta, double domain_radius) {
  return RegularizedFunction(f, delta, domain_radius);
}

double RegularizedFunction::erosion(const Vector& x) const { return erode(f_, delta_, x); }

void RegularizedFunction::check_domain(const Vector& x) const {
  if (x.size() != f_.dimension())
    fail(ErrorCode::kInvalidArgument, "point has the wrong dimension", "x");
  if (!x.allFinite()) fail(ErrorCode::kInvalidArgument, "point is not finite", "x");
  if (x.norm() + delta_ > domain_ * (1.0 + 1e-12))
    fail(ErrorCode::kDomainExceeded,
         "evaluation needs |x| + delta <= " + std::to_string(domain_), "x");
}

bool RegularizedFunction::touch_test(const Vector& x, RegularizedPoint& out) const {
  const SubdifferentialSet sd = subdiff(f_, x);
  if (!sd.singleton()) return false;
  const Vector& p = sd.generators.front();
  const double w = std::sqrt(1.0 + p.squaredNorm());
  const double fx = f_(x);
  const Vector c = x - (delta_ / w) * p;
  const double height = fx + delta_ / w;
  // The ball tangent to the graph at (x, f(x)) lies in the epigraph iff its
  // centre is on or above the erosion.
  if (erosion(c) > height + 1e-11 * (1.0 + std::abs(height))) return false;
  out.value = fx;
  out.gradient = p;
  out.touch = true;
  out.center = c;
  out.center_height = height;
  return true;
}

// Max-affine f: F(u) = max_i (a_i'u + A_i) - sqrt(delta^2 - |u|^2) is
// minimized on the affine hull where some set S of pieces ties; on that hull
// the minimizer is explicit, so every candidate S (affinely independent,
// |S| <= n + 1) is solved and the best feasible value kept.
void RegularizedFunction::minimize_affine(const Vector& x, RegularizedPoint& out) const {
  const auto& pieces = f_.pieces();
  const std::size_t m = pieces.size();
  const Eigen::Index n = x.size();
  std::vector<double> A(m);
  for (std::size_t i = 0; i < m; ++i)
    A[i] = pieces[i].a.dot(x) + pieces[i].b + delta_ * std::sqrt(1.0 + pieces[i].a.squaredNorm());

  auto F = [&](const Vector& u) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) top = std::max(top, pieces[i].a.dot(u) + A[i]);
    return top - hemisphere(delta_, u);
  };

  double best = std::numeric_limits<double>::infinity();
  Vector best_u = Vector::Zero(n);
  std::vector<std::size_t> subset;
  auto consider = [&]() {
    const std::size_t i0 = subset.front();
    const Eigen::Index k = static_cast<Eigen::Index>(subset.size()) - 1;
    const Vector& a = pieces[i0].a;
    Vector u0 = Vector::Zero(n);
    Matrix W = Matrix::Identity(n, n);
    if (k > 0) {
      Matrix D(k, n);
      Vector rhs(k);
      for (Eigen::Index j = 0; j < k; ++j) {
        D.row(j) = (pieces[subset[j + 1]].a - a).transpose();
        rhs(j) = A[i0] - A[subset[j + 1]];
      }
      Eigen::JacobiSVD<Matrix> svd(D, Eigen::ComputeFullV | Eigen::ComputeFullU);
      const Vector& sv = svd.singularValues();
      if (sv(k - 1) <= 1e-12 * std::max(1.0, sv(0))) return;
      u0 = svd.solve(rhs);
      W = svd.matrixV().rightCols(n - k);
    }
    const double rho_sq = delta_ * delta_ - u0.squaredNorm();
    if (rho_sq <= 0.0) return;
    Vector u = u0;
    if (W.cols() > 0) {
      const Vector alpha = W.transpose() * a;
      u -= W * (std::sqrt(rho_sq) / std::sqrt(1.0 + alpha.squaredNorm()) * alpha);
    }
    const double value = F(u);
    if (value < best) {
      best = value;
      best_u = u;
    }
  };
  const std::size_t max_size = std::min<std::size_t>(m, static_cast<std::size_t>(n) + 1);
  // Lexicographic enumeration of subsets of size 1..max_size.
  std::function<void(std::size_t)> recurse = [&](std::size_t start) {
    for (std::size_t i = start; i < m; ++i) {
      subset.push_back(i);
      consider();
      if (subset.size() < max_size) recurse(i + 1);
      subset.pop_back();
    }
  };
  recurse(0);
  if (!std::isfinite(best))
    fail(ErrorCode::kInnerSolveFailure, "no feasible tie set found for the dilation step");
  const double s = hemisphere(delta_, best_u);
  out.value = best;
  out.gradient = -best_u / s;
  out.center = x + best_u;
  out.center_height = best + s;
}

void RegularizedFunction::minimize_general(const Vector& x, RegularizedPoint& out) const {
  auto F = [&](const Vector& u) { return erosion(x + u) - hemisphere(delta_, u); };
  const solvers::BallMinimum best =
      solvers::minimize_convex_on_ball(F, Vector::Zero(x.size()), delta_);
  if (!std::isfinite(best.value))
    fail(ErrorCode::kInnerSolveFailure, "dilation minimization produced a non-finite value");
  const double s = hemisphere(delta_, best.argmin);
  if (!(s > 0.0))
    fail(ErrorCode::kInnerSolveFailure, "dilation minimizer reached the rim of the ball");
  out.value = best.value;
  out.gradient = -best.argmin / s;
  out.center = x + best.argmin;
  out.center_height = best.value + s;
}

RegularizedPoint RegularizedFunction::evaluate(const Vector& x) const {
  check_domain(x);
  RegularizedPoint out;
  if (touch_test(x, out)) return out;
  if (f_.is_max_affine())
    minimize_affine(x, out);
  else
    minimize_general(x, out);
  return out;
}

namespace {

bool disagrees(const RegularizedFunction& g, const Vector& x) {
  const RegularizedPoint p = g.evaluate(x);
  return !p.touch && p.value - g.source()(x) > kDisagreementTol;
}

}  // namespace

MeasureEstimate disagreement_measure(const RegularizedFunction& g, const Box& region,
                                     const MeasureOptions& options) {
  const int n = region.dimension();
  if (n != g.source().dimension())
    fail(ErrorCode::kInvalidArgument, "region dimension differs from the function", "region");
  MeasureEstimate out;
  constexpr std::size_t kChunk = 1024;

  if (options.method == MeasureMethod::kMonteCarlo) {
    if (options.samples == 0)
      fail(ErrorCode::kInvalidSampleCount, "sample count must be >= 1", "samples");
    const std::uint64_t total = options.samples;
    const std::size_t chunks = (total + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> hits(chunks, 0);
    const Vector span = region.upper - region.lower;
    parallel_for(chunks, [&](std::size_t c) {
      std::uint64_t local = 0;
      Vector x(n);
      for (std::uint64_t i = c * kChunk; i < std::min<std::uint64_t>(total, (c + 1) * kChunk); ++i) {
        CounterRng rng(options.seed, i);
        for (int j = 0; j < n; ++j) x(j) = region.lower(j) + rng.uniform() * span(j);
        if (disagrees(g, x)) ++local;
      }
      hits[c] = local;
    });
    out.points = total;
    out.flagged = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
    const double p = static_cast<double>(out.flagged) / static_cast<double>(total);
    out.measure = p * region.volume();
    out.error = region.volume() * std::sqrt(p * (1.0 - p) / static_cast<double>(total));
    return out;
  }

  const std::uint64_t N = options.resolution;
  if (N == 0) fail(ErrorCode::kInvalidArgument, "grid resolution must be >= 1", "grid");
  std::uint64_t total = 1;
  for (int j = 0; j < n; ++j) {
    if (total > (std::uint64_t{1} << 32) / N)
      fail(ErrorCode::kInvalidArgument, "grid has too many cells", "grid");
    total *= N;
  }
  const Vector step = (region.upper - region.lower) / static_cast<double>(N);
  std::vector<std::uint8_t> flag(total, 0);
  const std::size_t chunks = (total + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    Vector x(n);
    for (std::uint64_t i = c * kChunk; i < std::min<std::uint64_t>(total, (c + 1) * kChunk); ++i) {
      std::uint64_t rest = i;
      for (int j = 0; j < n; ++j) {
        x(j) = region.lower(j) + (static_cast<double>(rest % N) + 0.5) * step(j);
        rest /= N;
      }
      flag[i] = disagrees(g, x) ? 1 : 0;
    }
  });

  std::vector<std::uint8_t> edge(total, 0);
  std::uint64_t stride = 1;
  for (int j = 0; j < n; ++j) {
    for (std::uint64_t i = 0; i < total; ++i) {
      if ((i / stride) % N == N - 1) continue;
      if (flag[i] != flag[i + stride]) edge[i] = edge[i + stride] = 1;
    }
    stride *= N;
  }
  const double cell = step.prod();
  out.points = total;
  out.flagged = std::accumulate(flag.begin(), flag.end(), std::uint64_t{0});
  out.measure = static_cast<double>(out.flagged) * cell;
  out.error = static_cast<double>(std::accumulate(edge.begin(), edge.end(), std::uint64_t{0})) * cell;
  return out;
}

std::vector<Vector> touch_points(const RegularizedFunction& g, const Box& region, double tol,
                                 std::uint64_t budget, std::uint64_t seed) {
  const int n = region.dimension();
  const Vector span = region.upper - region.lower;
  std::vector<Vector> probes(budget);
  std::vector<std::uint8_t> keep(budget, 0);
  parallel_for(budget, [&](std::size_t i) {
    CounterRng rng(seed, i);
    Vector x(n);
    for (int j = 0; j < n; ++j) x(j) = region.lower(j) + rng.uniform() * span(j);
    keep[i] = g.value(x) - g.source()(x) <= tol ? 1 : 0;
    probes[i] = std::move(x);
  });
  std::vector<Vector> out;
  for (std::uint64_t i = 0; i < budget; ++i)
    if (keep[i]) out.push_back(std::move(probes[i]));
  return out;
}

}  // namespace rollingball
