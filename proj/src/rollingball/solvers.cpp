#include "rollingball/solvers.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace rollingball::solvers {
namespace {

constexpr double kPivotEps = 1e-11;

// Tableau simplex over y >= 0 for: maximize c'y, A y <= b.
class Tableau {
 public:
  Tableau(const Matrix& A, const Vector& b, const Vector& c)
      : m_(static_cast<int>(A.rows())),
        n_(static_cast<int>(A.cols())),
        basis_(m_),
        nonbasis_(n_ + 1),
        d_(Matrix::Zero(m_ + 2, n_ + 2)) {
    d_.topLeftCorner(m_, n_) = A;
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      d_(i, n_) = -1.0;
      d_(i, n_ + 1) = b(i);
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      d_(m_, j) = -c(j);
    }
    nonbasis_[n_] = -1;
    d_(m_ + 1, n_) = 1.0;
  }

  LpSolution solve() {
    LpSolution out;
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (d_(i, n_ + 1) < d_(r, n_ + 1)) r = i;
    if (m_ > 0 && d_(r, n_ + 1) < -kPivotEps) {
      pivot(r, n_);
      if (!run(1) || d_(m_ + 1, n_ + 1) < -1e-9) {
        out.status = LpStatus::kInfeasible;
        return out;
      }
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j)
          if (s == -1 || d_(i, j) < d_(i, s) ||
              (d_(i, j) == d_(i, s) && nonbasis_[j] < nonbasis_[s]))
            s = j;
        pivot(i, s);
      }
    }
    if (!run(2)) {
      out.status = LpStatus::kUnbounded;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.status = LpStatus::kOptimal;
    out.x = Vector::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && basis_[i] < n_) out.x(basis_[i]) = d_(i, n_ + 1);
    out.value = d_(m_, n_ + 1);
    return out;
  }

 private:
  void pivot(int r, int s) {
    const double inv = 1.0 / d_(r, s);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double factor = d_(i, s) * inv;
      if (factor == 0.0) continue;
      for (int j = 0; j < n_ + 2; ++j)
        if (j != s) d_(i, j) -= d_(r, j) * factor;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) d_(r, j) *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) d_(i, s) *= -inv;
    d_(r, s) = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool run(int phase) {
    const int row = phase == 1 ? m_ + 1 : m_;
    for (int guard = 0; guard < 50000; ++guard) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (s == -1 || d_(row, j) < d_(row, s) ||
            (d_(row, j) == d_(row, s) && nonbasis_[j] < nonbasis_[s]))
          s = j;
      }
      if (d_(row, s) > -kPivotEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_(i, s) < kPivotEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = d_(i, n_ + 1) / d_(i, s);
        const double rhs = d_(r, n_ + 1) / d_(r, s);
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    fail(ErrorCode::kConvergenceFailure, "simplex exceeded its pivot budget");
  }

  int m_;
  int n_;
  std::vector<int> basis_;
  std::vector<int> nonbasis_;
  Matrix d_;
};

}  // namespace

LpSolution maximize(const Matrix& A, const Vector& b, const Vector& c) {
  const Eigen::Index n = A.cols();
  // Free variables split as x = x+ - x-.
  Matrix split(A.rows(), 2 * n);
  split << A, -A;
  Vector c2(2 * n);
  c2 << c, -c;
  Tableau tableau(split, b, c2);
  LpSolution raw = tableau.solve();
  if (raw.status != LpStatus::kOptimal) return raw;
  LpSolution out;
  out.status = LpStatus::kOptimal;
  out.x = raw.x.head(n) - raw.x.tail(n);
  out.value = c.dot(out.x);
  return out;
}

Vector project_halfspaces(const Matrix& A, const Vector& b, const Vector& x,
                          const QpOptions& options) {
  const Eigen::Index n = A.cols();
  Vector z = x;
  std::vector<Eigen::Index> active;
  std::vector<double> multipliers;
  int iterations = 0;

  for (;;) {
    // Most violated constraint at the current dual-feasible point.
    Eigen::Index p = -1;
    double worst = -options.feasibility_tol;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double slack = b(i) - A.row(i).dot(z);
      if (slack < worst) {
        worst = slack;
        p = i;
      }
    }
    if (p < 0) return z;

    std::vector<double> u_plus = multipliers;
    u_plus.push_back(0.0);

    for (;;) {
      if (++iterations > options.max_iterations)
        fail(ErrorCode::kConvergenceFailure,
             "projection active-set iteration budget exhausted");
      const auto q = static_cast<Eigen::Index>(active.size());
      // Constraint normals in ">=" form are -a_i.
      const Vector np = -A.row(p).transpose();
      Vector r = Vector::Zero(q);
      Vector dz = np;
      if (q > 0) {
        Matrix N(n, q);
        for (Eigen::Index j = 0; j < q; ++j) N.col(j) = -A.row(active[j]).transpose();
        const Matrix gram = N.transpose() * N;
        r = gram.ldlt().solve(N.transpose() * np);
        dz = np - N * r;
      }

      double t1 = std::numeric_limits<double>::infinity();
      Eigen::Index drop = -1;
      for (Eigen::Index j = 0; j < q; ++j) {
        if (r(j) > 1e-14) {
          const double ratio = u_plus[j] / r(j);
          if (ratio < t1) {
            t1 = ratio;
            drop = j;
          }
        }
      }
      double t2 = std::numeric_limits<double>::infinity();
      const double dz_sq = dz.squaredNorm();
      if (dz_sq > 1e-24) {
        const double slack_p = b(p) - A.row(p).dot(z);
        t2 = std::max(0.0, -slack_p / dz.dot(np));
      }
      const double t = std::min(t1, t2);
      if (!std::isfinite(t))
        fail(ErrorCode::kInfeasibleBody, "halfspace system has no feasible point");

      if (std::isfinite(t2)) z += t * dz;
      for (Eigen::Index j = 0; j < q; ++j) u_plus[j] -= t * r(j);
      u_plus[q] += t;

      if (std::isfinite(t2) && t2 <= t1) {
        active.push_back(p);
        multipliers = u_plus;
        break;
      }
      active.erase(active.begin() + drop);
      u_plus.erase(u_plus.begin() + drop);
    }
  }
}

std::pair<double, double> golden_section(const std::function<double(double)>& objective,
                                         double lo, double hi, int iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c), fd = objective(d);
  double best_x = fc <= fd ? c : d;
  double best_f = std::min(fc, fd);
  for (int it = 0; it < iterations && b - a > 0.0; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
      if (fc < best_f) {
        best_f = fc;
        best_x = c;
      }
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
      if (fd < best_f) {
        best_f = fd;
        best_x = d;
      }
    }
  }
  // Endpoints cover minima sitting on the bracket boundary.
  for (double x : {lo, hi}) {
    const double fx = objective(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  return {best_x, best_f};
}

namespace {

BallMinimum nested_min(const std::function<double(const Vector&)>& objective, Vector& point,
                       const Vector& center, double radius, Eigen::Index level, int iterations) {
  const Eigen::Index n = center.size();
  double used = 0.0;
  for (Eigen::Index j = 0; j < level; ++j) used += sq(point(j) - center(j));
  const double half = std::sqrt(std::max(0.0, radius * radius - used));
  if (level == n - 1) {
    auto line = [&](double t) {
      point(level) = center(level) + t;
      return objective(point);
    };
    const auto [t, value] = golden_section(line, -half, half, iterations);
    point(level) = center(level) + t;
    return {point, value};
  }
  BallMinimum best{point, std::numeric_limits<double>::infinity()};
  auto slice = [&](double t) {
    point(level) = center(level) + t;
    BallMinimum inner = nested_min(objective, point, center, radius, level + 1, iterations);
    if (inner.value < best.value) best = inner;
    return inner.value;
  };
  golden_section(slice, -half, half, iterations);
  point = best.argmin;
  return best;
}

}  // namespace

BallMinimum minimize_convex_on_ball(const std::function<double(const Vector&)>& objective,
                                    const Vector& center, double radius, int iterations) {
  Vector point = center;
  return nested_min(objective, point, center, radius, 0, iterations);
}

}  // namespace rollingball::solvers
