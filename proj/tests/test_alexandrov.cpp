#include "doctest.h"

#include "rollingball/alexandrov.hpp"
#include "support.hpp"

using namespace rollingball;
using testing::vec;

namespace {

template <typename Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kInvalidArgument;
}

Matrix quad2() {
  Matrix Q(2, 2);
  Q << 1.5, 0.4, 0.4, 0.8;
  return Q;
}

PCQFunction relu() { return PCQFunction::max_affine({vec({0.0}), vec({1.0})}, {0.0, 0.0}); }

}  // namespace

TEST_CASE("default radius schedule and sphere directions") {
  const auto r = default_radii();
  REQUIRE(r.size() == 9);
  for (std::size_t k = 0; k < r.size(); ++k) CHECK(r[k] == std::ldexp(0.1, -static_cast<int>(k)));
  CHECK(residual_directions(1).size() == 2);
  CHECK(residual_directions(2).size() == 64);
  CHECK(residual_directions(3).size() == 256);
  for (const Vector& d : residual_directions(3)) CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Hessian at touch points") {
  const PCQFunction f = PCQFunction::quadratic(quad2());
  for (double delta : {0.2, 0.05, 0.005}) {
    std::mt19937_64 rng(139);
    for (int k = 0; k < 5; ++k) {
      const Vector x = testing::random_in_box(rng, 2, -0.8, 0.8);
      const Matrix D = hessian_at_touch(f, delta, x, std::min(1e-4, delta / 8));
      CHECK((D - quad2()).cwiseAbs().maxCoeff() <= 1e-5);
      CHECK((D - D.transpose()).norm() == 0.0);
    }
  }
  const Matrix D0 = hessian_at_touch(testing::abs1(), 0.1, vec({0.5}));
  CHECK(std::abs(D0(0, 0)) <= 1e-9);
  CHECK(error_of([] { hessian_at_touch(testing::abs1(), 0.1, vec({0.0})); }) == ErrorCode::kNotTouchPoint);
  CHECK(error_of([] { hessian_at_touch(testing::abs1(), 0.1, vec({0.5}), 0.03); }) == ErrorCode::kStepUnderflow);
}

TEST_CASE("second-order residuals") {
  const PCQFunction f = PCQFunction::quadratic(quad2(), vec({0.3, -0.1}), 0.2);
  for (double r : second_order_residual(f, vec({0.2, 0.4}), quad2(), default_radii())) CHECK(r <= 1e-12);

  const Matrix Z = Matrix::Zero(1, 1);
  for (double r : second_order_residual(testing::abs1(), vec({0.5}), Z, default_radii())) CHECK(r == 0.0);

  // one kink at distance 0.01: the far endpoint crosses it while r > 0.01
  const auto radii = default_radii();
  const auto rho = second_order_residual(testing::abs1(), vec({0.01}), Z, radii);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    const double expect = r > 0.01 ? 2 * (r - 0.01) / (r * r) : 0.0;
    CHECK(rho[k] == doctest::Approx(expect).epsilon(1e-10));
  }
  CHECK(rho.back() == 0.0);
  CHECK(error_of([&] { second_order_residual(testing::abs1(), vec({0.0}), Z, radii); }) ==
        ErrorCode::kKinkAtCenter);
}

TEST_CASE("subgradient residuals") {
  const PCQFunction half = PCQFunction::quadratic(Matrix::Identity(2, 2));
  for (double t : subgradient_residual(half, vec({0.3, -0.6}), Matrix::Identity(2, 2), default_radii()))
    CHECK(t <= 1e-12);
  for (double t : subgradient_residual(testing::abs1(), vec({0.5}), Matrix::Zero(1, 1), default_radii()))
    CHECK(t == 0.0);
  // max(0, x) at its kink: whatever sigma_x in [0, 1], one side keeps a jump >= 1/2
  std::mt19937_64 rng(149);
  std::uniform_real_distribution<double> U(-3, 3);
  for (double sigma : {0.0, 1.0, 0.5}) {
    Matrix D(1, 1);
    D << U(rng);
    for (double t : subgradient_residual(relu(), vec({0.0}), vec({sigma}), D, default_radii())) CHECK(t >= 0.5);
  }
}

TEST_CASE("certification rule") {
  const CertificationRule rule;
  CHECK(rule.passes({1.0, 0.5, 0.1}));
  CHECK(!rule.passes({1.0, 0.5, 0.11}));
  CHECK(rule.passes({1e-9, 1e-9}));
  CHECK(!rule.passes({1.0, 1.0}));
}

TEST_CASE("scan of a single quadratic certifies every node") {
  const PCQFunction f = PCQFunction::quadratic(quad2());
  const AlexandrovReport rep = alexandrov_scan(f, Box::cube(2, -1, 1), 0.2, 20);
  CHECK(rep.nodes.size() == 400);
  CHECK(rep.certified == 400);
  CHECK(rep.certified_fraction == 1.0);
  for (const AlexandrovNode& n : rep.nodes) {
    CHECK((n.D - quad2()).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK(n.second_order_pass);
    CHECK(n.subgradient_pass);
  }
}

TEST_CASE("scan of |x| confines uncertified nodes to the rolling gap") {
  const double delta = 0.05;
  const std::uint64_t N = 400;
  const double step = 2.0 / N;
  const AlexandrovReport rep = alexandrov_scan(testing::abs1(), Box::cube(1, -1, 1), delta, N);
  for (const AlexandrovNode& n : rep.nodes) {
    if (n.classification != NodeClass::kCertified) {
      CHECK(std::abs(n.x(0)) < delta / std::sqrt(2.0) + step);
    } else {
      CHECK(std::abs(n.D(0, 0)) <= 1e-6);
      CHECK(n.subgradient_pass);
    }
  }
  CHECK(rep.certified_fraction >= 1 - std::sqrt(2.0) * delta / 2 - 2 * step);
  CHECK(rep.non_touch_measure == doctest::Approx(std::sqrt(2.0) * delta).epsilon(0.05));
}

TEST_CASE("max-affine scan in 2D extracts zero Hessians and tracks the disagreement") {
  const PCQFunction f = testing::l1_2d();
  double previous = 0.0, first = 0.0;
  for (double delta : {0.2, 0.1, 0.05}) {
    const AlexandrovReport rep = alexandrov_scan(f, Box::cube(2, -1, 1), delta, 40);
    for (const AlexandrovNode& n : rep.nodes) {
      if (n.classification != NodeClass::kCertified) continue;
      CHECK(n.D.cwiseAbs().maxCoeff() <= 1e-6);
      const auto& rho = n.rho;
      for (std::size_t k = rho.size() - 3; k + 1 < rho.size(); ++k) CHECK(rho[k + 1] <= rho[k] + 1e-10);
    }
    // at 40 cells per axis neighbouring band widths can cover the same cells
    CHECK(rep.certified_fraction >= previous);
    if (delta == 0.05) CHECK(rep.certified_fraction > first);
    if (delta == 0.2) first = rep.certified_fraction;
    previous = rep.certified_fraction;
    // uncertified area is the non-touch area up to one cell layer on each side of the band
    const double a = delta / std::sqrt(3.0);
    CHECK((1 - rep.certified_fraction) * 4.0 <= 8 * a - 4 * a * a + 8 * 2 * (2.0 / 40));
  }
}

TEST_CASE("scan output does not depend on the worker count") {
  const PCQFunction f = testing::l1_2d();
  AlexandrovReport a, b;
  {
    testing::ThreadCount t(1);
    a = alexandrov_scan(f, Box::cube(2, -1, 1), 0.1, 24);
  }
  {
    testing::ThreadCount t(4);
    b = alexandrov_scan(f, Box::cube(2, -1, 1), 0.1, 24);
  }
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].x == b.nodes[i].x);
    CHECK(a.nodes[i].classification == b.nodes[i].classification);
    CHECK(a.nodes[i].rho == b.nodes[i].rho);
  }
}
