#include "rollingball/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rollingball {

HPolytope inner_parallel(const HPolytope& body, double r) { return offset_halfspaces(body, r); }

Ball inner_parallel(const Ball& body, double r) {
  if (!(r > 0.0)) fail(ErrorCode::kInvalidArgument, "radius must be positive", "radius");
  if (r >= body.radius)
    fail(ErrorCode::kDegenerateBody, "inner parallel ball has empty interior", "radius");
  return Ball(body.center, body.radius - r);
}

BallBody opening(const HPolytope& body, double r) { return BallBody(inner_parallel(body, r), r); }

BallBody opening(const Ball& body, double r) {
  if (!(r > 0.0)) fail(ErrorCode::kInvalidArgument, "radius must be positive", "radius");
  if (r > body.radius)
    fail(ErrorCode::kDegenerateBody, "no ball of this radius fits in the body", "radius");
  // r == radius leaves the single-point core {center}.
  return BallBody(Ball(body.center, body.radius - r), r);
}

Vector boundary_normal(const BallBody& body, const Vector& p, double tol) {
  const Vector c = project(body.core(), p);
  const double d = (p - c).norm();
  if (std::abs(d - body.radius()) > tol)
    fail(ErrorCode::kNotOnBoundary,
         "point is at distance " + std::to_string(d) + " from the core, expected the rolling radius",
         "point");
  return (c - p) / body.radius();
}

LambdaFactor lambda_factor(const HPolytope& body, double r) {
  const Vector shift = -body.chebyshev().center;
  const HPolytope centered = body.translated(shift);
  const HPolytope core = inner_parallel(centered, r);
  // K subset lambda K_r iff every vertex v of K has gauge_{K_r}(v) <= lambda.
  double lambda = 0.0;
  for (const Vector& v : vertices(centered)) {
    const Vector ratios = (core.normals() * v).cwiseQuotient(core.offsets());
    lambda = std::max(lambda, ratios.maxCoeff());
  }
  return {lambda, shift};
}

LambdaFactor lambda_factor(const Ball& body, double r) {
  const Ball core = inner_parallel(body, r);
  return {body.radius / core.radius, -body.center};
}

Eigen::Vector2d ContactDecomposition2D::point_at(double s) const {
  const double total = contact + gained;
  s = std::fmod(s, total);
  if (s < 0.0) s += total;
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const ContactArc& arc = arcs[k];
    if (s <= arc.length()) {
      const double angle = arc.start_angle + s / arc.radius;
      return arc.center + arc.radius * Eigen::Vector2d(std::cos(angle), std::sin(angle));
    }
    s -= arc.length();
    const ContactSegment& seg = segments[k];
    if (s <= seg.length) {
      return seg.length > 0.0 ? Eigen::Vector2d(seg.start + (s / seg.length) * (seg.end - seg.start))
                              : seg.start;
    }
    s -= seg.length;
  }
  return segments.back().end;
}

ContactDecomposition2D contact_set_2d(const VPolygon& polygon, double r) {
  const HPolytope body = polygon.to_hpolytope();
  const HPolytope core = inner_parallel(body, r);
  const std::vector<Vector> cv = vertices(core);
  const std::size_t m = cv.size();

  ContactDecomposition2D out;
  out.radius = r;
  for (const Vector& v : cv) out.core_vertices.emplace_back(v(0), v(1));

  auto edge_normal = [&](std::size_t k) {
    const Eigen::Vector2d e = out.core_vertices[(k + 1) % m] - out.core_vertices[k];
    return Eigen::Vector2d(e.y(), -e.x()).normalized();
  };
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::Vector2d n_in = edge_normal((k + m - 1) % m);
    const Eigen::Vector2d n_out = edge_normal(k);
    const double a0 = std::atan2(n_in.y(), n_in.x());
    double sweep = std::atan2(n_out.y(), n_out.x()) - a0;
    while (sweep < 0.0) sweep += 2.0 * M_PI;
    while (sweep >= 2.0 * M_PI) sweep -= 2.0 * M_PI;
    out.arcs.push_back({out.core_vertices[k], r, a0, sweep});

    const Eigen::Vector2d shift = r * n_out;
    ContactSegment seg{out.core_vertices[k] + shift, out.core_vertices[(k + 1) % m] + shift, 0.0};
    seg.length = (seg.end - seg.start).norm();
    out.segments.push_back(seg);
  }

  out.boundary = polygon.perimeter();
  out.contact = 0.0;
  for (const auto& seg : out.segments) out.contact += seg.length;
  out.gained = 0.0;
  for (const auto& arc : out.arcs) out.gained += arc.length();
  out.lost = out.boundary - out.contact;
  out.symmetric_difference = out.lost + out.gained;
  return out;
}

OpeningMeasures exact_opening_measures(const HPolytope& body, double r) {
  const int n = body.dimension();
  if (n != 2 && n != 3)
    fail(ErrorCode::kInvalidArgument, "exact measures support dimension 2 and 3", "dimension");
  const HPolytope core = inner_parallel(body, r);
  OpeningMeasures m;
  m.boundary = boundary_measure(body);
  m.contact = boundary_measure(core);
  m.lost = m.boundary - m.contact;
  m.gained = n == 2 ? 2.0 * M_PI * r : r * edge_angle_sum(core) + 4.0 * M_PI * r * r;
  m.symmetric_difference = m.lost + m.gained;
  return m;
}

namespace {

struct FacetSampler {
  std::vector<Facet> facets;
  std::vector<double> facet_cdf;
  std::vector<std::vector<double>> triangle_cdf;  // 3D fan triangles per facet
  double total = 0.0;

  explicit FacetSampler(const HPolytope& body) : facets(rollingball::facets(body)) {
    for (const Facet& f : facets) {
      total += f.measure;
      facet_cdf.push_back(total);
      std::vector<double> tri;
      if (body.dimension() == 3) {
        double acc = 0.0;
        for (std::size_t k = 1; k + 1 < f.vertices.size(); ++k) {
          const Eigen::Vector3d u = f.vertices[k] - f.vertices[0];
          const Eigen::Vector3d w = f.vertices[k + 1] - f.vertices[0];
          acc += 0.5 * u.cross(w).norm();
          tri.push_back(acc);
        }
      }
      triangle_cdf.push_back(std::move(tri));
    }
  }

  static std::size_t pick(const std::vector<double>& cdf, double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
  }

  Vector draw(CounterRng& rng) const {
    const Facet& f = facets[pick(facet_cdf, rng.uniform())];
    if (f.vertices.size() == 2 && f.vertices[0].size() == 2) {
      const double t = rng.uniform();
      return f.vertices[0] + t * (f.vertices[1] - f.vertices[0]);
    }
    const auto& tri = triangle_cdf[&f - facets.data()];
    const std::size_t k = pick(tri, rng.uniform()) + 1;
    double s = std::sqrt(rng.uniform());
    double t = rng.uniform();
    const Vector& a = f.vertices[0];
    const Vector& b = f.vertices[k];
    const Vector& c = f.vertices[k + 1];
    return (1.0 - s) * a + s * ((1.0 - t) * b + t * c);
  }
};

}  // namespace

BoundaryEstimate boundary_measure_mc(const HPolytope& body, double r, std::uint64_t samples,
                                     std::uint64_t seed) {
  if (samples == 0) fail(ErrorCode::kInvalidSampleCount, "sample count must be >= 1", "samples");
  const int n = body.dimension();
  if (n != 2 && n != 3)
    fail(ErrorCode::kInvalidArgument, "boundary sampling supports dimension 2 and 3", "dimension");
  const HPolytope core = inner_parallel(body, r);
  const FacetSampler sampler(body);

  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::uint64_t> misses(blocks, 0);
  parallel_for(blocks, [&](std::size_t block) {
    const std::uint64_t begin = block * kBlock;
    const std::uint64_t end = std::min(samples, begin + kBlock);
    std::uint64_t local = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      const Vector x = sampler.draw(rng);
      const double d = (x - project(core, x)).norm();
      if (d > r + kBoundaryClassificationTol) ++local;
    }
    misses[block] = local;
  });

  BoundaryEstimate out;
  out.samples = samples;
  out.misses = std::accumulate(misses.begin(), misses.end(), std::uint64_t{0});
  out.boundary = sampler.total;
  const double p = static_cast<double>(out.misses) / static_cast<double>(samples);
  out.estimate = p * sampler.total;
  out.standard_error = sampler.total * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return out;
}

}  // namespace rollingball
