#include "rollingball/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace rollingball {

bool EnvelopeFunction::contains(const Vector& x) const {
  if (x.size() != dimension) return false;
  const double slack = 1e-12 * (1.0 + (upper - lower).cwiseAbs().maxCoeff());
  return ((x - lower).array() >= -slack).all() && ((upper - x).array() >= -slack).all();
}

double EnvelopeFunction::operator()(const Vector& x) const {
  if (!contains(x))
    fail(ErrorCode::kDomainExceeded, "point lies outside the envelope's node box", "x");
  if (dimension == 1) {
    // Facets are sorted left to right in 1D.
    const double t = x(0);
    auto it = std::lower_bound(facets.begin(), facets.end(), t, [&](const auto& f, double v) {
      return nodes[f[1]](0) < v;
    });
    if (it == facets.end()) --it;
    const std::size_t k = static_cast<std::size_t>(it - facets.begin());
    return slopes[k](0) * t + intercepts[k];
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < facets.size(); ++k)
    best = std::max(best, slopes[k].dot(x) + intercepts[k]);
  return best;
}

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

void envelope_1d(EnvelopeFunction& E) {
  const std::size_t N = E.nodes.size();
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const double xi = E.nodes[i](0), xj = E.nodes[j](0);
    return xi < xj || (xi == xj && (E.phi[i] < E.phi[j] || (E.phi[i] == E.phi[j] && i < j)));
  });
  std::vector<std::size_t> hull;
  for (std::size_t idx : order) {
    if (!hull.empty() && E.nodes[hull.back()](0) == E.nodes[idx](0)) continue;  // keep lowest
    const Eigen::Vector2d p(E.nodes[idx](0), E.phi[idx]);
    while (hull.size() >= 2) {
      const Eigen::Vector2d a(E.nodes[hull[hull.size() - 2]](0), E.phi[hull[hull.size() - 2]]);
      const Eigen::Vector2d b(E.nodes[hull.back()](0), E.phi[hull.back()]);
      if (cross2(a, b, p) <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(idx);
  }
  if (hull.size() < 2)
    fail(ErrorCode::kDegenerateGrid, "envelope needs at least two distinct abscissae", "nodes");
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    const std::size_t i = hull[k], j = hull[k + 1];
    const double slope = (E.phi[j] - E.phi[i]) / (E.nodes[j](0) - E.nodes[i](0));
    E.facets.push_back({i, j, j});
    E.slopes.push_back(Vector::Constant(1, slope));
    E.intercepts.push_back(E.phi[i] - slope * E.nodes[i](0));
  }
  for (std::size_t h : hull) E.hull_vertex[h] = true;
  for (std::size_t i = 0; i < N; ++i) E.F[i] = std::min(E.phi[i], E(E.nodes[i]));
}

struct Face {
  std::array<std::size_t, 3> v;
  Eigen::Vector3d normal;
  double offset;
  bool alive;
};

void envelope_2d(EnvelopeFunction& E) {
  const std::size_t N = E.nodes.size();
  std::vector<Eigen::Vector3d> P(N);
  double scale = 1.0;
  for (std::size_t i = 0; i < N; ++i) {
    P[i] = Eigen::Vector3d(E.nodes[i](0), E.nodes[i](1), E.phi[i]);
    scale = std::max(scale, P[i].cwiseAbs().maxCoeff());
  }
  const double eps = 1e-12 * scale;

  // Initial simplex from extreme points.
  const std::size_t i0 = 0;
  std::size_t i1 = i0, i2 = i0, i3 = i0;
  double best = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    if ((P[i] - P[i0]).norm() > best) best = (P[i] - P[i0]).norm(), i1 = i;
  best = 0.0;
  const Eigen::Vector3d axis = (P[i1] - P[i0]).normalized();
  for (std::size_t i = 0; i < N; ++i) {
    const double d = (P[i] - P[i0]).cross(axis).norm();
    if (d > best) best = d, i2 = i;
  }
  auto xy_collinear = [&]() {
    const Eigen::Vector2d o = E.nodes[i0].head<2>();
    double far = 0.0;
    std::size_t j = i0;
    for (std::size_t i = 0; i < N; ++i)
      if ((E.nodes[i].head<2>() - o).norm() > far) far = (E.nodes[i].head<2>() - o).norm(), j = i;
    if (far <= eps) return true;
    const Eigen::Vector2d dir = (E.nodes[j].head<2>() - o) / far;
    for (std::size_t i = 0; i < N; ++i) {
      const Eigen::Vector2d w = E.nodes[i].head<2>() - o;
      if (std::abs(dir.x() * w.y() - dir.y() * w.x()) > eps) return false;
    }
    return true;
  };
  if (best <= eps) fail(ErrorCode::kDegenerateGrid, "lifted nodes are collinear", "nodes");
  const Eigen::Vector3d base_normal = (P[i1] - P[i0]).cross(P[i2] - P[i0]).normalized();
  best = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double d = std::abs(base_normal.dot(P[i] - P[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps) {
    if (xy_collinear()) fail(ErrorCode::kDegenerateGrid, "nodes are collinear", "nodes");
    // Lifted nodes coplanar: phi is affine and is its own envelope.
    const Eigen::Vector3d n = base_normal.z() < 0.0 ? base_normal : Eigen::Vector3d(-base_normal);
    E.facets.push_back({i0, i1, i2});
    Vector slope(2);
    slope << -n.x() / n.z(), -n.y() / n.z();
    E.slopes.push_back(slope);
    E.intercepts.push_back(n.dot(P[i0]) / n.z());
    std::fill(E.hull_vertex.begin(), E.hull_vertex.end(), true);
    for (std::size_t i = 0; i < N; ++i) E.F[i] = std::min(E.phi[i], E(E.nodes[i]));
    return;
  }
  if (xy_collinear()) fail(ErrorCode::kDegenerateGrid, "nodes are collinear", "nodes");

  std::vector<Face> faces;
  const Eigen::Vector3d inside = 0.25 * (P[i0] + P[i1] + P[i2] + P[i3]);
  auto make_face = [&](std::size_t a, std::size_t b, std::size_t c) {
    Face f{{a, b, c}, (P[b] - P[a]).cross(P[c] - P[a]), 0.0, true};
    const double len = f.normal.norm();
    if (len > 0.0) f.normal /= len;
    f.offset = f.normal.dot(P[a]);
    return f;
  };
  for (const auto& t : std::array<std::array<std::size_t, 4>, 4>{
           {{i0, i1, i2, i3}, {i0, i1, i3, i2}, {i0, i2, i3, i1}, {i1, i2, i3, i0}}}) {
    Face f = make_face(t[0], t[1], t[2]);
    if (f.normal.dot(inside) - f.offset > 0.0) f = make_face(t[0], t[2], t[1]);
    faces.push_back(f);
  }

  // Insertion order: a fixed pseudo-random permutation keeps the expected
  // number of visible faces per step small.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < N; ++i)
    if (i != i0 && i != i1 && i != i2 && i != i3) order.push_back(i);
  CounterRng rng(0x656e76656c6f7065ULL, N);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.next_u64() % i]);

  std::unordered_set<std::uint64_t> edges;
  std::vector<std::size_t> visible;
  std::size_t dead = 0;
  for (std::size_t p : order) {
    visible.clear();
    for (std::size_t k = 0; k < faces.size(); ++k)
      if (faces[k].alive && faces[k].normal.dot(P[p]) - faces[k].offset > eps) visible.push_back(k);
    if (visible.empty()) continue;
    edges.clear();
    for (std::size_t k : visible)
      for (int e = 0; e < 3; ++e)
        edges.insert(static_cast<std::uint64_t>(faces[k].v[e]) * N + faces[k].v[(e + 1) % 3]);
    for (std::size_t k : visible) {
      faces[k].alive = false;
      ++dead;
    }
    for (std::size_t k : visible) {
      const auto v = faces[k].v;
      for (int e = 0; e < 3; ++e) {
        const std::size_t u = v[e], w = v[(e + 1) % 3];
        if (edges.count(static_cast<std::uint64_t>(w) * N + u)) continue;
        faces.push_back(make_face(u, w, p));
      }
    }
    if (dead > faces.size() / 2) {
      faces.erase(std::remove_if(faces.begin(), faces.end(), [](const Face& f) { return !f.alive; }),
                  faces.end());
      dead = 0;
    }
  }

  for (const Face& f : faces) {
    if (!f.alive || !(f.normal.z() < -1e-12)) continue;
    E.facets.push_back(f.v);
    Vector slope(2);
    slope << -f.normal.x() / f.normal.z(), -f.normal.y() / f.normal.z();
    E.slopes.push_back(slope);
    E.intercepts.push_back(f.offset / f.normal.z());
    for (std::size_t v : f.v) E.hull_vertex[v] = true;
  }
  parallel_for(N, [&](std::size_t i) { E.F[i] = std::min(E.phi[i], E(E.nodes[i])); });
}

}  // namespace

EnvelopeFunction convex_envelope(const std::vector<Vector>& nodes, const std::vector<double>& values) {
  if (nodes.size() != values.size())
    fail(ErrorCode::kInvalidArgument, "node and value counts differ", "nodes");
  if (nodes.empty()) fail(ErrorCode::kDegenerateGrid, "envelope needs nodes", "nodes");
  EnvelopeFunction E;
  E.dimension = static_cast<int>(nodes.front().size());
  if (E.dimension != 1 && E.dimension != 2)
    fail(ErrorCode::kInvalidArgument, "envelopes are computed in dimension 1 and 2", "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].size() != E.dimension || !nodes[i].allFinite())
      fail(ErrorCode::kValidation, "node " + std::to_string(i) + " is malformed",
           "nodes[" + std::to_string(i) + "]");
    if (!std::isfinite(values[i]))
      fail(ErrorCode::kValidation, "value at node " + std::to_string(i) + " is not finite",
           "phi[" + std::to_string(i) + "]");
  }
  E.nodes = nodes;
  E.phi = values;
  E.F.assign(nodes.size(), 0.0);
  E.hull_vertex.assign(nodes.size(), false);
  E.lower = nodes.front();
  E.upper = nodes.front();
  for (const Vector& v : nodes) {
    E.lower = E.lower.cwiseMin(v);
    E.upper = E.upper.cwiseMax(v);
  }
  if (E.dimension == 1)
    envelope_1d(E);
  else
    envelope_2d(E);
  return E;
}

double second_difference(const std::function<double(const Vector&)>& F, const Vector& x,
                         const Vector& h) {
  return F(x + h) + F(x - h) - 2.0 * F(x);
}

double second_difference(const EnvelopeFunction& F, const Vector& x, const Vector& h) {
  if (!F.contains(x + h) || !F.contains(x - h))
    fail(ErrorCode::kDomainExceeded, "x +- h leaves the envelope's node box", "h");
  return F(x + h) + F(x - h) - 2.0 * F(x);
}

}  // namespace rollingball
