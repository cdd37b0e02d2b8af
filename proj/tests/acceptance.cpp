// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "rollingball/alexandrov.hpp"
#include "rollingball/envelope.hpp"
#include "rollingball/glue.hpp"
#include "rollingball/morphology.hpp"
#include "support.hpp"

using namespace rollingball;
using testing::vec;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

template <typename Fn>
bool run(int id, const char* title, double budget_s, Fn&& fn) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < budget_s, "runtime " + std::to_string(secs) + " s over budget");
  std::printf("criterion %2d %s  %-44s %7.2f s  %s\n", id, out.pass ? "PASS" : "FAIL", title, secs,
              out.detail.str().c_str());
  std::fflush(stdout);
  return out.pass;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void projection_contraction(Outcome& out) {
  std::mt19937_64 rng(1001);
  double worst = -1e300;
  int pairs = 0;
  for (int p = 0; p < 20; ++p) {
    const int n = p < 10 ? 2 : 3;
    const HPolytope K = testing::random_polytope(rng, n);
    for (int k = 0; k < 500; ++k, ++pairs) {
      const Vector x = testing::random_in_box(rng, n, -3, 3), y = testing::random_in_box(rng, n, -3, 3);
      worst = std::max(worst, (project(K, x) - project(K, y)).norm() - (x - y).norm());
    }
  }
  out.require(pairs == 10000, "pair count");
  out.require(worst <= 1e-9, "max excess " + fmt(worst));
  out.detail << "pairs=" << pairs << " max(|Px-Py|-|x-y|)=" << fmt(worst);
}

void square_opening(Outcome& out) {
  const VPolygon square({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  const ContactDecomposition2D d = contact_set_2d(square, 0.25);
  const OpeningMeasures m = exact_opening_measures(square.to_hpolytope(), 0.25);
  out.require(std::abs(d.contact - 6.0) <= 1e-12 && std::abs(m.contact - 6.0) <= 1e-12,
              "contact " + fmt(d.contact));
  const double sym = 2.0 + M_PI / 2;
  out.require(std::abs(d.symmetric_difference - sym) <= 1e-12 && std::abs(m.symmetric_difference - sym) <= 1e-12,
              "symmetric difference " + fmt(d.symmetric_difference));
  const BoundaryEstimate mc = boundary_measure_mc(square.to_hpolytope(), 0.25, 1000000, 2024);
  const double z = std::abs(mc.estimate - m.lost) / mc.standard_error;
  out.require(z <= 3.0, "MC off by " + fmt(z) + " SE");
  out.detail << "contact=" << fmt(d.contact) << " symdiff=" << fmt(d.symmetric_difference)
             << " MC lost=" << fmt(mc.estimate) << " (exact 2, " << fmt(z) << " SE)";
}

void decay(Outcome& out) {
  std::mt19937_64 rng(1003);
  double worst_chain = -1e300, worst_final = 0.0;
  int first_below_max = 0;
  for (int p = 0; p < 10; ++p) {
    const VPolygon K = testing::random_polygon(rng, 12);
    const HPolytope H = K.to_hpolytope();
    const double inradius = chebyshev_center(H).radius;
    const double perimeter = K.perimeter();
    double previous = perimeter;
    int first_below = -1;
    for (int k = 0; k <= 12; ++k) {
      const double r = std::ldexp(1.0, -k);
      double lost = perimeter;
      if (r < inradius) {
        const ContactDecomposition2D d = contact_set_2d(K, r);
        lost = d.lost;
        const double lambda = lambda_factor(H, r).lambda;
        worst_chain = std::max(worst_chain, perimeter - lambda * d.contact);
      }
      out.require(lost <= previous + 1e-12, "polygon " + std::to_string(p) + " not monotone at k=" + std::to_string(k));
      previous = lost;
      if (first_below < 0 && lost < 0.01 * perimeter) first_below = k;
    }
    out.require(first_below >= 0, "polygon " + std::to_string(p) + " never below 1%");
    first_below_max = std::max(first_below_max, first_below);
    worst_final = std::max(worst_final, previous / perimeter);
  }
  out.require(worst_chain <= 1e-9, "chain inequality excess " + fmt(worst_chain));
  out.detail << "latest k below 1%=" << first_below_max << " worst lost/perimeter at k=12: " << fmt(worst_final)
             << " chain excess=" << fmt(worst_chain);
}

void normal_lipschitz(Outcome& out) {
  std::mt19937_64 rng(1005);
  double worst = -1e300;
  for (int p = 0; p < 5; ++p) {
    const VPolygon K = testing::random_polygon(rng, 10);
    const HPolytope H = K.to_hpolytope();
    const double r = 0.4 * chebyshev_center(H).radius;
    const ContactDecomposition2D d = contact_set_2d(K, r);
    const BallBody open = opening(H, r);
    const double L = d.opening_perimeter();
    std::uniform_real_distribution<double> S(0.0, L);
    for (int k = 0; k < 10000; ++k) {
      const Vector a = d.point_at(S(rng)), b = d.point_at(S(rng));
      const double lhs = (boundary_normal(open, a) - boundary_normal(open, b)).norm();
      worst = std::max(worst, lhs - (2.0 / r) * (a - b).norm());
    }
  }
  out.require(worst <= 1e-9, "max excess " + fmt(worst));
  out.detail << "pairs=50000 max(|dnu|-(2/r)|dp|)=" << fmt(worst);
}

void regularizer_closed_form(Outcome& out) {
  const PCQFunction f = testing::abs1();
  const RegularizedFunction g = regularize(f, 0.1, 2.0);
  const double g0 = g(vec({0.0}));
  out.require(std::abs(g0 - 0.1 * (std::sqrt(2.0) - 1)) <= 1e-8, "g(0)=" + fmt(g0));
  MeasureOptions opt;
  opt.resolution = 20000;  // step 1e-4 on [-1, 1]
  const MeasureEstimate m = disagreement_measure(g, Box::cube(1, -1, 1), opt);
  const double err = std::abs(m.measure - std::sqrt(2.0) * 0.1);
  out.require(err <= 1e-4, "disagreement off by " + fmt(err));
  std::mt19937_64 rng(1007);
  std::uniform_real_distribution<double> U(-1.9, 1.9);
  double worst = 1e300;
  for (int k = 0; k < 100000; ++k) {
    const Vector x = vec({U(rng)});
    worst = std::min(worst, g(x) - f(x));
  }
  out.require(worst >= 0.0, "g < f by " + fmt(-worst));
  out.detail << "g(0)=" << fmt(g0) << " measure=" << fmt(m.measure) << " min(g-f)=" << fmt(worst);
}

void lusin_sweep(Outcome& out) {
  std::mt19937_64 rng(1009);
  std::vector<Vector> slopes;
  std::vector<double> offsets;
  std::normal_distribution<double> N(0.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    slopes.push_back(vec({N(rng), N(rng)}));
    offsets.push_back(0.3 * N(rng));
  }
  const std::vector<std::pair<std::string, PCQFunction>> cases{
      {"|x|", testing::abs1()}, {"|x1|+|x2|", testing::l1_2d()}, {"max5", PCQFunction::max_affine(slopes, offsets)}};
  for (const auto& [name, f] : cases) {
    const int n = f.dimension();
    const Box region = Box::cube(n, -1, 1);
    const double epsilon = 1e-3 * region.volume();
    // A 2D grid fine enough for the k = 6 band (half-width ~0.0018) is too
    // slow, so 2D uses seeded Monte Carlo (one standard error ~2.4e-4).
    MeasureOptions opt;
    opt.resolution = 20000;
    if (n == 2) {
      opt.method = MeasureMethod::kMonteCarlo;
      opt.samples = 1000000;
      opt.seed = 1013;
    }
    double previous = std::numeric_limits<double>::infinity();
    int below = -1;
    std::ostringstream trail;
    for (int k = 0; k <= 6; ++k) {
      const double delta = 0.2 * std::ldexp(1.0, -k);
      const RegularizedFunction g = regularize(f, delta, (region.circumradius() + delta) * (1 + 1e-9));
      const double m = disagreement_measure(g, region, opt).measure;
      out.require(m <= previous, name + " increases at k=" + std::to_string(k));
      previous = m;
      if (below < 0 && m < epsilon) below = k;
      trail << (k ? "," : "") << fmt(m);
    }
    out.require(below >= 0, name + " stays above eps=" + fmt(epsilon) + " (k=6: " + fmt(previous) + ")");
    out.detail << " " << name << "=[" << trail.str() << "]";
  }
}

void smooth_max_and_extension(Outcome& out) {
  std::mt19937_64 rng(1011);
  std::uniform_real_distribution<double> U(-50, 50);
  int off_band = 0, exact = 0;
  for (int k = 0; k < 100000; ++k) {
    const double x = U(rng), y = U(rng);
    if (std::abs(x - y) >= 1.0) {
      ++off_band;
      exact += smooth_max(x, y) == std::max(x, y);
    } else {
      out.require(smooth_max(x, y) >= std::max(x, y), "smooth max below max");
    }
  }
  out.require(exact == off_band, "smooth max inexact off the band");

  Matrix Q(1, 1);
  Q << 2.0;
  const PCQFunction h = PCQFunction::quadratic(Q);
  const GluedFunction H = extend(h, 1.0, 2.0);
  int inner_bad = 0, outer_bad = 0, convex_bad = 0;
  for (int k = 0; k <= 10000; ++k) {
    const Vector x = vec({-1.0 + 2.0 * k / 10000});
    inner_bad += H(x) != h(x);
    const Vector y = vec({(H.rho + H.epsilon) * (1.0 + 2.0 * k / 10000) * (k % 2 ? 1 : -1)});
    outer_bad += H(y) != H.q(y);
  }
  std::uniform_real_distribution<double> V(-4, 4), T(0, 1);
  for (int k = 0; k < 100000; ++k) {
    const double a = V(rng), b = V(rng), t = T(rng);
    const Vector x = vec({a}), y = vec({b}), m = vec({(1 - t) * a + t * b});
    convex_bad += H(m) > (1 - t) * H(x) + t * H(y) + 1e-9;
  }
  out.require(inner_bad == 0, std::to_string(inner_bad) + " inner mismatches");
  out.require(outer_bad == 0, std::to_string(outer_bad) + " outer mismatches");
  out.require(convex_bad == 0, std::to_string(convex_bad) + " convexity violations");
  out.detail << "off-band pairs=" << off_band << " rho=" << fmt(H.rho) << " eps=" << fmt(H.epsilon)
             << " q_radius=" << fmt(H.q_radius);
}

void envelope(Outcome& out) {
  const auto build = [](int nodes) {
    std::vector<Vector> x;
    std::vector<double> phi;
    for (int i = 0; i < nodes; ++i) {
      const double t = -2.0 + 4.0 * i / (nodes - 1);
      x.push_back(vec({t}));
      phi.push_back(std::min(sq(t + 1), sq(t - 1)));
    }
    return std::make_pair(x, phi);
  };
  const auto [nodes, phi] = build(4001);
  const EnvelopeFunction F = convex_envelope(nodes, phi);
  out.require(std::abs(F(vec({0.0}))) <= 1e-6, "F(0)=" + fmt(F(vec({0.0}))));
  // On a line, convexity on every node triple is equivalent to non-decreasing
  // consecutive slopes.
  int bad = 0;
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    const double s0 = (F.F[i] - F.F[i - 1]) / (nodes[i](0) - nodes[i - 1](0));
    const double s1 = (F.F[i + 1] - F.F[i]) / (nodes[i + 1](0) - nodes[i](0));
    bad += s1 < s0 - 1e-9;
  }
  out.require(bad == 0, std::to_string(bad) + " non-convex triples");

  double worst = -1e300;
  for (int nodes_count : {4001, 8001}) {
    const auto [x, p] = build(nodes_count);
    const EnvelopeFunction G = convex_envelope(x, p);
    const auto phi_fn = [&](const Vector& v) { return std::min(sq(v(0) + 1), sq(v(0) - 1)); };
    const double step = 4.0 / (nodes_count - 1);
    double supF = -1e300, supPhi = -1e300;
    for (int m : {1, 2, 5, 10, 50, 200}) {
      const double hh = m * step;
      for (int i = m; i + m < nodes_count; i += 7) {
        supF = std::max(supF, second_difference(G, x[i], vec({hh})) / (hh * hh));
        supPhi = std::max(supPhi, second_difference(phi_fn, x[i], vec({hh})) / (hh * hh));
      }
    }
    worst = std::max(worst, supF - supPhi);
    out.detail << "nodes=" << nodes_count << " supE(F)/h2=" << fmt(supF) << " supE(phi)/h2=" << fmt(supPhi) << " ";
  }
  out.require(worst <= 1e-6, "second-difference excess " + fmt(worst));
}

void alexandrov(Outcome& out) {
  Matrix Q(2, 2);
  Q << 1.5, 0.4, 0.4, 0.8;
  const AlexandrovReport quad = alexandrov_scan(PCQFunction::quadratic(Q), Box::cube(2, -1, 1), 0.2, 20);
  double worst_D = 0.0;
  for (const AlexandrovNode& n : quad.nodes)
    if (n.classification == NodeClass::kCertified) worst_D = std::max(worst_D, (n.D - Q).cwiseAbs().maxCoeff());
  out.require(quad.certified == quad.nodes.size(), "quadratic certified " + fmt(quad.certified_fraction));
  out.require(worst_D <= 1e-5, "quadratic |D-Q| " + fmt(worst_D));

  const double delta = 0.05;
  const std::uint64_t N = 400;
  const double step = 2.0 / N;
  const AlexandrovReport abs = alexandrov_scan(testing::abs1(), Box::cube(1, -1, 1), delta, N);
  int stray = 0, slow = 0;
  for (const AlexandrovNode& n : abs.nodes) {
    if (n.classification != NodeClass::kCertified) {
      stray += std::abs(n.x(0)) >= delta / std::sqrt(2.0) + step;
      continue;
    }
    slow += !(n.rho.back() <= 0.1 * n.rho.front()) || !(n.tau.back() <= 0.1 * n.tau.front());
  }
  out.require(stray == 0, std::to_string(stray) + " uncertified nodes outside the gap");
  out.require(slow == 0, std::to_string(slow) + " certified nodes without tenfold decay");

  const PCQFunction relu = PCQFunction::max_affine({vec({0.0}), vec({1.0})}, {0.0, 0.0});
  double min_tau = 1e300;
  for (double sigma : {0.0, 0.5, 1.0})
    for (double d : {-1.0, 0.0, 1.0}) {
      Matrix D(1, 1);
      D << d;
      for (double t : subgradient_residual(relu, vec({0.0}), vec({sigma}), D, default_radii()))
        min_tau = std::min(min_tau, t);
    }
  out.require(min_tau >= 0.5, "kink tau " + fmt(min_tau));
  out.detail << "quadratic certified=" << quad.certified << "/" << quad.nodes.size() << " |D-Q|=" << fmt(worst_D)
             << " |x| certified=" << fmt(abs.certified_fraction) << " kink min tau=" << fmt(min_tau);
}

#ifndef RB_CLI_PATH
#error "RB_CLI_PATH must name the CLI binary"
#endif
#ifndef RB_DATA_DIR
#error "RB_DATA_DIR must name the test data directory"
#endif

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism(Outcome& out) {
  namespace fs = std::filesystem;
  const std::string cli = RB_CLI_PATH, data = RB_DATA_DIR;
  const fs::path dir = fs::temp_directory_path() / ("rb_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"body_open", "body open --input " + data + "/square.json --radius 0.25 --samples 200000 --seed 7 --svg {aux}"},
      {"body_measure", "body measure --input " + data + "/square.json --radius 0.1 --samples 200000 --seed 9"},
      {"func_regularize", "func regularize --input " + data + "/l1_2d.json --delta 0.1 --domain 2 --method mc "
                          "--samples 50000 --seed 11 --plot {aux}"},
      {"func_lusin", "func lusin --input " + data + "/abs.json --levels 5 --method mc --samples 20000 --seed 13"},
      {"func_extend", "func extend --input " + data + "/square_fn.json --r 1 --R 2"},
      {"envelope", "envelope --input " + data + "/double_well.csv --csv {aux}"},
      {"alexandrov_scan", "alexandrov scan --input " + data + "/l1_2d.json --delta 0.1 --grid 24 --csv {aux}"},
  };
  int compared = 0;
  for (const auto& [name, args] : commands) {
    std::string outputs[2][2];
    for (int w = 0; w < 2; ++w) {
      const std::string tag = name + (w ? "_4" : "_1");
      const fs::path report = dir / (tag + ".json"), aux = dir / (tag + ".aux");
      std::string a = args;
      if (const auto pos = a.find("{aux}"); pos != std::string::npos) a.replace(pos, 5, aux.string());
      const std::string cmd = "ROLLINGBALL_THREADS=" + std::string(w ? "4" : "1") + " " + cli + " " + a +
                              " --report " + report.string() + " 2>" + (dir / (tag + ".err")).string();
      const int rc = std::system(cmd.c_str());
      out.require(rc == 0, name + " exited with " + std::to_string(rc));
      outputs[w][0] = slurp(report);
      outputs[w][1] = fs::exists(aux) ? slurp(aux) : "";
    }
    out.require(!outputs[0][0].empty(), name + " wrote no report");
    out.require(outputs[0][0] == outputs[1][0], name + " report differs");
    out.require(outputs[0][1] == outputs[1][1], name + " derived output differs");
    ++compared;
  }
  fs::remove_all(dir);
  out.detail << compared << " commands byte-identical at 1 and 4 workers";
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run(1, "projection contraction", 10, projection_contraction);
  ok &= run(2, "square opening oracle", 30, square_opening);
  ok &= run(3, "lost boundary decay and chain inequality", 60, decay);
  ok &= run(4, "normal field Lipschitz bound", 30, normal_lipschitz);
  ok &= run(5, "regularizer closed form for |x|", 30, regularizer_closed_form);
  ok &= run(6, "Lusin sweep", 300, lusin_sweep);
  ok &= run(7, "smooth max and extension", 30, smooth_max_and_extension);
  ok &= run(8, "double-well envelope", 60, envelope);
  ok &= run(9, "Alexandrov certification", 120, alexandrov);
  ok &= run(10, "determinism across worker counts", 60, determinism);
  std::printf("%s\n", ok ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return ok ? 0 : 1;
}
