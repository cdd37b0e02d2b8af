#include "rollingball/commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rollingball/alexandrov.hpp"
#include "rollingball/envelope.hpp"
#include "rollingball/glue.hpp"
#include "rollingball/morphology.hpp"
#include "rollingball/solvers.hpp"

#ifndef ROLLINGBALL_VERSION
#define ROLLINGBALL_VERSION "0.0.0"
#endif

namespace rollingball {

using io::Json;

namespace {

class Config {
 public:
  explicit Config(const Json& j) : j_(j) {
    if (!j_.is_object()) fail(ErrorCode::kValidation, "config must be a JSON object", "$");
  }

  bool has(const char* key) const { return j_.contains(key) && !j_[key].is_null(); }

  double number(const char* key) const {
    if (!has(key)) fail(ErrorCode::kValidation, std::string("missing parameter '") + key + "'", key);
    const Json& v = j_[key];
    if (!v.is_number()) fail(ErrorCode::kValidation, "expected a number", key);
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ErrorCode::kValidation, "number is not finite", key);
    return d;
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::uint64_t count(const char* key) const {
    if (!has(key)) fail(ErrorCode::kValidation, std::string("missing parameter '") + key + "'", key);
    const Json& v = j_[key];
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0))
      fail(ErrorCode::kValidation, "expected a non-negative integer", key);
    return v.get<std::uint64_t>();
  }
  std::uint64_t count(const char* key, std::uint64_t fallback) const {
    return has(key) ? count(key) : fallback;
  }

  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_[key].is_boolean()) fail(ErrorCode::kValidation, "expected true or false", key);
    return j_[key].get<bool>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_[key].is_string()) fail(ErrorCode::kValidation, "expected a string", key);
    return j_[key].get<std::string>();
  }

  const Json& document(const char* key) const {
    if (!has(key)) fail(ErrorCode::kValidation, std::string("missing input '") + key + "'", key);
    return j_[key];
  }

  // Seed is mandatory whenever a random estimator runs.
  std::uint64_t seed() const {
    if (!has("seed")) fail(ErrorCode::kValidation, "a seed is required for sampling", "seed");
    return count("seed");
  }

 private:
  const Json& j_;
};

// Rewrites module errors so their field is prefixed with the input it came
// from (e.g. "body.halfspaces[2]").
template <typename Fn>
auto with_context(const char* input, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const bool own = e.field().empty() || e.field() == input;
    if (e.code() == ErrorCode::kParse || e.code() == ErrorCode::kValidation)
      throw Error(e.code(), e.what(), own ? std::string(input) : std::string(input) + "." + e.field());
    throw;
  }
}

Json vec_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Inline CSV grids are echoed by size and digest rather than verbatim.
Json echo_config(const Json& config) {
  Json out = config;
  if (out.contains("grid") && out["grid"].is_string()) {
    const std::string text = out["grid"].get<std::string>();
    out["grid"] = {{"bytes", text.size()}, {"fnv1a64", fnv1a64(text)}};
  }
  return out;
}

Json envelope_report(const std::string& command, const Json& config, Json tolerances, Json results) {
  return {{"command", command},
          {"version", ROLLINGBALL_VERSION},
          {"config", echo_config(config)},
          {"tolerances", std::move(tolerances)},
          {"results", std::move(results)}};
}

Json body_tolerances() {
  return {{"boundary_classification", kBoundaryClassificationTol},
          {"projection_feasibility", solvers::QpOptions{}.feasibility_tol},
          {"projection_max_iterations", solvers::QpOptions{}.max_iterations},
          {"degenerate_radius", 1e-10},
          {"normal_min_norm", 1e-14}};
}

Json function_tolerances() {
  return {{"disagreement", kDisagreementTol},
          {"active_set", kActiveTol},
          {"touch_relative", 1e-11},
          {"symmetry", 1e-12},
          {"psd", 1e-10},
          {"golden_iterations", 75}};
}

std::uint64_t default_grid(int n) { return n == 1 ? 20000 : n == 2 ? 1000 : 100; }

Box region_or_default(const Config& c, int n, const std::string& fallback) {
  const Box box = io::parse_region(c.text("region", fallback));
  if (box.dimension() != n)
    fail(ErrorCode::kValidation, "region dimension " + std::to_string(box.dimension()) +
                                     " differs from the function dimension " + std::to_string(n),
         "region");
  return box;
}

std::string cube_text(int n, double lo, double hi) {
  return "[" + io::format_double(lo) + "," + io::format_double(hi) + "]^" + std::to_string(n);
}

MeasureOptions measure_options(const Config& c, int n) {
  MeasureOptions m;
  const std::string method = c.text("method", "grid");
  if (method == "grid") {
    m.method = MeasureMethod::kGrid;
    m.resolution = c.count("grid", default_grid(n));
  } else if (method == "mc") {
    m.method = MeasureMethod::kMonteCarlo;
    m.samples = c.count("samples", 100000);
    m.seed = c.seed();
  } else {
    fail(ErrorCode::kValidation, "method must be 'grid' or 'mc'", "method");
  }
  return m;
}

// ---- body open / body measure ----

CommandOutput body_open(const Json& config) {
  const Config c(config);
  const ConvexBody body = with_context("body", [&] { return io::parse_body(c.document("body")); });
  const double r = c.number("radius");
  const std::uint64_t samples = c.count("samples", 100000);
  const HPolytope H = io::as_hpolytope(body);
  const int n = H.dimension();

  Json results;
  results["dimension"] = n;
  results["radius"] = r;
  results["inradius"] = H.chebyshev().radius;
  const LambdaFactor lambda = lambda_factor(H, r);
  results["lambda"] = lambda.lambda;
  results["translation"] = vec_json(lambda.translation);

  CommandOutput out;
  double lost = 0.0, gained = 0.0;
  if (n == 2) {
    const VPolygon poly =
        std::holds_alternative<VPolygon>(body) ? std::get<VPolygon>(body) : to_vpolygon(H);
    const ContactDecomposition2D d = contact_set_2d(poly, r);
    results["boundary"] = d.boundary;
    results["contact"] = d.contact;
    results["lost"] = d.lost;
    results["gained"] = d.gained;
    results["sym_diff"] = d.symmetric_difference;
    results["core_perimeter"] = d.contact;
    results["opening_perimeter"] = d.opening_perimeter();
    results["arcs"] = d.arcs.size();
    lost = d.lost;
    gained = d.gained;
    if (c.flag("svg", false)) {
      out.aux = io::opening_svg(poly, d);
      out.aux_kind = "svg";
    }
  } else if (n == 3) {
    const OpeningMeasures m = exact_opening_measures(H, r);
    results["boundary"] = m.boundary;
    results["contact"] = m.contact;
    results["lost"] = m.lost;
    results["gained"] = m.gained;
    results["sym_diff"] = m.symmetric_difference;
    lost = m.lost;
    gained = m.gained;
  } else {
    fail(ErrorCode::kValidation, "body open supports dimension 2 and 3", "body");
  }

  if (samples > 0) {
    const BoundaryEstimate e = boundary_measure_mc(H, r, samples, c.seed());
    results["mc"] = {{"lost_estimate", e.estimate},
                     {"standard_error", e.standard_error},
                     {"sym_diff_estimate", e.estimate + gained},
                     {"samples", e.samples},
                     {"misses", e.misses},
                     {"within_3se", std::abs(e.estimate - lost) <= 3.0 * e.standard_error}};
  }
  out.report = envelope_report("body open", config, body_tolerances(), results);
  return out;
}

CommandOutput body_measure(const Json& config) {
  const Config c(config);
  const ConvexBody body = with_context("body", [&] { return io::parse_body(c.document("body")); });
  const double r = c.number("radius");
  const HPolytope H = io::as_hpolytope(body);
  const BoundaryEstimate e = boundary_measure_mc(H, r, c.count("samples", 100000), c.seed());
  const OpeningMeasures exact = exact_opening_measures(H, r);
  Json results = {{"dimension", H.dimension()},
                  {"radius", r},
                  {"boundary", e.boundary},
                  {"lost_estimate", e.estimate},
                  {"standard_error", e.standard_error},
                  {"samples", e.samples},
                  {"misses", e.misses},
                  {"lost_exact", exact.lost}};
  results["z_score"] =
      e.standard_error > 0.0 ? (e.estimate - exact.lost) / e.standard_error : 0.0;
  return {envelope_report("body measure", config, body_tolerances(), results), {}, {}};
}

// ---- func regularize / lusin / extend ----

CommandOutput func_regularize(const Json& config) {
  const Config c(config);
  const PCQFunction f =
      with_context("function", [&] { return io::parse_function(c.document("function")); });
  const int n = f.dimension();
  const double delta = c.number("delta");
  const double R = c.number("domain");
  if (!(R > delta)) fail(ErrorCode::kValidation, "domain must exceed delta", "domain");
  const double half = (R - delta) / std::sqrt(static_cast<double>(n));
  const Box region = region_or_default(c, n, cube_text(n, -half, half));
  if (region.circumradius() + delta > R * (1.0 + 1e-12))
    fail(ErrorCode::kDomainExceeded, "region reaches beyond the domain radius minus delta",
         "region");
  const RegularizedFunction g = regularize(f, delta, R);
  const MeasureEstimate m = disagreement_measure(g, region, measure_options(c, n));

  Json results;
  results["dimension"] = n;
  results["delta"] = delta;
  results["domain"] = R;
  results["region"] = io::region_to_json(region);
  results["region_volume"] = region.volume();
  results["disagreement"] = m.measure;
  results["disagreement_error"] = m.error;
  results["points"] = m.points;
  results["flagged"] = m.flagged;
  const Vector center = 0.5 * (region.lower + region.upper);
  const RegularizedPoint pc = g.evaluate(center);
  results["center"] = {{"x", vec_json(center)},
                       {"f", f(center)},
                       {"erosion", g.erosion(center)},
                       {"g", pc.value},
                       {"gradient", vec_json(pc.gradient)},
                       {"touch", pc.touch}};

  CommandOutput out;
  const bool plot = c.flag("plot", false);
  if (n == 1) {
    constexpr int kRows = 21;
    Json table = Json::array();
    std::vector<io::CurveSample> curve;
    const int count = plot ? 401 : kRows;
    for (int i = 0; i < count; ++i) {
      Vector x(1);
      x(0) = region.lower(0) + (region.upper(0) - region.lower(0)) * i / (count - 1);
      const RegularizedPoint p = g.evaluate(x);
      const double e = g.erosion(x);
      curve.push_back({x(0), f(x), e, p.value, p.touch});
      if (!plot || i % 20 == 0)
        table.push_back({{"x", x(0)}, {"f", f(x)}, {"erosion", e}, {"g", p.value},
                         {"gradient", p.gradient(0)}, {"touch", p.touch}});
    }
    results["table"] = table;
    if (plot) {
      out.aux = io::function_svg_1d(curve, delta);
      out.aux_kind = "svg";
    }
  } else if (n == 2 && plot) {
    constexpr std::size_t kCells = 100;
    std::vector<io::TouchCell> cells(kCells * kCells);
    const Vector step = (region.upper - region.lower) / static_cast<double>(kCells);
    parallel_for(cells.size(), [&](std::size_t i) {
      Vector x(2);
      x << region.lower(0) + (static_cast<double>(i % kCells) + 0.5) * step(0),
          region.lower(1) + (static_cast<double>(i / kCells) + 0.5) * step(1);
      const RegularizedPoint p = g.evaluate(x);
      cells[i] = {x, p.touch || p.value - f(x) <= kDisagreementTol};
    });
    out.aux = io::touch_map_svg_2d(region, kCells, cells, delta);
    out.aux_kind = "svg";
  }
  out.report = envelope_report("func regularize", config, function_tolerances(), results);
  return out;
}

CommandOutput func_lusin(const Json& config) {
  const Config c(config);
  const PCQFunction f =
      with_context("function", [&] { return io::parse_function(c.document("function")); });
  const int n = f.dimension();
  const Box region = region_or_default(c, n, cube_text(n, -1.0, 1.0));
  const double delta0 = c.number("delta0", 0.2);
  const std::uint64_t levels = c.count("levels", 7);
  const double epsilon = c.number("epsilon", 1e-3 * region.volume());
  if (!(delta0 > 0.0)) fail(ErrorCode::kValidation, "delta0 must be positive", "delta0");
  if (levels == 0 || levels > 30) fail(ErrorCode::kValidation, "levels must be 1 to 30", "levels");
  const MeasureOptions options = measure_options(c, n);

  Json sweep = Json::array();
  bool monotone = true;
  Json first_below = nullptr;
  double previous = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < levels; ++k) {
    const double delta = delta0 * std::ldexp(1.0, -static_cast<int>(k));
    const RegularizedFunction g =
        regularize(f, delta, (region.circumradius() + delta) * (1.0 + 1e-9));
    const MeasureEstimate m = disagreement_measure(g, region, options);
    sweep.push_back({{"k", k}, {"delta", delta}, {"measure", m.measure}, {"error", m.error},
                     {"flagged", m.flagged}});
    if (m.measure > previous) monotone = false;
    previous = m.measure;
    if (first_below.is_null() && m.measure < epsilon) first_below = k;
  }
  Json results = {{"dimension", n},
                  {"region", io::region_to_json(region)},
                  {"region_volume", region.volume()},
                  {"epsilon", epsilon},
                  {"sweep", sweep},
                  {"monotone", monotone},
                  {"first_level_below_epsilon", first_below}};
  return {envelope_report("func lusin", config, function_tolerances(), results), {}, {}};
}

CommandOutput func_extend(const Json& config) {
  const Config c(config);
  const PCQFunction f =
      with_context("function", [&] { return io::parse_function(c.document("function")); });
  const double r = c.number("r");
  const double R = c.number("R");
  const GluedFunction H = extend(f, r, R);
  const int n = f.dimension();

  // Probe the identities along rays: H = h inside r, H = q beyond q_radius.
  double inner_gap = 0.0, outer_gap = 0.0;
  const int rays = n == 1 ? 2 : 16;
  for (int i = 0; i < rays; ++i) {
    Vector d = Vector::Zero(n);
    if (n == 1) {
      d(0) = i == 0 ? 1.0 : -1.0;
    } else {
      const double t = 2.0 * M_PI * i / rays;
      d(0) = std::cos(t);
      d(1) = std::sin(t);
    }
    for (int s = 0; s <= 100; ++s) {
      const Vector x = (r * s / 100.0) * d;
      inner_gap = std::max(inner_gap, std::abs(H(x) - f(x)));
      const Vector y = (H.q_radius + (2.0 * R - H.q_radius) * s / 100.0) * d;
      outer_gap = std::max(outer_gap, std::abs(H(y) - H.q(y)));
    }
  }
  Json results = {{"dimension", n},    {"r", r},         {"R", R},
                  {"rho", H.rho},      {"m", H.m},       {"M", H.M},
                  {"a", H.a},          {"b", H.b},       {"margin", H.margin},
                  {"epsilon", H.epsilon}, {"q_radius", H.q_radius},
                  {"inner_identity_gap", inner_gap}, {"outer_identity_gap", outer_gap}};
  Json tolerances = {{"margin", H.margin}, {"bisection_steps", 60}, {"radial_scan", 64},
                     {"golden_iterations", 75}};
  return {envelope_report("func extend", config, tolerances, results), {}, {}};
}

// ---- envelope ----

CommandOutput envelope_command(const Json& config) {
  const Config c(config);
  const Json& grid = c.document("grid");
  if (!grid.is_string()) fail(ErrorCode::kValidation, "grid must be CSV text", "grid");
  const io::NodeTable table =
      with_context("grid", [&] { return io::parse_node_csv(grid.get<std::string>()); });
  const EnvelopeFunction E = convex_envelope(table.nodes, table.values);

  std::ostringstream csv;
  csv << (E.dimension == 1 ? "x" : "x,y") << ",phi,F,hull_vertex\n";
  double max_gap = 0.0;
  std::size_t hull_vertices = 0;
  for (std::size_t i = 0; i < E.nodes.size(); ++i) {
    for (Eigen::Index j = 0; j < E.nodes[i].size(); ++j) csv << io::format_double(E.nodes[i](j)) << ',';
    csv << io::format_double(E.phi[i]) << ',' << io::format_double(E.F[i]) << ','
        << (E.hull_vertex[i] ? 1 : 0) << '\n';
    max_gap = std::max(max_gap, E.phi[i] - E.F[i]);
    if (E.hull_vertex[i]) ++hull_vertices;
  }
  Json results = {{"dimension", E.dimension},
                  {"nodes", E.nodes.size()},
                  {"hull_vertices", hull_vertices},
                  {"facets", E.facets.size()},
                  {"max_phi_minus_F", max_gap},
                  {"lower", vec_json(E.lower)},
                  {"upper", vec_json(E.upper)}};
  Json tolerances = {{"coplanarity_relative", 1e-12}};
  return {envelope_report("envelope", config, tolerances, results), csv.str(), "csv"};
}

// ---- alexandrov scan ----

CommandOutput alexandrov_command(const Json& config) {
  const Config c(config);
  const PCQFunction f =
      with_context("function", [&] { return io::parse_function(c.document("function")); });
  const int n = f.dimension();
  const double delta = c.number("delta");
  const Box region = region_or_default(c, n, cube_text(n, -1.0, 1.0));
  const std::uint64_t grid = c.count("grid", n == 3 ? 40 : 200);
  AlexandrovOptions options;
  if (c.has("radii")) {
    const Json& rs = c.document("radii");
    if (!rs.is_array()) fail(ErrorCode::kValidation, "radii must be a list", "radii");
    options.radii.clear();
    for (const auto& v : rs) {
      if (!v.is_number()) fail(ErrorCode::kValidation, "radii must be numbers", "radii");
      options.radii.push_back(v.get<double>());
    }
  }
  options.step = c.number("step", options.step);
  options.rule.decay = c.number("decay", options.rule.decay);
  options.rule.floor = c.number("floor", options.rule.floor);

  const AlexandrovReport rep = alexandrov_scan(f, region, delta, grid, options);
  MeasureOptions mo;
  mo.resolution = grid;
  const MeasureEstimate dis = disagreement_measure(
      regularize(f, delta, (region.circumradius() + delta) * (1.0 + 1e-9)), region, mo);

  std::uint64_t both_decay = 0;
  double max_asym = 0.0;
  Json flagged = Json::array();
  for (std::size_t i = 0; i < rep.nodes.size(); ++i) {
    const AlexandrovNode& node = rep.nodes[i];
    if (node.classification == NodeClass::kCertified) {
      if (node.subgradient_pass) ++both_decay;
      max_asym = std::max(max_asym, (node.D - node.D.transpose()).cwiseAbs().maxCoeff());
    } else if (flagged.size() < 50) {
      flagged.push_back({{"index", i}, {"x", vec_json(node.x)},
                         {"class", node_class_name(node.classification)}, {"note", node.note}});
    }
  }
  const double volume = region.volume();
  Json results = {{"dimension", n},
                  {"delta", delta},
                  {"region", io::region_to_json(region)},
                  {"grid", grid},
                  {"nodes", rep.nodes.size()},
                  {"touch", rep.touch},
                  {"certified", rep.certified},
                  {"kinks", rep.kinks},
                  {"inconclusive", rep.inconclusive},
                  {"certified_fraction", rep.certified_fraction},
                  {"certified_with_subgradient_decay", both_decay},
                  {"non_touch_measure", rep.non_touch_measure},
                  {"disagreement", dis.measure},
                  {"disagreement_error", dis.error},
                  {"uncertified_measure", (1.0 - rep.certified_fraction) * volume},
                  {"max_hessian_asymmetry", max_asym},
                  {"radii", rep.radii},
                  {"first_uncertified", flagged}};
  Json tolerances = function_tolerances();
  tolerances["hessian_step"] = options.step;
  tolerances["richardson_below_delta"] = 1e-2;
  tolerances["decay"] = options.rule.decay;
  tolerances["floor"] = options.rule.floor;

  CommandOutput out;
  out.report = envelope_report("alexandrov scan", config, tolerances, results);
  if (c.flag("csv", false)) {
    std::ostringstream csv;
    csv << "index";
    for (int j = 0; j < n; ++j) csv << ",x" << j;
    csv << ",class,touch";
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) csv << ",D" << a << b;
    for (std::size_t k = 0; k < rep.radii.size(); ++k) csv << ",rho" << k;
    for (std::size_t k = 0; k < rep.radii.size(); ++k) csv << ",tau" << k;
    csv << '\n';
    for (std::size_t i = 0; i < rep.nodes.size(); ++i) {
      const AlexandrovNode& node = rep.nodes[i];
      csv << i;
      for (int j = 0; j < n; ++j) csv << ',' << io::format_double(node.x(j));
      csv << ',' << node_class_name(node.classification) << ',' << (node.touch ? 1 : 0);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          csv << ',' << (node.D.size() ? io::format_double(node.D(a, b)) : "");
      for (std::size_t k = 0; k < rep.radii.size(); ++k)
        csv << ',' << (k < node.rho.size() ? io::format_double(node.rho[k]) : "");
      for (std::size_t k = 0; k < rep.radii.size(); ++k)
        csv << ',' << (k < node.tau.size() ? io::format_double(node.tau[k]) : "");
      csv << '\n';
    }
    out.aux = csv.str();
    out.aux_kind = "csv";
  }
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"body open",   "body measure",    "func regularize",
                                              "func lusin",  "func extend",     "envelope",
                                              "alexandrov scan"};
  return names;
}

CommandOutput run_command(const std::string& command, const Json& config) {
  if (command == "body open") return body_open(config);
  if (command == "body measure") return body_measure(config);
  if (command == "func regularize") return func_regularize(config);
  if (command == "func lusin") return func_lusin(config);
  if (command == "func extend") return func_extend(config);
  if (command == "envelope") return envelope_command(config);
  if (command == "alexandrov scan") return alexandrov_command(config);
  fail(ErrorCode::kValidation, "unknown command '" + command + "'", "command");
}

}  // namespace rollingball
