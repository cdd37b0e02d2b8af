#include "rollingball/io.hpp"

#include <charconv>
#include <cmath>
#include <regex>
#include <sstream>

namespace rollingball::io {

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParse, what + " is not valid JSON: " + e.what(), what);
  }
}

namespace {

double number_at(const Json& j, const std::string& field) {
  if (!j.is_number()) fail(ErrorCode::kValidation, "expected a number", field);
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ErrorCode::kValidation, "number is not finite", field);
  return v;
}

Vector vector_at(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::kValidation, "expected a non-empty array", field);
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = number_at(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

const Json& member(const Json& j, const char* key, const std::string& prefix = {}) {
  if (!j.is_object()) fail(ErrorCode::kValidation, "expected an object", prefix.empty() ? "$" : prefix);
  const auto it = j.find(key);
  if (it == j.end())
    fail(ErrorCode::kValidation, std::string("missing field '") + key + "'",
         prefix.empty() ? key : prefix + "." + key);
  return *it;
}

}  // namespace

ConvexBody parse_body(const Json& j) {
  const Json& type = member(j, "type");
  if (!type.is_string()) fail(ErrorCode::kValidation, "type must be a string", "type");
  const std::string kind = type.get<std::string>();
  if (kind == "hpolytope") {
    const Json& hs = member(j, "halfspaces");
    if (!hs.is_array() || hs.empty())
      fail(ErrorCode::kValidation, "halfspaces must be a non-empty array", "halfspaces");
    const std::size_t width = hs[0].is_array() ? hs[0].size() : 0;
    if (width < 2) fail(ErrorCode::kValidation, "each halfspace is [a_1..a_n, b]", "halfspaces[0]");
    const auto n = static_cast<Eigen::Index>(width - 1);
    Matrix A(static_cast<Eigen::Index>(hs.size()), n);
    Vector b(static_cast<Eigen::Index>(hs.size()));
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const std::string field = "halfspaces[" + std::to_string(i) + "]";
      const Vector row = vector_at(hs[i], field);
      if (row.size() != n + 1)
        fail(ErrorCode::kValidation, "halfspace has " + std::to_string(row.size()) +
                                         " entries, expected " + std::to_string(n + 1), field);
      A.row(static_cast<Eigen::Index>(i)) = row.head(n).transpose();
      b(static_cast<Eigen::Index>(i)) = row(n);
    }
    return HPolytope(A, b);
  }
  if (kind == "vpolygon") {
    const Json& vs = member(j, "vertices");
    if (!vs.is_array() || vs.size() < 3)
      fail(ErrorCode::kValidation, "a polygon needs at least three vertices", "vertices");
    std::vector<Eigen::Vector2d> pts;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::string field = "vertices[" + std::to_string(i) + "]";
      const Vector v = vector_at(vs[i], field);
      if (v.size() != 2) fail(ErrorCode::kValidation, "vertex must be [x, y]", field);
      pts.emplace_back(v(0), v(1));
    }
    return VPolygon(std::move(pts));
  }
  fail(ErrorCode::kValidation, "unknown body type '" + kind + "'", "type");
}

HPolytope as_hpolytope(const ConvexBody& body) {
  if (const auto* h = std::get_if<HPolytope>(&body)) return *h;
  if (const auto* p = std::get_if<VPolygon>(&body)) return p->to_hpolytope();
  fail(ErrorCode::kValidation, "body must be a polytope", "type");
}

PCQFunction parse_function(const Json& j) {
  const Json& ps = member(j, "pieces");
  if (!ps.is_array() || ps.empty())
    fail(ErrorCode::kValidation, "pieces must be a non-empty array", "pieces");
  std::vector<QuadraticPiece> pieces;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const std::string where = "pieces[" + std::to_string(i) + "]";
    QuadraticPiece p;
    p.a = vector_at(member(ps[i], "a", where), where + ".a");
    const auto n = p.a.size();
    p.b = ps[i].contains("b") ? number_at(ps[i]["b"], where + ".b") : 0.0;
    if (ps[i].contains("Q")) {
      const Json& q = ps[i]["Q"];
      if (!q.is_array() || static_cast<Eigen::Index>(q.size()) != n)
        fail(ErrorCode::kValidation, "Q must have one row per slope entry", where + ".Q");
      p.Q.resize(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        const std::string field = where + ".Q[" + std::to_string(r) + "]";
        const Vector row = vector_at(q[static_cast<std::size_t>(r)], field);
        if (row.size() != n) fail(ErrorCode::kValidation, "Q row has the wrong length", field);
        p.Q.row(r) = row.transpose();
      }
    } else {
      p.Q = Matrix::Zero(n, n);
    }
    pieces.push_back(std::move(p));
  }
  return PCQFunction(std::move(pieces));
}

Json function_to_json(const PCQFunction& f) {
  Json pieces = Json::array();
  for (const auto& p : f.pieces()) {
    Json q = Json::array();
    for (Eigen::Index r = 0; r < p.Q.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < p.Q.cols(); ++c) row.push_back(p.Q(r, c));
      q.push_back(row);
    }
    Json a = Json::array();
    for (Eigen::Index i = 0; i < p.a.size(); ++i) a.push_back(p.a(i));
    pieces.push_back({{"Q", q}, {"a", a}, {"b", p.b}});
  }
  return {{"pieces", pieces}};
}

Box parse_region(const std::string& text) {
  static const std::regex interval(
      R"(\[\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*,\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*\])");
  std::string s = text;
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  if (s.size() >= 2 && s[0] == '[' && s[1] == '[') {
    const Json j = parse_json(s, "region");
    if (!j.is_array() || j.empty()) fail(ErrorCode::kValidation, "region list is empty", "region");
    Vector lo(static_cast<Eigen::Index>(j.size())), hi(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
      const Vector side = vector_at(j[i], "region[" + std::to_string(i) + "]");
      if (side.size() != 2)
        fail(ErrorCode::kValidation, "each side is [lower, upper]", "region[" + std::to_string(i) + "]");
      lo(static_cast<Eigen::Index>(i)) = side(0);
      hi(static_cast<Eigen::Index>(i)) = side(1);
    }
    return Box(lo, hi);
  }
  std::smatch m;
  std::vector<std::pair<double, double>> sides;
  std::string rest = s;
  while (std::regex_search(rest, m, interval) && m.position(0) == 0) {
    sides.emplace_back(std::stod(m[1]), std::stod(m[2]));
    rest = m.suffix();
    rest.erase(0, rest.find_first_not_of(" \t"));
    if (rest.rfind("x", 0) == 0 || rest.rfind("*", 0) == 0) {
      rest.erase(0, 1);
      rest.erase(0, rest.find_first_not_of(" \t"));
    } else {
      break;
    }
  }
  if (sides.empty())
    fail(ErrorCode::kParse, "region must look like [a,b]^n or [a,b]x[c,d]", "region");
  int repeat = 1;
  if (!rest.empty()) {
    if (rest[0] != '^' || sides.size() != 1)
      fail(ErrorCode::kParse, "unexpected text '" + rest + "' in region", "region");
    try {
      std::size_t used = 0;
      repeat = std::stoi(rest.substr(1), &used);
      if (used != rest.size() - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "bad exponent in region", "region");
    }
    if (repeat < 1 || repeat > 3) fail(ErrorCode::kValidation, "region dimension must be 1 to 3", "region");
  }
  const int n = static_cast<int>(sides.size()) * repeat;
  Vector lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    lo(i) = sides[static_cast<std::size_t>(i) % sides.size()].first;
    hi(i) = sides[static_cast<std::size_t>(i) % sides.size()].second;
  }
  return Box(lo, hi);
}

Json region_to_json(const Box& box) {
  Json out = Json::array();
  for (int i = 0; i < box.dimension(); ++i) out.push_back({box.lower(i), box.upper(i)});
  return out;
}

NodeTable parse_node_csv(const std::string& text) {
  NodeTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      cell.erase(0, cell.find_first_not_of(" \t"));
      cell.erase(cell.find_last_not_of(" \t") + 1);
      cells.push_back(cell);
    }
    std::vector<double> nums;
    bool numeric = true;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) {
        numeric = false;
        break;
      }
      nums.push_back(v);
    }
    const std::string field = "line " + std::to_string(line_no);
    if (!numeric) {
      if (table.nodes.empty() && table.header.empty()) {
        table.header = cells;
        continue;
      }
      fail(ErrorCode::kParse, "non-numeric cell in CSV row", field);
    }
    if (nums.size() < 2 || nums.size() > 3)
      fail(ErrorCode::kValidation, "rows need 1 or 2 coordinates followed by phi", field);
    if (width == 0) width = nums.size();
    if (nums.size() != width) fail(ErrorCode::kValidation, "row width differs from the first row", field);
    Vector node(static_cast<Eigen::Index>(width - 1));
    for (std::size_t i = 0; i + 1 < width; ++i) node(static_cast<Eigen::Index>(i)) = nums[i];
    table.nodes.push_back(node);
    table.values.push_back(nums.back());
  }
  if (table.nodes.empty()) fail(ErrorCode::kValidation, "CSV has no data rows", "grid");
  return table;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

struct Canvas {
  double x0, y0, scale;
  double height;
  std::string px(double x) const { return format_double(std::round((x - x0) * scale * 100) / 100); }
  std::string py(double y) const {
    return format_double(std::round((height - (y - y0) * scale) * 100) / 100);
  }
};

std::string svg_open(double width, double height) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(width)
     << "\" height=\"" << format_double(height) << "\" viewBox=\"0 0 " << format_double(width)
     << ' ' << format_double(height) << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

}  // namespace

std::string opening_svg(const VPolygon& body, const ContactDecomposition2D& contact) {
  Eigen::Vector2d lo = body.vertices().front(), hi = lo;
  for (const auto& v : body.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double pad = 0.05 * (hi - lo).maxCoeff();
  lo.array() -= pad;
  hi.array() += pad;
  const double size = 600.0;
  const double scale = size / (hi - lo).maxCoeff();
  const double height = (hi.y() - lo.y()) * scale;
  const Canvas c{lo.x(), lo.y(), scale, height};
  std::ostringstream os;
  os << svg_open((hi.x() - lo.x()) * scale, height);
  os << "<polygon fill=\"#eef\" stroke=\"#333\" stroke-width=\"1\" points=\"";
  for (const auto& v : body.vertices()) os << c.px(v.x()) << ',' << c.py(v.y()) << ' ';
  os << "\"/>\n";
  for (const auto& seg : contact.segments)
    os << "<line stroke=\"#c00\" stroke-width=\"3\" x1=\"" << c.px(seg.start.x()) << "\" y1=\""
       << c.py(seg.start.y()) << "\" x2=\"" << c.px(seg.end.x()) << "\" y2=\"" << c.py(seg.end.y())
       << "\"/>\n";
  for (const auto& arc : contact.arcs) {
    const Eigen::Vector2d a = arc.center + arc.radius * Eigen::Vector2d(std::cos(arc.start_angle),
                                                                        std::sin(arc.start_angle));
    const double end = arc.start_angle + arc.sweep;
    const Eigen::Vector2d b = arc.center + arc.radius * Eigen::Vector2d(std::cos(end), std::sin(end));
    const std::string rr = format_double(std::round(arc.radius * scale * 100) / 100);
    // y is flipped, so a counterclockwise arc is drawn with sweep flag 0.
    os << "<path fill=\"none\" stroke=\"#07c\" stroke-width=\"3\" d=\"M " << c.px(a.x()) << ' '
       << c.py(a.y()) << " A " << rr << ' ' << rr << " 0 " << (arc.sweep > M_PI ? 1 : 0) << " 0 "
       << c.px(b.x()) << ' ' << c.py(b.y()) << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string function_svg_1d(const std::vector<CurveSample>& samples, double delta) {
  if (samples.empty()) return svg_open(10, 10) + "</svg>\n";
  double xlo = samples.front().x, xhi = samples.back().x;
  double ylo = samples.front().f, yhi = ylo;
  for (const auto& s : samples) {
    ylo = std::min({ylo, s.f, s.g});
    yhi = std::max({yhi, s.erosion, s.g});
  }
  const double width = 800.0, height = 500.0;
  const double scale = std::min(width / (xhi - xlo), height / std::max(yhi - ylo, 1e-12));
  const Canvas c{xlo, ylo, scale, (yhi - ylo) * scale};
  std::ostringstream os;
  os << svg_open((xhi - xlo) * scale, (yhi - ylo) * scale);
  os << "<!-- delta " << format_double(delta) << " -->\n";
  auto polyline = [&](const char* color, auto pick) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& s : samples) os << c.px(s.x) << ',' << c.py(pick(s)) << ' ';
    os << "\"/>\n";
  };
  polyline("#333", [](const CurveSample& s) { return s.f; });
  polyline("#999", [](const CurveSample& s) { return s.erosion; });
  polyline("#c00", [](const CurveSample& s) { return s.g; });
  for (const auto& s : samples)
    if (s.touch)
      os << "<circle r=\"1.5\" fill=\"#07c\" cx=\"" << c.px(s.x) << "\" cy=\"" << c.py(s.f)
         << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

std::string touch_map_svg_2d(const Box& region, std::size_t resolution,
                             const std::vector<TouchCell>& cells, double delta) {
  const double size = 600.0;
  const Vector span = region.upper - region.lower;
  const double scale = size / span.maxCoeff();
  const Canvas c{region.lower(0), region.lower(1), scale, span(1) * scale};
  const double w = span(0) / static_cast<double>(resolution) * scale;
  const double h = span(1) / static_cast<double>(resolution) * scale;
  std::ostringstream os;
  os << svg_open(span(0) * scale, span(1) * scale);
  os << "<!-- delta " << format_double(delta) << "; filled cells are not touch points -->\n";
  for (const auto& cell : cells) {
    if (cell.touch) continue;
    os << "<rect fill=\"#c00\" x=\"" << c.px(cell.x(0)) << "\" y=\"" << c.py(cell.x(1))
       << "\" width=\"" << format_double(std::round(w * 100) / 100) << "\" height=\""
       << format_double(std::round(h * 100) / 100) << "\" transform=\"translate("
       << format_double(std::round(-w * 50) / 100) << ',' << format_double(std::round(-h * 50) / 100)
       << ")\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace rollingball::io
