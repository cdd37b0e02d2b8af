#pragma once

// Text formats: body and function JSON, region strings, node CSV, SVG views.

#include <string>
#include <vector>

#include <json.hpp>

#include "rollingball/convex_core.hpp"
#include "rollingball/funcreg.hpp"
#include "rollingball/morphology.hpp"

namespace rollingball::io {

using Json = nlohmann::json;

// kParse on malformed JSON text.
Json parse_json(const std::string& text, const std::string& what);

// {"type":"hpolytope","halfspaces":[[a...,b],...]} or
// {"type":"vpolygon","vertices":[[x,y],...]}. Errors name the offending field.
ConvexBody parse_body(const Json& j);
HPolytope as_hpolytope(const ConvexBody& body);

// {"pieces":[{"Q":[[...]],"a":[...],"b":...},...]}; Q may be omitted (zero).
PCQFunction parse_function(const Json& j);
Json function_to_json(const PCQFunction& f);

// "[a,b]^n", "[a1,b1]x[a2,b2]..." or a JSON list [[a1,b1],...].
Box parse_region(const std::string& text);
Json region_to_json(const Box& box);

struct NodeTable {
  std::vector<std::string> header;  // empty when the file had none
  std::vector<Vector> nodes;
  std::vector<double> values;
};

// Rows of node coordinates followed by phi; an optional non-numeric header
// line; '#' comments and blank lines skipped.
NodeTable parse_node_csv(const std::string& text);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::string opening_svg(const VPolygon& body, const ContactDecomposition2D& contact);

struct CurveSample {
  double x;
  double f;
  double erosion;
  double g;
  bool touch;
};
std::string function_svg_1d(const std::vector<CurveSample>& samples, double delta);

struct TouchCell {
  Vector x;
  bool touch;
};
std::string touch_map_svg_2d(const Box& region, std::size_t resolution,
                             const std::vector<TouchCell>& cells, double delta);

}  // namespace rollingball::io
