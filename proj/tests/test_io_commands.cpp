#include "doctest.h"

#include "rollingball/commands.hpp"
#include "rollingball/io.hpp"
#include "support.hpp"

using namespace rollingball;
using io::Json;
using testing::vec;

namespace {

Error error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error raised");
  return Error(ErrorCode::kInvalidArgument, "");
}

const char* kSquare = R"({"type":"vpolygon","vertices":[[-1,-1],[1,-1],[1,1],[-1,1]]})";
const char* kAbs = R"({"pieces":[{"a":[1],"b":0},{"a":[-1],"b":0}]})";

}  // namespace

TEST_CASE("body parsing") {
  const ConvexBody b = io::parse_body(Json::parse(kSquare));
  CHECK(std::holds_alternative<VPolygon>(b));
  const ConvexBody h = io::parse_body(Json::parse(R"({"type":"hpolytope","halfspaces":[[1,0,1],[-1,0,1],[0,2,2],[0,-1,1]]})"));
  CHECK(std::holds_alternative<HPolytope>(h));
  CHECK(contains(h, vec({0.9, -0.9})));

  CHECK(error_of([] { io::parse_body(Json::parse(R"({"halfspaces":[]})")); }).field() == "type");
  CHECK(error_of([] { io::parse_body(Json::parse(R"({"type":"cube"})")); }).field() == "type");
  const Error bad = error_of([] {
    io::parse_body(Json::parse(R"({"type":"hpolytope","halfspaces":[[1,0,1],[0,1]]})"));
  });
  CHECK(bad.code() == ErrorCode::kValidation);
  CHECK(bad.field() == "halfspaces[1]");
  CHECK(error_of([] {
          io::parse_body(Json::parse(R"({"type":"vpolygon","vertices":[[0,0],[1,0],[1,1],[0.5,0.5]]})"));
        }).field().rfind("vertices", 0) == 0);
  CHECK(error_of([] { io::parse_json("{\"type\":", "body"); }).code() == ErrorCode::kParse);
}

TEST_CASE("function parsing round-trips") {
  const PCQFunction f = io::parse_function(Json::parse(kAbs));
  CHECK(f.is_max_affine());
  CHECK(f(vec({-0.25})) == 0.25);
  const PCQFunction g = io::parse_function(io::function_to_json(f));
  CHECK(g(vec({0.7})) == f(vec({0.7})));
  const Error e = error_of([] {
    io::parse_function(Json::parse(R"({"pieces":[{"Q":[[1,2],[0,1]],"a":[0,0],"b":0}]})"));
  });
  CHECK(e.field() == "pieces[0].Q");
}

TEST_CASE("region syntax") {
  const Box a = io::parse_region("[-1,1]^2");
  CHECK(a.dimension() == 2);
  CHECK(a.volume() == 4.0);
  const Box b = io::parse_region("[0,2] x [-1,0.5]");
  CHECK(b.lower == vec({0, -1}));
  CHECK(b.upper == vec({2, 0.5}));
  const Box c = io::parse_region("[[0,1],[2,3],[4,5]]");
  CHECK(c.dimension() == 3);
  CHECK(io::parse_region(io::region_to_json(b).dump()).upper == b.upper);
  CHECK(error_of([] { io::parse_region("[1,0]^2"); }).code() == ErrorCode::kValidation);
  CHECK(error_of([] { io::parse_region("cube"); }).field() == "region");
}

TEST_CASE("node CSV") {
  const io::NodeTable t = io::parse_node_csv("x,y,phi\n# comment\n0,0,1\n\n1,0,2\n0,1,3\n");
  CHECK(t.header.size() == 3);
  CHECK(t.nodes.size() == 3);
  CHECK(t.values[2] == 3.0);
  const io::NodeTable u = io::parse_node_csv("-1,1\n0,0\n1,1\n");
  CHECK(u.nodes.size() == 3);
  CHECK(u.nodes[0].size() == 1);
  const Error e = error_of([] { io::parse_node_csv("0,0,1\n1,zero,2\n"); });
  CHECK(e.code() == ErrorCode::kParse);
  CHECK(e.field().find("2") != std::string::npos);
}

TEST_CASE("shortest round-trip number formatting") {
  std::mt19937_64 rng(151);
  std::uniform_real_distribution<double> U(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = U(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("body open report") {
  const Json config = {{"body", Json::parse(kSquare)}, {"radius", 0.25}, {"samples", 20000}, {"seed", 4}, {"svg", true}};
  const CommandOutput out = run_command("body open", config);
  const Json& r = out.report["results"];
  CHECK(out.report["command"] == "body open");
  CHECK(out.report["config"] == config);
  CHECK(out.report.contains("version"));
  CHECK(out.report["tolerances"].contains("boundary_classification"));
  CHECK(r["contact"].get<double>() == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(r["sym_diff"].get<double>() == doctest::Approx(2 + M_PI / 2).epsilon(1e-14));
  CHECK(r["lambda"].get<double>() == doctest::Approx(4.0 / 3.0));
  CHECK(r["mc"]["within_3se"].get<bool>());
  CHECK(out.aux_kind == "svg");
  CHECK(out.aux.rfind("<svg", 0) == 0);
  CHECK(out.aux.find("</svg>") != std::string::npos);

  Json no_seed = config;
  no_seed.erase("seed");
  CHECK(error_of([&] { run_command("body open", no_seed); }).field() == "seed");
  Json exact_only = no_seed;
  exact_only["samples"] = 0;
  CHECK_NOTHROW(run_command("body open", exact_only));
}

TEST_CASE("func regularize report") {
  const Json config = {{"function", Json::parse(kAbs)}, {"delta", 0.1}, {"domain", 2.0}, {"region", "[-1,1]^1"}};
  const Json r = run_command("func regularize", config).report["results"];
  CHECK(std::abs(r["disagreement"].get<double>() - 0.1 * std::sqrt(2.0)) <= 1e-4);
  CHECK(r["center"]["g"].get<double>() == doctest::Approx(0.1 * (std::sqrt(2.0) - 1)).epsilon(1e-12));
  CHECK(r["table"].size() == 21);

  Json bad = config;
  bad["function"]["pieces"][1]["a"] = Json::array({-1, 2});
  const Error e = error_of([&] { run_command("func regularize", bad); });
  CHECK(e.code() == ErrorCode::kValidation);
  CHECK(e.field() == "function.pieces[1].a");
  Json far = config;
  far["region"] = "[-3,3]^1";
  CHECK(error_of([&] { run_command("func regularize", far); }).code() == ErrorCode::kDomainExceeded);
  CHECK(error_of([&] { run_command("func frobnicate", config); }).field() == "command");
}

TEST_CASE("other commands produce their results") {
  const Json lusin = run_command("func lusin", {{"function", Json::parse(kAbs)}, {"levels", 3}}).report["results"];
  CHECK(lusin["sweep"].size() == 3);
  CHECK(lusin["monotone"].get<bool>());

  const Json square = {{"pieces", {{{"Q", {{2.0}}}, {"a", {0.0}}, {"b", 0.0}}}}};
  const Json ext = run_command("func extend", {{"function", square}, {"r", 1.0}, {"R", 2.0}}).report["results"];
  CHECK(ext["a"].get<double>() == doctest::Approx(3.8));
  CHECK(ext["inner_identity_gap"].get<double>() <= 1e-12);
  CHECK(ext["outer_identity_gap"].get<double>() == 0.0);

  const CommandOutput env = run_command("envelope", {{"grid", "x,phi\n-1,0\n0,1\n1,0\n"}});
  CHECK(env.aux == "x,phi,F,hull_vertex\n-1,0,0,1\n0,1,0,0\n1,0,0,1\n");
  CHECK(env.report["config"]["grid"].contains("fnv1a64"));

  const CommandOutput scan = run_command(
      "alexandrov scan", {{"function", Json::parse(kAbs)}, {"delta", 0.05}, {"grid", 100}, {"csv", true}});
  CHECK(scan.report["results"]["nodes"] == 100);
  CHECK(std::count(scan.aux.begin(), scan.aux.end(), '\n') == 101);
}

TEST_CASE("reports are identical at any worker count") {
  const std::vector<std::pair<std::string, Json>> runs{
      {"body open", {{"body", Json::parse(kSquare)}, {"radius", 0.3}, {"samples", 20000}, {"seed", 8}}},
      {"func regularize",
       {{"function", Json::parse(kAbs)}, {"delta", 0.1}, {"domain", 2.0}, {"method", "mc"}, {"samples", 5000}, {"seed", 2}}},
      {"alexandrov scan", {{"function", Json::parse(kAbs)}, {"delta", 0.05}, {"grid", 64}}},
  };
  for (const auto& [command, config] : runs) {
    std::string one, four;
    {
      testing::ThreadCount t(1);
      one = run_command(command, config).report.dump();
    }
    {
      testing::ThreadCount t(4);
      four = run_command(command, config).report.dump();
    }
    CHECK(one == four);
  }
}
