// Command-line front-end. Builds a JSON config from flags and input files and
// hands it to rb_command_run; only the C interface is used.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rollingball/rollingball.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitModule = 3;

struct CliError {
  std::string error;
  std::string field;
  std::string message;
};

[[noreturn]] void raise(const std::string& error, const std::string& field, const std::string& message) {
  throw CliError{error, field, message};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise("IOError", "input", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text, const char* field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise("IOError", field, "cannot write '" + path + "'");
  out << text;
  if (!out) raise("IOError", field, "write to '" + path + "' failed");
}

Json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    raise("ParseError", "input", path + ": " + e.what());
  }
}

struct Options {
  std::string input;
  std::string report;
  std::string svg, csv, plot, out;
  std::optional<double> radius, delta, domain, r, R, decay, floor, step, delta0, epsilon;
  std::optional<std::string> region, method;
  std::optional<std::uint64_t> grid, samples, seed, levels;
  std::vector<double> radii;
};

void put(Json& config, const char* key, const std::optional<double>& v) {
  if (v) config[key] = *v;
}
void put(Json& config, const char* key, const std::optional<std::uint64_t>& v) {
  if (v) config[key] = *v;
}
void put(Json& config, const char* key, const std::optional<std::string>& v) {
  if (v) config[key] = *v;
}

Json build_config(const std::string& command, const Options& o) {
  Json config = Json::object();
  if (command == "body open" || command == "body measure") {
    config["body"] = read_json(o.input);
    put(config, "radius", o.radius);
    put(config, "samples", o.samples);
    put(config, "seed", o.seed);
    if (!o.svg.empty()) config["svg"] = true;
  } else if (command == "envelope") {
    config["grid"] = read_file(o.input);
  } else {
    config["function"] = read_json(o.input);
    put(config, "delta", o.delta);
    put(config, "domain", o.domain);
    put(config, "region", o.region);
    put(config, "method", o.method);
    put(config, "grid", o.grid);
    put(config, "samples", o.samples);
    put(config, "seed", o.seed);
    put(config, "r", o.r);
    put(config, "R", o.R);
    put(config, "delta0", o.delta0);
    put(config, "levels", o.levels);
    put(config, "epsilon", o.epsilon);
    put(config, "decay", o.decay);
    put(config, "floor", o.floor);
    put(config, "step", o.step);
    if (!o.radii.empty()) config["radii"] = o.radii;
    if (!o.plot.empty()) config["plot"] = true;
    if (!o.csv.empty() && command == "alexandrov scan") config["csv"] = true;
  }
  return config;
}

std::string aux_path(const std::string& command, const Options& o) {
  if (command == "body open") return o.svg;
  if (command == "func regularize") return o.plot;
  if (command == "envelope") return o.out.empty() ? o.csv : o.out;
  if (command == "alexandrov scan") return o.csv;
  return {};
}

int run(const std::string& command, const Options& o) {
  const Json config = build_config(command, o);
  char* report = nullptr;
  char* aux = nullptr;
  const rb_status status = rb_command_run(command.c_str(), config.dump().c_str(), &report, &aux);
  if (status != RB_OK) {
    std::cerr << rb_last_error() << '\n';
    return status == RB_PARSE_ERROR || status == RB_VALIDATION_ERROR ||
                   status == RB_NULL_ARGUMENT
               ? kExitUsage
               : kExitModule;
  }
  const std::string report_text(report);
  const std::string aux_text = aux ? std::string(aux) : std::string();
  rb_string_free(report);
  rb_string_free(aux);

  if (o.report.empty() || o.report == "-")
    std::cout << report_text;
  else
    write_file(o.report, report_text, "report");
  const std::string path = aux_path(command, o);
  if (!path.empty() && !aux_text.empty()) write_file(path, aux_text, "aux");
  return 0;
}

void add_report(CLI::App* app, Options& o) {
  app->add_option("--input", o.input, "Input file")->required()->check(CLI::ExistingFile);
  app->add_option("--report", o.report, "JSON report path (stdout when omitted)");
}

void add_body(CLI::App* app, Options& o, bool svg) {
  add_report(app, o);
  app->add_option("--radius", o.radius, "Ball radius r")->required();
  app->add_option("--samples", o.samples, "Monte Carlo samples");
  app->add_option("--seed", o.seed, "Sampling seed");
  if (svg) app->add_option("--svg", o.svg, "SVG output path");
}

void add_measure(CLI::App* app, Options& o) {
  app->add_option("--region", o.region, "Region \"[a,b]^n\", \"[a,b]x[c,d]\" or JSON box list");
  app->add_option("--method", o.method, "Measure estimator: grid or mc")
      ->check(CLI::IsMember({"grid", "mc"}));
  app->add_option("--grid", o.grid, "Grid cells per axis");
  app->add_option("--samples", o.samples, "Monte Carlo samples");
  app->add_option("--seed", o.seed, "Sampling seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ball openings, rolling-ball regularization and second-order certification"};
  app.set_version_flag("--version", std::string(rb_version()));
  app.require_subcommand(1);
  Options o;

  auto* body = app.add_subcommand("body", "Convex body openings");
  body->require_subcommand(1);
  auto* body_open = body->add_subcommand("open", "Opening of a polytope and boundary measures");
  add_body(body_open, o, true);
  auto* body_measure = body->add_subcommand("measure", "Monte Carlo estimate of the lost boundary");
  add_body(body_measure, o, false);

  auto* func = app.add_subcommand("func", "Convex function regularization");
  func->require_subcommand(1);
  auto* regularize = func->add_subcommand("regularize", "Regularizer and disagreement measure");
  add_report(regularize, o);
  regularize->add_option("--delta", o.delta, "Ball radius delta")->required();
  regularize->add_option("--domain", o.domain, "Domain radius R")->required();
  regularize->add_option("--plot", o.plot, "SVG plot path (1D and 2D)");
  add_measure(regularize, o);

  auto* lusin = func->add_subcommand("lusin", "Disagreement sweep over halving delta");
  add_report(lusin, o);
  lusin->add_option("--delta0", o.delta0, "First delta (default 0.2)");
  lusin->add_option("--levels", o.levels, "Number of halvings plus one (default 7)");
  lusin->add_option("--epsilon", o.epsilon, "Target measure (default 1e-3 times region volume)");
  add_measure(lusin, o);

  auto* ext = func->add_subcommand("extend", "Extension from a ball to a coercive convex function");
  add_report(ext, o);
  ext->add_option("--r", o.r, "Inner radius")->required();
  ext->add_option("--R", o.R, "Outer radius")->required();

  auto* env = app.add_subcommand("envelope", "Lower convex envelope of a grid function");
  add_report(env, o);
  env->add_option("--out", o.out, "CSV output path");
  env->add_option("--csv", o.csv, "Alias of --out");

  auto* alex = app.add_subcommand("alexandrov", "Second-order certification");
  alex->require_subcommand(1);
  auto* scan = alex->add_subcommand("scan", "Certify Taylor expansions on a grid");
  add_report(scan, o);
  scan->add_option("--delta", o.delta, "Ball radius delta")->required();
  scan->add_option("--region", o.region, "Region \"[a,b]^n\", \"[a,b]x[c,d]\" or JSON box list");
  scan->add_option("--grid", o.grid, "Grid cells per axis");
  scan->add_option("--radii", o.radii, "Residual radii")->delimiter(',');
  scan->add_option("--step", o.step, "Finite-difference step");
  scan->add_option("--decay", o.decay, "Required residual decay factor");
  scan->add_option("--floor", o.floor, "Absolute residual floor");
  scan->add_option("--csv", o.csv, "Residual CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  std::string command;
  if (body_open->parsed()) command = "body open";
  else if (body_measure->parsed()) command = "body measure";
  else if (regularize->parsed()) command = "func regularize";
  else if (lusin->parsed()) command = "func lusin";
  else if (ext->parsed()) command = "func extend";
  else if (env->parsed()) command = "envelope";
  else if (scan->parsed()) command = "alexandrov scan";

  try {
    return run(command, o);
  } catch (const CliError& e) {
    std::cerr << Json{{"error", e.error}, {"field", e.field}, {"message", e.message}}.dump() << '\n';
    return kExitUsage;
  }
}
