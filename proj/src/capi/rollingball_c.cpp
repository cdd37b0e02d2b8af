#include "rollingball/rollingball.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "rollingball/commands.hpp"
#include "rollingball/convex_core.hpp"
#include "rollingball/funcreg.hpp"
#include "rollingball/io.hpp"
#include "rollingball/morphology.hpp"

struct rb_body {
  rollingball::ConvexBody body;
};

struct rb_function {
  rollingball::PCQFunction f;
};

struct rb_regularized {
  rollingball::RegularizedFunction g;
};

namespace {

using rollingball::ErrorCode;

thread_local std::string last_error = "{}";

void set_error(const char* name, const std::string& field, const std::string& message) {
  last_error = rollingball::io::Json{{"error", name}, {"field", field}, {"message", message}}.dump();
}

rb_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return RB_PARSE_ERROR;
    case ErrorCode::kValidation: return RB_VALIDATION_ERROR;
    case ErrorCode::kInfeasibleBody: return RB_INFEASIBLE_BODY;
    case ErrorCode::kUnboundedBody: return RB_UNBOUNDED_BODY;
    case ErrorCode::kDegenerateBody: return RB_DEGENERATE_BODY;
    case ErrorCode::kConvergenceFailure: return RB_CONVERGENCE_FAILURE;
    case ErrorCode::kOriginNotInterior: return RB_ORIGIN_NOT_INTERIOR;
    case ErrorCode::kNotOnBoundary: return RB_NOT_ON_BOUNDARY;
    case ErrorCode::kInvalidSampleCount: return RB_INVALID_SAMPLE_COUNT;
    case ErrorCode::kInnerSolveFailure: return RB_INNER_SOLVE_FAILURE;
    case ErrorCode::kDomainExceeded: return RB_DOMAIN_EXCEEDED;
    case ErrorCode::kMarginFailure: return RB_MARGIN_FAILURE;
    case ErrorCode::kDegenerateGrid: return RB_DEGENERATE_GRID;
    case ErrorCode::kNotTouchPoint: return RB_NOT_TOUCH_POINT;
    case ErrorCode::kStepUnderflow: return RB_STEP_UNDERFLOW;
    case ErrorCode::kKinkAtCenter: return RB_KINK_AT_CENTER;
    case ErrorCode::kInvalidArgument: return RB_INVALID_ARGUMENT;
  }
  return RB_INTERNAL_ERROR;
}

template <typename Fn>
rb_status guarded(Fn&& fn) {
  try {
    fn();
    last_error = "{}";
    return RB_OK;
  } catch (const rollingball::Error& e) {
    set_error(rollingball::error_name(e.code()), e.field(), e.what());
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    set_error("InternalError", "", "out of memory");
  } catch (const std::exception& e) {
    set_error("InternalError", "", e.what());
  } catch (...) {
    set_error("InternalError", "", "unknown failure");
  }
  return RB_INTERNAL_ERROR;
}

rb_status null_argument(const char* name) {
  set_error("NullArgument", name, std::string(name) + " must not be NULL");
  return RB_NULL_ARGUMENT;
}

rollingball::Vector read_vec(const double* x, int n) {
  return Eigen::Map<const rollingball::Vector>(x, n);
}

void write_vec(const rollingball::Vector& v, double* out) {
  std::memcpy(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* rb_version(void) { return ROLLINGBALL_VERSION; }

const char* rb_status_name(rb_status status) {
  switch (status) {
    case RB_OK: return "Ok";
    case RB_NULL_ARGUMENT: return "NullArgument";
    case RB_INTERNAL_ERROR: return "InternalError";
    default: break;
  }
  if (status >= RB_PARSE_ERROR && status <= RB_INVALID_ARGUMENT)
    return rollingball::error_name(static_cast<ErrorCode>(status - 1));
  return "Unknown";
}

const char* rb_last_error(void) { return last_error.c_str(); }

rb_status rb_body_from_json(const char* json, rb_body** out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto doc = rollingball::io::parse_json(json, "body");
    *out = new rb_body{rollingball::io::parse_body(doc)};
  });
}

void rb_body_free(rb_body* body) { delete body; }

int rb_body_dimension(const rb_body* body) {
  return body ? rollingball::dimension(body->body) : 0;
}

rb_status rb_body_contains(const rb_body* body, const double* x, int* inside) {
  if (!body) return null_argument("body");
  if (!x) return null_argument("x");
  if (!inside) return null_argument("inside");
  return guarded([&] {
    *inside = rollingball::contains(body->body, read_vec(x, rb_body_dimension(body))) ? 1 : 0;
  });
}

rb_status rb_body_project(const rb_body* body, const double* x, double* out) {
  if (!body) return null_argument("body");
  if (!x) return null_argument("x");
  if (!out) return null_argument("out");
  return guarded([&] {
    write_vec(rollingball::project(body->body, read_vec(x, rb_body_dimension(body))), out);
  });
}

rb_status rb_body_support(const rb_body* body, const double* u, double* value, double* point) {
  if (!body) return null_argument("body");
  if (!u) return null_argument("u");
  if (!value) return null_argument("value");
  return guarded([&] {
    const auto s = rollingball::support(body->body, read_vec(u, rb_body_dimension(body)));
    *value = s.value;
    if (point) write_vec(s.argmax, point);
  });
}

rb_status rb_body_chebyshev(const rb_body* body, double* center, double* radius) {
  if (!body) return null_argument("body");
  if (!center) return null_argument("center");
  if (!radius) return null_argument("radius");
  return guarded([&] {
    const auto c = rollingball::chebyshev_center(body->body);
    write_vec(c.center, center);
    *radius = c.radius;
  });
}

rb_status rb_body_minkowski(const rb_body* body, const double* x, double* value) {
  if (!body) return null_argument("body");
  if (!x) return null_argument("x");
  if (!value) return null_argument("value");
  return guarded([&] {
    *value = rollingball::minkowski_functional(body->body, read_vec(x, rb_body_dimension(body)));
  });
}

rb_status rb_body_opening(const rb_body* body, double r, rb_body** out) {
  if (!body) return null_argument("body");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    if (const auto* ball = std::get_if<rollingball::Ball>(&body->body)) {
      *out = new rb_body{rollingball::opening(*ball, r)};
      return;
    }
    *out = new rb_body{rollingball::opening(rollingball::io::as_hpolytope(body->body), r)};
  });
}

rb_status rb_body_boundary_normal(const rb_body* opening, const double* p, double* normal) {
  if (!opening) return null_argument("opening");
  if (!p) return null_argument("p");
  if (!normal) return null_argument("normal");
  return guarded([&] {
    const auto* w = std::get_if<rollingball::BallBody>(&opening->body);
    if (!w)
      rollingball::fail(ErrorCode::kInvalidArgument, "body is not an opening", "opening");
    write_vec(rollingball::boundary_normal(*w, read_vec(p, w->dimension())), normal);
  });
}

rb_status rb_function_from_json(const char* json, rb_function** out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto doc = rollingball::io::parse_json(json, "function");
    *out = new rb_function{rollingball::io::parse_function(doc)};
  });
}

void rb_function_free(rb_function* f) { delete f; }

int rb_function_dimension(const rb_function* f) { return f ? f->f.dimension() : 0; }

rb_status rb_function_eval(const rb_function* f, const double* x, double* value) {
  if (!f) return null_argument("f");
  if (!x) return null_argument("x");
  if (!value) return null_argument("value");
  return guarded([&] { *value = f->f(read_vec(x, f->f.dimension())); });
}

rb_status rb_regularize(const rb_function* f, double delta, double domain, rb_regularized** out) {
  if (!f) return null_argument("f");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new rb_regularized{rollingball::regularize(f->f, delta, domain)}; });
}

void rb_regularized_free(rb_regularized* g) { delete g; }

rb_status rb_regularized_eval(const rb_regularized* g, const double* x, double* value,
                              double* gradient, int* touch) {
  if (!g) return null_argument("g");
  if (!x) return null_argument("x");
  if (!value) return null_argument("value");
  return guarded([&] {
    const auto p = g->g.evaluate(read_vec(x, g->g.source().dimension()));
    *value = p.value;
    if (gradient) write_vec(p.gradient, gradient);
    if (touch) *touch = p.touch ? 1 : 0;
  });
}

rb_status rb_regularized_erosion(const rb_regularized* g, const double* x, double* value) {
  if (!g) return null_argument("g");
  if (!x) return null_argument("x");
  if (!value) return null_argument("value");
  return guarded([&] { *value = g->g.erosion(read_vec(x, g->g.source().dimension())); });
}

rb_status rb_command_run(const char* command, const char* config_json, char** report, char** aux) {
  if (!command) return null_argument("command");
  if (!config_json) return null_argument("config_json");
  if (!report) return null_argument("report");
  *report = nullptr;
  if (aux) *aux = nullptr;
  return guarded([&] {
    const auto config = rollingball::io::parse_json(config_json, "config");
    const rollingball::CommandOutput out = rollingball::run_command(command, config);
    const std::string text = out.report.dump(2) + "\n";
    char* r = copy_string(text);
    if (aux && !out.aux.empty()) {
      try {
        *aux = copy_string(out.aux);
      } catch (...) {
        std::free(r);
        throw;
      }
    }
    *report = r;
  });
}

void rb_string_free(char* s) { std::free(s); }

}  // extern "C"
