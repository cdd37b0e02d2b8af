#ifndef ROLLINGBALL_ROLLINGBALL_H
#define ROLLINGBALL_ROLLINGBALL_H

/*
 * C interface to the rolling-ball regularization library.
 *
 * Objects are opaque handles released with their *_free function. Every
 * call returns an rb_status; on failure rb_last_error() returns a JSON
 * object {"error": name, "field": offending input or "", "message": text}
 * describing the most recent failure on the calling thread.
 *
 * Vectors are passed as arrays of `dimension` doubles.
 */

#include <stddef.h>

#if defined(_WIN32)
#if defined(ROLLINGBALL_BUILDING_DLL)
#define RB_API __declspec(dllexport)
#else
#define RB_API __declspec(dllimport)
#endif
#else
#define RB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rb_status {
  RB_OK = 0,
  RB_PARSE_ERROR = 1,
  RB_VALIDATION_ERROR = 2,
  RB_INFEASIBLE_BODY = 3,
  RB_UNBOUNDED_BODY = 4,
  RB_DEGENERATE_BODY = 5,
  RB_CONVERGENCE_FAILURE = 6,
  RB_ORIGIN_NOT_INTERIOR = 7,
  RB_NOT_ON_BOUNDARY = 8,
  RB_INVALID_SAMPLE_COUNT = 9,
  RB_INNER_SOLVE_FAILURE = 10,
  RB_DOMAIN_EXCEEDED = 11,
  RB_MARGIN_FAILURE = 12,
  RB_DEGENERATE_GRID = 13,
  RB_NOT_TOUCH_POINT = 14,
  RB_STEP_UNDERFLOW = 15,
  RB_KINK_AT_CENTER = 16,
  RB_INVALID_ARGUMENT = 17,
  RB_NULL_ARGUMENT = 98,
  RB_INTERNAL_ERROR = 99
} rb_status;

RB_API const char* rb_version(void);
RB_API const char* rb_status_name(rb_status status);
RB_API const char* rb_last_error(void);

/* Convex bodies: {"type":"hpolytope",...} or {"type":"vpolygon",...}. */
typedef struct rb_body rb_body;

RB_API rb_status rb_body_from_json(const char* json, rb_body** out);
RB_API void rb_body_free(rb_body* body);
RB_API int rb_body_dimension(const rb_body* body);
RB_API rb_status rb_body_contains(const rb_body* body, const double* x, int* inside);
RB_API rb_status rb_body_project(const rb_body* body, const double* x, double* out);
/* h(u) = max <u, x> over the body for a unit vector u; `point` may be NULL. */
RB_API rb_status rb_body_support(const rb_body* body, const double* u, double* value,
                                 double* point);
RB_API rb_status rb_body_chebyshev(const rb_body* body, double* center, double* radius);
RB_API rb_status rb_body_minkowski(const rb_body* body, const double* x, double* value);
/* Ball opening K(r) of a polytope; the result is itself an rb_body. */
RB_API rb_status rb_body_opening(const rb_body* body, double r, rb_body** out);
/* Inner unit normal at a boundary point of an opening. */
RB_API rb_status rb_body_boundary_normal(const rb_body* opening, const double* p, double* normal);

/* Max-of-quadratics functions: {"pieces":[{"Q":[[...]],"a":[...],"b":...}]}. */
typedef struct rb_function rb_function;

RB_API rb_status rb_function_from_json(const char* json, rb_function** out);
RB_API void rb_function_free(rb_function* f);
RB_API int rb_function_dimension(const rb_function* f);
RB_API rb_status rb_function_eval(const rb_function* f, const double* x, double* value);

/* Regularizer g of f at ball radius delta, evaluable for |x| + delta <= domain. */
typedef struct rb_regularized rb_regularized;

RB_API rb_status rb_regularize(const rb_function* f, double delta, double domain,
                               rb_regularized** out);
RB_API void rb_regularized_free(rb_regularized* g);
/* `gradient` and `touch` may be NULL. */
RB_API rb_status rb_regularized_eval(const rb_regularized* g, const double* x, double* value,
                                     double* gradient, int* touch);
RB_API rb_status rb_regularized_erosion(const rb_regularized* g, const double* x, double* value);

/*
 * Runs a batch command ("body open", "body measure", "func regularize",
 * "func lusin", "func extend", "envelope", "alexandrov scan") on a JSON
 * config. *report receives the JSON report; *aux receives the derived
 * SVG/CSV text or NULL. Release both with rb_string_free.
 */
RB_API rb_status rb_command_run(const char* command, const char* config_json, char** report,
                                char** aux);
RB_API void rb_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
