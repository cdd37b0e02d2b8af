#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "rollingball/rollingball.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static const char* kSquare =
    "{\"type\":\"hpolytope\",\"halfspaces\":[[1,0,1],[-1,0,0],[0,1,1],[0,-1,0]]}";
static const char* kAbs = "{\"pieces\":[{\"a\":[1],\"b\":0},{\"a\":[-1],\"b\":0}]}";

static void test_errors(void) {
  rb_body* body = NULL;
  EXPECT(rb_body_from_json("{\"type\":", &body) == RB_PARSE_ERROR);
  EXPECT(body == NULL);
  EXPECT(strstr(rb_last_error(), "\"error\"") != NULL);
  EXPECT(rb_body_from_json("{\"type\":\"hpolytope\",\"halfspaces\":[[1,0,1],[0,1]]}", &body) ==
         RB_VALIDATION_ERROR);
  EXPECT(strstr(rb_last_error(), "halfspaces[1]") != NULL);
  EXPECT(rb_body_from_json(
             "{\"type\":\"hpolytope\",\"halfspaces\":[[1,0,1],[-1,0,-2],[0,1,1],[0,-1,1]]}",
             &body) == RB_INFEASIBLE_BODY);
  EXPECT(rb_body_from_json(NULL, &body) == RB_NULL_ARGUMENT);
  EXPECT(rb_body_from_json(kSquare, NULL) == RB_NULL_ARGUMENT);
  EXPECT(strcmp(rb_status_name(RB_DOMAIN_EXCEEDED), "DomainExceeded") == 0);
  EXPECT(strlen(rb_version()) > 0);
}

static void test_body(void) {
  rb_body* body = NULL;
  EXPECT(rb_body_from_json(kSquare, &body) == RB_OK);
  if (!body) return;
  EXPECT(rb_body_dimension(body) == 2);

  double c[2], r = 0.0;
  EXPECT(rb_body_chebyshev(body, c, &r) == RB_OK);
  EXPECT(fabs(c[0] - 0.5) < 1e-9 && fabs(c[1] - 0.5) < 1e-9 && fabs(r - 0.5) < 1e-9);

  const double far[2] = {2.0, 0.25};
  double p[2];
  EXPECT(rb_body_project(body, far, p) == RB_OK);
  EXPECT(fabs(p[0] - 1.0) < 1e-12 && fabs(p[1] - 0.25) < 1e-12);
  int inside = -1;
  EXPECT(rb_body_contains(body, far, &inside) == RB_OK && inside == 0);

  const double u[2] = {1.0, 0.0};
  double h = 0.0;
  EXPECT(rb_body_support(body, u, &h, NULL) == RB_OK && fabs(h - 1.0) < 1e-12);

  rb_body* open = NULL;
  EXPECT(rb_body_opening(body, 0.25, &open) == RB_OK);
  if (open) {
    const double edge[2] = {0.5, 0.0}, corner[2] = {1.0, 1.0};
    double n[2];
    EXPECT(rb_body_boundary_normal(open, edge, n) == RB_OK);
    EXPECT(fabs(n[0]) < 1e-12 && fabs(n[1] - 1.0) < 1e-12);
    EXPECT(rb_body_contains(open, corner, &inside) == RB_OK && inside == 0);
    EXPECT(rb_body_boundary_normal(open, corner, n) == RB_NOT_ON_BOUNDARY);
    rb_body_free(open);
  }
  EXPECT(rb_body_opening(body, 0.6, &open) != RB_OK);
  EXPECT(rb_body_boundary_normal(body, far, p) == RB_INVALID_ARGUMENT);
  rb_body_free(body);
}

static void test_function(void) {
  rb_function* f = NULL;
  EXPECT(rb_function_from_json(kAbs, &f) == RB_OK);
  if (!f) return;
  EXPECT(rb_function_dimension(f) == 1);
  const double x = -0.3;
  double v = 0.0;
  EXPECT(rb_function_eval(f, &x, &v) == RB_OK && v == 0.3);

  rb_regularized* g = NULL;
  EXPECT(rb_regularize(f, 0.1, 2.0, &g) == RB_OK);
  if (g) {
    const double zero = 0.0, out = 1.95;
    double grad = 1.0;
    int touch = 1;
    EXPECT(rb_regularized_eval(g, &zero, &v, &grad, &touch) == RB_OK);
    EXPECT(fabs(v - 0.1 * (sqrt(2.0) - 1.0)) < 1e-12);
    EXPECT(fabs(grad) < 1e-12 && touch == 0);
    EXPECT(rb_regularized_eval(g, &x, &v, NULL, &touch) == RB_OK && touch == 1 && fabs(v - 0.3) < 1e-12);
    EXPECT(rb_regularized_eval(g, &out, &v, NULL, NULL) == RB_DOMAIN_EXCEEDED);
    rb_regularized_free(g);
  }
  EXPECT(rb_regularize(f, -1.0, 2.0, &g) == RB_INVALID_ARGUMENT);
  EXPECT(strstr(rb_last_error(), "\"field\":\"delta\"") != NULL);
  rb_function_free(f);
}

static void test_command(void) {
  char* report = NULL;
  char* aux = NULL;
  EXPECT(rb_command_run("envelope", "{\"grid\":\"x,phi\\n-1,0\\n0,1\\n1,0\\n\"}", &report, &aux) ==
         RB_OK);
  EXPECT(report && strstr(report, "\"command\": \"envelope\"") != NULL);
  EXPECT(aux && strcmp(aux, "x,phi,F,hull_vertex\n-1,0,0,1\n0,1,0,0\n1,0,0,1\n") == 0);
  rb_string_free(report);
  rb_string_free(aux);

  report = aux = NULL;
  EXPECT(rb_command_run("body open", "{\"radius\":0.1}", &report, &aux) == RB_VALIDATION_ERROR);
  EXPECT(report == NULL && aux == NULL);
  EXPECT(strstr(rb_last_error(), "\"field\":\"body\"") != NULL);
}

int main(void) {
  test_errors();
  test_body();
  test_function();
  test_command();
  if (failures) {
    fprintf(stderr, "%d expectation(s) failed\n", failures);
    return 1;
  }
  printf("C API: all expectations passed\n");
  return 0;
}
