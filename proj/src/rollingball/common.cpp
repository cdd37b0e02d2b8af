#include "rollingball/common.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rollingball {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kInfeasibleBody: return "InfeasibleBody";
    case ErrorCode::kUnboundedBody: return "UnboundedBody";
    case ErrorCode::kDegenerateBody: return "DegenerateBody";
    case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::kOriginNotInterior: return "OriginNotInterior";
    case ErrorCode::kNotOnBoundary: return "NotOnBoundary";
    case ErrorCode::kInvalidSampleCount: return "InvalidSampleCount";
    case ErrorCode::kInnerSolveFailure: return "InnerSolveFailure";
    case ErrorCode::kDomainExceeded: return "DomainExceeded";
    case ErrorCode::kMarginFailure: return "MarginFailure";
    case ErrorCode::kDegenerateGrid: return "DegenerateGrid";
    case ErrorCode::kNotTouchPoint: return "NotTouchPoint";
    case ErrorCode::kStepUnderflow: return "StepUnderflow";
    case ErrorCode::kKinkAtCenter: return "KinkAtCenter";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

void fail(ErrorCode code, const std::string& message, std::string field) {
  throw Error(code, message, std::move(field));
}

double CounterRng::normal() {
  // Box-Muller; one draw per call keeps the counter arithmetic simple.
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

unsigned worker_count() {
  if (const char* env = std::getenv("ROLLINGBALL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() == 0 || lower.size() != upper.size())
    fail(ErrorCode::kValidation, "box bounds must be non-empty and of equal length", "region");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!std::isfinite(lower(i)) || !std::isfinite(upper(i)) || !(lower(i) < upper(i)))
      fail(ErrorCode::kValidation, "box side " + std::to_string(i) + " is empty or not finite",
           "region");
}

Box Box::cube(int dimension, double lo, double hi) {
  return Box(Vector::Constant(dimension, lo), Vector::Constant(dimension, hi));
}

double Box::circumradius() const {
  return lower.cwiseAbs().cwiseMax(upper.cwiseAbs()).norm();
}

}  // namespace rollingball
