#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace rollingball {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  kParse,
  kValidation,
  kInfeasibleBody,
  kUnboundedBody,
  kDegenerateBody,
  kConvergenceFailure,
  kOriginNotInterior,
  kNotOnBoundary,
  kInvalidSampleCount,
  kInnerSolveFailure,
  kDomainExceeded,
  kMarginFailure,
  kDegenerateGrid,
  kNotTouchPoint,
  kStepUnderflow,
  kKinkAtCenter,
  kInvalidArgument,
};

const char* error_name(ErrorCode code);

// All library failures are reported through this exception. `field` names
// the offending input element for parse/validation errors, empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const { return code_; }
  const std::string& field() const { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message,
                       std::string field = {});

// Counter-based random stream: the output depends only on (seed, stream
// index, draw counter), so a sample's randomness does not depend on which
// worker evaluates it.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double normal();

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Worker cap: ROLLINGBALL_THREADS if set and positive, otherwise the
// hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, count) across worker_count() threads. Each index
// is visited exactly once; callers write results into per-index slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

inline double sq(double v) { return v * v; }

// Axis-aligned box [lower_1, upper_1] x ... x [lower_n, upper_n].
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi);
  static Box cube(int dimension, double lo, double hi);

  int dimension() const { return static_cast<int>(lower.size()); }
  double volume() const { return (upper - lower).prod(); }
  // Smallest radius R with the box inside the closed ball B(0, R).
  double circumradius() const;
};

}  // namespace rollingball
