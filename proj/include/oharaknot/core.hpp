#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace oknot {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  InvalidCurve,          // degenerate or malformed geometry / input file
  SelfIntersection,      // coincident vertices, infinite distortion or energy
  InversionSingularity,  // vertex too close to the inversion center
  Domain,                // numerical domain violation (a >= 2b, log of <= 0, ...)
  NonTangential,         // test function not tangent to the sphere map
  Config,                // bad experiment configuration
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidCurve: return "invalid-curve";
    case ErrorKind::SelfIntersection: return "self-intersection";
    case ErrorKind::InversionSingularity: return "inversion-singularity";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::NonTangential: return "nontangential-test-function";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Neumaier-compensated accumulator. Adding the same values in the same order
/// always produces the same bits.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Execution settings for the O(N^2) pair sums.
struct ExecPolicy {
  unsigned threads = 1;
};

/// Runs `row_fn(i)` for i in [0, rows) on up to `exec.threads` threads and
/// returns the per-row results in row order. Rows are handed out in fixed
/// strided blocks, so the result never depends on scheduling. An exception
/// from a row is rethrown on the calling thread (lowest failing row wins).
template <class RowFn>
auto map_rows(std::size_t rows, const ExecPolicy& exec, RowFn&& row_fn) {
  using Result = decltype(row_fn(std::size_t{0}));
  std::vector<Result> out(rows);
  const unsigned threads =
      std::max(1u, std::min<unsigned>(exec.threads, static_cast<unsigned>(rows)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < rows; ++i) out[i] = row_fn(i);
    return out;
  }
  std::vector<std::exception_ptr> failure(threads);
  std::vector<std::size_t> failed_row(threads, rows);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < rows; i += threads) {
        try {
          out[i] = row_fn(i);
        } catch (...) {
          failure[t] = std::current_exception();
          failed_row[t] = i;
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  std::size_t first = rows;
  std::exception_ptr err;
  for (unsigned t = 0; t < threads; ++t) {
    if (failure[t] && failed_row[t] < first) {
      first = failed_row[t];
      err = failure[t];
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

/// Deterministic parallel sum of per-row compensated partials.
template <class RowFn>
double sum_rows(std::size_t rows, const ExecPolicy& exec, RowFn&& row_fn) {
  const auto partials = map_rows(rows, exec, std::forward<RowFn>(row_fn));
  CompensatedSum total;
  for (const auto& p : partials) total.add(p);
  return total.value();
}

/// Error-free transformation a + b = s + e.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

}  // namespace oknot
