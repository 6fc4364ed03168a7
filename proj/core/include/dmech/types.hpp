#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dmech {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched dimensions between arguments and a descriptor.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inputs outside the admissible domain (non-finite values, points not in the
/// same fiber, shape points outside the declared domain, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition failed (invariance, constraint membership,
/// momentum-level solvability, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied evaluator produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

inline void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw DomainError(std::string(what) + ": non-finite input");
}

inline void require_dim(const Vec& v, Eigen::Index n, const char* what) {
  if (v.size() != n)
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
}

/// Deterministic, platform-independent uniform generator (splitmix64 core).
/// Used for sampled law checks and property tests; never for anything that
/// should differ between runs.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

}  // namespace dmech
