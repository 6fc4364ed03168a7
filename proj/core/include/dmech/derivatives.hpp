#pragma once

#include <functional>

#include "dmech/types.hpp"

namespace dmech {

/// How slot derivatives of scalar evaluators are computed.
enum class DerivativeMode {
  /// Use registered analytic partials when the owner has them, fall back to
  /// central differences otherwise.
  AnalyticIfAvailable,
  /// Always use central differences.
  CentralDifference,
};

struct DerivativeScheme {
  DerivativeMode mode = DerivativeMode::AnalyticIfAvailable;
  double fd_step = 1e-6;
};

using ScalarFn = std::function<double(const Vec&)>;
using TwoSlotScalarFn = std::function<double(const Vec&, const Vec&)>;
using VectorFn = std::function<Vec(const Vec&)>;

/// Central-difference gradient of f at x. Throws EvaluationError if f returns
/// a non-finite value at any probe point.
Vec central_gradient(const ScalarFn& f, const Vec& x, double fd_step);

/// Central-difference directional derivative of f at x along dir.
double directional_derivative(const ScalarFn& f, const Vec& x, const Vec& dir, double fd_step);

/// Gradient of a two-point scalar f(q0, q1) with respect to one slot
/// (slot = 1 or 2), the other slot held fixed. Returns a covector in the
/// coordinates of the varied slot.
Vec slot_gradient(const TwoSlotScalarFn& f, int slot, const Vec& q0, const Vec& q1,
                  const DerivativeScheme& scheme);

/// Central-difference Jacobian of F: R^n -> R^m, columns by coordinate probes.
Mat jacobian(const VectorFn& F, const Vec& x, double fd_step);

}  // namespace dmech
