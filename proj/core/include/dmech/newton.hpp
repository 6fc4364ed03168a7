#pragma once

#include <functional>
#include <optional>

#include "dmech/derivatives.hpp"
#include "dmech/types.hpp"

namespace dmech {

enum class NewtonStatus {
  Converged,
  MaxIterations,  ///< iteration budget exhausted; best iterate returned
  Singular,       ///< Jacobian condition estimate above the singularity threshold
  Stalled,        ///< backtracking could not find a residual-decreasing step
};

enum class Damping { None, Backtracking };

struct NewtonConfig {
  double tol = 1e-12;     ///< convergence threshold on the residual infinity norm
  int max_iter = 50;
  Damping damping = Damping::Backtracking;
  int max_halvings = 20;  ///< backtracking budget per iteration
  double fd_step = 1e-6;  ///< step for the finite-difference Jacobian fallback
  double singular_cond = 1e14;  ///< condition estimate above which the system is singular
  /// Optional analytic Jacobian; finite differences otherwise.
  std::optional<std::function<Mat(const Vec&)>> jacobian;
};

struct NewtonResult {
  Vec root;              ///< best iterate seen (the solution when Converged)
  int iterations = 0;    ///< Newton updates performed
  double residual_norm = 0.0;  ///< infinity norm of the residual at `root`
  NewtonStatus status = NewtonStatus::Converged;
  double condition = 0.0;      ///< condition estimate of the last factored Jacobian

  bool converged() const { return status == NewtonStatus::Converged; }
};

/// Damped Newton iteration for R(x) = 0.
///
/// Convergence is declared when |R(x)|_inf <= cfg.tol (checked before the
/// first update, so feeding a root back converges with zero iterations).
/// Backtracking halves the step until the residual norm decreases, up to
/// cfg.max_halvings; failure to decrease reports Stalled. A Jacobian whose
/// SVD condition estimate exceeds cfg.singular_cond reports Singular. In all
/// non-converged outcomes the best iterate seen is returned.
NewtonResult newton_solve(const VectorFn& R, const Vec& x0, const NewtonConfig& cfg = {});

const char* to_string(NewtonStatus s);

}  // namespace dmech
