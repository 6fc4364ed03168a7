#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dmech/bundle.hpp"
#include "dmech/derivatives.hpp"
#include "dmech/newton.hpp"
#include "dmech/types.hpp"

namespace dmech {

using DiscreteLagrangian = std::function<double(const Vec&, const Vec&)>;
using SlotDerivative = std::function<Vec(const Vec&, const Vec&)>;

/// A discrete mechanical system: a configuration space (plain R^n, or a
/// trivialized bundle when a symmetry is registered) together with a
/// two-point discrete Lagrangian. Slot derivatives default to central
/// differences; analytic partials can be registered and take precedence
/// under DerivativeMode::AnalyticIfAvailable.
class DiscreteMechanicalSystem {
 public:
  DiscreteMechanicalSystem(int dim, DiscreteLagrangian L);
  DiscreteMechanicalSystem(TrivialBundle bundle, DiscreteLagrangian L);

  int dim() const { return dim_; }
  const std::optional<TrivialBundle>& bundle() const { return bundle_; }
  bool has_analytic_derivatives() const { return static_cast<bool>(d1_); }

  double lagrangian(const Vec& q0, const Vec& q1) const;

  void set_analytic_slot_derivatives(SlotDerivative d1, SlotDerivative d2);
  void set_derivative_scheme(const DerivativeScheme& s) { scheme_ = s; }
  const DerivativeScheme& derivative_scheme() const { return scheme_; }

  /// D1 L(q0, q1): covector in the first slot.
  Vec d1(const Vec& q0, const Vec& q1) const;
  /// D2 L(q0, q1): covector in the second slot.
  Vec d2(const Vec& q0, const Vec& q1) const;

  /// Same system viewed through a different bundle structure on identical
  /// flat coordinates (used by the staged reduction check).
  DiscreteMechanicalSystem with_bundle(TrivialBundle b) const;

  /// Wrap circle fiber coordinates when a bundle is registered; identity
  /// otherwise.
  Vec canonicalize(const Vec& q) const;
  /// Coordinate distance, circle-aware when a bundle is registered.
  double distance(const Vec& qa, const Vec& qb) const;

 private:
  int dim_;
  std::optional<TrivialBundle> bundle_;
  DiscreteLagrangian L_;
  SlotDerivative d1_, d2_;
  DerivativeScheme scheme_{};
};

using DiscreteCurve = std::vector<Vec>;

struct SolverConfig {
  double tol = 1e-12;
  int max_iter = 50;
  double fd_step = 1e-6;
  Damping damping = Damping::Backtracking;

  NewtonConfig newton() const {
    NewtonConfig n;
    n.tol = tol;
    n.max_iter = max_iter;
    n.fd_step = fd_step;
    n.damping = damping;
    return n;
  }
};

/// Thrown when a trajectory solve fails; carries the step index and the
/// final Newton state for diagnosis.
class SolveError : public Error {
 public:
  SolveError(std::string msg, int step_index, NewtonResult state)
      : Error(std::move(msg)), step_index(step_index), state(std::move(state)) {}
  int step_index;
  NewtonResult state;
};

struct StepDiagnostics {
  int index = 0;              ///< interior point index the solve was centered on
  int newton_iterations = 0;
  double residual_norm = 0.0;  ///< equation residual recomputed at the accepted point
  double condition = 0.0;      ///< Newton's last Jacobian condition estimate
};

struct SimulateResult {
  DiscreteCurve curve;
  std::vector<StepDiagnostics> diagnostics;
};

/// Discrete action: the sum of L over consecutive pairs. Needs >= 2 points.
double action(const DiscreteMechanicalSystem& sys, const DiscreteCurve& curve);

/// Three-point equation residual D2 L(q0,q1) + D1 L(q1,q2), a covector at q1;
/// zero exactly on trajectories.
Vec del_residual(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1, const Vec& q2);

/// Fiber maps of the two-point Lagrangian: the (+) map is D2 L at the second
/// point, the (-) map is -D1 L at the first point. Trajectories match (+) of
/// the previous pair with (-) of the next pair.
Vec legendre_plus(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1);
Vec legendre_minus(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1);

struct RegularityReport {
  bool regular = false;
  double cond_plus = 0.0;   ///< condition estimate of d(D2 L)/d q0
  double cond_minus = 0.0;  ///< condition estimate of d(D1 L)/d q1
  double threshold = 1e12;
};

/// Probe both fiber-map Jacobians at (q0, q1); regular when both condition
/// estimates stay below the threshold.
RegularityReport regularity_check(const DiscreteMechanicalSystem& sys, const Vec& q0,
                                  const Vec& q1, double threshold = 1e12);

struct StepResult {
  Vec q2;
  NewtonResult newton;
};

/// Extrapolated initial guess for the next point: coordinate extrapolation
/// 2 q1 - q0, with the fiber block advanced by the previous fiber increment.
Vec extrapolate_next(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1);

/// One trajectory step: solve the three-point equation for q2.
StepResult step(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1,
                const SolverConfig& cfg = {});

/// Iterate `steps` solves from the seed pair. Throws SolveError on a failed
/// step. The returned curve has steps + 2 points.
SimulateResult simulate(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1,
                        int steps, const SolverConfig& cfg = {});

/// Momentum of the registered symmetry: components -D1 L(q0,q1) . gen_i(q0)
/// for the algebra chart basis. Requires a bundle.
Vec momentum(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1);

struct NoetherReport {
  Mat values;       ///< row k: momentum of the pair (q_k, q_{k+1})
  Vec drift;        ///< per-component max |J_k - J_0|
  double max_drift = 0.0;
};

/// Momentum table and drift along a curve. Exact trajectories of a
/// symmetric Lagrangian keep the drift at the solver floor.
NoetherReport noether_drift(const DiscreteMechanicalSystem& sys, const DiscreteCurve& curve);

struct InvarianceOptions {
  int samples = 256;
  std::uint64_t seed = 0x5eedf00dULL;
  SampleBox box{};
};

/// Max over sampled (g, q0, q1) of |L(g q0, g q1) - L(q0, q1)|. Requires a
/// bundle.
double check_invariance(const DiscreteMechanicalSystem& sys, const InvarianceOptions& opt = {});

}  // namespace dmech
