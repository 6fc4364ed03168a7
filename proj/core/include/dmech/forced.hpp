#pragma once

#include "dmech/dms.hpp"

namespace dmech {

using ForceEvaluator = std::function<Vec(const Vec&, const Vec&)>;

/// A discrete force on pairs: the (-) part pairs variations of the first
/// point, the (+) part pairs variations of the second point.
struct DiscreteForce {
  ForceEvaluator minus;  ///< covector at q0
  ForceEvaluator plus;   ///< covector at q1
};

/// Zero force of the right dimension (the forced machinery collapses to the
/// unforced one bit-for-bit with this).
DiscreteForce zero_force(int dim);

/// A discrete mechanical system with an added discrete force.
class ForcedDiscreteMechanicalSystem {
 public:
  ForcedDiscreteMechanicalSystem(DiscreteMechanicalSystem sys, DiscreteForce force);

  const DiscreteMechanicalSystem& system() const { return sys_; }
  DiscreteMechanicalSystem& system() { return sys_; }
  int dim() const { return sys_.dim(); }

  Vec force_minus(const Vec& q0, const Vec& q1) const;
  Vec force_plus(const Vec& q0, const Vec& q1) const;

 private:
  DiscreteMechanicalSystem sys_;
  DiscreteForce force_;
};

using ForcedDMS = ForcedDiscreteMechanicalSystem;

/// Forced three-point residual:
/// D2 L(q0,q1) + D1 L(q1,q2) + f+(q0,q1) + f-(q1,q2), a covector at q1.
Vec forced_del_residual(const ForcedDMS& f, const Vec& q0, const Vec& q1, const Vec& q2);

/// Forced fiber maps: (+) is D2 L + f+, (-) is -D1 L - f-.
Vec forced_legendre_plus(const ForcedDMS& f, const Vec& q0, const Vec& q1);
Vec forced_legendre_minus(const ForcedDMS& f, const Vec& q0, const Vec& q1);

StepResult forced_step(const ForcedDMS& f, const Vec& q0, const Vec& q1,
                       const SolverConfig& cfg = {});
SimulateResult forced_simulate(const ForcedDMS& f, const Vec& q0, const Vec& q1, int steps,
                               const SolverConfig& cfg = {});

/// Exactness check of the force-balanced variational principle on a
/// trajectory: for random fixed-endpoint variations, the action's
/// directional derivative plus the summed force pairings must vanish.
/// Returns the max violation over `trials` random variations.
double forced_variational_check(const ForcedDMS& f, const DiscreteCurve& curve, int trials,
                                double fd_step, std::uint64_t seed);

}  // namespace dmech
