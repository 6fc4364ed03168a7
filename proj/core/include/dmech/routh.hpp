#pragma once

#include "dmech/reduction.hpp"

namespace dmech {

/// Momentum-level reduction data: a symmetric system on a trivialized bundle
/// together with a fixed momentum covector and the inner solver used for
/// every level-set equation. The symmetry group must stabilize mu (automatic
/// for the abelian factors supported here).
struct RouthSetup {
  DiscreteMechanicalSystem system;
  Vec mu;
  SolverConfig inner;

  RouthSetup(DiscreteMechanicalSystem sys, Vec mu, SolverConfig inner_cfg = default_inner());

  /// Inner-solver defaults: tighter tolerance than the outer trajectory
  /// solves so level-set noise stays far below the residual criteria.
  static SolverConfig default_inner();

  const TrivialBundle& bundle() const;
  int shape_dim() const;
  int group_dim() const;
};

/// Momentum of a pair relative to the setup's symmetry (for the abelian
/// factors here, the full discrete momentum).
Vec j_mu(const RouthSetup& s, const Vec& q0, const Vec& q1);

struct MuGoodReport {
  Vec g;                   ///< level solution at q (from the identity start)
  bool unique = false;     ///< all multistarts converged and agreed
  bool regular = false;    ///< fiber-fiber mixed second derivative block nonsingular
  double spread = 0.0;     ///< max pairwise distance across converged multistarts
  double condition = 0.0;  ///< condition estimate of the fiber-fiber block
};

/// Solve J(q, act(g, q)) = mu for g, probing uniqueness with eight spread
/// initial guesses and regularity through the fiber-fiber block of the mixed
/// second derivative of the Lagrangian at the solution pair.
MuGoodReport mu_good_check(const RouthSetup& s, const Vec& q);

/// The unique group element with J(q0, act(g^{-1}, q1)) = mu.
Vec a_mu(const RouthSetup& s, const Vec& q0, const Vec& q1);

/// The momentum-level discrete connection: its value is a_mu, its level map
/// solves the on-fiber momentum equation, and its horizontal lift through q0
/// over tau1 is the point where the pair momentum equals mu.
class RouthConnection : public DiscreteConnection {
 public:
  explicit RouthConnection(RouthSetup setup);

  const RouthSetup& setup() const { return setup_; }

  Vec evaluate(const Vec& q0, const Vec& q1) const override;
  Vec level(const Vec& q) const override;
  Vec lift(const Vec& q0, const Vec& tau1) const override;
  /// The group slot acts by left translation on the lift, so its block is
  /// the identity; the other blocks differentiate the lift fiber.
  Ftilde1Jacobians ftilde1_jacobians(const Vec& q0, const Vec& w, const Vec& tau1) const override;

 private:
  RouthSetup setup_;
};

/// Reduced shape-space Lagrangian on the momentum level set: the Lagrangian
/// evaluated on the momentum-level pair over (tau0, tau1) through the
/// identity-fiber representative.
double routh_lagrangian(const RouthSetup& s, const Vec& tau0, const Vec& tau1);

/// Reduction force of the momentum level: the group-slot derivative of the
/// transported Lagrangian contracted with the connection tangent along
/// principal-horizontal variations of the two shape points.
double routh_force(const RouthSetup& s, const Vec& tau0, const Vec& tau1, const Vec& dtau0,
                   const Vec& dtau1);
/// Slot covectors of routh_force (the other variation zeroed).
Vec routh_force_minus(const RouthSetup& s, const Vec& tau0, const Vec& tau1);
Vec routh_force_plus(const RouthSetup& s, const Vec& tau0, const Vec& tau1);

/// Forced three-point residual of the reduced Lagrangian on shape space:
/// D1 Lr(tau_k, tau_{k+1}) + D2 Lr(tau_{k-1}, tau_k) plus the two force
/// covectors; zero exactly on shadows of momentum-mu trajectories. The slot
/// derivatives are central differences of routh_lagrangian.
Vec routh_residual(const RouthSetup& s, const Vec& tau_km1, const Vec& tau_k, const Vec& tau_kp1);

struct RouthReport {
  double max_residual = 0.0;         ///< reduced equations along the shape shadow
  double a_mu_drift = 0.0;           ///< max distance of pair connection values from e
  double momentum_error = 0.0;       ///< max |J - mu| over consecutive pairs
  double reconstruction_error = 0.0; ///< horizontal-lift chain vs the given curve
};

/// Project a momentum-mu trajectory to shape space and verify the reduced
/// equations, the horizontality of the pairs, and the reconstruction of the
/// fibers by chained horizontal lifts. Pre: every pair's momentum matches mu
/// within momentum_tol (PreconditionError otherwise).
RouthReport verify_routh(const RouthSetup& s, const DiscreteCurve& curve,
                         double momentum_tol = 1e-9);

}  // namespace dmech
