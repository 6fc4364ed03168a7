#pragma once

#include <memory>
#include <utility>

#include "dmech/forced.hpp"
#include "dmech/nonholonomic.hpp"

namespace dmech {

/// One entry of a reduced trajectory: a step anchored at shape `tau`, with
/// the normalized group increment `v_rep` (the fiber-conjugated value of the
/// connection along the step) and the target shape `tau_next`.
struct ReducedPoint {
  Vec tau;
  Vec v_rep;
  Vec tau_next;
};

/// A reduced trajectory: the anchor shape plus one ReducedPoint per step.
/// Consecutive points chain: points[k].tau_next == points[k+1].tau and
/// points[0].tau == tau0.
struct ReducedCurve {
  Vec tau0;
  std::vector<ReducedPoint> points;

  int size() const { return static_cast<int>(points.size()); }
};

struct ReducedSystemOptions {
  /// Sampled-invariance precondition budget; 0 skips the check.
  int invariance_samples = 32;
  double invariance_tol = 1e-10;
  std::uint64_t seed = 0x5eedf00dULL;
  SampleBox box{};
};

/// All evaluation data of the transported Lagrangian at one (q, w, tau)
/// triple: the next point, the three slot gradients obtained by chaining the
/// Lagrangian gradients through the next-point map, the connection slot
/// Jacobians at the realized pair, and (for forced systems) the pulled-back
/// force split into the same three slots.
struct ReducedCluster {
  Vec q;         ///< base configuration (dim n)
  Vec w;         ///< group element (dim g)
  Vec tau;       ///< target shape (dim m)
  Vec q_next;    ///< realized next point ftilde1(q, w, tau)
  Vec d1_full;   ///< slot-1 gradient of the transported Lagrangian (n)
  Vec d2_group;  ///< group-slot gradient (g)
  Vec d3_tau;    ///< target-shape-slot gradient (m)
  Mat a_d1;      ///< connection slot-1 Jacobian at (q, q_next), g x n
  Mat a_d2;      ///< connection slot-2 Jacobian at (q, q_next), g x n
  Vec f1;        ///< pulled-back force, slot 1 (n; zero when unforced)
  Vec f2;        ///< pulled-back force, group slot (g; zero when unforced)
  Vec f3;        ///< pulled-back force, target-shape slot (m; zero when unforced)
};

/// A symmetric system packaged with a discrete connection for reduction.
/// Construction runs a sampled invariance check of the transported
/// Lagrangian (PreconditionError on violation) because every residual below
/// silently assumes it.
class ReducedSystem {
 public:
  ReducedSystem(DiscreteMechanicalSystem sys, std::shared_ptr<const DiscreteConnection> connection,
                ReducedSystemOptions opts = {});
  ReducedSystem(ForcedDiscreteMechanicalSystem forced,
                std::shared_ptr<const DiscreteConnection> connection,
                ReducedSystemOptions opts = {});

  const DiscreteMechanicalSystem& system() const { return sys_; }
  const TrivialBundle& bundle() const;
  const DiscreteConnection& connection() const { return *conn_; }
  bool has_force() const { return has_force_; }

  int shape_dim() const;
  int group_dim() const;

  /// Transported Lagrangian: L evaluated at (q, ftilde1(q, w, tau)).
  double check_lagrangian(const Vec& q, const Vec& w, const Vec& tau) const;

  /// Evaluation cluster at a (q, w, tau) triple.
  ReducedCluster cluster(const Vec& q, const Vec& w, const Vec& tau) const;

  /// The forward cluster of a reduced point, anchored at the identity-fiber
  /// representative q = (tau, e).
  ReducedCluster forward_cluster(const ReducedPoint& p) const;
  /// The backward cluster of a reduced point: the base fiber is chosen so
  /// the realized next point is exactly the identity-fiber representative
  /// (tau_next, e), making it chain with forward_cluster of the successor.
  ReducedCluster backward_cluster(const ReducedPoint& p) const;

 private:
  DiscreteMechanicalSystem sys_;
  std::shared_ptr<const DiscreteConnection> conn_;
  DiscreteForce force_;
  bool has_force_ = false;

  void validate(const ReducedSystemOptions& opts) const;
};

/// Shape-space residual of the reduced trajectory equations across the
/// 4-point window (prev = (tau_{k-1}, v_{k-1}, tau_k), cur = (tau_k, v_k,
/// tau_{k+1})): the horizontal-lift component of the slot-1 gradient, the
/// target-shape gradient of the previous window, and the two connection
/// transport terms. Zero exactly on reduced trajectories.
Vec phi_residual(const ReducedSystem& r, const ReducedPoint& prev, const ReducedPoint& cur);

/// Fiber (momentum-balance) residual across the same window: the group-slot
/// gradients of both windows, right-translated to the identity. Zero exactly
/// on reduced trajectories.
Vec psi_residual(const ReducedSystem& r, const ReducedPoint& prev, const ReducedPoint& cur);

/// Forced variants: the unforced residuals plus the pulled-back force
/// contributions in the matching slots. With a zero force they coincide with
/// phi_residual / psi_residual exactly.
Vec forced_phi_residual(const ReducedSystem& r, const ReducedPoint& prev, const ReducedPoint& cur);
Vec forced_psi_residual(const ReducedSystem& r, const ReducedPoint& prev, const ReducedPoint& cur);

/// Componentwise reduction of a configuration curve: shapes project, group
/// increments come from the connection and are fiber-normalized.
ReducedCurve reduce_curve(const DiscreteConnection& conn, const DiscreteCurve& curve);
ReducedCurve reduce_curve(const ReducedSystem& r, const DiscreteCurve& curve);

/// Lift a reduced curve back to configurations starting from q0 (whose shape
/// must match the anchor within anchor_tol). Inverse of reduce_curve.
DiscreteCurve reconstruct(const DiscreteConnection& conn, const ReducedCurve& curve, const Vec& q0,
                          double anchor_tol = 1e-9);
DiscreteCurve reconstruct(const ReducedSystem& r, const ReducedCurve& curve, const Vec& q0,
                          double anchor_tol = 1e-9);

struct ReducedStepResult {
  ReducedPoint next;
  NewtonResult newton;
};

/// One reduced step: given the previous window (tau_{k-1}, v_{k-1}, tau_k),
/// solve the joint system psi = 0 (group rows), phi = 0 (shape rows) for
/// (v_k, tau_{k+1}).
ReducedStepResult reduced_step(const ReducedSystem& r, const ReducedPoint& prev,
                               const SolverConfig& cfg = {});

struct ReducedSimulateResult {
  ReducedCurve curve;
  std::vector<StepDiagnostics> diagnostics;
};

/// Iterate reduced steps from a seed window. The returned curve contains the
/// seed plus `steps` solved points.
ReducedSimulateResult reduced_simulate(const ReducedSystem& r, const ReducedPoint& seed, int steps,
                                       const SolverConfig& cfg = {});

/// Exactness check of the action identity between the configuration-space
/// and reduced-space pictures: for random fixed-endpoint variations of the
/// curve, the directional derivative of the action equals the directional
/// derivative of the reduced action along the induced reduced variation
/// (shape projections plus connection-transported group variations). Both
/// sides are evaluated by central differences; returns the max discrepancy.
double variational_identity_check(const ReducedSystem& r, const DiscreteCurve& curve, int trials,
                                  double fd_step = 1e-6, std::uint64_t seed = 0x5eedf00dULL);

/// Pointwise basis of the projected constraint distribution on shape space.
using ShapeBasis = std::function<Mat(const Vec&)>;  // tau -> m x k
/// Pointwise basis of the algebra directions whose generators lie in the
/// constraint distribution at q.
using FiberAlgebraBasis = std::function<Mat(const Vec&)>;  // q -> g x k

/// A constrained system packaged for reduction: the residuals are tested
/// against the projected distribution (shape side) and the admissible
/// algebra directions (fiber side) instead of full covector vanishing.
class NhReducedSystem {
 public:
  NhReducedSystem(NonholonomicDMS source, std::shared_ptr<const DiscreteConnection> connection,
                  ShapeBasis dhat_basis, FiberAlgebraBasis fiber_basis,
                  ReducedSystemOptions opts = {});

  const NonholonomicDMS& source() const { return source_; }
  const ReducedSystem& reduced() const { return red_; }

  Mat dhat_basis_at(const Vec& tau) const;
  Mat fiber_basis_at(const Vec& q) const;

 private:
  NonholonomicDMS source_;
  ReducedSystem red_;
  ShapeBasis dhat_basis_;
  FiberAlgebraBasis fiber_basis_;
};

struct NhReducedResiduals {
  Vec phi_pairings;             ///< shape residual against the projected-distribution basis
  Vec psi_pairings;             ///< fiber residual against the admissible algebra basis
  double constraint_violation;  ///< max |chi| over the two reconstructed pairs

  double inf_norm() const;
};

/// Constrained reduced residuals across a 4-point window. Preconditions: the
/// window's reconstructed pairs satisfy the kinematic constraint within
/// membership_tol, and the fiber-basis columns at the representative lie in
/// the distribution; PreconditionError otherwise.
NhReducedResiduals nh_reduced_residuals(const NhReducedSystem& n, const ReducedPoint& prev,
                                        const ReducedPoint& cur, double membership_tol = 1e-10);

struct TwoStageReport {
  double staged_vs_oneshot = 0.0;  ///< staged reconstruction vs one-shot reconstruction
  double oneshot_vs_full = 0.0;    ///< one-shot reconstruction vs the directly simulated curve
  double staged_vs_full = 0.0;     ///< staged reconstruction vs the directly simulated curve
};

/// Reduce-by-stages equivalence check for a product symmetry group: stage
/// one re-views the trailing `trailing_dim` group coordinates as the only
/// fiber (everything else becomes shape) and runs the reduced dynamics
/// there; stage two reduces the resulting shape trajectory by the leading
/// group block. The one-shot pipeline reduces by the whole group at once.
/// Both pipelines reconstruct full trajectories from the same q0, and the
/// report collects the max coordinate discrepancies. The simulated seed pair
/// is (q0, q1).
TwoStageReport two_stage_check(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1,
                               int steps, int trailing_dim, const SolverConfig& cfg = {});

}  // namespace dmech
