#pragma once

#include "dmech/dms.hpp"

namespace dmech {

/// A regular distribution on R^n given by a pointwise basis and a pointwise
/// annihilator basis. `basis(q)` returns n x rank (columns span D_q),
/// `annihilator(q)` returns (n - rank) x n (rows span the annihilator).
struct DistributionSpec {
  int dim = 0;
  int rank = 0;
  std::function<Mat(const Vec&)> basis;
  std::function<Mat(const Vec&)> annihilator;

  Mat basis_at(const Vec& q) const;
  Mat annihilator_at(const Vec& q) const;
};

using KinematicConstraint = std::function<Vec(const Vec&, const Vec&)>;

/// A discrete mechanical system with a velocity constraint (distribution)
/// and a two-point kinematic constraint whose zero set discretizes it.
/// chi has dim - rank components and vanishes on admissible pairs.
class NonholonomicDMS {
 public:
  NonholonomicDMS(DiscreteMechanicalSystem sys, DistributionSpec dist, KinematicConstraint chi);

  const DiscreteMechanicalSystem& system() const { return sys_; }
  DiscreteMechanicalSystem& system() { return sys_; }
  const DistributionSpec& distribution() const { return dist_; }
  int dim() const { return sys_.dim(); }
  int codim() const { return sys_.dim() - dist_.rank; }

  /// chi(q0, q1), dimension codim().
  Vec constraint(const Vec& q0, const Vec& q1) const;

 private:
  DiscreteMechanicalSystem sys_;
  DistributionSpec dist_;
  KinematicConstraint chi_;
};

struct DlaResidual {
  Vec projected;   ///< three-point residual paired with the D_q1 basis (rank entries)
  Vec constraint;  ///< chi(q1, q2) (codim entries)

  double inf_norm() const;
};

/// Constrained three-point residual: the unconstrained residual projected
/// onto the distribution at the middle point, plus the kinematic constraint
/// of the forward pair. Zero exactly on constrained trajectories.
DlaResidual dla_residual(const NonholonomicDMS& n, const Vec& q0, const Vec& q1, const Vec& q2);

struct NhStepResult {
  Vec q2;
  NewtonResult newton;
};

/// One constrained step: solve the dim()-equation system
///   <three-point residual, E_i(q1)> = 0  (rank rows)
///   chi(q1, q2) = 0                      (codim rows)
/// for q2 alone. Multipliers never appear.
NhStepResult nh_step(const NonholonomicDMS& n, const Vec& q0, const Vec& q1,
                     const SolverConfig& cfg = {});

struct NhMultiplierResult {
  Vec q2;
  Vec lambda;  ///< coefficients of the annihilator rows at q1
  NewtonResult newton;
};

/// Independent one-step oracle in multiplier form: solve for (q2, lambda) from
///   D2 L(q0,q1) + D1 L(q1,q2) - lambda^T omega(q1) = 0, chi(q1, q2) = 0.
/// Cross-checks nh_step; the two must agree to solver accuracy.
NhMultiplierResult nh_multiplier_oracle(const NonholonomicDMS& n, const Vec& q0, const Vec& q1,
                                        const SolverConfig& cfg = {});

struct NhSimulateResult {
  DiscreteCurve curve;
  std::vector<StepDiagnostics> diagnostics;
  Mat multipliers;       ///< row k-1: least-squares multipliers recovered at interior step k
  Vec constraint_norms;  ///< |chi(q_k, q_{k+1})|_inf for every consecutive pair
};

/// Iterate constrained steps. Precondition: the seed pair satisfies
/// |chi(q0,q1)| <= seed_tol (default 1e-10), else PreconditionError.
NhSimulateResult nh_simulate(const NonholonomicDMS& n, const Vec& q0, const Vec& q1, int steps,
                             const SolverConfig& cfg = {}, double seed_tol = 1e-10);

struct NhRegularityReport {
  bool regular = false;
  double condition = 0.0;  ///< condition estimate of the constrained step system
  double threshold = 1e12;
};

/// Flow-regularity probe at a triple: condition number of the Jacobian of the
/// combined multiplier-form step system (residual and constraint rows versus
/// the unknowns q2 and lambda), evaluated at (q2, lambda = 0).
NhRegularityReport nh_regularity_test(const NonholonomicDMS& n, const Vec& q0, const Vec& q1,
                                      const Vec& q2, double threshold = 1e12);

/// A configuration-dependent symmetry direction: q |-> algebra element of the
/// translation symmetry, with the generator required to lie in D_q.
using AlgebraSection = std::function<Vec(const Vec&)>;

/// Momentum of a section at a pair: -D1 L(q0,q1) . xi(q0). Precondition: the
/// section value at q0 lies in D_{q0} (annihilator pairing below 1e-10).
double nh_momentum(const NonholonomicDMS& n, const AlgebraSection& section, const Vec& q0,
                   const Vec& q1, double membership_tol = 1e-10);

/// Residual of the constrained momentum evolution law across three points:
/// [J(q_k, q_{k+1}) - J(q_{k-1}, q_k)] + D1 L(q_{k-1}, q_k) . (xi(q_k) - xi(q_{k-1})).
/// Zero on constrained trajectories.
double nh_momentum_evolution_residual(const NonholonomicDMS& n, const AlgebraSection& section,
                                      const Vec& qkm1, const Vec& qk, const Vec& qkp1,
                                      double membership_tol = 1e-10);

}  // namespace dmech
