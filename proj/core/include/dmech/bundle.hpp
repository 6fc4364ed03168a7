#pragma once

#include <functional>
#include <memory>

#include "dmech/derivatives.hpp"
#include "dmech/lie_group.hpp"
#include "dmech/types.hpp"

namespace dmech {

/// A configuration split into its shape and fiber parts.
struct ConfigPoint {
  Vec shape;
  Vec fiber;
};

/// Trivialized configuration bundle Q = S x G with the group acting on the
/// fiber by left multiplication. Flat coordinates store the shape block
/// first, then the fiber block; all dynamic code works on flat coordinates
/// and uses this class to split, act, wrap and compare.
class TrivialBundle {
 public:
  using ShapeDomain = std::function<bool(const Vec&)>;

  TrivialBundle(int shape_dim, LieGroup group, ShapeDomain domain = {});

  int shape_dim() const { return shape_dim_; }
  int fiber_dim() const { return group_.dim(); }
  int dim() const { return shape_dim_ + group_.dim(); }
  const LieGroup& group() const { return group_; }

  /// True when the shape point lies in the declared domain (default: any
  /// finite point).
  bool shape_in_domain(const Vec& shape) const;

  ConfigPoint split(const Vec& q) const;
  Vec flatten(const ConfigPoint& p) const;
  Vec shape_of(const Vec& q) const;
  Vec fiber_of(const Vec& q) const;
  /// Wrap the fiber block's circle coordinates; validates dimensions and
  /// the shape domain.
  Vec canonicalize(const Vec& q) const;

  /// Left action l_g(s, h) = (s, g h) in flat coordinates.
  Vec act(const Vec& g, const Vec& q) const;
  /// Infinitesimal generator xi_Q(q) as a flat tangent vector.
  Vec inf_generator(const Vec& xi, const Vec& q) const;
  /// The unique g with act(g, q0) = q1. Requires both points in one fiber:
  /// shapes equal within `fiber_tol` (infinity norm), else DomainError.
  Vec group_difference(const Vec& q1, const Vec& q0, double fiber_tol = 1e-12) const;
  /// Infinity-norm distance, circle-aware on the fiber block.
  double distance(const Vec& qa, const Vec& qb) const;

 private:
  int shape_dim_;
  LieGroup group_;
  ShapeDomain domain_;
};

/// The trivial (Maurer-Cartan) principal connection on a trivialized bundle:
/// the connection form reads off the fiber velocity, and horizontal lifts
/// put zero in the fiber slot.
struct PrincipalConnection {
  /// Connection one-form value: the algebra part of a flat tangent vector.
  static Vec form(const TrivialBundle& b, const Vec& q, const Vec& dq);
  /// Horizontal lift of a shape tangent at q: (dtau, 0) in flat coordinates.
  static Vec horizontal(const TrivialBundle& b, const Vec& dtau);
};

/// Jacobian blocks of the fiber part of the next-point map
/// ftilde1(q0, w, tau1); the shape part is tau1 identically, so only the
/// fiber rows carry information.
struct Ftilde1Jacobians {
  Mat dq;    // fiber_dim x dim
  Mat dw;    // fiber_dim x fiber_dim
  Mat dtau;  // fiber_dim x shape_dim
};

/// Discrete analogue of an affine connection on Q = S x G: a group-valued
/// two-point map A(q0, q1), equivariant under the diagonal action through
/// conjugation, equal to the identity exactly on the horizontal pairs, with
/// a discrete horizontal lift through each point. Implementations provide
/// the evaluation, level map and lift; tangent data defaults to central
/// differences and can be overridden with analytic blocks.
class DiscreteConnection {
 public:
  explicit DiscreteConnection(TrivialBundle bundle, double fd_step = 1e-6)
      : bundle_(std::move(bundle)), fd_step_(fd_step) {}
  virtual ~DiscreteConnection() = default;

  const TrivialBundle& bundle() const { return bundle_; }

  /// A(q0, q1), a group element.
  virtual Vec evaluate(const Vec& q0, const Vec& q1) const = 0;
  /// Level map gamma(q): the group element whose graph the horizontal set
  /// contains, conjugation-equivariant.
  virtual Vec level(const Vec& q) const = 0;
  /// Discrete horizontal lift: the point over tau1 with A(q0, lift) = e.
  virtual Vec lift(const Vec& q0, const Vec& tau1) const = 0;

  /// Next-point map F1(q0, w, tau1) = act(w, lift(q0, tau1)).
  Vec ftilde1(const Vec& q0, const Vec& w, const Vec& tau1) const;

  /// Slot Jacobians of A in chart coordinates (rows: algebra, through the
  /// right translation to the identity). Default: central differences.
  virtual Mat d1_matrix(const Vec& q0, const Vec& q1) const;
  virtual Mat d2_matrix(const Vec& q0, const Vec& q1) const;
  /// Directional derivative of A along (dq0, dq1), as an algebra element.
  Vec tangent(const Vec& q0, const Vec& q1, const Vec& dq0, const Vec& dq1) const;

  /// Fiber-row Jacobians of ftilde1. Default: central differences on the
  /// lift; overridden analytically where a closed form exists.
  virtual Ftilde1Jacobians ftilde1_jacobians(const Vec& q0, const Vec& w, const Vec& tau1) const;

 protected:
  TrivialBundle bundle_;
  double fd_step_;
};

/// The canonical connection on a trivialized bundle: A((s0,h0),(s1,h1)) =
/// h1 * h0^{-1}, level identically e, lift over tau1 keeps the fiber of q0.
class TrivialConnection : public DiscreteConnection {
 public:
  explicit TrivialConnection(TrivialBundle bundle);
  Vec evaluate(const Vec& q0, const Vec& q1) const override;
  Vec level(const Vec& q) const override;
  Vec lift(const Vec& q0, const Vec& tau1) const override;
  Mat d1_matrix(const Vec& q0, const Vec& q1) const override;
  Mat d2_matrix(const Vec& q0, const Vec& q1) const override;
  Ftilde1Jacobians ftilde1_jacobians(const Vec& q0, const Vec& w, const Vec& tau1) const override;
};

/// A shape-tilted variant: A((s0,h0),(s1,h1)) = h1 * h0^{-1} * exp(T (s1-s0))
/// for a fixed algebra-valued tilt matrix T. Still an affine discrete
/// connection with level e (the tilt vanishes on diagonal shape pairs);
/// exercises every connection-tangent term that the canonical connection
/// leaves at zero.
class TiltedConnection : public DiscreteConnection {
 public:
  TiltedConnection(TrivialBundle bundle, Mat tilt);
  Vec evaluate(const Vec& q0, const Vec& q1) const override;
  Vec level(const Vec& q) const override;
  Vec lift(const Vec& q0, const Vec& tau1) const override;
  Mat d1_matrix(const Vec& q0, const Vec& q1) const override;
  Mat d2_matrix(const Vec& q0, const Vec& q1) const override;
  Ftilde1Jacobians ftilde1_jacobians(const Vec& q0, const Vec& w, const Vec& tau1) const override;

 private:
  Mat tilt_;  // fiber_dim x shape_dim
};

/// Sampling box for the law checks below.
struct SampleBox {
  double shape_lo = 0.6;
  double shape_hi = 1.6;
  double fiber_box = 1.5;  // vector fiber coordinates drawn from [-box, box]
};

Vec sample_shape(const TrivialBundle& b, DetRng& rng, const SampleBox& box);
Vec sample_group(const LieGroup& g, DetRng& rng, const SampleBox& box);
Vec sample_config(const TrivialBundle& b, DetRng& rng, const SampleBox& box);

/// Max over `samples` draws of the conjugation-equivariance defect
/// |A(g q0, g q1) - g A(q0,q1) g^{-1}|.
double connection_equivariance_violation(const DiscreteConnection& conn, int samples,
                                         std::uint64_t seed, const SampleBox& box = {});
/// Max defect of A(q0, lift(q0, tau1)) = e over sampled (q0, tau1).
double connection_lift_violation(const DiscreteConnection& conn, int samples, std::uint64_t seed,
                                 const SampleBox& box = {});
/// Max defect of lift(q, pi(q)) = act(level(q), q) over sampled q.
double connection_section_violation(const DiscreteConnection& conn, int samples,
                                    std::uint64_t seed, const SampleBox& box = {});

}  // namespace dmech
