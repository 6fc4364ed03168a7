#pragma once

#include <vector>

#include "dmech/types.hpp"

namespace dmech {

/// Supported symmetry-group building blocks. Both are abelian; products of
/// them cover every builtin system. The chart conventions are fixed:
///  - Vector factors use global linear coordinates.
///  - Circle factors use one angle canonicalized to [0, 2*pi); exp wraps,
///    log lands in (-pi, pi].
enum class FactorKind { Vector, Circle };

struct GroupFactor {
  FactorKind kind;
  int dim;  // always 1 for Circle
};

/// A finite product of vector and circle factors, with group operations
/// expressed in chart coordinates. Elements and algebra vectors are plain
/// Vec of length dim(); every operation canonicalizes circle coordinates.
class LieGroup {
 public:
  static LieGroup vector(int n);
  static LieGroup circle();
  static LieGroup product(const std::vector<LieGroup>& factors);

  int dim() const { return dim_; }
  const std::vector<GroupFactor>& factors() const { return factors_; }
  bool has_circle_factor() const;

  Vec identity() const;
  /// Wrap circle coordinates to [0, 2*pi); vector coordinates untouched.
  Vec canonicalize(const Vec& g) const;
  Vec multiply(const Vec& a, const Vec& b) const;
  Vec inverse(const Vec& g) const;
  Vec exp(const Vec& xi) const;
  /// Principal log: circle angles map to (-pi, pi].
  Vec log(const Vec& g) const;
  /// Adjoint representation Ad_g; the identity matrix for these factors.
  Mat adjoint(const Vec& g) const;
  /// Coadjoint representation Ad*_{g^{-1}} acting on algebra covectors;
  /// also the identity matrix for these abelian factors.
  Mat coadjoint(const Vec& g) const;

  /// Chart difference "a minus b" with circle components taken through the
  /// shortest representative; the algebra-valued log of a*b^{-1}.
  Vec difference(const Vec& a, const Vec& b) const;
  /// Infinity-norm distance with circle components measured along the circle.
  double distance(const Vec& a, const Vec& b) const;

  /// Tangent of right translation at the identity, T_e R_g (xi); identity on
  /// chart coordinates for these abelian factors, kept explicit so covector
  /// bookkeeping in the reduced equations stays honest.
  Vec algebra_to_tangent_right(const Vec& g, const Vec& xi) const;
  /// Right-translate a covector at g back to the identity: the map
  /// xi |-> alpha(T_e R_g (xi)) expressed in chart coordinates.
  Vec covector_to_identity_right(const Vec& g, const Vec& alpha) const;
  /// Conjugation c_g(w) = g * w * g^{-1} (trivial for abelian factors, kept
  /// explicit for the quotient-representative normalization).
  Vec conjugate(const Vec& g, const Vec& w) const;

 private:
  std::vector<GroupFactor> factors_;
  int dim_ = 0;
  bool is_circle_coord(Eigen::Index i) const { return circle_mask_[static_cast<size_t>(i)]; }
  std::vector<bool> circle_mask_;
  void rebuild_mask();
};

/// Wrap an angle to [0, 2*pi).
double wrap_angle(double theta);
/// Wrap an angle difference to (-pi, pi].
double wrap_to_pi(double delta);

}  // namespace dmech
