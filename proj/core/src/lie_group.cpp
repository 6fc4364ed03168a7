#include "dmech/lie_group.hpp"

#include <cmath>
#include <numbers>

namespace dmech {

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;
}

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTau);
  if (r < 0.0) r += kTau;
  if (r >= kTau) r -= kTau;  // guard against fmod(-eps, tau) + tau rounding to tau
  return r;
}

double wrap_to_pi(double delta) {
  double r = std::fmod(delta, kTau);
  if (r > std::numbers::pi) r -= kTau;
  if (r <= -std::numbers::pi) r += kTau;
  return r;
}

LieGroup LieGroup::vector(int n) {
  if (n < 0) throw DimensionError("LieGroup::vector: negative dimension");
  LieGroup g;
  if (n > 0) g.factors_.push_back({FactorKind::Vector, n});
  g.dim_ = n;
  g.rebuild_mask();
  return g;
}

LieGroup LieGroup::circle() {
  LieGroup g;
  g.factors_.push_back({FactorKind::Circle, 1});
  g.dim_ = 1;
  g.rebuild_mask();
  return g;
}

LieGroup LieGroup::product(const std::vector<LieGroup>& factors) {
  LieGroup g;
  for (const auto& f : factors) {
    for (const auto& sub : f.factors_) g.factors_.push_back(sub);
    g.dim_ += f.dim_;
  }
  g.rebuild_mask();
  return g;
}

void LieGroup::rebuild_mask() {
  circle_mask_.assign(static_cast<size_t>(dim_), false);
  size_t at = 0;
  for (const auto& f : factors_) {
    for (int i = 0; i < f.dim; ++i, ++at) circle_mask_[at] = (f.kind == FactorKind::Circle);
  }
}

bool LieGroup::has_circle_factor() const {
  for (const auto& f : factors_)
    if (f.kind == FactorKind::Circle) return true;
  return false;
}

Vec LieGroup::identity() const { return Vec::Zero(dim_); }

Vec LieGroup::canonicalize(const Vec& g) const {
  require_dim(g, dim_, "LieGroup::canonicalize");
  require_finite(g, "LieGroup::canonicalize");
  Vec out = g;
  for (Eigen::Index i = 0; i < dim_; ++i)
    if (is_circle_coord(i)) out[i] = wrap_angle(out[i]);
  return out;
}

Vec LieGroup::multiply(const Vec& a, const Vec& b) const {
  require_dim(a, dim_, "LieGroup::multiply");
  require_dim(b, dim_, "LieGroup::multiply");
  return canonicalize(a + b);
}

Vec LieGroup::inverse(const Vec& g) const {
  require_dim(g, dim_, "LieGroup::inverse");
  return canonicalize(-g);
}

Vec LieGroup::exp(const Vec& xi) const {
  require_dim(xi, dim_, "LieGroup::exp");
  return canonicalize(xi);
}

Vec LieGroup::log(const Vec& g) const {
  require_dim(g, dim_, "LieGroup::log");
  require_finite(g, "LieGroup::log");
  Vec out = g;
  for (Eigen::Index i = 0; i < dim_; ++i)
    if (is_circle_coord(i)) out[i] = wrap_to_pi(out[i]);
  return out;
}

Mat LieGroup::adjoint(const Vec& g) const {
  require_dim(g, dim_, "LieGroup::adjoint");
  return Mat::Identity(dim_, dim_);
}

Mat LieGroup::coadjoint(const Vec& g) const {
  require_dim(g, dim_, "LieGroup::coadjoint");
  return Mat::Identity(dim_, dim_);
}

Vec LieGroup::difference(const Vec& a, const Vec& b) const {
  require_dim(a, dim_, "LieGroup::difference");
  require_dim(b, dim_, "LieGroup::difference");
  Vec out = a - b;
  for (Eigen::Index i = 0; i < dim_; ++i)
    if (is_circle_coord(i)) out[i] = wrap_to_pi(out[i]);
  return out;
}

double LieGroup::distance(const Vec& a, const Vec& b) const {
  if (dim_ == 0) return 0.0;
  return difference(a, b).lpNorm<Eigen::Infinity>();
}

Vec LieGroup::algebra_to_tangent_right(const Vec& g, const Vec& xi) const {
  require_dim(g, dim_, "LieGroup::algebra_to_tangent_right");
  require_dim(xi, dim_, "LieGroup::algebra_to_tangent_right");
  return xi;  // abelian chart: right translation is a coordinate shift
}

Vec LieGroup::covector_to_identity_right(const Vec& g, const Vec& alpha) const {
  require_dim(g, dim_, "LieGroup::covector_to_identity_right");
  require_dim(alpha, dim_, "LieGroup::covector_to_identity_right");
  return alpha;  // dual of the identity tangent map
}

Vec LieGroup::conjugate(const Vec& g, const Vec& w) const {
  require_dim(g, dim_, "LieGroup::conjugate");
  require_dim(w, dim_, "LieGroup::conjugate");
  return canonicalize(w);
}

}  // namespace dmech
