#include "dmech/bundle.hpp"

#include <cmath>
#include <utility>

namespace dmech {

TrivialBundle::TrivialBundle(int shape_dim, LieGroup group, ShapeDomain domain)
    : shape_dim_(shape_dim), group_(std::move(group)), domain_(std::move(domain)) {
  if (shape_dim < 0) throw DimensionError("TrivialBundle: negative shape dimension");
}

bool TrivialBundle::shape_in_domain(const Vec& shape) const {
  if (shape.size() != shape_dim_) return false;
  if (!shape.allFinite()) return false;
  return domain_ ? domain_(shape) : true;
}

ConfigPoint TrivialBundle::split(const Vec& q) const {
  require_dim(q, dim(), "TrivialBundle::split");
  return {q.head(shape_dim_), q.tail(fiber_dim())};
}

Vec TrivialBundle::flatten(const ConfigPoint& p) const {
  require_dim(p.shape, shape_dim_, "TrivialBundle::flatten(shape)");
  require_dim(p.fiber, fiber_dim(), "TrivialBundle::flatten(fiber)");
  Vec q(dim());
  q.head(shape_dim_) = p.shape;
  q.tail(fiber_dim()) = p.fiber;
  return q;
}

Vec TrivialBundle::shape_of(const Vec& q) const {
  require_dim(q, dim(), "TrivialBundle::shape_of");
  return q.head(shape_dim_);
}

Vec TrivialBundle::fiber_of(const Vec& q) const {
  require_dim(q, dim(), "TrivialBundle::fiber_of");
  return q.tail(fiber_dim());
}

Vec TrivialBundle::canonicalize(const Vec& q) const {
  require_dim(q, dim(), "TrivialBundle::canonicalize");
  require_finite(q, "TrivialBundle::canonicalize");
  if (!shape_in_domain(q.head(shape_dim_)))
    throw DomainError("TrivialBundle::canonicalize: shape point outside the declared domain");
  Vec out = q;
  out.tail(fiber_dim()) = group_.canonicalize(q.tail(fiber_dim()));
  return out;
}

Vec TrivialBundle::act(const Vec& g, const Vec& q) const {
  require_dim(g, fiber_dim(), "TrivialBundle::act(group element)");
  require_dim(q, dim(), "TrivialBundle::act(point)");
  Vec out = q;
  out.tail(fiber_dim()) = group_.multiply(g, q.tail(fiber_dim()));
  return out;
}

Vec TrivialBundle::inf_generator(const Vec& xi, const Vec& q) const {
  require_dim(xi, fiber_dim(), "TrivialBundle::inf_generator(algebra element)");
  require_dim(q, dim(), "TrivialBundle::inf_generator(point)");
  Vec out = Vec::Zero(dim());
  // d/dt act(exp(t xi), q): abelian chart, fiber block shifts by xi.
  out.tail(fiber_dim()) = xi;
  return out;
}

Vec TrivialBundle::group_difference(const Vec& q1, const Vec& q0, double fiber_tol) const {
  require_dim(q0, dim(), "TrivialBundle::group_difference");
  require_dim(q1, dim(), "TrivialBundle::group_difference");
  if (shape_dim_ > 0) {
    const double shape_gap = (q1.head(shape_dim_) - q0.head(shape_dim_)).lpNorm<Eigen::Infinity>();
    if (!(shape_gap <= fiber_tol))
      throw DomainError("TrivialBundle::group_difference: points are not in the same fiber");
  }
  return group_.canonicalize(group_.difference(q1.tail(fiber_dim()), q0.tail(fiber_dim())));
}

double TrivialBundle::distance(const Vec& qa, const Vec& qb) const {
  require_dim(qa, dim(), "TrivialBundle::distance");
  require_dim(qb, dim(), "TrivialBundle::distance");
  double d = shape_dim_ > 0
                 ? (qa.head(shape_dim_) - qb.head(shape_dim_)).lpNorm<Eigen::Infinity>()
                 : 0.0;
  if (fiber_dim() > 0) d = std::max(d, group_.distance(qa.tail(fiber_dim()), qb.tail(fiber_dim())));
  return d;
}

Vec PrincipalConnection::form(const TrivialBundle& b, const Vec& q, const Vec& dq) {
  require_dim(dq, b.dim(), "PrincipalConnection::form");
  return dq.tail(b.fiber_dim());
}

Vec PrincipalConnection::horizontal(const TrivialBundle& b, const Vec& dtau) {
  require_dim(dtau, b.shape_dim(), "PrincipalConnection::horizontal");
  Vec out = Vec::Zero(b.dim());
  out.head(b.shape_dim()) = dtau;
  return out;
}

// ---------------------------------------------------------------------------
// DiscreteConnection

Vec DiscreteConnection::ftilde1(const Vec& q0, const Vec& w, const Vec& tau1) const {
  return bundle_.act(w, lift(q0, tau1));
}

Mat DiscreteConnection::d1_matrix(const Vec& q0, const Vec& q1) const {
  const int gd = bundle_.fiber_dim();
  Mat J(gd, bundle_.dim());
  Vec probe = q0;
  for (Eigen::Index j = 0; j < probe.size(); ++j) {
    const double xj = probe[j];
    probe[j] = xj + fd_step_;
    const Vec ap = evaluate(probe, q1);
    probe[j] = xj - fd_step_;
    const Vec am = evaluate(probe, q1);
    probe[j] = xj;
    J.col(j) = bundle_.group().difference(ap, am) / (2.0 * fd_step_);
  }
  return J;
}

Mat DiscreteConnection::d2_matrix(const Vec& q0, const Vec& q1) const {
  const int gd = bundle_.fiber_dim();
  Mat J(gd, bundle_.dim());
  Vec probe = q1;
  for (Eigen::Index j = 0; j < probe.size(); ++j) {
    const double xj = probe[j];
    probe[j] = xj + fd_step_;
    const Vec ap = evaluate(q0, probe);
    probe[j] = xj - fd_step_;
    const Vec am = evaluate(q0, probe);
    probe[j] = xj;
    J.col(j) = bundle_.group().difference(ap, am) / (2.0 * fd_step_);
  }
  return J;
}

Vec DiscreteConnection::tangent(const Vec& q0, const Vec& q1, const Vec& dq0,
                                const Vec& dq1) const {
  require_dim(dq0, bundle_.dim(), "DiscreteConnection::tangent");
  require_dim(dq1, bundle_.dim(), "DiscreteConnection::tangent");
  return d1_matrix(q0, q1) * dq0 + d2_matrix(q0, q1) * dq1;
}

Ftilde1Jacobians DiscreteConnection::ftilde1_jacobians(const Vec& q0, const Vec& w,
                                                       const Vec& tau1) const {
  const int gd = bundle_.fiber_dim();
  const int n = bundle_.dim();
  const int m = bundle_.shape_dim();
  Ftilde1Jacobians out{Mat(gd, n), Mat(gd, gd), Mat(gd, m)};
  const auto& G = bundle_.group();
  auto fiber1 = [&](const Vec& q, const Vec& ww, const Vec& tau) {
    return bundle_.fiber_of(ftilde1(q, ww, tau));
  };
  Vec probe = q0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double xj = probe[j];
    probe[j] = xj + fd_step_;
    const Vec fp = fiber1(probe, w, tau1);
    probe[j] = xj - fd_step_;
    const Vec fm = fiber1(probe, w, tau1);
    probe[j] = xj;
    out.dq.col(j) = G.difference(fp, fm) / (2.0 * fd_step_);
  }
  Vec wp = w;
  for (Eigen::Index j = 0; j < gd; ++j) {
    const double xj = wp[j];
    wp[j] = xj + fd_step_;
    const Vec fp = fiber1(q0, wp, tau1);
    wp[j] = xj - fd_step_;
    const Vec fm = fiber1(q0, wp, tau1);
    wp[j] = xj;
    out.dw.col(j) = G.difference(fp, fm) / (2.0 * fd_step_);
  }
  Vec tp = tau1;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double xj = tp[j];
    tp[j] = xj + fd_step_;
    const Vec fp = fiber1(q0, w, tp);
    tp[j] = xj - fd_step_;
    const Vec fm = fiber1(q0, w, tp);
    tp[j] = xj;
    out.dtau.col(j) = G.difference(fp, fm) / (2.0 * fd_step_);
  }
  return out;
}

// ---------------------------------------------------------------------------
// TrivialConnection

TrivialConnection::TrivialConnection(TrivialBundle bundle)
    : DiscreteConnection(std::move(bundle)) {}

Vec TrivialConnection::evaluate(const Vec& q0, const Vec& q1) const {
  const auto& G = bundle_.group();
  return G.multiply(bundle_.fiber_of(q1), G.inverse(bundle_.fiber_of(q0)));
}

Vec TrivialConnection::level(const Vec& q) const {
  require_dim(q, bundle_.dim(), "TrivialConnection::level");
  return bundle_.group().identity();
}

Vec TrivialConnection::lift(const Vec& q0, const Vec& tau1) const {
  require_dim(tau1, bundle_.shape_dim(), "TrivialConnection::lift");
  return bundle_.flatten({tau1, bundle_.fiber_of(q0)});
}

Mat TrivialConnection::d1_matrix(const Vec& q0, const Vec& q1) const {
  const int gd = bundle_.fiber_dim();
  Mat J = Mat::Zero(gd, bundle_.dim());
  J.rightCols(gd) = -Mat::Identity(gd, gd);
  return J;
}

Mat TrivialConnection::d2_matrix(const Vec& q0, const Vec& q1) const {
  const int gd = bundle_.fiber_dim();
  Mat J = Mat::Zero(gd, bundle_.dim());
  J.rightCols(gd) = Mat::Identity(gd, gd);
  return J;
}

Ftilde1Jacobians TrivialConnection::ftilde1_jacobians(const Vec& q0, const Vec& w,
                                                      const Vec& tau1) const {
  const int gd = bundle_.fiber_dim();
  Ftilde1Jacobians out{Mat::Zero(gd, bundle_.dim()), Mat::Identity(gd, gd),
                       Mat::Zero(gd, bundle_.shape_dim())};
  out.dq.rightCols(gd) = Mat::Identity(gd, gd);
  return out;
}

// ---------------------------------------------------------------------------
// TiltedConnection

TiltedConnection::TiltedConnection(TrivialBundle bundle, Mat tilt)
    : DiscreteConnection(std::move(bundle)), tilt_(std::move(tilt)) {
  if (tilt_.rows() != bundle_.fiber_dim() || tilt_.cols() != bundle_.shape_dim())
    throw DimensionError("TiltedConnection: tilt must be fiber_dim x shape_dim");
}

Vec TiltedConnection::evaluate(const Vec& q0, const Vec& q1) const {
  const auto& G = bundle_.group();
  const Vec base = G.multiply(bundle_.fiber_of(q1), G.inverse(bundle_.fiber_of(q0)));
  const Vec shift = tilt_ * (bundle_.shape_of(q1) - bundle_.shape_of(q0));
  return G.multiply(base, G.exp(shift));
}

Vec TiltedConnection::level(const Vec& q) const {
  require_dim(q, bundle_.dim(), "TiltedConnection::level");
  return bundle_.group().identity();
}

Vec TiltedConnection::lift(const Vec& q0, const Vec& tau1) const {
  require_dim(tau1, bundle_.shape_dim(), "TiltedConnection::lift");
  const auto& G = bundle_.group();
  const Vec shift = tilt_ * (tau1 - bundle_.shape_of(q0));
  const Vec fiber = G.multiply(G.exp(-shift), bundle_.fiber_of(q0));
  return bundle_.flatten({tau1, fiber});
}

Mat TiltedConnection::d1_matrix(const Vec& q0, const Vec& q1) const {
  const int gd = bundle_.fiber_dim();
  Mat J(gd, bundle_.dim());
  J.leftCols(bundle_.shape_dim()) = -tilt_;
  J.rightCols(gd) = -Mat::Identity(gd, gd);
  return J;
}

Mat TiltedConnection::d2_matrix(const Vec& q0, const Vec& q1) const {
  const int gd = bundle_.fiber_dim();
  Mat J(gd, bundle_.dim());
  J.leftCols(bundle_.shape_dim()) = tilt_;
  J.rightCols(gd) = Mat::Identity(gd, gd);
  return J;
}

Ftilde1Jacobians TiltedConnection::ftilde1_jacobians(const Vec& q0, const Vec& w,
                                                     const Vec& tau1) const {
  const int gd = bundle_.fiber_dim();
  Ftilde1Jacobians out{Mat::Zero(gd, bundle_.dim()), Mat::Identity(gd, gd), -tilt_};
  out.dq.leftCols(bundle_.shape_dim()) = tilt_;
  out.dq.rightCols(gd) = Mat::Identity(gd, gd);
  return out;
}

// ---------------------------------------------------------------------------
// Sampled law checks

Vec sample_shape(const TrivialBundle& b, DetRng& rng, const SampleBox& box) {
  Vec s(b.shape_dim());
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = rng.uniform(box.shape_lo, box.shape_hi);
  return s;
}

Vec sample_group(const LieGroup& g, DetRng& rng, const SampleBox& box) {
  Vec v(g.dim());
  Eigen::Index at = 0;
  for (const auto& f : g.factors()) {
    for (int i = 0; i < f.dim; ++i, ++at) {
      v[at] = (f.kind == FactorKind::Circle) ? rng.uniform(0.0, 2.0 * 3.141592653589793)
                                             : rng.uniform(-box.fiber_box, box.fiber_box);
    }
  }
  return g.canonicalize(v);
}

Vec sample_config(const TrivialBundle& b, DetRng& rng, const SampleBox& box) {
  ConfigPoint p{sample_shape(b, rng, box), sample_group(b.group(), rng, box)};
  return b.flatten(p);
}

double connection_equivariance_violation(const DiscreteConnection& conn, int samples,
                                         std::uint64_t seed, const SampleBox& box) {
  DetRng rng(seed);
  const auto& b = conn.bundle();
  const auto& G = b.group();
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec q0 = sample_config(b, rng, box);
    const Vec q1 = sample_config(b, rng, box);
    const Vec g = sample_group(G, rng, box);
    const Vec lhs = conn.evaluate(b.act(g, q0), b.act(g, q1));
    const Vec rhs = G.conjugate(g, conn.evaluate(q0, q1));
    worst = std::max(worst, G.distance(lhs, rhs));
  }
  return worst;
}

double connection_lift_violation(const DiscreteConnection& conn, int samples, std::uint64_t seed,
                                 const SampleBox& box) {
  DetRng rng(seed);
  const auto& b = conn.bundle();
  const auto& G = b.group();
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec q0 = sample_config(b, rng, box);
    const Vec tau1 = sample_shape(b, rng, box);
    const Vec a = conn.evaluate(q0, conn.lift(q0, tau1));
    worst = std::max(worst, G.distance(a, G.identity()));
  }
  return worst;
}

double connection_section_violation(const DiscreteConnection& conn, int samples,
                                    std::uint64_t seed, const SampleBox& box) {
  DetRng rng(seed);
  const auto& b = conn.bundle();
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec q = sample_config(b, rng, box);
    const Vec lhs = conn.lift(q, b.shape_of(q));
    const Vec rhs = b.act(conn.level(q), q);
    worst = std::max(worst, b.distance(lhs, rhs));
  }
  return worst;
}

}  // namespace dmech
