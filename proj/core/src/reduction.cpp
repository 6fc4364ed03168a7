#include "dmech/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dmech {

namespace {

// Shape-space rows of the reduced trajectory equations across a prepared
// 4-point window.
Vec phi_from(const ReducedCluster& prev, const ReducedCluster& cur, int m) {
  return cur.d1_full.head(m) + prev.d3_tau +
         cur.a_d1.leftCols(m).transpose() * cur.d2_group +
         prev.a_d2.leftCols(m).transpose() * prev.d2_group;
}

// Fiber (momentum-balance) rows, right-translated to the identity.
Vec psi_from(const LieGroup& g, const ReducedCluster& prev, const ReducedCluster& cur) {
  return g.covector_to_identity_right(prev.w, prev.d2_group) -
         g.covector_to_identity_right(cur.w, cur.d2_group);
}

Vec forced_phi_extra(const ReducedCluster& prev, const ReducedCluster& cur, int m) {
  return cur.f1.head(m) + prev.f3 + cur.a_d1.leftCols(m).transpose() * cur.f2 +
         prev.a_d2.leftCols(m).transpose() * prev.f2;
}

Vec forced_psi_extra(const ReducedCluster& prev, const ReducedCluster& cur, int g) {
  return cur.f1.tail(g) + cur.a_d1.rightCols(g).transpose() * cur.f2 +
         prev.a_d2.rightCols(g).transpose() * prev.f2;
}

void require_window(const ReducedPoint& prev, const ReducedPoint& cur) {
  if (prev.tau_next.size() != cur.tau.size() ||
      (prev.tau_next - cur.tau).lpNorm<Eigen::Infinity>() > 1e-9)
    throw PreconditionError("reduced window does not chain: prev.tau_next must equal cur.tau");
}

void require_point(const TrivialBundle& b, const ReducedPoint& p, const char* what) {
  require_dim(p.tau, b.shape_dim(), what);
  require_dim(p.v_rep, b.fiber_dim(), what);
  require_dim(p.tau_next, b.shape_dim(), what);
  require_finite(p.tau, what);
  require_finite(p.v_rep, what);
  require_finite(p.tau_next, what);
}

}  // namespace

ReducedSystem::ReducedSystem(DiscreteMechanicalSystem sys,
                             std::shared_ptr<const DiscreteConnection> connection,
                             ReducedSystemOptions opts)
    : sys_(std::move(sys)), conn_(std::move(connection)) {
  if (!conn_) throw DimensionError("ReducedSystem: null connection");
  if (!sys_.bundle()) throw PreconditionError("ReducedSystem: the system carries no bundle");
  const TrivialBundle& b = *sys_.bundle();
  if (conn_->bundle().dim() != b.dim() || conn_->bundle().shape_dim() != b.shape_dim())
    throw DimensionError("ReducedSystem: connection bundle does not match the system bundle");
  force_ = zero_force(sys_.dim());
  validate(opts);
}

ReducedSystem::ReducedSystem(ForcedDiscreteMechanicalSystem forced,
                             std::shared_ptr<const DiscreteConnection> connection,
                             ReducedSystemOptions opts)
    : ReducedSystem(forced.system(), std::move(connection), opts) {
  auto keeper = std::make_shared<const ForcedDiscreteMechanicalSystem>(std::move(forced));
  force_.minus = [keeper](const Vec& a, const Vec& b) { return keeper->force_minus(a, b); };
  force_.plus = [keeper](const Vec& a, const Vec& b) { return keeper->force_plus(a, b); };
  has_force_ = true;
}

const TrivialBundle& ReducedSystem::bundle() const { return *sys_.bundle(); }

int ReducedSystem::shape_dim() const { return bundle().shape_dim(); }

int ReducedSystem::group_dim() const { return bundle().fiber_dim(); }

void ReducedSystem::validate(const ReducedSystemOptions& opts) const {
  if (opts.invariance_samples <= 0) return;
  const TrivialBundle& b = bundle();
  const LieGroup& g = b.group();
  DetRng rng(opts.seed);
  double worst = 0.0;
  for (int i = 0; i < opts.invariance_samples; ++i) {
    Vec q = sample_config(b, rng, opts.box);
    Vec w = sample_group(g, rng, opts.box);
    Vec tau = sample_shape(b, rng, opts.box);
    Vec gg = sample_group(g, rng, opts.box);
    double base = check_lagrangian(q, w, tau);
    double moved = check_lagrangian(b.act(gg, q), g.conjugate(gg, w), tau);
    worst = std::max(worst, std::abs(moved - base));
  }
  if (!(worst <= opts.invariance_tol))
    throw PreconditionError(
        "ReducedSystem: transported Lagrangian is not invariant under the sampled group action "
        "(worst defect " +
        std::to_string(worst) + ")");
}

double ReducedSystem::check_lagrangian(const Vec& q, const Vec& w, const Vec& tau) const {
  const TrivialBundle& b = bundle();
  require_dim(q, b.dim(), "check_lagrangian: q");
  require_dim(w, b.fiber_dim(), "check_lagrangian: w");
  require_dim(tau, b.shape_dim(), "check_lagrangian: tau");
  return sys_.lagrangian(q, conn_->ftilde1(q, w, tau));
}

ReducedCluster ReducedSystem::cluster(const Vec& q, const Vec& w, const Vec& tau) const {
  const TrivialBundle& b = bundle();
  const int n = b.dim();
  const int gd = b.fiber_dim();
  const int m = b.shape_dim();
  require_dim(q, n, "cluster: q");
  require_dim(w, gd, "cluster: w");
  require_dim(tau, m, "cluster: tau");
  require_finite(q, "cluster: q");
  require_finite(w, "cluster: w");
  require_finite(tau, "cluster: tau");

  ReducedCluster c;
  c.q = q;
  c.w = w;
  c.tau = tau;
  c.q_next = conn_->ftilde1(q, w, tau);

  const Ftilde1Jacobians jac = conn_->ftilde1_jacobians(q, w, tau);
  const Vec ld1 = sys_.d1(q, c.q_next);
  const Vec ld2 = sys_.d2(q, c.q_next);
  const Vec ld2_fiber = ld2.tail(gd);
  c.d1_full = ld1 + jac.dq.transpose() * ld2_fiber;
  c.d2_group = jac.dw.transpose() * ld2_fiber;
  c.d3_tau = ld2.head(m) + jac.dtau.transpose() * ld2_fiber;
  c.a_d1 = conn_->d1_matrix(q, c.q_next);
  c.a_d2 = conn_->d2_matrix(q, c.q_next);

  if (has_force_) {
    const Vec fm = force_.minus(q, c.q_next);
    const Vec fp = force_.plus(q, c.q_next);
    const Vec fp_fiber = fp.tail(gd);
    c.f1 = fm + jac.dq.transpose() * fp_fiber;
    c.f2 = jac.dw.transpose() * fp_fiber;
    c.f3 = fp.head(m) + jac.dtau.transpose() * fp_fiber;
  } else {
    c.f1 = Vec::Zero(n);
    c.f2 = Vec::Zero(gd);
    c.f3 = Vec::Zero(m);
  }
  return c;
}

ReducedCluster ReducedSystem::forward_cluster(const ReducedPoint& p) const {
  const TrivialBundle& b = bundle();
  require_point(b, p, "forward_cluster: point");
  const Vec q = b.flatten({p.tau, b.group().identity()});
  return cluster(q, p.v_rep, p.tau_next);
}

ReducedCluster ReducedSystem::backward_cluster(const ReducedPoint& p) const {
  const TrivialBundle& b = bundle();
  const LieGroup& g = b.group();
  require_point(b, p, "backward_cluster: point");
  // Choose the base fiber so the realized next point is exactly the
  // identity-fiber representative over tau_next: with the abelian
  // equivariance of the connection, h = v^{-1} * l^{-1} where l is the
  // lift fiber through (tau, e).
  const Vec rep = b.flatten({p.tau, g.identity()});
  const Vec ell = b.fiber_of(conn_->lift(rep, p.tau_next));
  const Vec h = g.multiply(g.inverse(p.v_rep), g.inverse(ell));
  const Vec q_prev = b.flatten({p.tau, h});
  const Vec w_prev = g.conjugate(h, p.v_rep);
  ReducedCluster c = cluster(q_prev, w_prev, p.tau_next);
  const Vec target = b.flatten({p.tau_next, g.identity()});
  if (b.distance(c.q_next, target) > 1e-9)
    throw EvaluationError(
        "backward_cluster: connection transport failed to close the window on the "
        "identity-fiber representative");
  return c;
}

Vec phi_residual(const ReducedSystem& r, const ReducedPoint& prev, const ReducedPoint& cur) {
  require_window(prev, cur);
  const ReducedCluster pc = r.backward_cluster(prev);
  const ReducedCluster cc = r.forward_cluster(cur);
  return phi_from(pc, cc, r.shape_dim());
}

Vec psi_residual(const ReducedSystem& r, const ReducedPoint& prev, const ReducedPoint& cur) {
  require_window(prev, cur);
  const ReducedCluster pc = r.backward_cluster(prev);
  const ReducedCluster cc = r.forward_cluster(cur);
  return psi_from(r.bundle().group(), pc, cc);
}

Vec forced_phi_residual(const ReducedSystem& r, const ReducedPoint& prev,
                        const ReducedPoint& cur) {
  require_window(prev, cur);
  const ReducedCluster pc = r.backward_cluster(prev);
  const ReducedCluster cc = r.forward_cluster(cur);
  const int m = r.shape_dim();
  return phi_from(pc, cc, m) + forced_phi_extra(pc, cc, m);
}

Vec forced_psi_residual(const ReducedSystem& r, const ReducedPoint& prev,
                        const ReducedPoint& cur) {
  require_window(prev, cur);
  const ReducedCluster pc = r.backward_cluster(prev);
  const ReducedCluster cc = r.forward_cluster(cur);
  return psi_from(r.bundle().group(), pc, cc) + forced_psi_extra(pc, cc, r.group_dim());
}

ReducedCurve reduce_curve(const DiscreteConnection& conn, const DiscreteCurve& curve) {
  const TrivialBundle& b = conn.bundle();
  if (curve.size() < 2) throw DimensionError("reduce_curve: need at least two points");
  const LieGroup& g = b.group();
  ReducedCurve out;
  out.tau0 = b.shape_of(curve.front());
  out.points.reserve(curve.size() - 1);
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    require_dim(curve[k], b.dim(), "reduce_curve: curve point");
    require_dim(curve[k + 1], b.dim(), "reduce_curve: curve point");
    const Vec h = b.fiber_of(curve[k]);
    const Vec a = conn.evaluate(curve[k], curve[k + 1]);
    ReducedPoint p;
    p.tau = b.shape_of(curve[k]);
    p.v_rep = g.conjugate(g.inverse(h), a);
    p.tau_next = b.shape_of(curve[k + 1]);
    out.points.push_back(std::move(p));
  }
  return out;
}

ReducedCurve reduce_curve(const ReducedSystem& r, const DiscreteCurve& curve) {
  return reduce_curve(r.connection(), curve);
}

DiscreteCurve reconstruct(const DiscreteConnection& conn, const ReducedCurve& curve,
                          const Vec& q0, double anchor_tol) {
  const TrivialBundle& b = conn.bundle();
  const LieGroup& g = b.group();
  require_dim(q0, b.dim(), "reconstruct: q0");
  require_finite(q0, "reconstruct: q0");
  if (curve.points.empty()) throw DimensionError("reconstruct: empty reduced curve");
  if ((b.shape_of(q0) - curve.tau0).lpNorm<Eigen::Infinity>() > anchor_tol)
    throw PreconditionError("reconstruct: q0 does not sit over the reduced curve's anchor shape");

  DiscreteCurve out;
  out.reserve(curve.points.size() + 1);
  out.push_back(b.canonicalize(q0));
  Vec expected = curve.tau0;
  for (const ReducedPoint& p : curve.points) {
    require_dim(p.v_rep, b.fiber_dim(), "reconstruct: v_rep");
    if (p.tau.size() != expected.size() ||
        (p.tau - expected).lpNorm<Eigen::Infinity>() > anchor_tol)
      throw PreconditionError("reconstruct: reduced curve does not chain");
    const Vec& qk = out.back();
    const Vec w = g.conjugate(b.fiber_of(qk), p.v_rep);
    out.push_back(conn.ftilde1(qk, w, p.tau_next));
    expected = p.tau_next;
  }
  return out;
}

DiscreteCurve reconstruct(const ReducedSystem& r, const ReducedCurve& curve, const Vec& q0,
                          double anchor_tol) {
  return reconstruct(r.connection(), curve, q0, anchor_tol);
}

ReducedStepResult reduced_step(const ReducedSystem& r, const ReducedPoint& prev,
                               const SolverConfig& cfg) {
  const TrivialBundle& b = r.bundle();
  const LieGroup& g = b.group();
  const int m = b.shape_dim();
  const int gd = b.fiber_dim();
  require_point(b, prev, "reduced_step: previous window");

  // The trailing window of the 4-point equations is fixed during the solve.
  const ReducedCluster pc = r.backward_cluster(prev);

  auto residual = [&](const Vec& x) -> Vec {
    ReducedPoint cur{prev.tau_next, x.head(gd), x.tail(m)};
    const ReducedCluster cc = r.forward_cluster(cur);
    Vec res(gd + m);
    res.head(gd) = psi_from(g, pc, cc);
    res.tail(m) = phi_from(pc, cc, m);
    if (r.has_force()) {
      res.head(gd) += forced_psi_extra(pc, cc, gd);
      res.tail(m) += forced_phi_extra(pc, cc, m);
    }
    return res;
  };

  Vec x0(gd + m);
  x0.head(gd) = prev.v_rep;
  x0.tail(m) = 2.0 * prev.tau_next - prev.tau;

  ReducedStepResult out;
  out.newton = newton_solve(residual, x0, cfg.newton());
  out.next.tau = prev.tau_next;
  out.next.v_rep = out.newton.root.head(gd);
  out.next.tau_next = out.newton.root.tail(m);
  if (out.newton.converged() && !b.shape_in_domain(out.next.tau_next))
    throw DomainError("reduced_step: solved shape left the declared domain");
  return out;
}

ReducedSimulateResult reduced_simulate(const ReducedSystem& r, const ReducedPoint& seed,
                                       int steps, const SolverConfig& cfg) {
  if (steps < 0) throw DimensionError("reduced_simulate: negative step count");
  require_point(r.bundle(), seed, "reduced_simulate: seed");
  ReducedSimulateResult out;
  out.curve.tau0 = seed.tau;
  out.curve.points.push_back(seed);
  out.diagnostics.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const ReducedStepResult srs = reduced_step(r, out.curve.points.back(), cfg);
    if (!srs.newton.converged())
      throw SolveError("reduced_simulate: step " + std::to_string(k) + " failed (" +
                           to_string(srs.newton.status) + ")",
                       k, srs.newton);
    StepDiagnostics d;
    d.index = k + 1;
    d.newton_iterations = srs.newton.iterations;
    d.residual_norm = srs.newton.residual_norm;
    d.condition = srs.newton.condition;
    out.diagnostics.push_back(d);
    out.curve.points.push_back(srs.next);
  }
  return out;
}

double variational_identity_check(const ReducedSystem& r, const DiscreteCurve& curve, int trials,
                                  double fd_step, std::uint64_t seed) {
  const TrivialBundle& b = r.bundle();
  const LieGroup& g = b.group();
  const DiscreteConnection& conn = r.connection();
  const int n = b.dim();
  const int m = b.shape_dim();
  if (curve.size() < 3)
    throw DimensionError("variational_identity_check: need at least three points");
  if (trials < 0) throw DimensionError("variational_identity_check: trials must be nonnegative");
  if (trials == 0) return 0.0;
  const int count = static_cast<int>(curve.size());
  const ReducedCurve red = reduce_curve(conn, curve);
  const DiscreteMechanicalSystem& sys = r.system();

  DetRng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<Vec> dq(static_cast<std::size_t>(count));
    dq.front() = Vec::Zero(n);
    dq.back() = Vec::Zero(n);
    for (int k = 1; k + 1 < count; ++k) {
      Vec v(n);
      for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
      dq[static_cast<std::size_t>(k)] = v;
    }

    auto action_at = [&](double eps) {
      double s = 0.0;
      for (int k = 0; k + 1 < count; ++k)
        s += sys.lagrangian(curve[static_cast<std::size_t>(k)] + eps * dq[static_cast<std::size_t>(k)],
                            curve[static_cast<std::size_t>(k) + 1] +
                                eps * dq[static_cast<std::size_t>(k) + 1]);
      return s;
    };
    const double lhs = (action_at(fd_step) - action_at(-fd_step)) / (2.0 * fd_step);

    double rhs = 0.0;
    for (int k = 0; k + 1 < count; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      const ReducedPoint& p = red.points[ks];
      const Vec dtau0 = dq[ks].head(m);
      const Vec dtau1 = dq[ks + 1].head(m);
      const Vec dw = conn.tangent(curve[ks], curve[ks + 1], dq[ks], dq[ks + 1]);
      auto lhat = [&](double eps) {
        const Vec q = b.flatten({p.tau + eps * dtau0, g.identity()});
        return r.check_lagrangian(q, p.v_rep + eps * dw, p.tau_next + eps * dtau1);
      };
      rhs += (lhat(fd_step) - lhat(-fd_step)) / (2.0 * fd_step);
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

NhReducedSystem::NhReducedSystem(NonholonomicDMS source,
                                 std::shared_ptr<const DiscreteConnection> connection,
                                 ShapeBasis dhat_basis, FiberAlgebraBasis fiber_basis,
                                 ReducedSystemOptions opts)
    : source_(std::move(source)),
      red_(source_.system(), std::move(connection), opts),
      dhat_basis_(std::move(dhat_basis)),
      fiber_basis_(std::move(fiber_basis)) {
  if (!dhat_basis_) throw DimensionError("NhReducedSystem: missing projected-distribution basis");
  if (!fiber_basis_) throw DimensionError("NhReducedSystem: missing fiber algebra basis");
}

Mat NhReducedSystem::dhat_basis_at(const Vec& tau) const {
  Mat basis = dhat_basis_(tau);
  if (basis.rows() != red_.shape_dim())
    throw DimensionError("dhat_basis_at: rows must match the shape dimension");
  if (!basis.allFinite()) throw EvaluationError("dhat_basis_at: non-finite basis");
  return basis;
}

Mat NhReducedSystem::fiber_basis_at(const Vec& q) const {
  Mat basis = fiber_basis_(q);
  if (basis.rows() != red_.group_dim())
    throw DimensionError("fiber_basis_at: rows must match the group dimension");
  if (!basis.allFinite()) throw EvaluationError("fiber_basis_at: non-finite basis");
  return basis;
}

double NhReducedResiduals::inf_norm() const {
  const double a = phi_pairings.size() ? phi_pairings.lpNorm<Eigen::Infinity>() : 0.0;
  const double b = psi_pairings.size() ? psi_pairings.lpNorm<Eigen::Infinity>() : 0.0;
  return std::max(a, b);
}

NhReducedResiduals nh_reduced_residuals(const NhReducedSystem& n, const ReducedPoint& prev,
                                        const ReducedPoint& cur, double membership_tol) {
  const ReducedSystem& r = n.reduced();
  require_window(prev, cur);
  const ReducedCluster pc = r.backward_cluster(prev);
  const ReducedCluster cc = r.forward_cluster(cur);
  const TrivialBundle& b = r.bundle();
  const NonholonomicDMS& src = n.source();

  const Vec chi_prev = src.constraint(pc.q, cc.q);
  const Vec chi_cur = src.constraint(cc.q, cc.q_next);
  const double violation =
      std::max(chi_prev.lpNorm<Eigen::Infinity>(), chi_cur.lpNorm<Eigen::Infinity>());
  if (violation > membership_tol)
    throw PreconditionError(
        "nh_reduced_residuals: window violates the kinematic constraint (|chi| = " +
        std::to_string(violation) + ")");

  const Mat xi = n.fiber_basis_at(cc.q);
  const Mat ann = src.distribution().annihilator_at(cc.q);
  for (Eigen::Index j = 0; j < xi.cols(); ++j) {
    const Vec gen = b.inf_generator(xi.col(j), cc.q);
    if ((ann * gen).lpNorm<Eigen::Infinity>() > membership_tol)
      throw PreconditionError("nh_reduced_residuals: fiber basis column " + std::to_string(j) +
                              " leaves the constraint distribution");
  }

  NhReducedResiduals out;
  out.phi_pairings = n.dhat_basis_at(cur.tau).transpose() * phi_from(pc, cc, b.shape_dim());
  out.psi_pairings = xi.transpose() * psi_from(b.group(), pc, cc);
  out.constraint_violation = violation;
  return out;
}

namespace {

// Per-coordinate leading/trailing split of a product group.
std::pair<LieGroup, LieGroup> split_group(const LieGroup& g, int trailing_dim) {
  const int lead = g.dim() - trailing_dim;
  std::vector<LieGroup> leading;
  std::vector<LieGroup> trailing;
  int pos = 0;
  for (const GroupFactor& f : g.factors()) {
    for (int c = 0; c < f.dim; ++c, ++pos) {
      LieGroup unit = (f.kind == FactorKind::Circle) ? LieGroup::circle() : LieGroup::vector(1);
      if (pos < lead)
        leading.push_back(std::move(unit));
      else
        trailing.push_back(std::move(unit));
    }
  }
  return {LieGroup::product(leading), LieGroup::product(trailing)};
}

}  // namespace

TwoStageReport two_stage_check(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1,
                               int steps, int trailing_dim, const SolverConfig& cfg) {
  if (!sys.bundle()) throw PreconditionError("two_stage_check: the system carries no bundle");
  const TrivialBundle bundle = *sys.bundle();
  const int m = bundle.shape_dim();
  const int gd = bundle.fiber_dim();
  if (trailing_dim < 1 || trailing_dim > gd)
    throw DimensionError("two_stage_check: trailing_dim must lie in [1, fiber_dim]");
  if (steps < 1) throw DimensionError("two_stage_check: need at least one step");
  const Vec q0c = bundle.canonicalize(q0);
  const Vec q1c = bundle.canonicalize(q1);

  // Reference: the unreduced trajectory.
  const SimulateResult full = simulate(sys, q0c, q1c, steps, cfg);

  // One-shot pipeline: reduce by the whole group, simulate, reconstruct.
  auto conn_full = std::make_shared<TrivialConnection>(bundle);
  const ReducedSystem rs_full(sys, conn_full);
  const DiscreteCurve seed_pair{q0c, q1c};
  const ReducedCurve seed_full = reduce_curve(*conn_full, seed_pair);
  const ReducedSimulateResult one = reduced_simulate(rs_full, seed_full.points.front(), steps, cfg);
  const DiscreteCurve oneshot = reconstruct(*conn_full, one.curve, q0c);

  // Stage one: re-view the trailing group block as the only fiber and run
  // the reduced dynamics there.
  const auto parts = split_group(bundle.group(), trailing_dim);
  const LieGroup& lead_group = parts.first;
  const LieGroup& trail_group = parts.second;
  const int lead = gd - trailing_dim;
  TrivialBundle bundle1(m + lead, trail_group,
                        [bundle, m](const Vec& s) { return bundle.shape_in_domain(s.head(m)); });
  const DiscreteMechanicalSystem sys1 = sys.with_bundle(bundle1);
  auto conn1 = std::make_shared<TrivialConnection>(bundle1);
  const ReducedSystem rs1(sys1, conn1);
  const ReducedCurve seed1 = reduce_curve(*conn1, seed_pair);
  const ReducedSimulateResult sim1 = reduced_simulate(rs1, seed1.points.front(), steps, cfg);

  // Stage two: the stage-one shape trajectory lives on a bundle whose fiber
  // is the leading block; reduce it there and lift it back.
  TrivialBundle bundle2(m, lead_group,
                        [bundle](const Vec& s) { return bundle.shape_in_domain(s); });
  const TrivialConnection conn2(bundle2);
  DiscreteCurve shape_curve;
  shape_curve.reserve(sim1.curve.points.size() + 1);
  shape_curve.push_back(sim1.curve.tau0);
  for (const ReducedPoint& p : sim1.curve.points) shape_curve.push_back(p.tau_next);
  const ReducedCurve red2 = reduce_curve(conn2, shape_curve);
  const DiscreteCurve shape_back = reconstruct(conn2, red2, shape_curve.front());

  // Rebuild the stage-one reduced curve on the round-tripped shapes and
  // reconstruct the full trajectory.
  ReducedCurve red1b;
  red1b.tau0 = shape_back.front();
  red1b.points.reserve(sim1.curve.points.size());
  for (std::size_t k = 0; k < sim1.curve.points.size(); ++k) {
    ReducedPoint p;
    p.tau = shape_back[k];
    p.v_rep = sim1.curve.points[k].v_rep;
    p.tau_next = shape_back[k + 1];
    red1b.points.push_back(std::move(p));
  }
  const DiscreteCurve staged = reconstruct(*conn1, red1b, q0c);

  TwoStageReport report;
  for (std::size_t k = 0; k < full.curve.size(); ++k) {
    report.staged_vs_oneshot =
        std::max(report.staged_vs_oneshot, bundle.distance(staged[k], oneshot[k]));
    report.oneshot_vs_full =
        std::max(report.oneshot_vs_full, bundle.distance(oneshot[k], full.curve[k]));
    report.staged_vs_full =
        std::max(report.staged_vs_full, bundle.distance(staged[k], full.curve[k]));
  }
  return report;
}

}  // namespace dmech
