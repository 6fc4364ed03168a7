#include "dmech/routh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dmech {

namespace {

Vec solve_level_equation(const RouthSetup& s, const VectorFn& residual, const Vec& x0,
                         const char* what) {
  const NewtonResult nr = newton_solve(residual, x0, s.inner.newton());
  if (!nr.converged())
    throw EvaluationError(std::string(what) + ": momentum-level solve failed (" +
                          to_string(nr.status) + ", residual " +
                          std::to_string(nr.residual_norm) + ")");
  return nr.root;
}

}  // namespace

RouthSetup::RouthSetup(DiscreteMechanicalSystem sys, Vec mu_in, SolverConfig inner_cfg)
    : system(std::move(sys)), mu(std::move(mu_in)), inner(inner_cfg) {
  if (!system.bundle())
    throw PreconditionError("RouthSetup: the system carries no bundle structure");
  require_dim(mu, system.bundle()->fiber_dim(), "RouthSetup: mu");
  require_finite(mu, "RouthSetup: mu");
}

SolverConfig RouthSetup::default_inner() {
  SolverConfig cfg;
  // Momentum-level residuals are assembled from Lagrangian slot derivatives,
  // so their attainable floor scales like eps * |chart value| * sensitivity;
  // 1e-13 stays an order tighter than the outer solves without demanding
  // digits the representation cannot hold.
  cfg.tol = 1e-13;
  return cfg;
}

const TrivialBundle& RouthSetup::bundle() const { return *system.bundle(); }

int RouthSetup::shape_dim() const { return bundle().shape_dim(); }

int RouthSetup::group_dim() const { return bundle().fiber_dim(); }

Vec j_mu(const RouthSetup& s, const Vec& q0, const Vec& q1) { return momentum(s.system, q0, q1); }

MuGoodReport mu_good_check(const RouthSetup& s, const Vec& q) {
  const TrivialBundle& b = s.bundle();
  const LieGroup& g = b.group();
  require_dim(q, b.dim(), "mu_good_check: q");
  const int gd = b.fiber_dim();

  auto residual = [&](const Vec& x) -> Vec { return j_mu(s, q, b.act(x, q)) - s.mu; };

  // Eight spread starts per coordinate kind; the identity start supplies the
  // reported solution.
  static const double kVectorStarts[8] = {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0};
  // Circle starts stay strictly inside (-pi, pi): the angle chart is cut at
  // +-pi, and finite differencing across the cut would poison the Jacobian.
  static const double kCircleStarts[8] = {0.0, 0.7, -0.7, 1.4, -1.4, 2.1, -2.1, 2.8};
  std::vector<Vec> roots;
  bool all_converged = true;
  for (int i = 0; i < 8; ++i) {
    Vec x0(gd);
    int at = 0;
    for (const GroupFactor& f : g.factors()) {
      for (int c = 0; c < f.dim; ++c, ++at)
        x0[at] = (f.kind == FactorKind::Circle) ? kCircleStarts[i] : kVectorStarts[i];
    }
    NewtonResult nr;
    try {
      nr = newton_solve(residual, x0, s.inner.newton());
    } catch (const Error&) {
      all_converged = false;
      continue;
    }
    if (nr.converged())
      roots.push_back(nr.root);
    else
      all_converged = false;
  }
  if (roots.empty())
    throw EvaluationError("mu_good_check: no multistart converged to the momentum level");

  MuGoodReport rep;
  rep.g = roots.front();
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      rep.spread = std::max(rep.spread, g.distance(roots[i], roots[j]));
  rep.unique = all_converged && rep.spread <= 1e-8;

  // Regularity of the restricted level equation: the fiber-fiber block of
  // the mixed second derivative at the solution pair must be invertible.
  const Vec q1 = b.act(rep.g, q);
  const Mat mixed = jacobian([&](const Vec& x) { return s.system.d1(q, x); }, q1,
                             s.system.derivative_scheme().fd_step);
  const Mat block = mixed.bottomRightCorner(gd, gd);
  Eigen::JacobiSVD<Mat> svd(block);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  rep.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  rep.regular = rep.condition < 1e12;
  return rep;
}

Vec a_mu(const RouthSetup& s, const Vec& q0, const Vec& q1) {
  const TrivialBundle& b = s.bundle();
  const LieGroup& g = b.group();
  require_dim(q0, b.dim(), "a_mu: q0");
  require_dim(q1, b.dim(), "a_mu: q1");
  auto residual = [&](const Vec& x) -> Vec {
    return j_mu(s, q0, b.act(g.inverse(x), q1)) - s.mu;
  };
  const Vec x0 = g.difference(b.fiber_of(q1), b.fiber_of(q0));
  return g.canonicalize(solve_level_equation(s, residual, x0, "a_mu"));
}

namespace {

Vec routh_level(const RouthSetup& s, const Vec& q) {
  const TrivialBundle& b = s.bundle();
  require_dim(q, b.dim(), "level: q");
  auto residual = [&](const Vec& x) -> Vec { return j_mu(s, q, b.act(x, q)) - s.mu; };
  return b.group().canonicalize(
      solve_level_equation(s, residual, b.group().identity(), "level"));
}

Vec routh_lift(const RouthSetup& s, const Vec& q0, const Vec& tau1) {
  const TrivialBundle& b = s.bundle();
  require_dim(q0, b.dim(), "lift: q0");
  require_dim(tau1, b.shape_dim(), "lift: tau1");
  auto residual = [&](const Vec& h) -> Vec {
    return j_mu(s, q0, b.flatten({tau1, h})) - s.mu;
  };
  const Vec h = solve_level_equation(s, residual, b.fiber_of(q0), "lift");
  return b.canonicalize(b.flatten({tau1, h}));
}

// Identity-fiber representative over tau0 and the momentum-level pair it
// spans over tau1.
std::pair<Vec, Vec> level_pair(const RouthSetup& s, const Vec& tau0, const Vec& tau1) {
  const TrivialBundle& b = s.bundle();
  require_dim(tau0, b.shape_dim(), "routh: tau0");
  require_dim(tau1, b.shape_dim(), "routh: tau1");
  const Vec q0 = b.flatten({tau0, b.group().identity()});
  return {q0, routh_lift(s, q0, tau1)};
}

}  // namespace

RouthConnection::RouthConnection(RouthSetup setup)
    : DiscreteConnection(*setup.system.bundle(), setup.inner.fd_step),
      setup_(std::move(setup)) {}

Vec RouthConnection::evaluate(const Vec& q0, const Vec& q1) const {
  return a_mu(setup_, q0, q1);
}

Vec RouthConnection::level(const Vec& q) const { return routh_level(setup_, q); }

Vec RouthConnection::lift(const Vec& q0, const Vec& tau1) const {
  return routh_lift(setup_, q0, tau1);
}

Ftilde1Jacobians RouthConnection::ftilde1_jacobians(const Vec& q0, const Vec& w,
                                                    const Vec& tau1) const {
  const TrivialBundle& b = bundle_;
  const LieGroup& g = b.group();
  const int n = b.dim();
  const int gd = b.fiber_dim();
  const int m = b.shape_dim();
  require_dim(q0, n, "ftilde1_jacobians: q0");
  require_dim(w, gd, "ftilde1_jacobians: w");
  require_dim(tau1, m, "ftilde1_jacobians: tau1");

  Ftilde1Jacobians out;
  // The group element left-translates the lift, so its block is exactly the
  // identity in chart coordinates.
  out.dw = Mat::Identity(gd, gd);
  out.dq = Mat(gd, n);
  out.dtau = Mat(gd, m);
  auto lift_fiber = [&](const Vec& q, const Vec& tau) { return b.fiber_of(lift(q, tau)); };
  const double eps = fd_step_;
  for (int j = 0; j < n; ++j) {
    Vec qp = q0;
    Vec qm = q0;
    qp[j] += eps;
    qm[j] -= eps;
    out.dq.col(j) = g.difference(lift_fiber(qp, tau1), lift_fiber(qm, tau1)) / (2.0 * eps);
  }
  for (int j = 0; j < m; ++j) {
    Vec tp = tau1;
    Vec tm = tau1;
    tp[j] += eps;
    tm[j] -= eps;
    out.dtau.col(j) = g.difference(lift_fiber(q0, tp), lift_fiber(q0, tm)) / (2.0 * eps);
  }
  return out;
}

double routh_lagrangian(const RouthSetup& s, const Vec& tau0, const Vec& tau1) {
  const auto pair = level_pair(s, tau0, tau1);
  return s.system.lagrangian(pair.first, pair.second);
}

double routh_force(const RouthSetup& s, const Vec& tau0, const Vec& tau1, const Vec& dtau0,
                   const Vec& dtau1) {
  const TrivialBundle& b = s.bundle();
  const int m = b.shape_dim();
  const int gd = b.fiber_dim();
  require_dim(dtau0, m, "routh_force: dtau0");
  require_dim(dtau1, m, "routh_force: dtau1");
  const auto pair = level_pair(s, tau0, tau1);
  // Group-slot derivative of the transported Lagrangian at the level pair
  // (the lift's group block is the identity, so this is the fiber block of
  // the second-slot gradient).
  const Vec d2_group = s.system.d2(pair.first, pair.second).tail(gd);
  Vec v0 = Vec::Zero(b.dim());
  Vec v1 = Vec::Zero(b.dim());
  v0.head(m) = dtau0;
  v1.head(m) = dtau1;
  const RouthConnection conn(s);
  return d2_group.dot(conn.tangent(pair.first, pair.second, v0, v1));
}

Vec routh_force_minus(const RouthSetup& s, const Vec& tau0, const Vec& tau1) {
  const TrivialBundle& b = s.bundle();
  const int m = b.shape_dim();
  const int gd = b.fiber_dim();
  const auto pair = level_pair(s, tau0, tau1);
  const Vec d2_group = s.system.d2(pair.first, pair.second).tail(gd);
  const RouthConnection conn(s);
  return conn.d1_matrix(pair.first, pair.second).leftCols(m).transpose() * d2_group;
}

Vec routh_force_plus(const RouthSetup& s, const Vec& tau0, const Vec& tau1) {
  const TrivialBundle& b = s.bundle();
  const int m = b.shape_dim();
  const int gd = b.fiber_dim();
  const auto pair = level_pair(s, tau0, tau1);
  const Vec d2_group = s.system.d2(pair.first, pair.second).tail(gd);
  const RouthConnection conn(s);
  return conn.d2_matrix(pair.first, pair.second).leftCols(m).transpose() * d2_group;
}

Vec routh_residual(const RouthSetup& s, const Vec& tau_km1, const Vec& tau_k,
                   const Vec& tau_kp1) {
  const int m = s.shape_dim();
  require_dim(tau_km1, m, "routh_residual: tau_km1");
  require_dim(tau_k, m, "routh_residual: tau_k");
  require_dim(tau_kp1, m, "routh_residual: tau_kp1");
  const TwoSlotScalarFn reduced = [&s](const Vec& a, const Vec& c) {
    return routh_lagrangian(s, a, c);
  };
  DerivativeScheme scheme;
  scheme.mode = DerivativeMode::CentralDifference;
  scheme.fd_step = s.system.derivative_scheme().fd_step;
  return slot_gradient(reduced, 1, tau_k, tau_kp1, scheme) +
         slot_gradient(reduced, 2, tau_km1, tau_k, scheme) +
         routh_force_plus(s, tau_km1, tau_k) + routh_force_minus(s, tau_k, tau_kp1);
}

RouthReport verify_routh(const RouthSetup& s, const DiscreteCurve& curve, double momentum_tol) {
  const TrivialBundle& b = s.bundle();
  const LieGroup& g = b.group();
  if (curve.size() < 3) throw DimensionError("verify_routh: need at least three points");
  for (const Vec& q : curve) require_dim(q, b.dim(), "verify_routh: curve point");

  RouthReport rep;
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    const double err = (j_mu(s, curve[k], curve[k + 1]) - s.mu).lpNorm<Eigen::Infinity>();
    rep.momentum_error = std::max(rep.momentum_error, err);
  }
  if (rep.momentum_error > momentum_tol)
    throw PreconditionError(
        "verify_routh: trajectory momentum does not match the target level (max |J - mu| = " +
        std::to_string(rep.momentum_error) + ")");

  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    const Vec a = a_mu(s, curve[k], curve[k + 1]);
    rep.a_mu_drift = std::max(rep.a_mu_drift, g.distance(a, g.identity()));
  }

  std::vector<Vec> taus;
  taus.reserve(curve.size());
  for (const Vec& q : curve) taus.push_back(b.shape_of(q));
  for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
    const Vec r = routh_residual(s, taus[k - 1], taus[k], taus[k + 1]);
    rep.max_residual = std::max(rep.max_residual, r.lpNorm<Eigen::Infinity>());
  }

  Vec qhat = b.canonicalize(curve.front());
  rep.reconstruction_error = b.distance(qhat, curve.front());
  for (std::size_t k = 1; k < curve.size(); ++k) {
    qhat = routh_lift(s, qhat, taus[k]);
    rep.reconstruction_error = std::max(rep.reconstruction_error, b.distance(qhat, curve[k]));
  }
  return rep;
}

}  // namespace dmech
