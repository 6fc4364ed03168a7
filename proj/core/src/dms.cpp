#include "dmech/dms.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <utility>

namespace dmech {

DiscreteMechanicalSystem::DiscreteMechanicalSystem(int dim, DiscreteLagrangian L)
    : dim_(dim), L_(std::move(L)) {
  if (dim <= 0) throw DimensionError("DiscreteMechanicalSystem: dimension must be positive");
  if (!L_) throw DomainError("DiscreteMechanicalSystem: missing Lagrangian");
}

DiscreteMechanicalSystem::DiscreteMechanicalSystem(TrivialBundle bundle, DiscreteLagrangian L)
    : dim_(bundle.dim()), bundle_(std::move(bundle)), L_(std::move(L)) {
  if (dim_ <= 0) throw DimensionError("DiscreteMechanicalSystem: bundle has zero dimension");
  if (!L_) throw DomainError("DiscreteMechanicalSystem: missing Lagrangian");
}

double DiscreteMechanicalSystem::lagrangian(const Vec& q0, const Vec& q1) const {
  require_dim(q0, dim_, "lagrangian");
  require_dim(q1, dim_, "lagrangian");
  require_finite(q0, "lagrangian");
  require_finite(q1, "lagrangian");
  const double v = L_(q0, q1);
  if (!std::isfinite(v)) throw EvaluationError("lagrangian returned a non-finite value");
  return v;
}

void DiscreteMechanicalSystem::set_analytic_slot_derivatives(SlotDerivative d1, SlotDerivative d2) {
  if (!d1 || !d2)
    throw DomainError("set_analytic_slot_derivatives: both slots must be provided");
  d1_ = std::move(d1);
  d2_ = std::move(d2);
}

Vec DiscreteMechanicalSystem::d1(const Vec& q0, const Vec& q1) const {
  require_dim(q0, dim_, "d1");
  require_dim(q1, dim_, "d1");
  if (d1_ && scheme_.mode == DerivativeMode::AnalyticIfAvailable) {
    Vec v = d1_(q0, q1);
    require_dim(v, dim_, "d1 (analytic)");
    return v;
  }
  return slot_gradient([this](const Vec& a, const Vec& b) { return lagrangian(a, b); }, 1, q0, q1,
                       scheme_);
}

Vec DiscreteMechanicalSystem::d2(const Vec& q0, const Vec& q1) const {
  require_dim(q0, dim_, "d2");
  require_dim(q1, dim_, "d2");
  if (d2_ && scheme_.mode == DerivativeMode::AnalyticIfAvailable) {
    Vec v = d2_(q0, q1);
    require_dim(v, dim_, "d2 (analytic)");
    return v;
  }
  return slot_gradient([this](const Vec& a, const Vec& b) { return lagrangian(a, b); }, 2, q0, q1,
                       scheme_);
}

DiscreteMechanicalSystem DiscreteMechanicalSystem::with_bundle(TrivialBundle b) const {
  if (b.dim() != dim_)
    throw DimensionError("with_bundle: bundle dimension does not match the system");
  DiscreteMechanicalSystem out(std::move(b), L_);
  out.d1_ = d1_;
  out.d2_ = d2_;
  out.scheme_ = scheme_;
  return out;
}

Vec DiscreteMechanicalSystem::canonicalize(const Vec& q) const {
  return bundle_ ? bundle_->canonicalize(q) : q;
}

double DiscreteMechanicalSystem::distance(const Vec& qa, const Vec& qb) const {
  if (bundle_) return bundle_->distance(qa, qb);
  return (qa - qb).lpNorm<Eigen::Infinity>();
}

// ---------------------------------------------------------------------------

double action(const DiscreteMechanicalSystem& sys, const DiscreteCurve& curve) {
  if (curve.size() < 2) throw DomainError("action: need at least two points");
  double s = 0.0;
  for (size_t k = 0; k + 1 < curve.size(); ++k) s += sys.lagrangian(curve[k], curve[k + 1]);
  return s;
}

Vec del_residual(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1,
                 const Vec& q2) {
  return sys.d2(q0, q1) + sys.d1(q1, q2);
}

Vec legendre_plus(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1) {
  return sys.d2(q0, q1);
}

Vec legendre_minus(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1) {
  return -sys.d1(q0, q1);
}

namespace {

double cond_estimate(const Mat& M, double noise_floor) {
  Eigen::JacobiSVD<Mat> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return std::numeric_limits<double>::infinity();
  const double smin = sv(sv.size() - 1);
  // Singular values at or below the differencing noise floor are
  // indistinguishable from exact zeros, so the block is numerically
  // rank-deficient and its true condition number is unbounded.
  if (!(smin > noise_floor)) return std::numeric_limits<double>::infinity();
  const double c = sv(0) / smin;
  return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
}

}  // namespace

RegularityReport regularity_check(const DiscreteMechanicalSystem& sys, const Vec& q0,
                                  const Vec& q1, double threshold) {
  const double fd = sys.derivative_scheme().fd_step;
  // Jacobian of q0 |-> D2 L(q0, q1): differentiating the fiber (+) map.
  Mat Jp = jacobian([&](const Vec& x) { return sys.d2(x, q1); }, q0, fd);
  // Jacobian of q1 |-> -D1 L(q0, q1): differentiating the fiber (-) map.
  Mat Jm = jacobian([&](const Vec& x) { return Vec(-sys.d1(q0, x)); }, q1, fd);
  // Differencing noise in the assembled Jacobians: one central-difference
  // layer when the slot derivatives are analytic, two layers otherwise.
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = 1.0 + std::abs(sys.lagrangian(q0, q1));
  const double floor = sys.has_analytic_derivatives() ? eps * scale / fd
                                                      : eps * scale / (fd * fd);
  RegularityReport r;
  r.threshold = threshold;
  r.cond_plus = cond_estimate(Jp, floor);
  r.cond_minus = cond_estimate(Jm, floor);
  r.regular = r.cond_plus < threshold && r.cond_minus < threshold;
  return r;
}

Vec extrapolate_next(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1) {
  if (!sys.bundle()) return 2.0 * q1 - q0;
  const auto& b = *sys.bundle();
  const auto& G = b.group();
  Vec guess(sys.dim());
  if (b.shape_dim() > 0)
    guess.head(b.shape_dim()) = 2.0 * b.shape_of(q1) - b.shape_of(q0);
  if (b.fiber_dim() > 0) {
    // advance the fiber by the previous increment: h1 * (h0^{-1} h1)
    const Vec inc = G.difference(b.fiber_of(q1), b.fiber_of(q0));
    guess.tail(b.fiber_dim()) = b.fiber_of(q1) + inc;  // left unwrapped for the solver
  }
  return guess;
}

StepResult step(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1,
                const SolverConfig& cfg) {
  require_dim(q0, sys.dim(), "step");
  require_dim(q1, sys.dim(), "step");
  auto residual = [&](const Vec& q2) { return del_residual(sys, q0, q1, q2); };
  NewtonResult nr = newton_solve(residual, extrapolate_next(sys, q0, q1), cfg.newton());
  StepResult out{nr.root, std::move(nr)};
  if (out.newton.converged()) out.q2 = sys.canonicalize(out.q2);
  return out;
}

SimulateResult simulate(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1,
                        int steps, const SolverConfig& cfg) {
  if (steps < 0) throw DomainError("simulate: negative step count");
  SimulateResult out;
  out.curve.reserve(static_cast<size_t>(steps) + 2);
  out.curve.push_back(sys.canonicalize(q0));
  out.curve.push_back(sys.canonicalize(q1));
  out.diagnostics.reserve(static_cast<size_t>(steps));
  for (int k = 1; k <= steps; ++k) {
    const Vec& a = out.curve[out.curve.size() - 2];
    const Vec& b = out.curve[out.curve.size() - 1];
    StepResult s = step(sys, a, b, cfg);
    if (!s.newton.converged())
      throw SolveError("simulate: step " + std::to_string(k) + " failed (" +
                           to_string(s.newton.status) + ", residual " +
                           std::to_string(s.newton.residual_norm) + ")",
                       k, s.newton);
    StepDiagnostics d;
    d.index = k;
    d.newton_iterations = s.newton.iterations;
    d.residual_norm = del_residual(sys, a, b, s.q2).lpNorm<Eigen::Infinity>();
    d.condition = s.newton.condition;
    out.diagnostics.push_back(d);
    out.curve.push_back(std::move(s.q2));
  }
  return out;
}

Vec momentum(const DiscreteMechanicalSystem& sys, const Vec& q0, const Vec& q1) {
  if (!sys.bundle()) throw PreconditionError("momentum: no symmetry registered on this system");
  const auto& b = *sys.bundle();
  const Vec d1v = sys.d1(q0, q1);
  Vec J(b.fiber_dim());
  for (int i = 0; i < b.fiber_dim(); ++i) {
    Vec xi = Vec::Zero(b.fiber_dim());
    xi[i] = 1.0;
    J[i] = -d1v.dot(b.inf_generator(xi, q0));
  }
  return J;
}

NoetherReport noether_drift(const DiscreteMechanicalSystem& sys, const DiscreteCurve& curve) {
  if (curve.size() < 2) throw DomainError("noether_drift: need at least two points");
  if (!sys.bundle())
    throw PreconditionError("noether_drift: no symmetry registered on this system");
  const int gd = sys.bundle()->fiber_dim();
  NoetherReport rep;
  rep.values.resize(static_cast<Eigen::Index>(curve.size()) - 1, gd);
  for (size_t k = 0; k + 1 < curve.size(); ++k)
    rep.values.row(static_cast<Eigen::Index>(k)) = momentum(sys, curve[k], curve[k + 1]).transpose();
  rep.drift = Vec::Zero(gd);
  for (Eigen::Index k = 1; k < rep.values.rows(); ++k) {
    const Vec dk = (rep.values.row(k) - rep.values.row(0)).cwiseAbs().transpose();
    rep.drift = rep.drift.cwiseMax(dk);
  }
  rep.max_drift = gd > 0 ? rep.drift.lpNorm<Eigen::Infinity>() : 0.0;
  return rep;
}

double check_invariance(const DiscreteMechanicalSystem& sys, const InvarianceOptions& opt) {
  if (!sys.bundle())
    throw PreconditionError("check_invariance: no symmetry registered on this system");
  const auto& b = *sys.bundle();
  DetRng rng(opt.seed);
  double worst = 0.0;
  for (int i = 0; i < opt.samples; ++i) {
    const Vec q0 = sample_config(b, rng, opt.box);
    const Vec q1 = sample_config(b, rng, opt.box);
    const Vec g = sample_group(b.group(), rng, opt.box);
    const double v =
        std::abs(sys.lagrangian(b.act(g, q0), b.act(g, q1)) - sys.lagrangian(q0, q1));
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace dmech
