#include "dmech/nonholonomic.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <utility>

namespace dmech {

Mat DistributionSpec::basis_at(const Vec& q) const {
  if (!basis) throw DomainError("DistributionSpec: missing basis evaluator");
  Mat B = basis(q);
  if (B.rows() != dim || B.cols() != rank)
    throw DimensionError("DistributionSpec: basis must be dim x rank");
  return B;
}

Mat DistributionSpec::annihilator_at(const Vec& q) const {
  if (!annihilator) throw DomainError("DistributionSpec: missing annihilator evaluator");
  Mat W = annihilator(q);
  if (W.rows() != dim - rank || W.cols() != dim)
    throw DimensionError("DistributionSpec: annihilator must be (dim-rank) x dim");
  return W;
}

NonholonomicDMS::NonholonomicDMS(DiscreteMechanicalSystem sys, DistributionSpec dist,
                                 KinematicConstraint chi)
    : sys_(std::move(sys)), dist_(std::move(dist)), chi_(std::move(chi)) {
  if (dist_.dim != sys_.dim())
    throw DimensionError("NonholonomicDMS: distribution dimension does not match the system");
  if (dist_.rank <= 0 || dist_.rank > dist_.dim)
    throw DimensionError("NonholonomicDMS: distribution rank out of range");
  if (!chi_) throw DomainError("NonholonomicDMS: missing kinematic constraint");
}

Vec NonholonomicDMS::constraint(const Vec& q0, const Vec& q1) const {
  require_dim(q0, dim(), "constraint");
  require_dim(q1, dim(), "constraint");
  Vec c = chi_(q0, q1);
  require_dim(c, codim(), "constraint value");
  if (!c.allFinite()) throw EvaluationError("kinematic constraint returned a non-finite value");
  return c;
}

double DlaResidual::inf_norm() const {
  double v = projected.size() ? projected.lpNorm<Eigen::Infinity>() : 0.0;
  if (constraint.size()) v = std::max(v, constraint.lpNorm<Eigen::Infinity>());
  return v;
}

DlaResidual dla_residual(const NonholonomicDMS& n, const Vec& q0, const Vec& q1, const Vec& q2) {
  const Vec r = del_residual(n.system(), q0, q1, q2);
  const Mat B = n.distribution().basis_at(q1);
  return DlaResidual{B.transpose() * r, n.constraint(q1, q2)};
}

NhStepResult nh_step(const NonholonomicDMS& n, const Vec& q0, const Vec& q1,
                     const SolverConfig& cfg) {
  const int dim = n.dim();
  auto residual = [&](const Vec& q2) {
    const DlaResidual r = dla_residual(n, q0, q1, q2);
    Vec out(dim);
    out.head(r.projected.size()) = r.projected;
    out.tail(r.constraint.size()) = r.constraint;
    return out;
  };
  NewtonResult nr = newton_solve(residual, extrapolate_next(n.system(), q0, q1), cfg.newton());
  NhStepResult out;
  out.q2 = n.system().canonicalize(nr.root);
  out.newton = std::move(nr);
  return out;
}

NhMultiplierResult nh_multiplier_oracle(const NonholonomicDMS& n, const Vec& q0, const Vec& q1,
                                        const SolverConfig& cfg) {
  const int dim = n.dim();
  const int cd = n.codim();
  const Mat W = n.distribution().annihilator_at(q1);
  auto residual = [&](const Vec& x) {
    const Vec q2 = x.head(dim);
    const Vec lam = x.tail(cd);
    Vec r(dim + cd);
    r.head(dim) = del_residual(n.system(), q0, q1, q2) - W.transpose() * lam;
    r.tail(cd) = n.constraint(q1, q2);
    return r;
  };
  Vec x0(dim + cd);
  x0.head(dim) = extrapolate_next(n.system(), q0, q1);
  x0.tail(cd).setZero();
  NewtonResult nr = newton_solve(residual, x0, cfg.newton());
  NhMultiplierResult out;
  out.q2 = n.system().canonicalize(nr.root.head(dim));
  out.lambda = nr.root.tail(cd);
  out.newton = std::move(nr);
  return out;
}

namespace {

// Least-squares multipliers of an accepted triple: the unconstrained residual
// on constrained trajectories lies in the annihilator span at the middle point.
Vec recovered_multipliers(const NonholonomicDMS& n, const Vec& q0, const Vec& q1, const Vec& q2) {
  const Vec r = del_residual(n.system(), q0, q1, q2);
  const Mat Wt = n.distribution().annihilator_at(q1).transpose();
  return Wt.colPivHouseholderQr().solve(r);
}

}  // namespace

NhSimulateResult nh_simulate(const NonholonomicDMS& n, const Vec& q0, const Vec& q1, int steps,
                             const SolverConfig& cfg, double seed_tol) {
  if (steps < 0) throw DomainError("nh_simulate: negative step count");
  const double seed_chi = n.constraint(q0, q1).lpNorm<Eigen::Infinity>();
  if (!(seed_chi <= seed_tol))
    throw PreconditionError("nh_simulate: seed pair violates the kinematic constraint (|chi| = " +
                            std::to_string(seed_chi) + ")");
  NhSimulateResult out;
  out.curve.reserve(static_cast<size_t>(steps) + 2);
  out.curve.push_back(n.system().canonicalize(q0));
  out.curve.push_back(n.system().canonicalize(q1));
  out.multipliers.resize(steps, n.codim());
  for (int k = 1; k <= steps; ++k) {
    const Vec a = out.curve[out.curve.size() - 2];
    const Vec b = out.curve[out.curve.size() - 1];
    NhStepResult s = nh_step(n, a, b, cfg);
    if (!s.newton.converged())
      throw SolveError("nh_simulate: step " + std::to_string(k) + " failed (" +
                           to_string(s.newton.status) + ", residual " +
                           std::to_string(s.newton.residual_norm) + ")",
                       k, s.newton);
    StepDiagnostics d;
    d.index = k;
    d.newton_iterations = s.newton.iterations;
    d.residual_norm = dla_residual(n, a, b, s.q2).inf_norm();
    d.condition = s.newton.condition;
    out.diagnostics.push_back(d);
    out.multipliers.row(k - 1) = recovered_multipliers(n, a, b, s.q2).transpose();
    out.curve.push_back(std::move(s.q2));
  }
  out.constraint_norms = Vec(static_cast<Eigen::Index>(out.curve.size()) - 1);
  for (size_t k = 0; k + 1 < out.curve.size(); ++k)
    out.constraint_norms[static_cast<Eigen::Index>(k)] =
        n.constraint(out.curve[k], out.curve[k + 1]).lpNorm<Eigen::Infinity>();
  return out;
}

NhRegularityReport nh_regularity_test(const NonholonomicDMS& n, const Vec& q0, const Vec& q1,
                                      const Vec& q2, double threshold) {
  const int dim = n.dim();
  const int cd = n.codim();
  const Mat W = n.distribution().annihilator_at(q1);
  const double fd = n.system().derivative_scheme().fd_step;
  auto residual = [&](const Vec& x) {
    const Vec qq2 = x.head(dim);
    const Vec lam = x.tail(cd);
    Vec r(dim + cd);
    r.head(dim) = del_residual(n.system(), q0, q1, qq2) - W.transpose() * lam;
    r.tail(cd) = n.constraint(q1, qq2);
    return r;
  };
  Vec x(dim + cd);
  x.head(dim) = q2;
  x.tail(cd).setZero();
  const Mat J = jacobian(residual, x, fd);
  Eigen::JacobiSVD<Mat> svd(J);
  const auto& sv = svd.singularValues();
  NhRegularityReport rep;
  rep.threshold = threshold;
  const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
  rep.condition = (smin > 0.0 && std::isfinite(sv(0) / smin))
                      ? sv(0) / smin
                      : std::numeric_limits<double>::infinity();
  rep.regular = rep.condition < threshold;
  return rep;
}

namespace {

Vec section_checked(const NonholonomicDMS& n, const AlgebraSection& section, const Vec& q,
                    double tol) {
  Vec xi = section(q);
  require_dim(xi, n.dim(), "algebra section value");
  const double pairing = (n.distribution().annihilator_at(q) * xi).lpNorm<Eigen::Infinity>();
  if (!(pairing <= tol))
    throw PreconditionError(
        "section value does not lie in the distribution (annihilator pairing " +
        std::to_string(pairing) + ")");
  return xi;
}

}  // namespace

double nh_momentum(const NonholonomicDMS& n, const AlgebraSection& section, const Vec& q0,
                   const Vec& q1, double membership_tol) {
  const Vec xi = section_checked(n, section, q0, membership_tol);
  return -n.system().d1(q0, q1).dot(xi);
}

double nh_momentum_evolution_residual(const NonholonomicDMS& n, const AlgebraSection& section,
                                      const Vec& qkm1, const Vec& qk, const Vec& qkp1,
                                      double membership_tol) {
  const Vec xi_k = section_checked(n, section, qk, membership_tol);
  const Vec xi_km1 = section_checked(n, section, qkm1, membership_tol);
  const double J_fwd = -n.system().d1(qk, qkp1).dot(xi_k);
  const double J_bwd = -n.system().d1(qkm1, qk).dot(xi_km1);
  const double rhs = -n.system().d1(qkm1, qk).dot(xi_k - xi_km1);
  return (J_fwd - J_bwd) - rhs;
}

}  // namespace dmech
