#include "dmech/forced.hpp"

#include <cmath>
#include <utility>

namespace dmech {

DiscreteForce zero_force(int dim) {
  auto z = [dim](const Vec&, const Vec&) { return Vec(Vec::Zero(dim)); };
  return DiscreteForce{z, z};
}

ForcedDiscreteMechanicalSystem::ForcedDiscreteMechanicalSystem(DiscreteMechanicalSystem sys,
                                                               DiscreteForce force)
    : sys_(std::move(sys)), force_(std::move(force)) {
  if (!force_.minus || !force_.plus)
    throw DomainError("ForcedDiscreteMechanicalSystem: both force parts must be provided");
}

Vec ForcedDiscreteMechanicalSystem::force_minus(const Vec& q0, const Vec& q1) const {
  Vec v = force_.minus(q0, q1);
  require_dim(v, sys_.dim(), "force_minus");
  if (!v.allFinite()) throw EvaluationError("force_minus returned a non-finite value");
  return v;
}

Vec ForcedDiscreteMechanicalSystem::force_plus(const Vec& q0, const Vec& q1) const {
  Vec v = force_.plus(q0, q1);
  require_dim(v, sys_.dim(), "force_plus");
  if (!v.allFinite()) throw EvaluationError("force_plus returned a non-finite value");
  return v;
}

Vec forced_del_residual(const ForcedDMS& f, const Vec& q0, const Vec& q1, const Vec& q2) {
  return del_residual(f.system(), q0, q1, q2) + f.force_plus(q0, q1) + f.force_minus(q1, q2);
}

Vec forced_legendre_plus(const ForcedDMS& f, const Vec& q0, const Vec& q1) {
  return f.system().d2(q0, q1) + f.force_plus(q0, q1);
}

Vec forced_legendre_minus(const ForcedDMS& f, const Vec& q0, const Vec& q1) {
  return -f.system().d1(q0, q1) - f.force_minus(q0, q1);
}

StepResult forced_step(const ForcedDMS& f, const Vec& q0, const Vec& q1, const SolverConfig& cfg) {
  require_dim(q0, f.dim(), "forced_step");
  require_dim(q1, f.dim(), "forced_step");
  auto residual = [&](const Vec& q2) { return forced_del_residual(f, q0, q1, q2); };
  NewtonResult nr = newton_solve(residual, extrapolate_next(f.system(), q0, q1), cfg.newton());
  StepResult out{nr.root, std::move(nr)};
  if (out.newton.converged()) out.q2 = f.system().canonicalize(out.q2);
  return out;
}

SimulateResult forced_simulate(const ForcedDMS& f, const Vec& q0, const Vec& q1, int steps,
                               const SolverConfig& cfg) {
  if (steps < 0) throw DomainError("forced_simulate: negative step count");
  SimulateResult out;
  out.curve.reserve(static_cast<size_t>(steps) + 2);
  out.curve.push_back(f.system().canonicalize(q0));
  out.curve.push_back(f.system().canonicalize(q1));
  out.diagnostics.reserve(static_cast<size_t>(steps));
  for (int k = 1; k <= steps; ++k) {
    const Vec& a = out.curve[out.curve.size() - 2];
    const Vec& b = out.curve[out.curve.size() - 1];
    StepResult s = forced_step(f, a, b, cfg);
    if (!s.newton.converged())
      throw SolveError("forced_simulate: step " + std::to_string(k) + " failed (" +
                           to_string(s.newton.status) + ", residual " +
                           std::to_string(s.newton.residual_norm) + ")",
                       k, s.newton);
    StepDiagnostics d;
    d.index = k;
    d.newton_iterations = s.newton.iterations;
    d.residual_norm = forced_del_residual(f, a, b, s.q2).lpNorm<Eigen::Infinity>();
    d.condition = s.newton.condition;
    out.diagnostics.push_back(d);
    out.curve.push_back(std::move(s.q2));
  }
  return out;
}

double forced_variational_check(const ForcedDMS& f, const DiscreteCurve& curve, int trials,
                                double fd_step, std::uint64_t seed) {
  if (curve.size() < 3)
    throw DomainError("forced_variational_check: need at least three points");
  const auto& sys = f.system();
  const int n = sys.dim();
  const size_t N = curve.size();
  DetRng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    // random fixed-endpoint variation
    std::vector<Vec> delta(N, Vec::Zero(n));
    for (size_t k = 1; k + 1 < N; ++k)
      for (int i = 0; i < n; ++i) delta[k][i] = rng.uniform(-1.0, 1.0);

    auto action_along = [&](double eps) {
      double s = 0.0;
      for (size_t k = 0; k + 1 < N; ++k)
        s += sys.lagrangian(curve[k] + eps * delta[k], curve[k + 1] + eps * delta[k + 1]);
      return s;
    };
    const double dS = (action_along(fd_step) - action_along(-fd_step)) / (2.0 * fd_step);

    double force_pairing = 0.0;
    for (size_t k = 0; k + 1 < N; ++k) {
      force_pairing += f.force_minus(curve[k], curve[k + 1]).dot(delta[k]);
      force_pairing += f.force_plus(curve[k], curve[k + 1]).dot(delta[k + 1]);
    }
    worst = std::max(worst, std::abs(dS + force_pairing));
  }
  return worst;
}

}  // namespace dmech
