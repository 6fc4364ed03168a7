#include "dmech/newton.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "dmech/derivatives.hpp"

namespace dmech {

const char* to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::Converged: return "converged";
    case NewtonStatus::MaxIterations: return "max-iterations";
    case NewtonStatus::Singular: return "singular";
    case NewtonStatus::Stalled: return "stalled";
  }
  return "unknown";
}

NewtonResult newton_solve(const VectorFn& R, const Vec& x0, const NewtonConfig& cfg) {
  require_finite(x0, "newton_solve");
  if (!(cfg.tol > 0.0)) throw DomainError("newton_solve: tol must be positive");

  auto residual = [&](const Vec& x) -> Vec {
    Vec r = R(x);
    if (!r.allFinite()) throw EvaluationError("newton_solve: residual returned a non-finite value");
    return r;
  };

  NewtonResult out;
  Vec x = x0;
  Vec r = residual(x);
  if (r.size() != x.size())
    throw DimensionError("newton_solve: residual dimension does not match the unknown");
  double rnorm = r.lpNorm<Eigen::Infinity>();
  out.root = x;
  out.residual_norm = rnorm;

  for (int it = 0; it < cfg.max_iter; ++it) {
    if (rnorm <= cfg.tol) {
      out.root = x;
      out.residual_norm = rnorm;
      out.status = NewtonStatus::Converged;
      return out;
    }

    Mat J = cfg.jacobian ? (*cfg.jacobian)(x) : jacobian(residual, x, cfg.fd_step);
    Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
    out.condition = (smin > 0.0 && std::isfinite(smax / smin))
                        ? smax / smin
                        : std::numeric_limits<double>::infinity();
    if (out.condition > cfg.singular_cond) {
      out.status = NewtonStatus::Singular;
      return out;
    }

    const Vec dx = svd.solve(-r);
    double alpha = 1.0;
    Vec x_next = x + dx;
    Vec r_next = residual(x_next);
    double rnorm_next = r_next.lpNorm<Eigen::Infinity>();
    if (cfg.damping == Damping::Backtracking) {
      int halvings = 0;
      while (rnorm_next > rnorm && halvings < cfg.max_halvings) {
        alpha *= 0.5;
        ++halvings;
        x_next = x + alpha * dx;
        r_next = residual(x_next);
        rnorm_next = r_next.lpNorm<Eigen::Infinity>();
      }
      if (rnorm_next > rnorm) {
        out.status = NewtonStatus::Stalled;
        return out;  // best iterate so far is still `out.root`
      }
    }

    x = x_next;
    r = r_next;
    rnorm = rnorm_next;
    out.iterations = it + 1;
    if (rnorm <= out.residual_norm) {
      out.root = x;
      out.residual_norm = rnorm;
    }
  }

  if (rnorm <= cfg.tol) {
    out.root = x;
    out.residual_norm = rnorm;
    out.status = NewtonStatus::Converged;
    return out;
  }
  out.status = NewtonStatus::MaxIterations;
  return out;
}

}  // namespace dmech
