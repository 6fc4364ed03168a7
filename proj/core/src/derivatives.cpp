#include "dmech/derivatives.hpp"

#include <cmath>

namespace dmech {

namespace {

double eval_checked(const ScalarFn& f, const Vec& x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw EvaluationError("scalar evaluator returned a non-finite value");
  return v;
}

}  // namespace

Vec central_gradient(const ScalarFn& f, const Vec& x, double fd_step) {
  require_finite(x, "central_gradient");
  if (!(fd_step > 0.0)) throw DomainError("central_gradient: fd_step must be positive");
  Vec g(x.size());
  Vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + fd_step;
    const double fp = eval_checked(f, probe);
    probe[i] = xi - fd_step;
    const double fm = eval_checked(f, probe);
    probe[i] = xi;
    g[i] = (fp - fm) / (2.0 * fd_step);
  }
  return g;
}

double directional_derivative(const ScalarFn& f, const Vec& x, const Vec& dir, double fd_step) {
  require_finite(x, "directional_derivative");
  require_finite(dir, "directional_derivative");
  const double fp = eval_checked(f, x + fd_step * dir);
  const double fm = eval_checked(f, x - fd_step * dir);
  return (fp - fm) / (2.0 * fd_step);
}

Vec slot_gradient(const TwoSlotScalarFn& f, int slot, const Vec& q0, const Vec& q1,
                  const DerivativeScheme& scheme) {
  if (slot != 1 && slot != 2) throw DomainError("slot_gradient: slot must be 1 or 2");
  require_finite(q0, "slot_gradient");
  require_finite(q1, "slot_gradient");
  if (slot == 1) {
    auto g = [&](const Vec& x) { return f(x, q1); };
    return central_gradient(g, q0, scheme.fd_step);
  }
  auto g = [&](const Vec& x) { return f(q0, x); };
  return central_gradient(g, q1, scheme.fd_step);
}

Mat jacobian(const VectorFn& F, const Vec& x, double fd_step) {
  require_finite(x, "jacobian");
  if (!(fd_step > 0.0)) throw DomainError("jacobian: fd_step must be positive");
  Vec probe = x;
  probe[0] = x[0] + fd_step;
  Vec f0 = F(probe);
  probe[0] = x[0] - fd_step;
  Vec f1 = F(probe);
  probe[0] = x[0];
  if (!f0.allFinite() || !f1.allFinite())
    throw EvaluationError("jacobian: vector evaluator returned a non-finite value");
  Mat J(f0.size(), x.size());
  J.col(0) = (f0 - f1) / (2.0 * fd_step);
  for (Eigen::Index j = 1; j < x.size(); ++j) {
    const double xj = x[j];
    probe[j] = xj + fd_step;
    const Vec fp = F(probe);
    probe[j] = xj - fd_step;
    const Vec fm = F(probe);
    probe[j] = xj;
    if (!fp.allFinite() || !fm.allFinite())
      throw EvaluationError("jacobian: vector evaluator returned a non-finite value");
    J.col(j) = (fp - fm) / (2.0 * fd_step);
  }
  return J;
}

}  // namespace dmech
