#include "dmech/builtins.hpp"

#include <cmath>
#include <utility>

namespace dmech {

namespace {

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

double poly_deriv_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 1;) v = v * x + static_cast<double>(i) * c[i];
  return v;
}

void require_step(double h) {
  if (!(h > 0.0)) throw DomainError("builtin system: the time step must be positive");
}

DiscreteLagrangian kinetic_lagrangian(double h) {
  return [h](const Vec& q0, const Vec& q1) { return (q1 - q0).squaredNorm() / (2.0 * h); };
}

void register_kinetic_derivatives(DiscreteMechanicalSystem& sys, double h) {
  sys.set_analytic_slot_derivatives(
      [h](const Vec& q0, const Vec& q1) -> Vec { return (q0 - q1) / h; },
      [h](const Vec& q0, const Vec& q1) -> Vec { return (q1 - q0) / h; });
}

// Polar central-force slot derivatives shared by the plain and product
// variants; shape-first layout (r first, theta next).
struct CentralForceParts {
  double dr_first;    // d/dr0
  double dtheta_first;
  double dr_second;   // d/dr1
  double dtheta_second;
};

CentralForceParts central_force_parts(double h, const std::vector<double>& vc, const Vec& q0,
                                      const Vec& q1) {
  const double dr = q1[0] - q0[0];
  const double dth = wrap_to_pi(q1[1] - q0[1]);
  const double rbar = 0.5 * (q0[0] + q1[0]);
  const double ang = rbar * dth * dth / (2.0 * h);
  const double pot = 0.5 * h * poly_deriv_eval(vc, rbar);
  CentralForceParts p;
  p.dr_first = -dr / h + ang - pot;
  p.dr_second = dr / h + ang - pot;
  p.dtheta_first = -rbar * rbar * dth / h;
  p.dtheta_second = rbar * rbar * dth / h;
  return p;
}

double central_force_lagrangian(double h, const std::vector<double>& vc, const Vec& q0,
                                const Vec& q1) {
  const double dr = q1[0] - q0[0];
  const double dth = wrap_to_pi(q1[1] - q0[1]);
  const double rbar = 0.5 * (q0[0] + q1[0]);
  return dr * dr / (2.0 * h) + rbar * rbar * dth * dth / (2.0 * h) - h * poly_eval(vc, rbar);
}

}  // namespace

DiscreteMechanicalSystem make_free_particle(int n, double h) {
  require_step(h);
  if (n < 1) throw DimensionError("make_free_particle: dimension must be positive");
  DiscreteMechanicalSystem sys(n, kinetic_lagrangian(h));
  register_kinetic_derivatives(sys, h);
  return sys;
}

DiscreteMechanicalSystem make_free_particle_bundle(int n, double h) {
  require_step(h);
  if (n < 1) throw DimensionError("make_free_particle_bundle: dimension must be positive");
  TrivialBundle bundle(0, LieGroup::vector(n));
  DiscreteMechanicalSystem sys(std::move(bundle), kinetic_lagrangian(h));
  register_kinetic_derivatives(sys, h);
  return sys;
}

DiscreteMechanicalSystem make_harmonic_oscillator(double h, double omega) {
  require_step(h);
  DiscreteMechanicalSystem sys(1, [h, omega](const Vec& q0, const Vec& q1) {
    const double d = q1[0] - q0[0];
    const double mid = 0.5 * (q0[0] + q1[0]);
    return d * d / (2.0 * h) - 0.5 * h * omega * omega * mid * mid;
  });
  sys.set_analytic_slot_derivatives(
      [h, omega](const Vec& q0, const Vec& q1) -> Vec {
        const double d = q1[0] - q0[0];
        const double mid = 0.5 * (q0[0] + q1[0]);
        Vec g(1);
        g[0] = -d / h - 0.5 * h * omega * omega * mid;
        return g;
      },
      [h, omega](const Vec& q0, const Vec& q1) -> Vec {
        const double d = q1[0] - q0[0];
        const double mid = 0.5 * (q0[0] + q1[0]);
        Vec g(1);
        g[0] = d / h - 0.5 * h * omega * omega * mid;
        return g;
      });
  return sys;
}

DiscreteMechanicalSystem make_central_force(double h, std::vector<double> vcoeffs) {
  require_step(h);
  TrivialBundle bundle(1, LieGroup::circle(), [](const Vec& s) { return s[0] > 0.0; });
  auto vc = std::make_shared<const std::vector<double>>(std::move(vcoeffs));
  DiscreteMechanicalSystem sys(std::move(bundle), [h, vc](const Vec& q0, const Vec& q1) {
    return central_force_lagrangian(h, *vc, q0, q1);
  });
  sys.set_analytic_slot_derivatives(
      [h, vc](const Vec& q0, const Vec& q1) -> Vec {
        const CentralForceParts p = central_force_parts(h, *vc, q0, q1);
        Vec g(2);
        g << p.dr_first, p.dtheta_first;
        return g;
      },
      [h, vc](const Vec& q0, const Vec& q1) -> Vec {
        const CentralForceParts p = central_force_parts(h, *vc, q0, q1);
        Vec g(2);
        g << p.dr_second, p.dtheta_second;
        return g;
      });
  return sys;
}

DiscreteMechanicalSystem make_central_force_product(double h, std::vector<double> vcoeffs) {
  require_step(h);
  TrivialBundle bundle(1, LieGroup::product({LieGroup::circle(), LieGroup::vector(1)}),
                       [](const Vec& s) { return s[0] > 0.0; });
  auto vc = std::make_shared<const std::vector<double>>(std::move(vcoeffs));
  DiscreteMechanicalSystem sys(std::move(bundle), [h, vc](const Vec& q0, const Vec& q1) {
    const double du = q1[2] - q0[2];
    return central_force_lagrangian(h, *vc, q0.head(2), q1.head(2)) + du * du / (2.0 * h);
  });
  sys.set_analytic_slot_derivatives(
      [h, vc](const Vec& q0, const Vec& q1) -> Vec {
        const CentralForceParts p = central_force_parts(h, *vc, q0.head(2), q1.head(2));
        Vec g(3);
        g << p.dr_first, p.dtheta_first, (q0[2] - q1[2]) / h;
        return g;
      },
      [h, vc](const Vec& q0, const Vec& q1) -> Vec {
        const CentralForceParts p = central_force_parts(h, *vc, q0.head(2), q1.head(2));
        Vec g(3);
        g << p.dr_second, p.dtheta_second, (q1[2] - q0[2]) / h;
        return g;
      });
  return sys;
}

ForcedDiscreteMechanicalSystem make_damped_particle(double h, double c) {
  require_step(h);
  TrivialBundle bundle(0, LieGroup::vector(1));
  DiscreteMechanicalSystem sys(std::move(bundle), kinetic_lagrangian(h));
  register_kinetic_derivatives(sys, h);
  DiscreteForce force;
  force.minus = [c](const Vec& q0, const Vec& q1) -> Vec { return -0.5 * c * (q1 - q0); };
  force.plus = [c](const Vec& q0, const Vec& q1) -> Vec { return -0.5 * c * (q1 - q0); };
  return ForcedDiscreteMechanicalSystem(std::move(sys), std::move(force));
}

NonholonomicDMS make_nonholonomic_particle(double h) {
  require_step(h);
  TrivialBundle bundle(1, LieGroup::vector(2));
  DiscreteMechanicalSystem sys(std::move(bundle), kinetic_lagrangian(h));
  register_kinetic_derivatives(sys, h);

  DistributionSpec dist;
  dist.dim = 3;
  dist.rank = 2;
  dist.basis = [](const Vec& q) -> Mat {
    Mat e(3, 2);
    e << 1.0, 0.0, 0.0, 1.0, 0.0, q[0];
    return e;
  };
  dist.annihilator = [](const Vec& q) -> Mat {
    Mat w(1, 3);
    w << 0.0, -q[0], 1.0;
    return w;
  };

  KinematicConstraint chi = [](const Vec& q0, const Vec& q1) -> Vec {
    Vec c(1);
    c[0] = (q1[2] - q0[2]) - 0.5 * (q0[0] + q1[0]) * (q1[1] - q0[1]);
    return c;
  };
  return NonholonomicDMS(std::move(sys), std::move(dist), std::move(chi));
}

NhReducedSystem make_nonholonomic_particle_reduced(double h) {
  NonholonomicDMS source = make_nonholonomic_particle(h);
  auto conn = std::make_shared<TrivialConnection>(*source.system().bundle());
  ShapeBasis dhat = [](const Vec&) -> Mat {
    Mat b(1, 1);
    b << 1.0;
    return b;
  };
  FiberAlgebraBasis fiber = [](const Vec& q) -> Mat {
    Mat b(2, 1);
    b << 1.0, q[0];
    return b;
  };
  return NhReducedSystem(std::move(source), std::move(conn), std::move(dhat), std::move(fiber));
}

}  // namespace dmech
