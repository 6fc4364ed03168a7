#pragma once

#include <vector>

#include "dmech/reduction.hpp"

namespace dmech {

/// Free particle on R^n with the rectangle-rule kinetic Lagrangian
/// |q1 - q0|^2 / (2h). Analytic slot derivatives registered.
DiscreteMechanicalSystem make_free_particle(int n, double h);

/// The same free particle with the full translation group registered as the
/// fiber (shape dimension zero), ready for reduction.
DiscreteMechanicalSystem make_free_particle_bundle(int n, double h);

/// Scalar harmonic oscillator, midpoint discretization:
/// (q1-q0)^2/(2h) - h w^2 ((q0+q1)/2)^2 / 2.
DiscreteMechanicalSystem make_harmonic_oscillator(double h, double omega);

/// Planar motion in a rotation-invariant potential, polar coordinates
/// (r, theta) on a bundle with circle fiber. The potential is a polynomial
/// in r with ascending coefficients `vcoeffs` evaluated at the midpoint
/// radius; the angular difference is taken through the shortest
/// representative, so the Lagrangian is invariant under rigid rotations.
DiscreteMechanicalSystem make_central_force(double h, std::vector<double> vcoeffs);

/// Central-force system with an extra free linear coordinate u:
/// configuration (r; theta, u), symmetry group circle x R. Exercises product
/// groups and reduction by stages.
DiscreteMechanicalSystem make_central_force_product(double h, std::vector<double> vcoeffs);

/// Free particle on R with a linear drag discretized symmetrically:
/// f-(q0,q1) = f+(q0,q1) = -(c/2)(q1 - q0). Carries the translation bundle.
ForcedDiscreteMechanicalSystem make_damped_particle(double h, double c);

/// Kinetic particle in coordinates (y, x, z) constrained to dz = y dx: the
/// distribution is spanned by d_y and d_x + y d_z, and the discrete
/// constraint uses the midpoint rule z1 - z0 = (y0+y1)/2 (x1 - x0). The
/// (x, z) translations are registered as the fiber.
NonholonomicDMS make_nonholonomic_particle(double h);

/// The constrained particle packaged for reduction: trivial connection,
/// full shape basis, and the admissible fiber direction (1, y).
NhReducedSystem make_nonholonomic_particle_reduced(double h);

}  // namespace dmech
