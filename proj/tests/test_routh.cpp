#include <doctest.h>

#include <cmath>

#include "dmech/builtins.hpp"
#include "dmech/routh.hpp"

using namespace dmech;

namespace {

Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

RouthSetup planar_setup(double mu) {
  return RouthSetup(make_central_force(0.1, {0.0, 0.0, 0.5}), vec1(mu));
}

}  // namespace

TEST_CASE("momentum matching along the fiber") {
  RouthSetup s = planar_setup(0.8);
  const Vec q0 = vec2(1.0, 0.0);
  const Vec q1 = vec2(1.1, 0.23);

  Vec a = a_mu(s, q0, q1);
  REQUIRE(a.size() == 1);
  CHECK(std::abs(a[0] - 0.15743764172335601) < 1e-9);

  // shifting the second point back by the matching element lands on the
  // momentum level
  Vec shifted = s.bundle().act(s.bundle().group().inverse(a), q1);
  CHECK((j_mu(s, q0, shifted) - s.mu).lpNorm<Eigen::Infinity>() <= 1e-10);

  SUBCASE("pure translation system has the closed form") {
    RouthSetup fp(make_free_particle_bundle(1, 0.1), vec1(0.8));
    Vec af = a_mu(fp, vec1(0.0), vec1(0.5));
    CHECK(std::abs(af[0] - 0.42) < 1e-10);
  }
}

TEST_CASE("level solvability from a single point") {
  SUBCASE("planar system") {
    RouthSetup s = planar_setup(0.8);
    MuGoodReport rep = mu_good_check(s, vec2(1.0, 0.3));
    CHECK(rep.unique);
    CHECK(rep.regular);
    CHECK(rep.spread <= 1e-9);
    CHECK(rep.condition < 1e6);
    Vec q = vec2(1.0, 0.3);
    CHECK((j_mu(s, q, s.bundle().act(rep.g, q)) - s.mu).lpNorm<Eigen::Infinity>() <= 1e-10);
  }

  SUBCASE("pure translation system: the witness is h times the level") {
    RouthSetup fp(make_free_particle_bundle(1, 0.1), vec1(0.8));
    MuGoodReport rep = mu_good_check(fp, vec1(0.3));
    CHECK(rep.unique);
    CHECK(rep.regular);
    CHECK(std::abs(rep.g[0] - 0.08) < 1e-12);
  }
}

TEST_CASE("zero momentum level collapses to the shape dynamics") {
  RouthSetup s0 = planar_setup(0.0);
  RouthConnection conn(s0);
  TrivialConnection triv(s0.bundle());
  DiscreteMechanicalSystem radial = make_harmonic_oscillator(0.1, 1.0);
  DetRng rng(0x600dULL);
  SampleBox box;

  for (int i = 0; i < 30; ++i) {
    Vec q0 = sample_config(s0.bundle(), rng, box);
    Vec q1 = sample_config(s0.bundle(), rng, box);
    CHECK(s0.bundle().group().distance(conn.evaluate(q0, q1), triv.evaluate(q0, q1)) <= 1e-10);
    Vec lifted = conn.lift(q0, s0.bundle().shape_of(q1));
    CHECK(s0.bundle().group().distance(s0.bundle().fiber_of(lifted),
                                       s0.bundle().fiber_of(q0)) <= 1e-10);
    // the reduced Lagrangian at level zero is the plain radial Lagrangian
    Vec r0 = s0.bundle().shape_of(q0);
    Vec r1 = s0.bundle().shape_of(q1);
    CHECK(std::abs(routh_lagrangian(s0, r0, r1) - radial.lagrangian(r0, r1)) <= 1e-12);
    // and the reduction force vanishes
    Vec u = vec1(std::sin(1.7 * i + 0.4));
    Vec v = vec1(std::cos(0.9 * i));
    CHECK(std::abs(routh_force(s0, r0, r1, u, v)) <= 1e-9);
  }
}

TEST_CASE("reduced Lagrangian at a frozen window") {
  RouthSetup s = planar_setup(0.8);
  CHECK(std::abs(routh_lagrangian(s, vec1(1.0), vec1(1.1)) - 0.023899943310657596) < 1e-10);
}

TEST_CASE("reduction force is bilinear and splits into slot covectors") {
  RouthSetup s = planar_setup(0.8);
  const Vec t0 = vec1(1.0);
  const Vec t1 = vec1(1.08);
  Vec fm = routh_force_minus(s, t0, t1);
  Vec fp = routh_force_plus(s, t0, t1);
  REQUIRE(fm.size() == 1);
  REQUIRE(fp.size() == 1);

  for (int i = 0; i < 10; ++i) {
    Vec u = vec1(0.3 * i - 1.1);
    Vec v = vec1(0.7 - 0.2 * i);
    const double direct = routh_force(s, t0, t1, u, v);
    CHECK(std::abs(direct - (fm.dot(u) + fp.dot(v))) <= 1e-12);
    const double split = 2.0 * routh_force(s, t0, t1, u, Vec::Zero(1)) +
                         routh_force(s, t0, t1, Vec::Zero(1), v);
    CHECK(std::abs(routh_force(s, t0, t1, 2.0 * u, v) - split) <= 1e-12);
  }
}

TEST_CASE("slot derivatives of the reduced Lagrangian match the chain rule") {
  RouthSetup s = planar_setup(0.8);
  RouthConnection conn(s);
  const TrivialBundle& b = s.bundle();
  const int m = s.shape_dim();
  const int gd = s.group_dim();
  DerivativeScheme scheme;
  TwoSlotScalarFn Lr = [&s](const Vec& a, const Vec& c) { return routh_lagrangian(s, a, c); };

  DetRng rng(0xabcdULL);
  SampleBox box;
  box.shape_lo = 0.8;
  box.shape_hi = 1.3;
  for (int i = 0; i < 10; ++i) {
    Vec tau0 = sample_shape(b, rng, box);
    Vec tau1 = sample_shape(b, rng, box);
    Vec q0 = b.flatten({tau0, b.group().identity()});
    Vec q1 = conn.lift(q0, tau1);
    Vec d1 = s.system.d1(q0, q1);
    Vec d2 = s.system.d2(q0, q1);
    Ftilde1Jacobians J = conn.ftilde1_jacobians(q0, b.group().identity(), tau1);

    Vec chain2 = d2.head(m) + J.dtau.transpose() * d2.tail(gd);
    Vec fd2 = slot_gradient(Lr, 2, tau0, tau1, scheme);
    CHECK((fd2 - chain2).lpNorm<Eigen::Infinity>() <= 1e-6);

    Vec chain1 = d1.head(m) + J.dq.leftCols(m).transpose() * d2.tail(gd);
    Vec fd1 = slot_gradient(Lr, 1, tau0, tau1, scheme);
    CHECK((fd1 - chain1).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("reduced equations at a frozen off-trajectory window") {
  RouthSetup s = planar_setup(0.8);
  Vec r = routh_residual(s, vec1(1.0), vec1(1.05), vec1(1.02));
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0] - 0.75557734773080867) < 1e-6);
}

TEST_CASE("momentum-level connection satisfies the connection laws") {
  RouthSetup s = planar_setup(0.8);
  RouthConnection conn(s);
  CHECK(connection_equivariance_violation(conn, 1000, 2024) <= 1e-9);
  CHECK(connection_lift_violation(conn, 1000, 2025) <= 1e-9);
  CHECK(connection_section_violation(conn, 1000, 2026) <= 1e-9);
}

TEST_CASE("shape shadows of momentum-level trajectories solve the reduced equations") {
  DiscreteMechanicalSystem cf = make_central_force(0.1, {0.0, 0.0, 0.5});
  SolverConfig cfg;

  SUBCASE("unit momentum orbit") {
    RouthSetup s(cf, vec1(1.0));
    SimulateResult full = simulate(cf, vec2(1.0, 0.0), vec2(1.1, 0.090702947845804989), 100, cfg);
    RouthReport rep = verify_routh(s, full.curve);
    CHECK(rep.max_residual <= 1e-7);
    CHECK(rep.a_mu_drift <= 1e-9);
    CHECK(rep.momentum_error <= 1e-9);
    CHECK(rep.reconstruction_error <= 1e-8);

    SUBCASE("a shape perturbation breaks the reduced equations") {
      DiscreteCurve pert = full.curve;
      pert[50][0] += 1e-4;
      RouthReport bad = verify_routh(s, pert, /*momentum_tol=*/1e-2);
      CHECK(bad.max_residual > 1e-5);
    }

    SUBCASE("the level must match the curve") {
      RouthSetup wrong(cf, vec1(0.8));
      CHECK_THROWS_AS(verify_routh(wrong, full.curve), PreconditionError);
    }
  }

  SUBCASE("zero momentum orbit is radial and matches the one-dimensional flow") {
    RouthSetup s0(cf, vec1(0.0));
    SimulateResult rad = simulate(cf, vec2(1.0, 0.0), vec2(0.995, 0.0), 12, cfg);
    RouthReport rep = verify_routh(s0, rad.curve);
    CHECK(rep.max_residual <= 1e-8);
    CHECK(rep.momentum_error <= 1e-10);

    DiscreteMechanicalSystem radial = make_harmonic_oscillator(0.1, 1.0);
    SimulateResult line = simulate(radial, vec1(1.0), vec1(0.995), 12, cfg);
    for (size_t k = 0; k < rad.curve.size(); ++k)
      CHECK(std::abs(rad.curve[k][0] - line.curve[k][0]) <= 1e-8);
  }
}
