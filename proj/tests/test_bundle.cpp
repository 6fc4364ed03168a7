#include <doctest.h>

#include <cmath>

#include "dmech/bundle.hpp"
#include "dmech/types.hpp"

using namespace dmech;

namespace {

Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("action on the fiber factor") {
  SUBCASE("vector fiber") {
    TrivialBundle b(1, LieGroup::vector(1));
    Vec q = make_vec({1.0, 3.0});
    Vec out = b.act(make_vec({2.0}), q);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 5.0);
  }

  SUBCASE("circle fiber") {
    TrivialBundle b(1, LieGroup::circle());
    Vec out = b.act(make_vec({0.3}), make_vec({1.7, 0.5}));
    CHECK(out[0] == 1.7);
    CHECK(std::abs(out[1] - 0.8) < 1e-15);
  }

  SUBCASE("identity acts trivially") {
    TrivialBundle b(2, LieGroup::product({LieGroup::circle(), LieGroup::vector(1)}));
    Vec q = make_vec({0.4, -0.1, 1.1, 7.0});
    CHECK(b.distance(b.act(b.group().identity(), q), q) == 0.0);
  }
}

TEST_CASE("infinitesimal generator fills the fiber slot") {
  TrivialBundle b(1, LieGroup::vector(1));
  Vec gen = b.inf_generator(make_vec({1.0}), make_vec({0.7, 2.0}));
  CHECK(gen[0] == 0.0);
  CHECK(gen[1] == 1.0);

  TrivialBundle bc(1, LieGroup::circle());
  Vec gc = bc.inf_generator(make_vec({2.0}), make_vec({0.7, 0.5}));
  CHECK(gc[0] == 0.0);
  CHECK(gc[1] == 2.0);

  CHECK(b.inf_generator(make_vec({0.0}), make_vec({0.7, 2.0})).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("group_difference recovers the fiber offset") {
  TrivialBundle bc(1, LieGroup::circle());
  Vec a = make_vec({1.3, 0.3});
  Vec b = make_vec({1.3, 0.5});
  CHECK(std::abs(bc.group_difference(b, a)[0] - 0.2) < 1e-15);
  CHECK(bc.group_difference(a, a).lpNorm<Eigen::Infinity>() == 0.0);

  TrivialBundle bv(1, LieGroup::vector(1));
  CHECK(bv.group_difference(make_vec({0.0, 7.0}), make_vec({0.0, 2.0}))[0] == 5.0);

  CHECK_THROWS_AS(bc.group_difference(make_vec({1.3, 0.5}), make_vec({1.4, 0.3})), DomainError);
}

TEST_CASE("trivial connection evaluation, level and lift") {
  TrivialBundle b(1, LieGroup::circle());
  TrivialConnection conn(b);

  Vec q0 = make_vec({1.0, 0.3});
  Vec q1 = make_vec({2.0, 0.5});

  SUBCASE("two-point value is the fiber quotient") {
    CHECK(std::abs(conn.evaluate(q0, q1)[0] - 0.2) < 1e-15);
  }

  SUBCASE("level property") {
    Vec gamma = conn.level(q0);
    CHECK(b.group().distance(conn.evaluate(q0, b.act(gamma, q0)), b.group().identity()) == 0.0);
  }

  SUBCASE("equivariance spot value (abelian conjugation)") {
    Vec g = make_vec({0.4});
    CHECK(std::abs(conn.evaluate(b.act(g, q0), b.act(g, q1))[0] - 0.2) < 1e-15);
  }

  SUBCASE("lift keeps the fiber and hits the target shape") {
    Vec lifted = conn.lift(q0, make_vec({2.0}));
    CHECK(lifted[0] == 2.0);
    CHECK(lifted[1] == 0.3);
    CHECK(b.group().distance(conn.evaluate(q0, lifted), b.group().identity()) <= 1e-12);
    // lifting over the base point realizes the level element
    CHECK(b.distance(conn.lift(q0, b.shape_of(q0)), b.act(conn.level(q0), q0)) <= 1e-12);
  }

  SUBCASE("tangent map is the fiber-velocity difference") {
    Vec dq0 = make_vec({0.0, 0.1});
    Vec dq1 = make_vec({0.0, 0.3});
    CHECK(std::abs(conn.tangent(q0, q1, dq0, dq1)[0] - 0.2) < 1e-9);
    CHECK(conn.tangent(q0, q1, Vec::Zero(2), Vec::Zero(2)).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("next-point map inverts the two-point reduction") {
  TrivialBundle b(1, LieGroup::circle());
  TrivialConnection conn(b);

  SUBCASE("closed form on the trivial connection") {
    Vec q0 = make_vec({1.0, 0.3});
    Vec out = conn.ftilde1(q0, make_vec({0.2}), make_vec({2.0}));
    CHECK(out[0] == 2.0);
    CHECK(std::abs(out[1] - 0.5) < 1e-15);
  }

  SUBCASE("round trip on random pairs") {
    DetRng rng(0x5151ULL);
    SampleBox box;
    for (int i = 0; i < 100; ++i) {
      Vec q0 = sample_config(b, rng, box);
      Vec q1 = sample_config(b, rng, box);
      Vec w = conn.evaluate(q0, q1);
      Vec back = conn.ftilde1(q0, w, b.shape_of(q1));
      CHECK(b.distance(back, q1) <= 1e-12);
    }
  }
}

TEST_CASE("connection laws hold on sampled data") {
  TrivialBundle b(1, LieGroup::product({LieGroup::circle(), LieGroup::vector(1)}));

  SUBCASE("canonical connection") {
    TrivialConnection conn(b);
    CHECK(connection_equivariance_violation(conn, 1000, 7) <= 1e-12);
    CHECK(connection_lift_violation(conn, 1000, 8) <= 1e-12);
    CHECK(connection_section_violation(conn, 1000, 9) <= 1e-12);
  }

  SUBCASE("tilted connection") {
    Mat tilt(2, 1);
    tilt << 0.3, -0.2;
    TiltedConnection conn(b, tilt);
    CHECK(connection_equivariance_violation(conn, 1000, 7) <= 1e-12);
    CHECK(connection_lift_violation(conn, 1000, 8) <= 1e-12);
    CHECK(connection_section_violation(conn, 1000, 9) <= 1e-12);
  }
}

TEST_CASE("analytic next-point Jacobians match finite differences") {
  TrivialBundle b(1, LieGroup::product({LieGroup::circle(), LieGroup::vector(1)}));
  Mat tilt(2, 1);
  tilt << 0.3, -0.2;

  // A plain DiscreteConnection wrapper that forwards evaluation to the tilted
  // form but keeps the base-class finite-difference tangent data.
  struct NumericTilted : DiscreteConnection {
    TiltedConnection inner;
    NumericTilted(TrivialBundle bb, Mat t) : DiscreteConnection(bb), inner(bb, std::move(t)) {}
    Vec evaluate(const Vec& q0, const Vec& q1) const override { return inner.evaluate(q0, q1); }
    Vec level(const Vec& q) const override { return inner.level(q); }
    Vec lift(const Vec& q0, const Vec& tau1) const override { return inner.lift(q0, tau1); }
  };

  TiltedConnection analytic(b, tilt);
  NumericTilted numeric(b, tilt);

  DetRng rng(0xabcdULL);
  SampleBox box;
  for (int i = 0; i < 25; ++i) {
    Vec q0 = sample_config(b, rng, box);
    Vec q1 = sample_config(b, rng, box);
    Vec w = sample_group(b.group(), rng, box);
    Vec tau = sample_shape(b, rng, box);

    CHECK((analytic.d1_matrix(q0, q1) - numeric.d1_matrix(q0, q1)).lpNorm<Eigen::Infinity>() <=
          1e-7);
    CHECK((analytic.d2_matrix(q0, q1) - numeric.d2_matrix(q0, q1)).lpNorm<Eigen::Infinity>() <=
          1e-7);

    Ftilde1Jacobians ja = analytic.ftilde1_jacobians(q0, w, tau);
    Ftilde1Jacobians jn = numeric.ftilde1_jacobians(q0, w, tau);
    CHECK((ja.dq - jn.dq).lpNorm<Eigen::Infinity>() <= 1e-7);
    CHECK((ja.dw - jn.dw).lpNorm<Eigen::Infinity>() <= 1e-7);
    CHECK((ja.dtau - jn.dtau).lpNorm<Eigen::Infinity>() <= 1e-7);
  }
}

TEST_CASE("vertical form reproduces generators and kills horizontal lifts") {
  TrivialBundle b(2, LieGroup::product({LieGroup::vector(1), LieGroup::circle()}));
  DetRng rng(0x77ULL);
  SampleBox box;
  for (int i = 0; i < 100; ++i) {
    Vec q = sample_config(b, rng, box);
    Vec xi(2);
    xi << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
    CHECK((PrincipalConnection::form(b, q, b.inf_generator(xi, q)) - xi).lpNorm<Eigen::Infinity>() <=
          1e-12);

    Vec dtau(2);
    dtau << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    Vec lifted = PrincipalConnection::horizontal(b, dtau);
    CHECK(PrincipalConnection::form(b, q, lifted).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((lifted.head(2) - dtau).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("canonicalize validates the shape domain") {
  TrivialBundle b(1, LieGroup::circle(), [](const Vec& s) { return s[0] > 0.0; });
  CHECK_NOTHROW(b.canonicalize(make_vec({0.5, 7.0})));
  CHECK_THROWS_AS(b.canonicalize(make_vec({-0.5, 1.0})), DomainError);
}
