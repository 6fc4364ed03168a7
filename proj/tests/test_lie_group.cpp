#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dmech/lie_group.hpp"
#include "dmech/types.hpp"

using namespace dmech;

namespace {

Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
}

Vec sample_element(const LieGroup& g, DetRng& rng) {
  Vec out(g.dim());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.uniform(-4.0, 4.0);
  return g.canonicalize(out);
}

std::vector<LieGroup> builtin_groups() {
  return {LieGroup::vector(1), LieGroup::vector(2), LieGroup::circle(),
          LieGroup::product({LieGroup::vector(1), LieGroup::circle()})};
}

}  // namespace

TEST_CASE("group multiplication in charts") {
  SUBCASE("circle angle addition") {
    LieGroup s1 = LieGroup::circle();
    CHECK(std::abs(s1.multiply(vec1(0.3), vec1(0.5))[0] - 0.8) < 1e-15);
  }

  SUBCASE("vector addition") {
    LieGroup r2 = LieGroup::vector(2);
    Vec a(2), b(2);
    a << 1.0, 2.0;
    b << 3.0, 4.0;
    Vec c = r2.multiply(a, b);
    CHECK(c[0] == 4.0);
    CHECK(c[1] == 6.0);
  }

  SUBCASE("circle product wraps past the cut") {
    LieGroup s1 = LieGroup::circle();
    // 6.5 reduced modulo the full turn
    CHECK(s1.multiply(vec1(6.0), vec1(0.5))[0] == 0.21681469282041377);
  }
}

TEST_CASE("inverse, identity, exp and log") {
  LieGroup s1 = LieGroup::circle();

  SUBCASE("circle inverse reflects the angle") {
    CHECK(std::abs(s1.inverse(vec1(0.3))[0] - 5.983185307179586) < 1e-15);
  }

  SUBCASE("vector groups are their own algebra") {
    LieGroup r3 = LieGroup::vector(3);
    Vec xi(3);
    xi << 0.4, -1.2, 0.0;
    CHECK((r3.exp(xi) - xi).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((r3.log(xi) - xi).lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("circle log round trip") {
    CHECK(std::abs(s1.log(s1.exp(vec1(0.4)))[0] - 0.4) < 1e-14);
  }

  SUBCASE("log lands in the principal branch") {
    CHECK(std::abs(s1.log(vec1(5.983185307179586))[0] - (-0.3)) < 1e-14);
  }
}

TEST_CASE("group axioms hold on random triples") {
  for (const LieGroup& g : builtin_groups()) {
    DetRng rng(0x1234abcdULL + static_cast<std::uint64_t>(g.dim()));
    const Vec e = g.identity();
    for (int i = 0; i < 1000; ++i) {
      const Vec a = sample_element(g, rng);
      const Vec b = sample_element(g, rng);
      const Vec c = sample_element(g, rng);
      CHECK(g.distance(g.multiply(g.multiply(a, b), c), g.multiply(a, g.multiply(b, c))) <= 1e-12);
      CHECK(g.distance(g.multiply(a, e), a) <= 1e-12);
      CHECK(g.distance(g.multiply(e, a), a) <= 1e-12);
      CHECK(g.distance(g.multiply(a, g.inverse(a)), e) <= 1e-12);
    }
  }
}

TEST_CASE("exp is a right inverse of log") {
  for (const LieGroup& g : builtin_groups()) {
    DetRng rng(0xfeedULL);
    for (int i = 0; i < 200; ++i) {
      const Vec a = sample_element(g, rng);
      CHECK(g.distance(g.exp(g.log(a)), a) <= 1e-12);
    }
  }
}

TEST_CASE("adjoint and coadjoint are the identity for abelian factors") {
  for (const LieGroup& g : builtin_groups()) {
    DetRng rng(0xadULL);
    const Vec a = sample_element(g, rng);
    const Vec b = sample_element(g, rng);
    const Mat AdA = g.adjoint(a);
    const Mat AdAinv = g.adjoint(g.inverse(a));
    CHECK((AdA * AdAinv - Mat::Identity(g.dim(), g.dim())).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((g.coadjoint(b) - Mat::Identity(g.dim(), g.dim())).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("translation maps act as the identity on chart coordinates") {
  LieGroup g = LieGroup::product({LieGroup::vector(2), LieGroup::circle()});
  Vec w1(3), dw(3), alpha(3);
  w1 << 5.0, 5.0, 1.2;
  dw << 1.0, -1.0, 0.7;
  alpha << 1.0, -1.0, 0.25;
  CHECK((g.algebra_to_tangent_right(w1, dw) - dw).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((g.covector_to_identity_right(w1, alpha) - alpha).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("difference and distance use the shortest circle representative") {
  LieGroup s1 = LieGroup::circle();
  CHECK(std::abs(s1.difference(vec1(0.1), vec1(6.2))[0] -
                 (0.1 - 6.2 + 2.0 * std::numbers::pi)) < 1e-14);
  CHECK(s1.distance(vec1(0.05), vec1(2.0 * std::numbers::pi - 0.05)) < 0.11);

  LieGroup prod = LieGroup::product({LieGroup::circle(), LieGroup::vector(1)});
  Vec a(2), b(2);
  a << 6.2, 1.0;
  b << 0.1, 3.0;
  Vec d = prod.difference(a, b);
  CHECK(std::abs(d[0] - (6.2 - 0.1 - 2.0 * std::numbers::pi)) < 1e-14);
  CHECK(d[1] == -2.0);
}

TEST_CASE("canonicalization puts circle coordinates in the fundamental window") {
  LieGroup s1 = LieGroup::circle();
  DetRng rng(0xc0ffeeULL);
  for (int i = 0; i < 200; ++i) {
    const double raw = rng.uniform(-30.0, 30.0);
    const double c = s1.canonicalize(vec1(raw))[0];
    CHECK(c >= 0.0);
    CHECK(c < 2.0 * std::numbers::pi);
  }
  // dimension-zero groups are legal and behave as the trivial group
  LieGroup trivial = LieGroup::vector(0);
  CHECK(trivial.dim() == 0);
  CHECK(trivial.identity().size() == 0);
  CHECK(trivial.multiply(trivial.identity(), trivial.identity()).size() == 0);
}
