#include <cmath>
#include <random>

#include "doctest.h"
#include "summlab/errors.hpp"
#include "summlab/spaces.hpp"

using namespace summlab;

TEST_CASE("norms of small vectors") {
  CHECK(norm(Vector(SpaceDescriptor::lp(2.0, 3), {3, 4, 0})) == 5.0);
  CHECK(norm(Vector(SpaceDescriptor::lp(1.0, 3), {1, 1, 1})) == 3.0);
  CHECK(norm(Vector(SpaceDescriptor::sup(2), {1, -2})) == 2.0);
  CHECK(norm(Vector::zero(SpaceDescriptor::lp(3.0, 4))) == 0.0);
}

TEST_CASE("vector and space mismatch is structural") {
  const auto l2 = SpaceDescriptor::lp(2.0, 3);
  CHECK_THROWS_AS(Vector(l2, {1, 2}), StructuralError);
  CHECK_THROWS_AS(norm(SpaceDescriptor::lp(2.0, 2), Vector(l2, {1, 2, 3})), StructuralError);
  CHECK_THROWS_AS(SpaceDescriptor::lp(0.5, 3), DomainError);
  CHECK_THROWS_AS(SpaceDescriptor::lp(2.0, 0), StructuralError);
}

TEST_CASE("dual exponents") {
  CHECK(dual_exponent(2.0) == Exponent(2.0));
  CHECK(dual_exponent(1.0).is_infinite());
  CHECK(dual_exponent(Exponent::infinity()) == Exponent(1.0));
  CHECK(dual_exponent(4.0).value() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(dual_exponent(0.5), DomainError);
  for (Exponent p : {Exponent(1.0), Exponent(4.0 / 3.0), Exponent(2.0), Exponent(4.0),
                     Exponent::infinity()}) {
    const Exponent back = dual_exponent(dual_exponent(p));
    if (p.is_infinite()) {
      CHECK(back.is_infinite());
    } else {
      CHECK(back.value() == doctest::Approx(p.value()).epsilon(1e-15));
    }
  }
}

TEST_CASE("cotype table") {
  CHECK(SpaceDescriptor::lp(1.0, 2).cotype() == Exponent(2.0));
  CHECK(SpaceDescriptor::lp(3.0, 2).cotype() == Exponent(3.0));
  CHECK(SpaceDescriptor::sup(2).cotype().is_infinite());
  CHECK(SpaceDescriptor::lp(Exponent::infinity(), 2).cotype().is_infinite());
}

TEST_CASE("norming functionals") {
  const auto h = norming_functional(SpaceDescriptor::lp(2.0, 2), Vector(SpaceDescriptor::lp(2.0, 2), {0.6, 0.8}));
  CHECK(h[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(h[1] == doctest::Approx(0.8).epsilon(1e-15));

  const auto l1 = SpaceDescriptor::lp(1.0, 3);
  const auto s = norming_functional(l1, Vector(l1, {1, -2, 0}));
  CHECK(s[0] == 1.0);
  CHECK(s[1] == -1.0);
  CHECK(s[2] == 0.0);

  const auto sup = SpaceDescriptor::sup(2);
  const auto t = norming_functional(sup, Vector(sup, {2, 2}));
  CHECK(t[0] == 1.0);
  CHECK(t[1] == 0.0);

  CHECK_THROWS_AS(norming_functional(l1, Vector::zero(l1)), DegenerateInputError);
}

TEST_CASE("property: norming functionals have unit dual norm and attain the norm") {
  std::mt19937_64 g(7);
  std::normal_distribution<double> nd;
  for (Exponent p : {Exponent(1.0), Exponent(1.5), Exponent(2.0), Exponent(3.0), Exponent(7.0),
                     Exponent::infinity()}) {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t d = 1 + trial % 6;
      std::vector<double> c(d);
      for (double& x : c) x = nd(g);
      const auto space = SpaceDescriptor::lp(p, d);
      const Vector v(space, c);
      const auto phi = norming_functional(space, v);
      CHECK(std::abs(dual_norm(phi) - 1.0) <= 1e-12);
      CHECK(std::abs(phi(v) / norm(v) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("property: homogeneity and triangle inequality") {
  std::mt19937_64 g(11);
  std::normal_distribution<double> nd;
  for (Exponent p : {Exponent(1.0), Exponent(2.0), Exponent(3.5), Exponent::infinity()}) {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t d = 1 + trial % 5;
      const auto space = SpaceDescriptor::lp(p, d);
      std::vector<double> a(d), b(d), sum(d);
      for (std::size_t i = 0; i < d; ++i) {
        a[i] = nd(g);
        b[i] = nd(g);
        sum[i] = a[i] + b[i];
      }
      const Vector va(space, a), vb(space, b), vs(space, sum);
      CHECK(norm(vs) <= (norm(va) + norm(vb)) * (1.0 + 1e-12));
      for (double lambda : {-2.0, 0.25, 8.0}) {
        CHECK(norm(va.scaled(lambda)) == std::abs(lambda) * norm(va));
      }
    }
  }
}

TEST_CASE("space JSON round trip and schema errors") {
  for (const auto& s : {SpaceDescriptor::lp(2.0, 3), SpaceDescriptor::lp(1.0, 5),
                        SpaceDescriptor::sup(4), SpaceDescriptor::lp(Exponent::infinity(), 2)}) {
    nlohmann::json j = s;
    CHECK(space_from_json(j) == s);
  }
  CHECK(space_from_json(nlohmann::json{{"family", "lp"}, {"p", 2}}, 7).dimension() == 7);
  CHECK_THROWS_AS(space_from_json(nlohmann::json{{"family", "lp"}, {"p", 2}}), SchemaError);
  CHECK_THROWS_AS(space_from_json(nlohmann::json{{"family", "banach"}, {"dim", 2}}), SchemaError);
  CHECK_THROWS_AS(space_from_json(nlohmann::json{{"family", "lp"}, {"p", 0.5}, {"dim", 2}}),
                  SchemaError);
}
