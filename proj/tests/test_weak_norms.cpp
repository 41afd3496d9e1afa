#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "support/reference.hpp"
#include "summlab/errors.hpp"
#include "summlab/oracles.hpp"
#include "summlab/weak_norms.hpp"

using namespace summlab;

namespace {

VectorFamily family(const SpaceDescriptor& s, const ref::Matrix& rows) {
  return VectorFamily::from_rows(s, rows);
}

}  // namespace

TEST_CASE("basis in l2 has weak 2-norm one") {
  for (std::size_t n : {1u, 3u, 8u}) {
    const auto r = weak_norm(VectorFamily::basis(SpaceDescriptor::lp(2.0, n), n), 2.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.exact);
  }
}

TEST_CASE("single vector gives its norm") {
  const auto s = SpaceDescriptor::lp(3.0, 3);
  const auto f = family(s, {{1.0, -2.0, 0.5}});
  for (double q : {0.5, 1.0, 2.0, 5.0}) {
    const auto r = weak_norm(f, q);
    CHECK(r.value == doctest::Approx(ref::pnorm({1.0, -2.0, 0.5}, 3.0)).epsilon(1e-13));
    CHECK(r.exact);
    CHECK(r.path == WeakNormPath::SingleVector);
  }
}

TEST_CASE("n copies of one unit vector give n^(1/q)") {
  const auto s = SpaceDescriptor::lp(2.0, 3);
  const double c = 1.0 / std::sqrt(3.0);
  const auto f = family(s, ref::Matrix(5, {c, c, -c}));
  for (double q : {1.0, 2.0, 3.0}) {
    const auto r = weak_norm(f, q);
    CHECK(r.value == doctest::Approx(std::pow(5.0, 1.0 / q)).epsilon(1e-9));
  }
}

TEST_CASE("basis of l1 at q = 1 and q = 2") {
  for (std::size_t n : {2u, 5u, 9u}) {
    const auto f = VectorFamily::basis(SpaceDescriptor::lp(1.0, n), n);
    CHECK(weak_norm(f, 1.0).value == doctest::Approx(double(n)).epsilon(1e-14));
    const double expected = std::sqrt(double(n));
    CHECK(weak_norm(f, 2.0).value == doctest::Approx(expected).epsilon(1e-14));
    CHECK(weak_norm_vertex_oracle(f, 2.0) == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(weak_norm(family(SpaceDescriptor::lp(1.0, 2), {{1.0, 0.0}}), 3.0).value == 1.0);
}

TEST_CASE("invalid q and zero families") {
  const auto f = VectorFamily::basis(SpaceDescriptor::lp(2.0, 2), 2);
  CHECK_THROWS_AS(weak_norm(f, 0.0), DomainError);
  CHECK_THROWS_AS(weak_norm(f, -1.0), DomainError);
  const auto zero = family(SpaceDescriptor::lp(2.0, 2), {{0, 0}, {0, 0}});
  CHECK(weak_norm(zero, 2.0).value == 0.0);
  CHECK_THROWS_AS(weak_norm_vertex_oracle(f, 2.0), StructuralError);
}

TEST_CASE("SVD path agrees with power iteration") {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 5, d = 1 + trial % 4;
    const auto rows = ref::gaussian_rows(g, n, d);
    const auto r = weak_norm(family(SpaceDescriptor::lp(2.0, d), rows), 2.0);
    CHECK(r.path == (d == 1 || n == 1 ? r.path : WeakNormPath::HilbertSvd));
    CHECK(r.value == doctest::Approx(ref::top_singular_value(rows)).epsilon(1e-10));
  }
}

TEST_CASE("l1 vertex path agrees with sign enumeration") {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 4, d = 1 + trial % 7;
    const auto rows = ref::gaussian_rows(g, n, d);
    for (double q : {1.0, 1.5, 3.0}) {
      const auto f = family(SpaceDescriptor::lp(1.0, d), rows);
      const auto r = weak_norm(f, q);
      CHECK(r.exact);
      CHECK(r.value == doctest::Approx(ref::sign_vertex_max(rows, q)).epsilon(1e-12));
      CHECK(weak_norm_vertex_oracle(f, q) == doctest::Approx(r.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("sup-normed vertex path agrees with coordinate enumeration") {
  std::mt19937_64 g(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 4, d = 1 + trial % 6;
    const auto rows = ref::gaussian_rows(g, n, d);
    for (double q : {1.0, 2.0, 4.0}) {
      const auto r = weak_norm(family(SpaceDescriptor::sup(d), rows), q);
      CHECK(r.exact);
      CHECK(r.value == doctest::Approx(ref::coordinate_max(rows, q)).epsilon(1e-12));
    }
  }
}

TEST_CASE("certificate reproduces the value and lies in the dual ball") {
  std::mt19937_64 g(13);
  for (Exponent p : {Exponent(1.0), Exponent(1.5), Exponent(2.0), Exponent(4.0), Exponent::infinity()}) {
    for (double q : {1.0, 2.0, 3.0}) {
      const auto rows = ref::gaussian_rows(g, 4, 3);
      const auto f = family(SpaceDescriptor::lp(p, 3), rows);
      const auto r = weak_norm(f, q);
      CHECK(dual_norm(r.certificate) <= 1.0 + 1e-9);
      CHECK(weak_objective(f, r.certificate.coords(), q) ==
            doctest::Approx(r.value).epsilon(1e-9));
      double biggest = 0.0;
      for (const auto& v : f) biggest = std::max(biggest, norm(v));
      CHECK(r.value >= biggest * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("forced search stays within the SVD value") {
  std::mt19937_64 g(17);
  SearchBudget forced;
  forced.force_search = true;
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = ref::gaussian_rows(g, 3 + trial % 4, 2 + trial % 4);
    const auto f = family(SpaceDescriptor::lp(2.0, rows.front().size()), rows);
    const double exact = weak_norm(f, 2.0).value;
    const auto searched = weak_norm(f, 2.0, forced);
    CHECK_FALSE(searched.exact);
    CHECK(searched.value <= exact + 1e-9);
    CHECK(searched.value >= 0.999 * exact);
  }
}

TEST_CASE("dense-sampling oracle is close to the SVD path") {
  std::mt19937_64 g(21);
  for (std::size_t d : {2u, 3u, 4u}) {
    const auto rows = ref::gaussian_rows(g, 4, d);
    const auto f = family(SpaceDescriptor::lp(2.0, d), rows);
    const double exact = weak_norm(f, 2.0).value;
    const double sampled = brute_force_weak_norm(f, 2.0, 1'000'000);
    CHECK(sampled <= exact * (1.0 + 1e-12));
    CHECK(sampled >= exact * (1.0 - 1e-3));
  }
  const auto basis = VectorFamily::basis(SpaceDescriptor::lp(2.0, 3), 3);
  CHECK(brute_force_weak_norm(basis, 2.0, 1'000'000) == doctest::Approx(1.0).epsilon(1e-3));
  const auto one = family(SpaceDescriptor::lp(2.0, 3), {{1.0, 2.0, 2.0}});
  CHECK(brute_force_weak_norm(one, 2.0, 1'000'000) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK_THROWS_AS(brute_force_weak_norm(VectorFamily::basis(SpaceDescriptor::lp(2.0, 7), 2), 2.0, 10),
                  BudgetError);
}

TEST_CASE("property: monotone in q, homogeneous, permutation invariant") {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  const Exponent ps[] = {Exponent(1.0), Exponent(2.0), Exponent(3.0), Exponent::infinity()};
  for (int trial = 0; trial < 40; ++trial) {
    const Exponent p = ps[trial % 4];
    const std::size_t n = 2 + trial % 4, d = 2 + trial % 3;
    const auto f = family(SpaceDescriptor::lp(p, d), ref::gaussian_rows(g, n, d));
    double previous = INFINITY;
    for (double q : {1.0, 1.5, 2.0, 3.0}) {
      const double v = weak_norm(f, q).value;
      CHECK(v <= previous * (1.0 + 1e-9));
      previous = v;
    }
    const double lambda = scale(g);
    for (double q : {1.0, 2.0}) {
      const auto base = weak_norm(f, q);
      const auto scaled = weak_norm(f.scaled(lambda), q);
      if (base.exact && scaled.exact) {
        CHECK(scaled.value == doctest::Approx(lambda * base.value).epsilon(1e-12));
      } else {
        CHECK(weak_objective(f.scaled(lambda), base.certificate.coords(), q) ==
              doctest::Approx(lambda * base.value).epsilon(1e-12));
      }
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), g);
      const auto permuted = weak_norm(f.permuted(order), q);
      if (base.exact) {
        CHECK(permuted.value == base.value);
      } else {
        CHECK(std::abs(permuted.value - base.value) <= 1e-9 * base.value);
      }
    }
  }
}

TEST_CASE("quasi-norm exponents q < 1 are accepted") {
  const auto f = VectorFamily::basis(SpaceDescriptor::lp(1.0, 4), 4);
  const auto r = weak_norm(f, 0.5);
  CHECK(r.exact);
  CHECK(r.value == doctest::Approx(16.0).epsilon(1e-12));
}
