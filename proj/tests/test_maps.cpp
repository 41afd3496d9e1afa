#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "support/reference.hpp"
#include "summlab/errors.hpp"
#include "summlab/maps.hpp"
#include "summlab/oracles.hpp"
#include "summlab/witnesses.hpp"

using namespace summlab;

namespace {

DenseTensor random_tensor(std::mt19937_64& g, std::vector<std::size_t> shape) {
  std::normal_distribution<double> nd;
  auto t = DenseTensor::zeros(std::move(shape));
  for (double& c : t.data) c = nd(g);
  return t;
}

Vector random_vector(std::mt19937_64& g, const SpaceDescriptor& s) {
  std::normal_distribution<double> nd;
  std::vector<double> c(s.dimension());
  for (double& x : c) x = nd(g);
  return Vector(s, c);
}

VectorFamily random_family(std::mt19937_64& g, const SpaceDescriptor& s, std::size_t n) {
  std::vector<Vector> vs;
  for (std::size_t k = 0; k < n; ++k) vs.push_back(random_vector(g, s));
  return VectorFamily(s, std::move(vs));
}

}  // namespace

TEST_CASE("diagonal witness evaluation") {
  const auto l2 = SpaceDescriptor::lp(2.0, 2);
  const auto t1 = MultilinearMap::diagonal_c0({l2});
  const Vector x(l2, {3, 4});
  const auto y1 = eval_multilinear(t1, std::span(&x, 1));
  CHECK(y1[0] == 3.0);
  CHECK(y1[1] == 4.0);

  const auto t2 = MultilinearMap::diagonal_c0({l2, l2});
  const std::vector<Vector> args = {Vector(l2, {1, 0}), Vector(l2, {0, 1})};
  const auto y2 = eval_multilinear(t2, args);
  REQUIRE(y2.size() == 4);
  CHECK(y2[0] == 0.0);
  CHECK(y2[1] == 1.0);
  CHECK(y2[2] == 0.0);
  CHECK(y2[3] == 0.0);
  CHECK(norm(y2) == 1.0);
  CHECK(t2.codomain() == SpaceDescriptor::sup(4));
}

TEST_CASE("zero tensor maps everything to zero") {
  std::mt19937_64 g(1);
  const auto s = SpaceDescriptor::lp(2.0, 3);
  const auto t = MultilinearMap::dense({s, s}, SpaceDescriptor::lp(1.0, 2), DenseTensor::zeros({3, 3, 2}));
  const std::vector<Vector> args = {random_vector(g, s), random_vector(g, s)};
  CHECK(norm(eval_multilinear(t, args)) == 0.0);
  const std::vector<VectorFamily> fams = {random_family(g, s, 4), random_family(g, s, 4)};
  CHECK(mixed_power_sum(t, fams, 2.0) == 0.0);
  CHECK(brute_force_mixed_sum(t, fams, 2.0) == 0.0);
}

TEST_CASE("structural errors") {
  const auto s2 = SpaceDescriptor::lp(2.0, 2);
  const auto s3 = SpaceDescriptor::lp(2.0, 3);
  CHECK_THROWS_AS(MultilinearMap::dense({s2}, s2, DenseTensor::zeros({3, 2})), StructuralError);
  CHECK_THROWS_AS(DenseTensor({2, 2}, {1.0, 2.0}), StructuralError);
  const auto id = identity_witness(s2);
  const Vector wrong(s3, {1, 2, 3});
  CHECK_THROWS_AS(eval_multilinear(id, std::span(&wrong, 1)), StructuralError);
  const std::vector<Vector> two = {Vector::basis(s2, 0), Vector::basis(s2, 1)};
  CHECK_THROWS_AS(eval_multilinear(id, two), StructuralError);
  const auto fam = VectorFamily::basis(s2, 2);
  CHECK_THROWS_AS(mixed_power_sum(id, std::span(&fam, 1), 0.0), DomainError);
  CHECK_THROWS_AS(mixed_power_sum(id, std::span(&fam, 1), -1.0), DomainError);
}

TEST_CASE("diagonal witness power sums on basis families") {
  for (std::size_t m = 1; m <= 3; ++m) {
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u}) {
      if (std::pow(double(n), double(m)) > 1e6) continue;
      const auto t = tensor_witness(m, n);
      const std::vector<VectorFamily> fams(m, VectorFamily::basis(SpaceDescriptor::lp(2.0, n), n));
      const double expected = std::pow(double(n), double(m) / 2.0);
      CHECK(std::abs(mixed_power_sum(t, fams, 2.0) / expected - 1.0) <= 1e-12);
    }
  }
  const auto t = tensor_witness(2, 3);
  const std::vector<VectorFamily> fams(2, VectorFamily::basis(SpaceDescriptor::lp(2.0, 3), 3));
  CHECK(mixed_power_sum(t, fams, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("identity on l2 with an orthonormal basis") {
  for (std::size_t n : {1u, 4u, 9u}) {
    const auto s = SpaceDescriptor::lp(2.0, n);
    const auto fam = VectorFamily::basis(s, n);
    CHECK(mixed_power_sum(identity_witness(s), std::span(&fam, 1), 2.0) ==
          doctest::Approx(std::sqrt(double(n))).epsilon(1e-14));
  }
}

TEST_CASE("tuple budget is enforced") {
  const auto t = tensor_witness(2, 10);
  const std::vector<VectorFamily> fams(2, VectorFamily::basis(SpaceDescriptor::lp(2.0, 10), 10));
  PowerSumOptions tight;
  tight.tuple_budget = 99;
  CHECK_THROWS_AS(mixed_power_sum(t, fams, 2.0, tight), BudgetError);
  tight.tuple_budget = 100;
  CHECK_NOTHROW(mixed_power_sum(t, fams, 2.0, tight));
  CHECK_THROWS_AS(tensor_witness(3, 1000, 1000), BudgetError);
}

TEST_CASE("optimized power sum matches the brute-force oracle") {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  const Exponent exps[] = {Exponent(1.0), Exponent(2.0), Exponent(3.0), Exponent::infinity()};
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 1 + trial % 3;
    const std::size_t n = m == 3 ? 2 + trial % 5 : 2 + trial % 9;
    std::vector<SpaceDescriptor> domain;
    std::vector<std::size_t> shape;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t d = 1 + (trial + i) % 3;
      domain.push_back(SpaceDescriptor::lp(exps[(trial + i) % 4], d));
      shape.push_back(d);
    }
    const auto out = SpaceDescriptor::lp(exps[trial % 4], 1 + trial % 3);
    shape.push_back(out.dimension());
    const auto t = MultilinearMap::dense(domain, out, random_tensor(g, shape));
    std::vector<VectorFamily> fams;
    for (const auto& s : domain) fams.push_back(random_family(g, s, n));
    const double p = 0.5 + 3.5 * pick(g);
    const double fast = mixed_power_sum(t, fams, p, {100'000'000, 1 + unsigned(trial % 4)});
    const double slow = brute_force_mixed_sum(t, fams, p);
    CHECK(std::abs(fast - slow) <= 1e-12 * slow);
  }
}

TEST_CASE("power sum does not depend on the thread count") {
  std::mt19937_64 g(77);
  const auto s = SpaceDescriptor::lp(2.0, 3);
  const auto t = MultilinearMap::dense({s, s}, SpaceDescriptor::lp(3.0, 2), random_tensor(g, {3, 3, 2}));
  const std::vector<VectorFamily> fams = {random_family(g, s, 37), random_family(g, s, 37)};
  const double one = mixed_power_sum(t, fams, 1.7, {100'000'000, 1});
  for (unsigned threads : {2u, 3u, 8u}) {
    CHECK(mixed_power_sum(t, fams, 1.7, {100'000'000, threads}) == one);
  }
}

TEST_CASE("property: multilinearity") {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = SpaceDescriptor::lp(2.0, 2 + trial % 3);
    const std::size_t d = s.dimension();
    const auto t = MultilinearMap::dense({s, s, s}, SpaceDescriptor::lp(2.0, 2),
                                         random_tensor(g, {d, d, d, 2}));
    std::vector<Vector> args = {random_vector(g, s), random_vector(g, s), random_vector(g, s)};
    const std::size_t slot = trial % 3;
    const Vector extra = random_vector(g, s);
    const double lambda = u(g);
    std::vector<double> combo(d);
    for (std::size_t i = 0; i < d; ++i) combo[i] = args[slot][i] + lambda * extra[i];
    auto with = [&](const Vector& v) {
      auto a = args;
      a[slot] = v;
      return eval_multilinear(t, a);
    };
    const auto lhs = with(Vector(s, combo));
    const auto a = with(args[slot]);
    const auto b = with(extra);
    for (std::size_t o = 0; o < 2; ++o) {
      const double rhs = a[o] + lambda * b[o];
      CHECK(std::abs(lhs[o] - rhs) <= 1e-10 * std::max({1.0, std::abs(a[o]), std::abs(lambda * b[o])}));
    }
  }
}

TEST_CASE("polynomial evaluation examples") {
  const auto l1 = SpaceDescriptor::lp(1.0, 2);
  const auto l2 = SpaceDescriptor::lp(2.0, 2);
  const auto cot = HomogeneousPolynomial::cotype_witness(
      2, l1, l2,
      CotypeWitness{{1.0}, {norming_functional(l1, Vector::basis(l1, 0))}, {Vector::basis(l2, 0)}, 1.0});
  const auto y = eval_polynomial(cot, Vector::basis(l1, 0));
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 0.0);

  const auto even = HomogeneousPolynomial::real_even_witness(
      2, l2, RealEvenWitness{{1.0}, {Functional(l2, {1.0, 0.0})}, 0.5});
  CHECK(eval_polynomial(even, Vector(l2, {3.0, -7.0}))[0] == 9.0);
  CHECK(eval_polynomial(even, Vector(l2, {-3.0, 7.0}))[0] == 9.0);

  CHECK_THROWS_AS(HomogeneousPolynomial::real_even_witness(3, l2, RealEvenWitness{{1.0}, {Functional(l2, {1.0, 0.0})}, 0.5}),
                  DomainError);
  CHECK_THROWS_AS(HomogeneousPolynomial::real_even_witness(2, l2, RealEvenWitness{{0.5}, {Functional(l2, {1.0, 0.0})}, 0.5}),
                  DomainError);
}

TEST_CASE("zero polynomial and degree-m homogeneity") {
  std::mt19937_64 g(41);
  const auto s = SpaceDescriptor::lp(2.0, 3);
  const auto zero = HomogeneousPolynomial::dense_symmetric(2, s, SpaceDescriptor::lp(2.0, 2),
                                                           DenseTensor::zeros({3, 3, 2}));
  CHECK(poly_power_sum(zero, random_family(g, s, 5), 1.0) == 0.0);

  // Symmetrize a random tensor by averaging its two input axes.
  auto raw = random_tensor(g, {3, 3, 2});
  auto sym = DenseTensor::zeros({3, 3, 2});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t o = 0; o < 2; ++o)
        sym.data[(i * 3 + j) * 2 + o] = 0.5 * (raw.data[(i * 3 + j) * 2 + o] + raw.data[(j * 3 + i) * 2 + o]);
  const auto poly = HomogeneousPolynomial::dense_symmetric(2, s, SpaceDescriptor::lp(2.0, 2), sym);
  CHECK_THROWS_AS(HomogeneousPolynomial::dense_symmetric(2, s, SpaceDescriptor::lp(2.0, 2), raw),
                  StructuralError);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_vector(g, s);
    const double lambda = u(g);
    const auto a = eval_polynomial(poly, x.scaled(lambda));
    const auto b = eval_polynomial(poly, x);
    for (std::size_t o = 0; o < 2; ++o) {
      CHECK(std::abs(a[o] - lambda * lambda * b[o]) <= 1e-10 * std::max(1.0, std::abs(a[o])));
    }
  }
}

TEST_CASE("operator norms") {
  for (std::size_t m = 1; m <= 3; ++m) {
    const auto t = tensor_witness(m, 4);
    const auto r = operator_norm(t);
    CHECK(r.value == 1.0);
    CHECK(r.exact);
  }
  const auto id = MultilinearMap::dense({SpaceDescriptor::lp(2.0, 4)}, SpaceDescriptor::lp(2.0, 4),
                                        identity_tensor(4));
  const auto r = operator_norm(id);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(r.exact);

  // ‖A‖_{2->2} of a random matrix is its top singular value.
  std::mt19937_64 g(5);
  const auto rows = ref::gaussian_rows(g, 3, 4);  // output 3, input 4
  auto t = DenseTensor::zeros({4, 3});
  for (std::size_t o = 0; o < 3; ++o)
    for (std::size_t i = 0; i < 4; ++i) t.data[i * 3 + o] = rows[o][i];
  const auto a = MultilinearMap::dense({SpaceDescriptor::lp(2.0, 4)}, SpaceDescriptor::lp(2.0, 3), t);
  CHECK(operator_norm(a).value == doctest::Approx(ref::top_singular_value(rows)).epsilon(1e-8));

  const auto w = real_even_witness(2, 0.5, SpaceDescriptor::lp(2.0, 4), 4);
  CHECK(operator_norm(w.polynomial).value <= 1.0 + 1e-9);
}

TEST_CASE("tensor JSON and binary round trips") {
  std::mt19937_64 g(8);
  const auto t = random_tensor(g, {2, 3, 4});
  nlohmann::json j = t;
  const auto back = tensor_from_json(j);
  CHECK(back.shape == t.shape);
  CHECK(back.data == t.data);
  CHECK_THROWS_AS(tensor_from_json(nlohmann::json{{"shape", {2, 2}}, {"data", {1.0}}}), StructuralError);
  CHECK_THROWS_AS(tensor_from_json(nlohmann::json::array()), SchemaError);

  const auto path = std::filesystem::temp_directory_path() / "summlab_tensor_roundtrip.bin";
  save_tensor_binary(path, t);
  const auto loaded = load_tensor_binary(path);
  CHECK(loaded.shape == t.shape);
  CHECK(loaded.data == t.data);
  std::filesystem::remove(path);
}
