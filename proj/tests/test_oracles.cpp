#include <cmath>
#include <random>

#include "doctest.h"
#include "support/reference.hpp"
#include "summlab/errors.hpp"
#include "summlab/oracles.hpp"
#include "summlab/witnesses.hpp"

using namespace summlab;

TEST_CASE("brute-force mixed sum on small examples") {
  const auto s = SpaceDescriptor::lp(2.0, 9);
  const auto b = VectorFamily::basis(s, 9);
  CHECK(brute_force_mixed_sum(identity_witness(s), std::span(&b, 1), 2.0) ==
        doctest::Approx(3.0).epsilon(1e-15));

  const auto s3 = SpaceDescriptor::lp(2.0, 3);
  const auto zero = MultilinearMap::dense({s3, s3}, SpaceDescriptor::lp(2.0, 2), DenseTensor::zeros({3, 3, 2}));
  const std::vector<VectorFamily> fams(2, VectorFamily::basis(s3, 3));
  CHECK(brute_force_mixed_sum(zero, fams, 1.0) == 0.0);

  const std::vector<VectorFamily> big(2, VectorFamily::basis(SpaceDescriptor::lp(2.0, 400), 400));
  CHECK_THROWS_AS(brute_force_mixed_sum(tensor_witness(2, 400), big, 2.0), BudgetError);
}

TEST_CASE("brute-force weak norm never exceeds the exact value") {
  std::mt19937_64 g(31);
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto rows = ref::gaussian_rows(g, 3, d);
    const auto f = VectorFamily::from_rows(SpaceDescriptor::lp(1.0, d), rows);
    for (double q : {1.0, 2.0}) {
      const double exact = weak_norm(f, q).value;
      const double sampled = brute_force_weak_norm(f, q, 200'000);
      CHECK(sampled <= exact * (1.0 + 1e-12));
      CHECK(sampled >= exact * 0.99);
    }
  }
}

TEST_CASE("identity quotient on l2^d reaches sqrt(d)") {
  for (std::size_t d : {1u, 2u, 4u, 9u, 16u, 25u, 32u}) {
    const auto report = pietsch_check(d);
    CHECK_MESSAGE(report.pass, report.record.dump());
    CHECK(report.record["best"]["quotient"].get<double>() ==
          doctest::Approx(std::sqrt(double(d))).epsilon(1e-12));
  }
}

TEST_CASE("basis quotient grows like n^(1/q) for q > 2") {
  const std::vector<std::size_t> grid = {2, 4, 8, 16, 32};
  for (double q : {2.5, 3.0, 4.0}) {
    const auto report = konig_growth_check(q, grid);
    CHECK_MESSAGE(report.pass, report.record.dump());
  }
}

TEST_CASE("exact identity quotients stay under the summing cap") {
  for (double p : {0.5, 1.0, 2.0, 4.0}) {
    for (std::size_t d : {2u, 4u, 9u, 16u}) {
      const auto report = summing_cap_check(p, d);
      CHECK_MESSAGE(report.pass, report.record.dump());
    }
  }
}
