#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "summlab/index_lab.hpp"
#include "summlab/maps.hpp"
#include "summlab/weak_norms.hpp"

namespace summlab {

/// Serial, uncompensated mixed power sum that materializes every output
/// vector from the raw coefficients. At most 10^5 tuples.
double brute_force_mixed_sum(const MultilinearMap& map, std::span<const VectorFamily> families,
                             double p);

/// Largest objective over `resolution` quasi-random points of the dual unit
/// sphere (Halton points pushed through Box-Muller). A lower bound; dimension
/// at most 6 and at most 10^7 samples.
double brute_force_weak_norm(const VectorFamily& family, double q, std::size_t resolution);

/// Outcome of one classical-growth check; `record` is the JSON report.
struct CheckReport {
  bool pass;
  nlohmann::json record;
};

/// Identity on ℓ₂^d at p = q = 2 with n = d: the best quotient must be √d.
CheckReport pietsch_check(std::size_t d, const LabBudget& budget = {});

/// Identity on ℓ₂^n with the basis family at (q, 2): quotient ≥ n^{1/q}/(2e)
/// at every n and, given at least three n, slope 1/q ± 0.01.
CheckReport konig_growth_check(double q, std::span<const std::size_t> n_grid,
                               const LabBudget& budget = {});

/// Identity on a d-dimensional space at (p, p) with n = d: every exact-path
/// quotient must stay below d^{max(1/p, 1/2)}. The space is ℓ₂^d for p = 2
/// and ℓ₁^d otherwise, where the weak norms are exact.
CheckReport summing_cap_check(double p, std::size_t d, const LabBudget& budget = {});

}  // namespace summlab
