#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "summlab/maps.hpp"
#include "summlab/weak_norms.hpp"

namespace summlab {

/// One measured ratio (Σ‖T(x..)‖^p)^{1/p} / Π‖(x^(i))‖_{w,q}.
struct QuotientSample {
  std::size_t n = 0;
  double quotient = 0.0;
  /// Some denominator came from a search, so it may be underestimated and the
  /// quotient overestimated.
  bool conservative = false;
  /// Strategy, seed and weak-norm paths that produced the value.
  nlohmann::json provenance;
};

void to_json(nlohmann::json& j, const QuotientSample& s);

struct LabBudget {
  SearchBudget search;
  PowerSumOptions sums;
  /// Random starting families tried by the random-ascent strategy.
  std::size_t random_trials = 4;
  /// Perturbation steps per random starting family.
  std::size_t ascent_steps = 60;
};

QuotientSample summing_quotient(const MultilinearMap& map, std::span<const VectorFamily> families,
                                double p, double q, const LabBudget& budget = {});

/// Denominator is ‖(x_k)‖_{w,q}^m.
QuotientSample polynomial_quotient(const HomogeneousPolynomial& poly, const VectorFamily& family,
                                   double p, double q, const LabBudget& budget = {});

enum class FamilyStrategy { Basis, WitnessAnchors, RandomAscent };
const char* to_string(FamilyStrategy s);
FamilyStrategy family_strategy_from_string(const std::string& s);

/// What maximize_quotient measures: a map plus the anchors of the witness it
/// came from, if any.
struct QuotientTarget {
  std::variant<MultilinearMap, HomogeneousPolynomial> map;
  std::optional<VectorFamily> anchors;
};

struct QuotientSearch {
  QuotientSample best;
  /// Best among samples whose denominators were all exact.
  std::optional<QuotientSample> best_exact;
  std::size_t evaluated = 0;
  /// Every sample evaluated, in evaluation order.
  std::vector<QuotientSample> history;
};

/// Largest quotient over families of length n produced by the strategies, run
/// in the order given; ties keep the earlier sample.
QuotientSearch maximize_quotient(const QuotientTarget& target, std::size_t n, double p, double q,
                                 std::span<const FamilyStrategy> strategies,
                                 const LabBudget& budget = {});

struct IndexEstimate {
  double slope;
  double intercept;
  /// Largest absolute deviation of log(quotient) from the fitted line.
  double residual;
  std::vector<std::size_t> grid;
};

void to_json(nlohmann::json& j, const IndexEstimate& e);

/// Least-squares fit of log(quotient) against log(n).
IndexEstimate estimate_index(std::span<const QuotientSample> samples);

// ---------------------------------------------------------------------------
// Closed-form bounds on the index of summability

double upper_bound_mult(std::size_t m, double p, double q);
/// Requires p < q/m.
double upper_bound_pol(std::size_t m, double p, double q);

struct BranchValue {
  char branch;  // 'a' .. 'd'
  double value;
};

/// Lower bound for polynomials into a space of cotype r (r = ∞ allowed).
/// Returns the first applicable branch.
double lower_bound_pol_cotype(std::size_t m, double p, double q, Exponent r);
std::vector<BranchValue> lower_bound_pol_cotype_branches(std::size_t m, double p, double q,
                                                         Exponent r);

/// Lower bound for real-valued polynomials of even degree.
double lower_bound_pol_real_even(std::size_t m, double p, double q);
std::vector<BranchValue> lower_bound_pol_real_even_branches(std::size_t m, double p, double q);

/// The value each branch formula takes, regardless of its range.
double cotype_branch_formula(char branch, std::size_t m, double p, double q, Exponent r);
double real_even_branch_formula(char branch, std::size_t m, double p, double q);

enum class ExactCase {
  HilbertToSupMultilinear,  // ℓ₂ -> c₀, (2,2), m-linear: m/2
  L1ToL2Polynomial,         // ℓ₁ -> ℓ₂, (p,1), m-homogeneous: 1/p - (m+1)/2
  SupToCotypeLinear,        // C(K) -> F of cotype r, (p,2), linear: 1/p - 1/r
};

struct ExactIndex {
  double value;
  double lo;
  double hi;
  bool lo_inclusive;
  bool hi_inclusive;
};

ExactIndex exact_index(ExactCase c, std::size_t m, double p, double r = 2.0);
const char* to_string(ExactCase c);

/// eta_known + 1/p_target - 1/p_known, valid for 0 < p_target < p_known.
double index_shift(double p_target, double p_known, double eta_known);

/// (2d + s(d-2)) / (2sd) for 1 ≤ d ≤ s ≤ 2.
double lemar_exponent(double s, double d);

/// 1/q for q > 2; the accompanying constant is konig_constant().
double konig_exponent(double q);
double konig_constant();

/// One line of a bound table; `value` is empty when the bound does not apply.
struct BoundLine {
  std::string kind;
  std::string branch;
  std::string range;
  std::size_t m;
  double p;
  double q;
  std::optional<double> r;
  std::optional<double> value;
};

std::vector<BoundLine> bound_table(std::size_t m, double p, double q,
                                   std::optional<double> r = std::nullopt);
/// "kind,m,p,q,r,branch,value" rows for the applicable lines.
std::string bound_table_csv(std::span<const BoundLine> lines, bool header = true);
std::string format_bound_table(std::span<const BoundLine> lines);

}  // namespace summlab
