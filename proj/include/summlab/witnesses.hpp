#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "summlab/maps.hpp"
#include "summlab/spaces.hpp"
#include "summlab/weak_norms.hpp"

namespace summlab {

/// Coefficients a_1, ..., a_n with one of two normalizations:
/// SumRP: Σ|a_j|^{r/p} = 1, SumInvP: Σ|a_j|^{1/p} = 1.
struct WitnessCoefficients {
  enum class Constraint { SumRP, SumInvP };

  std::vector<double> a;
  Constraint constraint;
  double p;
  double r;  // only meaningful for SumRP

  /// a_j = n^{-p/r}.
  static WitnessCoefficients equal_sum_rp(std::size_t n, double r, double p);
  /// a_j = n^{-p}.
  static WitnessCoefficients equal_sum_inv_p(std::size_t n, double p);

  double constraint_sum() const;
  /// Throws DomainError unless the constraint holds to 1e-12.
  void verify() const;
};

/// A polynomial together with the vectors it was built around and the
/// coefficients used.
struct AnchoredPolynomial {
  HomogeneousPolynomial polynomial;
  VectorFamily anchors;
  WitnessCoefficients coefficients;
};

/// The diagonal map into an n^m-dimensional sup slice, on ℓ₂^n.
MultilinearMap tensor_witness(std::size_t m, std::size_t n,
                              std::uint64_t tuple_budget = 100'000'000);
/// Same map with every slot acting on `space` (its dimension is n).
MultilinearMap tensor_witness(std::size_t m, const SpaceDescriptor& space,
                              std::uint64_t tuple_budget = 100'000'000);

/// P(x) = Σ_j a_j^{1/p} x_j*(x)^m e_j into ℓ_r^n with a_j = n^{-p/r}, where
/// x_j* norms the anchor x_j. Anchors default to the basis of `space_in`
/// (repeating cyclically when n exceeds its dimension). Requires 2 ≤ r < ∞
/// and p < r.
AnchoredPolynomial cotype_witness(std::size_t m, double p, const SpaceDescriptor& space_in,
                                  double target_r, std::size_t n,
                                  std::optional<VectorFamily> anchors = std::nullopt);

/// P(x) = Σ_j a_j^{1/p} x_j*(x)^m, scalar, with a_j = n^{-p}; m even, 0 < p < 1.
AnchoredPolynomial real_even_witness(std::size_t m, double p, const SpaceDescriptor& space_in,
                                     std::size_t n,
                                     std::optional<VectorFamily> anchors = std::nullopt);

MultilinearMap identity_witness(const SpaceDescriptor& space);

/// JSON description of a witness family indexed by n:
/// {"kind": "tensor"|"cotype"|"real_even"|"identity", "m", "p", "r",
///  "n", "space": {...}, "anchors": "basis" | {"custom": [[...], ...]}}.
/// The space's "dim" may be omitted, in which case it follows n.
struct WitnessSpec {
  std::string kind;
  std::size_t m = 1;
  double p = 1.0;
  double r = 2.0;
  std::size_t n = 1;
  nlohmann::json space;  // null means ℓ₂ with dimension n
  std::optional<std::vector<std::vector<double>>> custom_anchors;

  SpaceDescriptor space_for(std::size_t n) const;
  bool is_polynomial() const { return kind == "cotype" || kind == "real_even"; }
};

WitnessSpec witness_spec_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const WitnessSpec& spec);

/// A map ready to be measured, plus anchors when the witness has them.
struct BuiltWitness {
  std::variant<MultilinearMap, HomogeneousPolynomial> map;
  std::optional<VectorFamily> anchors;
  /// ‖map‖ when known in closed form (≤ 1 bound for polynomial witnesses is
  /// not an equality and is not reported here).
  std::optional<double> norm;
};

BuiltWitness build_witness(const WitnessSpec& spec, std::size_t n,
                           std::uint64_t tuple_budget = 100'000'000);

}  // namespace summlab
