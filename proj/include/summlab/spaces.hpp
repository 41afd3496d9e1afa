#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace summlab {

/// An exponent in [1, ∞] (or, for power sums, any positive value) with ∞
/// carried as a flag rather than as a large float.
class Exponent {
 public:
  constexpr Exponent(double value)  // NOLINT: implicit by intent
      : value_(value), infinite_(value == std::numeric_limits<double>::infinity()) {}

  static constexpr Exponent infinity() { return Exponent(Tag{}); }

  constexpr bool is_infinite() const { return infinite_; }
  /// The finite value, or +inf when infinite.
  constexpr double value() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }
  /// 1/p, with 1/∞ = 0.
  constexpr double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }

  friend constexpr bool operator==(Exponent a, Exponent b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

  std::string to_string() const;

 private:
  struct Tag {};
  constexpr explicit Exponent(Tag) : value_(0.0), infinite_(true) {}

  double value_;
  bool infinite_;
};

enum class SpaceFamily {
  SequenceLp,  // ℓ_p^d
  SupSlice,    // finite ℓ∞ section standing in for c₀ and C(K)
};

/// A finite-dimensional real normed space. Immutable.
class SpaceDescriptor {
 public:
  static SpaceDescriptor lp(Exponent p, std::size_t dim);
  static SpaceDescriptor sup(std::size_t dim);

  SpaceFamily family() const { return family_; }
  /// The norm exponent; ∞ for SupSlice.
  Exponent exponent() const { return family_ == SpaceFamily::SupSlice ? Exponent::infinity() : p_; }
  std::size_t dimension() const { return dim_; }
  /// Tabulated cotype: max(2, p) for ℓ_p with p < ∞, otherwise ∞.
  Exponent cotype() const;

  bool is_hilbert() const;
  bool is_l1() const;
  bool is_sup_normed() const { return exponent().is_infinite(); }

  SpaceDescriptor with_dimension(std::size_t dim) const;
  std::string to_string() const;

  friend bool operator==(const SpaceDescriptor& a, const SpaceDescriptor& b);

 private:
  SpaceDescriptor(SpaceFamily family, Exponent p, std::size_t dim)
      : family_(family), p_(p), dim_(dim) {}

  SpaceFamily family_;
  Exponent p_;
  std::size_t dim_;
};

/// ℓ_{p*} of the same dimension; the dual of a SupSlice is ℓ₁.
SpaceDescriptor dual_space(const SpaceDescriptor& space);

class Vector {
 public:
  Vector(SpaceDescriptor space, std::vector<double> coords);
  static Vector zero(const SpaceDescriptor& space);
  static Vector basis(const SpaceDescriptor& space, std::size_t index);

  const SpaceDescriptor& space() const { return space_; }
  std::span<const double> coords() const { return coords_; }
  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

  Vector scaled(double factor) const;

 private:
  SpaceDescriptor space_;
  std::vector<double> coords_;
};

/// An element of the dual of `space()`, acting by the coordinate pairing.
class Functional {
 public:
  Functional(SpaceDescriptor space, std::vector<double> coords);

  const SpaceDescriptor& space() const { return space_; }
  std::span<const double> coords() const { return coords_; }
  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

  double operator()(const Vector& v) const;

 private:
  SpaceDescriptor space_;
  std::vector<double> coords_;
};

/// Raw ℓ_p norm of a coordinate array (p ≥ 1 or ∞). Computed on the
/// max-scaled coordinates, so scaling by a power of two is exact.
double lp_norm(std::span<const double> coords, Exponent p);

double norm(const SpaceDescriptor& space, const Vector& v);
inline double norm(const Vector& v) { return norm(v.space(), v); }
double dual_norm(const Functional& phi);

/// Conjugate exponent: 1/p + 1/p* = 1.
Exponent dual_exponent(Exponent p);

/// Unit dual functional attaining ‖v‖ at v. Ties in the sup case go to the
/// lowest index.
Functional norming_functional(const SpaceDescriptor& space, const Vector& v);

/// Norming coordinates of c regarded as an element of ℓ_p: the maximizer of
/// ⟨c, ·⟩ over the unit ball of ℓ_{p*}. Zero input gives the zero array.
std::vector<double> norming_coords(std::span<const double> c, Exponent p);

void to_json(nlohmann::json& j, const SpaceDescriptor& space);
/// Reads {"family": "lp"|"sup", "p": number|"inf", "dim": int}. If `dim` is
/// absent, `default_dim` is used (0 means required).
SpaceDescriptor space_from_json(const nlohmann::json& j, std::size_t default_dim = 0);

}  // namespace summlab
