#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "summlab/spaces.hpp"

namespace summlab {

/// An ordered, nonempty list x_1, ..., x_n of vectors in one space.
class VectorFamily {
 public:
  VectorFamily(SpaceDescriptor space, std::vector<Vector> vectors);
  static VectorFamily from_rows(const SpaceDescriptor& space,
                                std::vector<std::vector<double>> rows);
  /// e_1, ..., e_n; when n exceeds the dimension the basis repeats cyclically.
  static VectorFamily basis(const SpaceDescriptor& space, std::size_t n);

  const SpaceDescriptor& space() const { return space_; }
  std::size_t size() const { return vectors_.size(); }
  const Vector& operator[](std::size_t k) const { return vectors_[k]; }
  const std::vector<Vector>& vectors() const { return vectors_; }
  auto begin() const { return vectors_.begin(); }
  auto end() const { return vectors_.end(); }

  VectorFamily scaled(double factor) const;
  VectorFamily permuted(std::span<const std::size_t> order) const;
  VectorFamily with_vector(std::size_t k, Vector v) const;
  bool is_zero() const;

  /// Hash of the multiset of vectors; invariant under reordering.
  std::uint64_t instance_hash() const;

 private:
  SpaceDescriptor space_;
  std::vector<Vector> vectors_;
};

/// Work limits for every search-based supremum in the library.
struct SearchBudget {
  std::size_t restarts = 64;
  std::size_t max_iterations = 500;
  double relative_tolerance = 1e-10;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  /// Skip closed-form weak-norm paths (used to cross-check the search).
  bool force_search = false;
};

enum class WeakNormPath {
  SingleVector,           // n = 1: the norm itself
  HilbertSvd,             // ℓ₂, q = 2: top singular value
  SignCoherent,           // ℓ₁, one sign pattern dominates every vector
  CubeVertices,           // ℓ₁, q ≥ 1, d ≤ 20: enumerate sign vectors
  CrossPolytopeVertices,  // sup-normed, q ≥ 1: enumerate ±e_i
  Search,                 // multistart projected ascent, lower bound only
};

const char* to_string(WeakNormPath path);

struct WeakNormResult {
  double value;
  Functional certificate;
  bool exact;
  WeakNormPath path;
};

/// (Σ_k |φ(x_k)|^q)^{1/q} for the dual coordinates φ.
double weak_objective(const VectorFamily& family, std::span<const double> phi, double q);

/// ‖(x_k)‖_{w,q} = sup over the dual unit ball of the objective above. Exact
/// on the closed-form paths; otherwise the best value found by search, which
/// is a certified lower bound (exact = false).
WeakNormResult weak_norm(const VectorFamily& family, double q, const SearchBudget& budget = {});

/// Exhaustive maximum over all 2^d sign vectors for a family in ℓ₁^d.
/// Deliberately naive; used as an oracle in tests.
double weak_norm_vertex_oracle(const VectorFamily& family, double q);

}  // namespace summlab
