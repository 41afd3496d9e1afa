#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "json.hpp"
#include "summlab/spaces.hpp"
#include "summlab/weak_norms.hpp"

namespace summlab {

/// Row-major float64 array; the last axis is the output axis for maps.
struct DenseTensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  DenseTensor(std::vector<std::size_t> shape, std::vector<double> data);
  static DenseTensor zeros(std::vector<std::size_t> shape);
  std::size_t size() const { return data.size(); }
};

void to_json(nlohmann::json& j, const DenseTensor& t);
DenseTensor tensor_from_json(const nlohmann::json& j);
/// Binary container: "SLTN", u32 rank, u64 shape[rank], f64 payload; all
/// little-endian.
void save_tensor_binary(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor load_tensor_binary(const std::filesystem::path& path);

/// T(x^(1), ..., x^(m)) = (x^(1)_{j1} ⋯ x^(m)_{jm}) over all multi-indices,
/// landing in an n^m-dimensional sup-normed slice.
struct DiagonalC0 {
  std::size_t n;
};

class MultilinearMap {
 public:
  using Body = std::variant<DenseTensor, DiagonalC0>;

  /// Tensor shape must be (d_1, ..., d_m, d_out).
  static MultilinearMap dense(std::vector<SpaceDescriptor> domain, SpaceDescriptor codomain,
                              DenseTensor tensor);
  /// Every domain space must be n-dimensional and ℓ_p or sup-normed; on any
  /// of these the map has norm exactly 1.
  static MultilinearMap diagonal_c0(std::vector<SpaceDescriptor> domain);

  std::size_t arity() const { return domain_.size(); }
  const std::vector<SpaceDescriptor>& domain() const { return domain_; }
  const SpaceDescriptor& codomain() const { return codomain_; }
  const Body& body() const { return body_; }

  /// ‖T‖ when it is known in closed form.
  std::optional<double> closed_form_norm() const;
  std::string describe() const;

 private:
  MultilinearMap(std::vector<SpaceDescriptor> domain, SpaceDescriptor codomain, Body body)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), body_(std::move(body)) {}

  std::vector<SpaceDescriptor> domain_;
  SpaceDescriptor codomain_;
  Body body_;
};

/// Symmetric coefficient tensor of shape (d, ..., d, d_out).
struct DenseSymmetric {
  DenseTensor tensor;
};

/// P(x) = Σ_j |a_j|^{1/p} x_j*(x)^m y_j.
struct CotypeWitness {
  std::vector<double> a;
  std::vector<Functional> functionals;
  std::vector<Vector> targets;
  double p;
};

/// P(x) = Σ_j |a_j|^{1/p} x_j*(x)^m, scalar valued, m even.
struct RealEvenWitness {
  std::vector<double> a;
  std::vector<Functional> functionals;
  double p;
};

class HomogeneousPolynomial {
 public:
  using Body = std::variant<DenseSymmetric, CotypeWitness, RealEvenWitness>;

  static HomogeneousPolynomial dense_symmetric(std::size_t degree, SpaceDescriptor domain,
                                               SpaceDescriptor codomain, DenseTensor tensor);
  /// Checks Σ|a_j|^{r/p} = 1 (r = codomain cotype) to 1e-12.
  static HomogeneousPolynomial cotype_witness(std::size_t degree, SpaceDescriptor domain,
                                              SpaceDescriptor codomain, CotypeWitness body);
  /// Checks m even, scalar codomain and Σ|a_j|^{1/p} = 1 to 1e-12.
  static HomogeneousPolynomial real_even_witness(std::size_t degree, SpaceDescriptor domain,
                                                 RealEvenWitness body);

  std::size_t degree() const { return degree_; }
  const SpaceDescriptor& domain() const { return domain_; }
  const SpaceDescriptor& codomain() const { return codomain_; }
  const Body& body() const { return body_; }
  std::string describe() const;

 private:
  HomogeneousPolynomial(std::size_t degree, SpaceDescriptor domain, SpaceDescriptor codomain,
                        Body body)
      : degree_(degree),
        domain_(std::move(domain)),
        codomain_(std::move(codomain)),
        body_(std::move(body)) {}

  std::size_t degree_;
  SpaceDescriptor domain_;
  SpaceDescriptor codomain_;
  Body body_;
};

Vector eval_multilinear(const MultilinearMap& map, std::span<const Vector> args);
Vector eval_polynomial(const HomogeneousPolynomial& poly, const Vector& x);

struct PowerSumOptions {
  std::uint64_t tuple_budget = 100'000'000;
  unsigned threads = 1;
};

/// (Σ_{k_1..k_m} ‖T(x^(1)_{k_1}, ..., x^(m)_{k_m})‖^p)^{1/p} over all n^m
/// tuples. Partial sums are formed per leading index and combined in index
/// order with compensation, so the result does not depend on `threads`.
double mixed_power_sum(const MultilinearMap& map, std::span<const VectorFamily> families,
                       double p, const PowerSumOptions& options = {});

/// (Σ_k ‖P(x_k)‖^p)^{1/p}.
double poly_power_sum(const HomogeneousPolynomial& poly, const VectorFamily& family, double p,
                      const PowerSumOptions& options = {});

struct NormEstimate {
  double value;
  /// Unit arguments attaining `value` (one per slot; one for polynomials).
  std::vector<Vector> certificate;
  /// True for closed forms; search results are lower bounds.
  bool exact;
};

NormEstimate operator_norm(const MultilinearMap& map, const SearchBudget& budget = {});
NormEstimate operator_norm(const HomogeneousPolynomial& poly, const SearchBudget& budget = {});

/// Dense tensor of the identity on `space` (m = 1).
DenseTensor identity_tensor(std::size_t dim);

}  // namespace summlab
