#include "summlab/witnesses.hpp"

#include <cmath>
#include <limits>

#include "summlab/errors.hpp"

namespace summlab {

WitnessCoefficients WitnessCoefficients::equal_sum_rp(std::size_t n, double r, double p) {
  if (n == 0) throw DomainError("witness needs n >= 1");
  const double a = std::pow(static_cast<double>(n), -p / r);
  return {std::vector<double>(n, a), Constraint::SumRP, p, r};
}

WitnessCoefficients WitnessCoefficients::equal_sum_inv_p(std::size_t n, double p) {
  if (n == 0) throw DomainError("witness needs n >= 1");
  const double a = std::pow(static_cast<double>(n), -p);
  return {std::vector<double>(n, a), Constraint::SumInvP, p, 1.0};
}

double WitnessCoefficients::constraint_sum() const {
  const double e = constraint == Constraint::SumRP ? r / p : 1.0 / p;
  double s = 0.0;
  for (double x : a) s += std::pow(std::abs(x), e);
  return s;
}

void WitnessCoefficients::verify() const {
  for (double x : a) {
    if (!(x >= 0.0)) throw DomainError("witness coefficients must be nonnegative");
  }
  const double s = constraint_sum();
  if (std::abs(s - 1.0) > 1e-12) {
    throw DomainError("witness coefficients violate their normalization: sum = " +
                      std::to_string(s));
  }
}

MultilinearMap tensor_witness(std::size_t m, std::size_t n, std::uint64_t tuple_budget) {
  return tensor_witness(m, SpaceDescriptor::lp(2.0, n), tuple_budget);
}

MultilinearMap tensor_witness(std::size_t m, const SpaceDescriptor& space,
                              std::uint64_t tuple_budget) {
  if (m == 0) throw DomainError("tensor witness needs m >= 1");
  const std::size_t n = space.dimension();
  std::uint64_t tuples = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (tuples > tuple_budget / n) {
      throw BudgetError("n^m = " + std::to_string(n) + "^" + std::to_string(m) +
                        " exceeds the tuple budget");
    }
    tuples *= n;
  }
  return MultilinearMap::diagonal_c0(std::vector<SpaceDescriptor>(m, space));
}

namespace {

VectorFamily resolve_anchors(const SpaceDescriptor& space, std::size_t n,
                             std::optional<VectorFamily> anchors) {
  if (!anchors) return VectorFamily::basis(space, n);
  if (!(anchors->space() == space)) throw StructuralError("anchors live in the wrong space");
  if (anchors->size() != n) throw StructuralError("expected n anchors");
  for (const Vector& x : *anchors) {
    if (norm(x) == 0.0) throw DegenerateInputError("anchors must be nonzero");
  }
  return std::move(*anchors);
}

std::vector<Functional> norming_all(const VectorFamily& anchors) {
  std::vector<Functional> fs;
  fs.reserve(anchors.size());
  for (const Vector& x : anchors) fs.push_back(norming_functional(anchors.space(), x));
  return fs;
}

double ipow(double x, std::size_t m) {
  double r = 1.0;
  for (std::size_t i = 0; i < m; ++i) r *= x;
  return r;
}

// ‖P(x_k)‖ ≥ a_k^{1/p} ‖x_k‖^m at every anchor.
void check_anchor_inequality(const AnchoredPolynomial& w) {
  const auto& poly = w.polynomial;
  for (std::size_t k = 0; k < w.anchors.size(); ++k) {
    const Vector& x = w.anchors[k];
    const double lhs = norm(eval_polynomial(poly, x));
    const double rhs =
        std::pow(w.coefficients.a[k], 1.0 / w.coefficients.p) * ipow(norm(x), poly.degree());
    if (lhs < rhs - 1e-10) {
      throw DomainError("witness anchor inequality fails at anchor " + std::to_string(k));
    }
  }
}

}  // namespace

AnchoredPolynomial cotype_witness(std::size_t m, double p, const SpaceDescriptor& space_in,
                                  double target_r, std::size_t n,
                                  std::optional<VectorFamily> anchors) {
  if (m == 0) throw DomainError("witness degree must be >= 1");
  if (n == 0) throw DomainError("witness needs n >= 1");
  if (!(target_r >= 2.0) || !std::isfinite(target_r)) {
    throw DomainError("cotype witness needs a finite target exponent r >= 2");
  }
  if (!(p > 0.0) || !(p < target_r)) throw DomainError("cotype witness needs 0 < p < r");

  auto coeffs = WitnessCoefficients::equal_sum_rp(n, target_r, p);
  coeffs.verify();
  VectorFamily xs = resolve_anchors(space_in, n, std::move(anchors));
  const SpaceDescriptor target = SpaceDescriptor::lp(target_r, n);
  std::vector<Vector> ys;
  ys.reserve(n);
  for (std::size_t j = 0; j < n; ++j) ys.push_back(Vector::basis(target, j));

  CotypeWitness body{coeffs.a, norming_all(xs), std::move(ys), p};
  AnchoredPolynomial w{HomogeneousPolynomial::cotype_witness(m, space_in, target, std::move(body)),
                       std::move(xs), std::move(coeffs)};
  check_anchor_inequality(w);
  return w;
}

AnchoredPolynomial real_even_witness(std::size_t m, double p, const SpaceDescriptor& space_in,
                                     std::size_t n, std::optional<VectorFamily> anchors) {
  if (m == 0 || m % 2 != 0) throw DomainError("real even witness needs even degree");
  if (n == 0) throw DomainError("witness needs n >= 1");
  if (!(p > 0.0) || !(p < 1.0)) throw DomainError("real even witness needs 0 < p < 1");

  auto coeffs = WitnessCoefficients::equal_sum_inv_p(n, p);
  coeffs.verify();
  VectorFamily xs = resolve_anchors(space_in, n, std::move(anchors));
  RealEvenWitness body{coeffs.a, norming_all(xs), p};
  AnchoredPolynomial w{HomogeneousPolynomial::real_even_witness(m, space_in, std::move(body)),
                       std::move(xs), std::move(coeffs)};
  check_anchor_inequality(w);
  return w;
}

MultilinearMap identity_witness(const SpaceDescriptor& space) {
  return MultilinearMap::dense({space}, space, identity_tensor(space.dimension()));
}

// ---------------------------------------------------------------------------

SpaceDescriptor WitnessSpec::space_for(std::size_t dim) const {
  if (space.is_null()) return SpaceDescriptor::lp(2.0, dim);
  return space_from_json(space, dim);
}

namespace {

template <class T>
T field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string("witness field \"") + key + "\" has the wrong type");
  }
}

}  // namespace

WitnessSpec witness_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("witness spec must be a JSON object");
  WitnessSpec s;
  s.kind = field<std::string>(j, "kind", "");
  if (s.kind != "tensor" && s.kind != "cotype" && s.kind != "real_even" && s.kind != "identity") {
    throw SchemaError("witness kind must be tensor, cotype, real_even or identity");
  }
  if (j.contains("m") && (!j["m"].is_number_integer() || j["m"].get<long long>() < 1)) {
    throw SchemaError("witness m must be a positive integer");
  }
  if (j.contains("n") && (!j["n"].is_number_integer() || j["n"].get<long long>() < 1)) {
    throw SchemaError("witness n must be a positive integer");
  }
  s.m = field<std::size_t>(j, "m", 1);
  s.n = field<std::size_t>(j, "n", 1);
  s.p = field<double>(j, "p", 1.0);
  s.r = field<double>(j, "r", 2.0);
  if (j.contains("space")) {
    s.space = j["space"];
    space_from_json(s.space, 1);  // validate early
  }
  if (j.contains("anchors")) {
    const auto& a = j["anchors"];
    if (a.is_string()) {
      if (a.get<std::string>() != "basis") throw SchemaError("anchors must be \"basis\" or custom");
    } else if (a.is_object() && a.contains("custom")) {
      s.custom_anchors = field<std::vector<std::vector<double>>>(a, "custom", {});
    } else {
      throw SchemaError("anchors must be \"basis\" or {\"custom\": [[...]]}");
    }
  }
  if (s.kind == "identity" && s.m != 1) throw SchemaError("identity witness has m = 1");
  return s;
}

void to_json(nlohmann::json& j, const WitnessSpec& s) {
  j = nlohmann::json{{"kind", s.kind}, {"m", s.m}, {"n", s.n}};
  if (s.is_polynomial()) j["p"] = s.p;
  if (s.kind == "cotype") j["r"] = s.r;
  if (!s.space.is_null()) j["space"] = s.space;
  if (s.custom_anchors) {
    j["anchors"] = nlohmann::json{{"custom", *s.custom_anchors}};
  } else if (s.is_polynomial()) {
    j["anchors"] = "basis";
  }
}

BuiltWitness build_witness(const WitnessSpec& spec, std::size_t n, std::uint64_t tuple_budget) {
  const SpaceDescriptor space = spec.space_for(n);
  std::optional<VectorFamily> anchors;
  if (spec.custom_anchors) {
    if (spec.custom_anchors->size() != n) {
      throw SchemaError("custom anchors must list exactly n vectors");
    }
    anchors = VectorFamily::from_rows(space, *spec.custom_anchors);
  }
  if (spec.kind == "tensor") {
    return {tensor_witness(spec.m, space, tuple_budget), std::nullopt, 1.0};
  }
  if (spec.kind == "identity") return {identity_witness(space), std::nullopt, 1.0};
  if (spec.kind == "cotype") {
    auto w = cotype_witness(spec.m, spec.p, space, spec.r, n, std::move(anchors));
    return {std::move(w.polynomial), std::move(w.anchors), std::nullopt};
  }
  auto w = real_even_witness(spec.m, spec.p, space, n, std::move(anchors));
  return {std::move(w.polynomial), std::move(w.anchors), std::nullopt};
}

}  // namespace summlab
