#include "summlab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "summlab/errors.hpp"

namespace summlab {

namespace {

void require_valid_norm_exponent(Exponent p) {
  if (!p.is_infinite() && !(p.value() >= 1.0)) {
    throw DomainError("norm exponent must be >= 1 or infinity, got " + p.to_string());
  }
}

void require_finite(std::span<const double> coords, const char* what) {
  for (double c : coords) {
    if (!std::isfinite(c)) throw DomainError(std::string(what) + " has a non-finite entry");
  }
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::string Exponent::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os << value_;
  return os.str();
}

SpaceDescriptor SpaceDescriptor::lp(Exponent p, std::size_t dim) {
  require_valid_norm_exponent(p);
  if (dim == 0) throw StructuralError("space dimension must be >= 1");
  return SpaceDescriptor(SpaceFamily::SequenceLp, p, dim);
}

SpaceDescriptor SpaceDescriptor::sup(std::size_t dim) {
  if (dim == 0) throw StructuralError("space dimension must be >= 1");
  return SpaceDescriptor(SpaceFamily::SupSlice, Exponent::infinity(), dim);
}

Exponent SpaceDescriptor::cotype() const {
  const Exponent p = exponent();
  if (p.is_infinite()) return Exponent::infinity();
  return std::max(2.0, p.value());
}

bool SpaceDescriptor::is_hilbert() const {
  return family_ == SpaceFamily::SequenceLp && !p_.is_infinite() && p_.value() == 2.0;
}

bool SpaceDescriptor::is_l1() const {
  return family_ == SpaceFamily::SequenceLp && !p_.is_infinite() && p_.value() == 1.0;
}

SpaceDescriptor SpaceDescriptor::with_dimension(std::size_t dim) const {
  if (dim == 0) throw StructuralError("space dimension must be >= 1");
  return SpaceDescriptor(family_, p_, dim);
}

std::string SpaceDescriptor::to_string() const {
  std::ostringstream os;
  if (family_ == SpaceFamily::SupSlice) {
    os << "sup^" << dim_;
  } else {
    os << "l" << p_.to_string() << "^" << dim_;
  }
  return os.str();
}

bool operator==(const SpaceDescriptor& a, const SpaceDescriptor& b) {
  return a.family_ == b.family_ && a.dim_ == b.dim_ && a.exponent() == b.exponent();
}

SpaceDescriptor dual_space(const SpaceDescriptor& space) {
  return SpaceDescriptor::lp(dual_exponent(space.exponent()), space.dimension());
}

Vector::Vector(SpaceDescriptor space, std::vector<double> coords)
    : space_(std::move(space)), coords_(std::move(coords)) {
  if (coords_.size() != space_.dimension()) {
    throw StructuralError("vector has " + std::to_string(coords_.size()) +
                          " coordinates but space " + space_.to_string() + " needs " +
                          std::to_string(space_.dimension()));
  }
  require_finite(coords_, "vector");
}

Vector Vector::zero(const SpaceDescriptor& space) {
  return Vector(space, std::vector<double>(space.dimension(), 0.0));
}

Vector Vector::basis(const SpaceDescriptor& space, std::size_t index) {
  if (index >= space.dimension()) {
    throw StructuralError("basis index " + std::to_string(index) + " out of range for " +
                          space.to_string());
  }
  std::vector<double> c(space.dimension(), 0.0);
  c[index] = 1.0;
  return Vector(space, std::move(c));
}

Vector Vector::scaled(double factor) const {
  std::vector<double> c(coords_);
  for (double& x : c) x *= factor;
  return Vector(space_, std::move(c));
}

Functional::Functional(SpaceDescriptor space, std::vector<double> coords)
    : space_(std::move(space)), coords_(std::move(coords)) {
  if (coords_.size() != space_.dimension()) {
    throw StructuralError("functional has " + std::to_string(coords_.size()) +
                          " coordinates but space " + space_.to_string() + " needs " +
                          std::to_string(space_.dimension()));
  }
  require_finite(coords_, "functional");
}

double Functional::operator()(const Vector& v) const {
  if (v.size() != coords_.size()) {
    throw StructuralError("functional and vector dimensions differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < coords_.size(); ++i) s += coords_[i] * v[i];
  return s;
}

double lp_norm(std::span<const double> coords, Exponent p) {
  require_valid_norm_exponent(p);
  double peak = 0.0;
  for (double c : coords) peak = std::max(peak, std::abs(c));
  if (p.is_infinite() || peak == 0.0) return peak;
  const double pv = p.value();
  double s = 0.0;
  if (pv == 1.0) {
    for (double c : coords) s += std::abs(c);
    return s;
  }
  if (pv == 2.0) {
    for (double c : coords) {
      const double t = c / peak;
      s += t * t;
    }
    return peak * std::sqrt(s);
  }
  for (double c : coords) s += std::pow(std::abs(c) / peak, pv);
  return peak * std::pow(s, 1.0 / pv);
}

double norm(const SpaceDescriptor& space, const Vector& v) {
  if (v.size() != space.dimension()) {
    throw StructuralError("vector of dimension " + std::to_string(v.size()) +
                          " measured in " + space.to_string());
  }
  return lp_norm(v.coords(), space.exponent());
}

double dual_norm(const Functional& phi) {
  return lp_norm(phi.coords(), dual_exponent(phi.space().exponent()));
}

Exponent dual_exponent(Exponent p) {
  if (p.is_infinite()) return 1.0;
  if (!(p.value() >= 1.0)) {
    throw DomainError("conjugate exponent undefined for p = " + p.to_string());
  }
  if (p.value() == 1.0) return Exponent::infinity();
  if (p.value() == 2.0) return 2.0;
  return p.value() / (p.value() - 1.0);
}

std::vector<double> norming_coords(std::span<const double> c, Exponent p) {
  require_valid_norm_exponent(p);
  std::vector<double> phi(c.size(), 0.0);
  const double size = lp_norm(c, p);
  if (size == 0.0) return phi;
  if (p.is_infinite()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (std::abs(c[i]) > std::abs(c[best])) best = i;
    }
    phi[best] = sign_of(c[best]);
    return phi;
  }
  const double pv = p.value();
  if (pv == 1.0) {
    for (std::size_t i = 0; i < c.size(); ++i) phi[i] = sign_of(c[i]);
  } else if (pv == 2.0) {
    for (std::size_t i = 0; i < c.size(); ++i) phi[i] = c[i] / size;
  } else {
    for (std::size_t i = 0; i < c.size(); ++i) {
      phi[i] = sign_of(c[i]) * std::pow(std::abs(c[i]) / size, pv - 1.0);
    }
  }
  return phi;
}

Functional norming_functional(const SpaceDescriptor& space, const Vector& v) {
  if (v.size() != space.dimension()) {
    throw StructuralError("vector does not belong to " + space.to_string());
  }
  if (norm(space, v) == 0.0) {
    throw DegenerateInputError("the zero vector has no norming functional");
  }
  return Functional(space, norming_coords(v.coords(), space.exponent()));
}

void to_json(nlohmann::json& j, const SpaceDescriptor& space) {
  const Exponent p = space.exponent();
  j = nlohmann::json::object();
  j["family"] = space.family() == SpaceFamily::SupSlice ? "sup" : "lp";
  if (p.is_infinite()) {
    j["p"] = "inf";
  } else {
    j["p"] = p.value();
  }
  j["dim"] = space.dimension();
}

SpaceDescriptor space_from_json(const nlohmann::json& j, std::size_t default_dim) {
  if (!j.is_object()) throw SchemaError("space must be a JSON object");
  if (!j.contains("family") || !j["family"].is_string()) {
    throw SchemaError("space.family must be \"lp\" or \"sup\"");
  }
  std::size_t dim = default_dim;
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
      throw SchemaError("space.dim must be a positive integer");
    }
    dim = j["dim"].get<std::size_t>();
  }
  if (dim == 0) throw SchemaError("space.dim is required");

  const std::string family = j["family"].get<std::string>();
  if (family == "sup") return SpaceDescriptor::sup(dim);
  if (family != "lp") throw SchemaError("unknown space family \"" + family + "\"");
  if (!j.contains("p")) throw SchemaError("space.p is required for lp spaces");
  const auto& pj = j["p"];
  Exponent p = 1.0;
  if (pj.is_string() && pj.get<std::string>() == "inf") {
    p = Exponent::infinity();
  } else if (pj.is_number()) {
    p = pj.get<double>();
  } else {
    throw SchemaError("space.p must be a number or \"inf\"");
  }
  try {
    return SpaceDescriptor::lp(p, dim);
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace summlab
