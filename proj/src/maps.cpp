#include "summlab/maps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "summlab/errors.hpp"
#include "summlab/parallel.hpp"
#include "summlab/random.hpp"

namespace summlab {

namespace {

std::size_t checked_product(std::span<const std::size_t> dims) {
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw StructuralError("tensor axes must be nonempty");
    if (total > std::numeric_limits<std::size_t>::max() / d) {
      throw BudgetError("tensor size overflows");
    }
    total *= d;
  }
  return total;
}

// out[r] = Σ_j x[j] t[j * rest + r]: contracts the leading axis.
void contract_leading(std::span<const double> t, std::span<const double> x,
                      std::vector<double>& out) {
  const std::size_t lead = x.size();
  const std::size_t rest = t.size() / lead;
  out.assign(rest, 0.0);
  for (std::size_t j = 0; j < lead; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double* row = t.data() + j * rest;
    for (std::size_t r = 0; r < rest; ++r) out[r] += xj * row[r];
  }
}

// out[r] = Σ_j t[r * last + j] x[j]: contracts the trailing axis.
void contract_trailing(std::span<const double> t, std::span<const double> x,
                       std::vector<double>& out) {
  const std::size_t last = x.size();
  const std::size_t rest = t.size() / last;
  out.assign(rest, 0.0);
  for (std::size_t r = 0; r < rest; ++r) {
    const double* row = t.data() + r * last;
    double s = 0.0;
    for (std::size_t j = 0; j < last; ++j) s += row[j] * x[j];
    out[r] = s;
  }
}

double ipow(double x, std::size_t m) {
  double r = 1.0;
  for (std::size_t i = 0; i < m; ++i) r *= x;
  return r;
}

double pow_p(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

double root_p(double s, double p) {
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

void require_power(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("power-sum exponent p must be positive");
}

std::string join_spaces(const std::vector<SpaceDescriptor>& spaces) {
  std::string s;
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    if (i) s += " x ";
    s += spaces[i].to_string();
  }
  return s;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> shape_, std::vector<double> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
  if (shape.empty()) throw StructuralError("tensor needs at least one axis");
  if (checked_product(shape) != data.size()) {
    throw StructuralError("tensor payload size does not match its shape");
  }
  for (double c : data) {
    if (!std::isfinite(c)) throw DomainError("tensor has a non-finite coefficient");
  }
}

DenseTensor DenseTensor::zeros(std::vector<std::size_t> shape) {
  const std::size_t n = checked_product(shape);
  return DenseTensor(std::move(shape), std::vector<double>(n, 0.0));
}

DenseTensor identity_tensor(std::size_t dim) {
  auto t = DenseTensor::zeros({dim, dim});
  for (std::size_t i = 0; i < dim; ++i) t.data[i * dim + i] = 1.0;
  return t;
}

void to_json(nlohmann::json& j, const DenseTensor& t) {
  j = nlohmann::json{{"shape", t.shape}, {"data", t.data}};
}

DenseTensor tensor_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data")) {
    throw SchemaError("tensor must be {\"shape\": [...], \"data\": [...]}");
  }
  try {
    return DenseTensor(j["shape"].get<std::vector<std::size_t>>(),
                       j["data"].get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("bad tensor payload: ") + e.what());
  }
}

namespace {

template <class T>
void write_le(std::ostream& os, T value) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), bytes.size());
}

template <class T>
T read_le(std::istream& is) {
  std::array<char, sizeof(T)> bytes{};
  if (!is.read(bytes.data(), bytes.size())) throw SchemaError("truncated tensor file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

constexpr char kTensorMagic[4] = {'S', 'L', 'T', 'N'};

}  // namespace

void save_tensor_binary(const std::filesystem::path& path, const DenseTensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SchemaError("cannot open " + path.string() + " for writing");
  os.write(kTensorMagic, 4);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.shape.size()));
  for (std::size_t d : t.shape) write_le<std::uint64_t>(os, d);
  for (double c : t.data) write_le<double>(os, c);
}

DenseTensor load_tensor_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SchemaError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kTensorMagic, 4) != 0) {
    throw SchemaError(path.string() + " is not a tensor container");
  }
  const auto rank = read_le<std::uint32_t>(is);
  if (rank == 0 || rank > 16) throw SchemaError("unsupported tensor rank");
  std::vector<std::size_t> shape(rank);
  for (auto& d : shape) d = read_le<std::uint64_t>(is);
  const std::size_t count = checked_product(shape);
  std::vector<double> data(count);
  for (auto& c : data) c = read_le<double>(is);
  return DenseTensor(std::move(shape), std::move(data));
}

// ---------------------------------------------------------------------------
// Multilinear maps

MultilinearMap MultilinearMap::dense(std::vector<SpaceDescriptor> domain, SpaceDescriptor codomain,
                                     DenseTensor tensor) {
  if (domain.empty()) throw StructuralError("a multilinear map needs arity >= 1");
  if (tensor.shape.size() != domain.size() + 1) {
    throw StructuralError("tensor rank must be arity + 1");
  }
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (tensor.shape[i] != domain[i].dimension()) {
      throw StructuralError("tensor axis " + std::to_string(i) + " does not match " +
                            domain[i].to_string());
    }
  }
  if (tensor.shape.back() != codomain.dimension()) {
    throw StructuralError("tensor output axis does not match " + codomain.to_string());
  }
  return MultilinearMap(std::move(domain), std::move(codomain), std::move(tensor));
}

MultilinearMap MultilinearMap::diagonal_c0(std::vector<SpaceDescriptor> domain) {
  if (domain.empty()) throw StructuralError("a multilinear map needs arity >= 1");
  const std::size_t n = domain.front().dimension();
  for (const auto& s : domain) {
    if (s.dimension() != n) throw StructuralError("diagonal witness needs equal dimensions");
  }
  std::vector<std::size_t> dims(domain.size(), n);
  const std::size_t out = checked_product(dims);
  return MultilinearMap(std::move(domain), SpaceDescriptor::sup(out), DiagonalC0{n});
}

std::optional<double> MultilinearMap::closed_form_norm() const {
  if (std::holds_alternative<DiagonalC0>(body_)) return 1.0;
  return std::nullopt;
}

std::string MultilinearMap::describe() const {
  std::ostringstream os;
  if (const auto* d = std::get_if<DiagonalC0>(&body_)) {
    os << "diagonal_c0(m=" << arity() << ", n=" << d->n << ": " << join_spaces(domain_) << " -> "
       << codomain_.to_string() << ")";
  } else {
    os << "dense(" << join_spaces(domain_) << " -> " << codomain_.to_string() << ")";
  }
  return os.str();
}

namespace {

void check_args(const std::vector<SpaceDescriptor>& domain, std::span<const Vector> args) {
  if (args.size() != domain.size()) {
    throw StructuralError("expected " + std::to_string(domain.size()) + " arguments, got " +
                          std::to_string(args.size()));
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!(args[i].space() == domain[i])) {
      throw StructuralError("argument " + std::to_string(i) + " lives in " +
                            args[i].space().to_string() + ", expected " + domain[i].to_string());
    }
  }
}

std::vector<double> eval_coords(const MultilinearMap& map, std::span<const Vector> args) {
  if (const auto* t = std::get_if<DenseTensor>(&map.body())) {
    std::vector<double> cur = t->data;
    std::vector<double> next;
    for (const Vector& x : args) {
      contract_leading(cur, x.coords(), next);
      cur.swap(next);
    }
    return cur;
  }
  std::vector<double> cur{1.0};
  std::vector<double> next;
  for (const Vector& x : args) {
    next.resize(cur.size() * x.size());
    for (std::size_t k = 0; k < cur.size(); ++k) {
      for (std::size_t j = 0; j < x.size(); ++j) next[k * x.size() + j] = cur[k] * x[j];
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace

Vector eval_multilinear(const MultilinearMap& map, std::span<const Vector> args) {
  check_args(map.domain(), args);
  return Vector(map.codomain(), eval_coords(map, args));
}

double mixed_power_sum(const MultilinearMap& map, std::span<const VectorFamily> families,
                       double p, const PowerSumOptions& options) {
  require_power(p);
  const std::size_t m = map.arity();
  if (families.size() != m) {
    throw StructuralError("expected " + std::to_string(m) + " families");
  }
  const std::size_t n = families[0].size();
  for (std::size_t i = 0; i < m; ++i) {
    if (!(families[i].space() == map.domain()[i])) {
      throw StructuralError("family " + std::to_string(i) + " does not match the domain");
    }
    if (families[i].size() != n) throw StructuralError("families must have equal length");
  }
  std::uint64_t tuples = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (tuples > options.tuple_budget / n) {
      throw BudgetError("n^m exceeds the tuple budget of " + std::to_string(options.tuple_budget));
    }
    tuples *= n;
  }
  if (tuples > options.tuple_budget) {
    throw BudgetError("n^m exceeds the tuple budget of " + std::to_string(options.tuple_budget));
  }

  const Exponent out_p = map.codomain().exponent();
  std::vector<double> per_lead(n, 0.0);

  if (std::holds_alternative<DiagonalC0>(map.body())) {
    // Sup norm of an outer product is the product of the factors' sup norms.
    std::vector<std::vector<double>> powered(m, std::vector<double>(n));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        powered[i][k] = pow_p(lp_norm(families[i][k].coords(), Exponent::infinity()), p);
      }
    }
    parallel_for(n, options.threads, [&](std::size_t k1) {
      CompensatedSum acc;
      auto descend = [&](auto&& self, std::size_t slot, double prod) -> void {
        if (slot == m) {
          acc.add(prod);
          return;
        }
        for (std::size_t k = 0; k < n; ++k) self(self, slot + 1, prod * powered[slot][k]);
      };
      descend(descend, 1, powered[0][k1]);
      per_lead[k1] = acc.value();
    });
  } else {
    const auto& tensor = std::get<DenseTensor>(map.body());
    parallel_for(n, options.threads, [&](std::size_t k1) {
      CompensatedSum acc;
      std::vector<std::vector<double>> partial(m + 1);
      contract_leading(tensor.data, families[0][k1].coords(), partial[1]);
      auto descend = [&](auto&& self, std::size_t slot) -> void {
        if (slot == m) {
          acc.add(pow_p(lp_norm(partial[m], out_p), p));
          return;
        }
        for (std::size_t k = 0; k < n; ++k) {
          contract_leading(partial[slot], families[slot][k].coords(), partial[slot + 1]);
          self(self, slot + 1);
        }
      };
      descend(descend, 1);
      per_lead[k1] = acc.value();
    });
  }

  CompensatedSum total;
  for (double s : per_lead) total.add(s);
  return root_p(total.value(), p);
}

// ---------------------------------------------------------------------------
// Homogeneous polynomials

namespace {

std::size_t flat_index(std::span<const std::size_t> idx, std::span<const std::size_t> shape) {
  std::size_t f = 0;
  for (std::size_t a = 0; a < shape.size(); ++a) f = f * shape[a] + idx[a];
  return f;
}

void check_symmetric(const DenseTensor& t, std::size_t degree) {
  double scale = 0.0;
  for (double c : t.data) scale = std::max(scale, std::abs(c));
  const double tol = 1e-12 * std::max(1.0, scale);
  std::vector<std::size_t> idx(t.shape.size());
  for (std::size_t f = 0; f < t.size(); ++f) {
    std::size_t rem = f;
    for (std::size_t a = t.shape.size(); a-- > 0;) {
      idx[a] = rem % t.shape[a];
      rem /= t.shape[a];
    }
    for (std::size_t s = 0; s + 1 < degree; ++s) {
      std::swap(idx[s], idx[s + 1]);
      const std::size_t g = flat_index(idx, t.shape);
      std::swap(idx[s], idx[s + 1]);
      if (std::abs(t.data[f] - t.data[g]) > tol) {
        throw StructuralError("polynomial coefficient tensor is not symmetric");
      }
    }
  }
}

void check_unit_functionals(const std::vector<Functional>& fs, const SpaceDescriptor& domain) {
  for (const Functional& f : fs) {
    if (!(f.space() == domain)) throw StructuralError("functional does not act on the domain");
    if (dual_norm(f) > 1.0 + 1e-12) {
      throw DomainError("witness functionals must lie in the dual unit ball");
    }
  }
}

void check_coefficient_sum(const std::vector<double>& a, double exponent, const char* what) {
  double s = 0.0;
  for (double x : a) s += std::pow(std::abs(x), exponent);
  if (std::abs(s - 1.0) > 1e-12) {
    throw DomainError(std::string(what) + " coefficient normalization fails: sum = " +
                      std::to_string(s));
  }
}

}  // namespace

HomogeneousPolynomial HomogeneousPolynomial::dense_symmetric(std::size_t degree,
                                                             SpaceDescriptor domain,
                                                             SpaceDescriptor codomain,
                                                             DenseTensor tensor) {
  if (degree == 0) throw StructuralError("polynomial degree must be >= 1");
  if (tensor.shape.size() != degree + 1) throw StructuralError("tensor rank must be degree + 1");
  for (std::size_t i = 0; i < degree; ++i) {
    if (tensor.shape[i] != domain.dimension()) {
      throw StructuralError("tensor axis does not match " + domain.to_string());
    }
  }
  if (tensor.shape.back() != codomain.dimension()) {
    throw StructuralError("tensor output axis does not match " + codomain.to_string());
  }
  check_symmetric(tensor, degree);
  return HomogeneousPolynomial(degree, std::move(domain), std::move(codomain),
                               DenseSymmetric{std::move(tensor)});
}

HomogeneousPolynomial HomogeneousPolynomial::cotype_witness(std::size_t degree,
                                                            SpaceDescriptor domain,
                                                            SpaceDescriptor codomain,
                                                            CotypeWitness body) {
  if (degree == 0) throw StructuralError("polynomial degree must be >= 1");
  require_power(body.p);
  const std::size_t n = body.a.size();
  if (n == 0 || body.functionals.size() != n || body.targets.size() != n) {
    throw StructuralError("witness needs equally many coefficients, functionals and targets");
  }
  check_unit_functionals(body.functionals, domain);
  for (const Vector& y : body.targets) {
    if (!(y.space() == codomain)) throw StructuralError("witness target outside the codomain");
  }
  const Exponent r = codomain.cotype();
  if (r.is_infinite()) throw DomainError("cotype witness needs a codomain of finite cotype");
  check_coefficient_sum(body.a, r.value() / body.p, "cotype witness");
  return HomogeneousPolynomial(degree, std::move(domain), std::move(codomain), std::move(body));
}

HomogeneousPolynomial HomogeneousPolynomial::real_even_witness(std::size_t degree,
                                                               SpaceDescriptor domain,
                                                               RealEvenWitness body) {
  if (degree == 0 || degree % 2 != 0) throw DomainError("real even witness needs even degree");
  require_power(body.p);
  const std::size_t n = body.a.size();
  if (n == 0 || body.functionals.size() != n) {
    throw StructuralError("witness needs equally many coefficients and functionals");
  }
  check_unit_functionals(body.functionals, domain);
  check_coefficient_sum(body.a, 1.0 / body.p, "real even witness");
  return HomogeneousPolynomial(degree, std::move(domain), SpaceDescriptor::lp(2.0, 1),
                               std::move(body));
}

std::string HomogeneousPolynomial::describe() const {
  std::ostringstream os;
  if (std::holds_alternative<DenseSymmetric>(body_)) {
    os << "dense_symmetric";
  } else if (const auto* c = std::get_if<CotypeWitness>(&body_)) {
    os << "cotype_witness(n=" << c->a.size() << ", p=" << c->p << ")";
  } else {
    const auto& w = std::get<RealEvenWitness>(body_);
    os << "real_even_witness(n=" << w.a.size() << ", p=" << w.p << ")";
  }
  os << "[m=" << degree_ << ": " << domain_.to_string() << " -> " << codomain_.to_string() << "]";
  return os.str();
}

namespace {

std::vector<double> poly_coords(const HomogeneousPolynomial& poly, std::span<const double> x) {
  const std::size_t m = poly.degree();
  if (const auto* s = std::get_if<DenseSymmetric>(&poly.body())) {
    std::vector<double> cur = s->tensor.data;
    std::vector<double> next;
    for (std::size_t i = 0; i < m; ++i) {
      contract_leading(cur, x, next);
      cur.swap(next);
    }
    return cur;
  }
  auto apply = [&](const Functional& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += f[i] * x[i];
    return s;
  };
  if (const auto* c = std::get_if<CotypeWitness>(&poly.body())) {
    std::vector<double> out(poly.codomain().dimension(), 0.0);
    for (std::size_t j = 0; j < c->a.size(); ++j) {
      const double w = std::pow(std::abs(c->a[j]), 1.0 / c->p) * ipow(apply(c->functionals[j]), m);
      const auto y = c->targets[j].coords();
      for (std::size_t o = 0; o < out.size(); ++o) out[o] += w * y[o];
    }
    return out;
  }
  const auto& e = std::get<RealEvenWitness>(poly.body());
  double s = 0.0;
  for (std::size_t j = 0; j < e.a.size(); ++j) {
    s += std::pow(std::abs(e.a[j]), 1.0 / e.p) * ipow(apply(e.functionals[j]), m);
  }
  return {s};
}

}  // namespace

Vector eval_polynomial(const HomogeneousPolynomial& poly, const Vector& x) {
  if (!(x.space() == poly.domain())) {
    throw StructuralError("argument lives in " + x.space().to_string() + ", expected " +
                          poly.domain().to_string());
  }
  return Vector(poly.codomain(), poly_coords(poly, x.coords()));
}

double poly_power_sum(const HomogeneousPolynomial& poly, const VectorFamily& family, double p,
                      const PowerSumOptions& options) {
  require_power(p);
  if (!(family.space() == poly.domain())) {
    throw StructuralError("family does not match the polynomial's domain");
  }
  if (family.size() > options.tuple_budget) throw BudgetError("family exceeds the tuple budget");
  CompensatedSum acc;
  for (const Vector& x : family) acc.add(pow_p(norm(eval_polynomial(poly, x)), p));
  return root_p(acc.value(), p);
}

// ---------------------------------------------------------------------------
// Operator norms (lower bounds by search, closed forms where known)

namespace {

std::vector<double> random_unit(Rng& rng, std::size_t d, Exponent p) {
  std::vector<double> z(d);
  double nz = 0.0;
  while (nz == 0.0) {
    for (double& c : z) c = rng.normal();
    nz = lp_norm(z, p);
  }
  for (double& c : z) c /= nz;
  return z;
}

struct MultiAscent {
  double value = -1.0;
  std::vector<std::vector<double>> args;
};

// Block-coordinate ascent: with the other slots fixed the map is linear in
// slot i, so moving x_i to the unit-ball maximizer of the gradient of
// ⟨ψ, T(x)⟩ never lowers ‖T(x)‖.
MultiAscent ascend_multilinear(const MultilinearMap& map, const DenseTensor& t,
                               std::vector<std::vector<double>> xs, const SearchBudget& budget) {
  const std::size_t m = map.arity();
  const Exponent out_p = map.codomain().exponent();
  auto value_at = [&](const std::vector<std::vector<double>>& args) {
    std::vector<double> cur = t.data;
    std::vector<double> next;
    for (const auto& x : args) {
      contract_leading(cur, x, next);
      cur.swap(next);
    }
    return std::pair{lp_norm(cur, out_p), cur};
  };
  auto [f, y] = value_at(xs);
  std::vector<double> g;
  std::vector<double> tmp;
  for (std::size_t it = 0; it < budget.max_iterations; ++it) {
    const double before = f;
    for (std::size_t i = 0; i < m; ++i) {
      const std::vector<double> psi = norming_coords(y, out_p);
      contract_trailing(t.data, psi, g);
      for (std::size_t l = m; l-- > i + 1;) {
        contract_trailing(g, xs[l], tmp);
        g.swap(tmp);
      }
      for (std::size_t l = 0; l < i; ++l) {
        contract_leading(g, xs[l], tmp);
        g.swap(tmp);
      }
      auto cand = norming_coords(g, dual_exponent(map.domain()[i].exponent()));
      if (std::all_of(cand.begin(), cand.end(), [](double c) { return c == 0.0; })) continue;
      auto trial = xs;
      trial[i] = std::move(cand);
      auto [f_new, y_new] = value_at(trial);
      if (f_new > f) {
        xs = std::move(trial);
        f = f_new;
        y = std::move(y_new);
      }
    }
    if (f <= before || (f - before) / f < budget.relative_tolerance) break;
  }
  return {f, std::move(xs)};
}

struct PolyAscent {
  double value = -1.0;
  std::vector<double> x;
};

std::vector<double> poly_gradient(const HomogeneousPolynomial& poly, std::span<const double> x,
                                  std::span<const double> psi) {
  const std::size_t m = poly.degree();
  const std::size_t d = x.size();
  std::vector<double> g(d, 0.0);
  auto apply = [&](const Functional& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += f[i] * x[i];
    return s;
  };
  if (const auto* s = std::get_if<DenseSymmetric>(&poly.body())) {
    std::vector<double> tmp;
    contract_trailing(s->tensor.data, psi, g);
    for (std::size_t l = 1; l < m; ++l) {
      contract_trailing(g, x, tmp);
      g.swap(tmp);
    }
    return g;
  }
  if (const auto* c = std::get_if<CotypeWitness>(&poly.body())) {
    for (std::size_t j = 0; j < c->a.size(); ++j) {
      double pair = 0.0;
      const auto y = c->targets[j].coords();
      for (std::size_t o = 0; o < y.size(); ++o) pair += psi[o] * y[o];
      const double w = std::pow(std::abs(c->a[j]), 1.0 / c->p) *
                       ipow(apply(c->functionals[j]), m - 1) * pair;
      for (std::size_t i = 0; i < d; ++i) g[i] += w * c->functionals[j][i];
    }
    return g;
  }
  const auto& e = std::get<RealEvenWitness>(poly.body());
  for (std::size_t j = 0; j < e.a.size(); ++j) {
    const double w =
        std::pow(std::abs(e.a[j]), 1.0 / e.p) * ipow(apply(e.functionals[j]), m - 1) * psi[0];
    for (std::size_t i = 0; i < d; ++i) g[i] += w * e.functionals[j][i];
  }
  return g;
}

PolyAscent ascend_polynomial(const HomogeneousPolynomial& poly, std::vector<double> x,
                             const SearchBudget& budget) {
  const Exponent in_p = poly.domain().exponent();
  const Exponent in_dual = dual_exponent(in_p);
  const Exponent out_p = poly.codomain().exponent();
  const std::size_t m = poly.degree();
  auto value_at = [&](std::span<const double> z) { return lp_norm(poly_coords(poly, z), out_p); };
  double f = value_at(x);
  std::vector<double> z(x.size());
  for (std::size_t it = 0; it < budget.max_iterations; ++it) {
    const auto psi = norming_coords(poly_coords(poly, x), out_p);
    const auto target = norming_coords(poly_gradient(poly, x, psi), in_dual);
    if (std::all_of(target.begin(), target.end(), [](double c) { return c == 0.0; })) break;
    bool accepted = false;
    double f_new = f;
    double t = 1.0;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + t * (target[i] - x[i]);
      const double nz = lp_norm(z, in_p);
      if (nz == 0.0) continue;
      for (double& c : z) c /= nz;
      f_new = value_at(z);
      if (f_new > f) {
        accepted = true;
        break;
      }
    }
    (void)m;
    if (!accepted) break;
    const double gain = (f_new - f) / f_new;
    x = z;
    f = f_new;
    if (gain < budget.relative_tolerance) break;
  }
  return {f, std::move(x)};
}

}  // namespace

NormEstimate operator_norm(const MultilinearMap& map, const SearchBudget& budget) {
  if (map.closed_form_norm()) {
    std::vector<Vector> cert;
    for (const auto& s : map.domain()) cert.push_back(Vector::basis(s, 0));
    return {*map.closed_form_norm(), std::move(cert), true};
  }
  const auto& t = std::get<DenseTensor>(map.body());
  const std::size_t m = map.arity();
  const std::size_t restarts = std::max<std::size_t>(1, budget.restarts);
  std::uint64_t instance = hash_doubles(t.data);
  for (const auto& s : map.domain()) instance = hash_combine(instance, hash_string(s.to_string()));
  Rng rng(derive_seed(budget.seed, "operator_norm_multilinear", instance));

  std::vector<std::vector<std::vector<double>>> starts(restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto& s = map.domain()[i];
      if (r < restarts / 2) {
        std::vector<double> e(s.dimension(), 0.0);
        e[(r + i * 7) % s.dimension()] = 1.0;
        starts[r].push_back(std::move(e));
      } else {
        starts[r].push_back(random_unit(rng, s.dimension(), s.exponent()));
      }
    }
  }
  std::vector<MultiAscent> results(restarts);
  parallel_for(restarts, budget.threads, [&](std::size_t r) {
    results[r] = ascend_multilinear(map, t, starts[r], budget);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (results[r].value > results[best].value) best = r;
  }
  std::vector<Vector> cert;
  for (std::size_t i = 0; i < m; ++i) cert.emplace_back(map.domain()[i], results[best].args[i]);
  return {results[best].value, std::move(cert), false};
}

NormEstimate operator_norm(const HomogeneousPolynomial& poly, const SearchBudget& budget) {
  const SpaceDescriptor& dom = poly.domain();
  const std::size_t d = dom.dimension();
  const std::size_t restarts = std::max<std::size_t>(1, budget.restarts);
  const Exponent in_dual = dual_exponent(dom.exponent());

  std::vector<std::vector<double>> starts;
  // Primal maximizers of the witness functionals, then basis vectors.
  auto add_functional_starts = [&](const std::vector<Functional>& fs) {
    for (const auto& f : fs) {
      if (starts.size() >= restarts / 4) break;
      auto x = norming_coords(f.coords(), in_dual);
      if (std::any_of(x.begin(), x.end(), [](double c) { return c != 0.0; })) {
        starts.push_back(std::move(x));
      }
    }
  };
  if (const auto* c = std::get_if<CotypeWitness>(&poly.body())) add_functional_starts(c->functionals);
  if (const auto* e = std::get_if<RealEvenWitness>(&poly.body())) {
    add_functional_starts(e->functionals);
  }
  for (std::size_t j = 0; j < d && starts.size() < restarts / 2; ++j) {
    std::vector<double> e(d, 0.0);
    e[j] = 1.0;
    starts.push_back(std::move(e));
  }
  std::uint64_t instance = hash_string(poly.describe());
  Rng rng(derive_seed(budget.seed, "operator_norm_polynomial", instance));
  while (starts.size() < restarts) starts.push_back(random_unit(rng, d, dom.exponent()));

  std::vector<PolyAscent> results(starts.size());
  parallel_for(starts.size(), budget.threads, [&](std::size_t r) {
    results[r] = ascend_polynomial(poly, starts[r], budget);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].value > results[best].value) best = r;
  }
  return {results[best].value, {Vector(dom, results[best].x)}, false};
}

}  // namespace summlab
