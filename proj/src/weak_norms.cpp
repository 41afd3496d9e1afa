#include "summlab/weak_norms.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <optional>

#include "summlab/errors.hpp"
#include "summlab/parallel.hpp"
#include "summlab/random.hpp"

namespace summlab {

VectorFamily::VectorFamily(SpaceDescriptor space, std::vector<Vector> vectors)
    : space_(std::move(space)), vectors_(std::move(vectors)) {
  if (vectors_.empty()) throw StructuralError("a vector family must be nonempty");
  for (const Vector& v : vectors_) {
    if (!(v.space() == space_)) {
      throw StructuralError("family member lives in " + v.space().to_string() +
                            ", expected " + space_.to_string());
    }
  }
}

VectorFamily VectorFamily::from_rows(const SpaceDescriptor& space,
                                     std::vector<std::vector<double>> rows) {
  std::vector<Vector> vs;
  vs.reserve(rows.size());
  for (auto& r : rows) vs.emplace_back(space, std::move(r));
  return VectorFamily(space, std::move(vs));
}

VectorFamily VectorFamily::basis(const SpaceDescriptor& space, std::size_t n) {
  std::vector<Vector> vs;
  vs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) vs.push_back(Vector::basis(space, k % space.dimension()));
  return VectorFamily(space, std::move(vs));
}

VectorFamily VectorFamily::scaled(double factor) const {
  std::vector<Vector> vs;
  vs.reserve(size());
  for (const Vector& v : vectors_) vs.push_back(v.scaled(factor));
  return VectorFamily(space_, std::move(vs));
}

VectorFamily VectorFamily::permuted(std::span<const std::size_t> order) const {
  if (order.size() != size()) throw StructuralError("permutation length mismatch");
  std::vector<Vector> vs;
  vs.reserve(size());
  for (std::size_t k : order) vs.push_back(vectors_.at(k));
  return VectorFamily(space_, std::move(vs));
}

VectorFamily VectorFamily::with_vector(std::size_t k, Vector v) const {
  std::vector<Vector> vs(vectors_);
  vs.at(k) = std::move(v);
  return VectorFamily(space_, std::move(vs));
}

bool VectorFamily::is_zero() const {
  return std::all_of(vectors_.begin(), vectors_.end(), [](const Vector& v) {
    return std::all_of(v.coords().begin(), v.coords().end(), [](double c) { return c == 0.0; });
  });
}

std::uint64_t VectorFamily::instance_hash() const {
  std::vector<std::uint64_t> hs;
  hs.reserve(size());
  for (const Vector& v : vectors_) hs.push_back(hash_doubles(v.coords()));
  std::sort(hs.begin(), hs.end());
  std::uint64_t h = hash_string(space_.to_string());
  for (std::uint64_t x : hs) h = hash_combine(h, x);
  return h;
}

const char* to_string(WeakNormPath path) {
  switch (path) {
    case WeakNormPath::SingleVector: return "single_vector";
    case WeakNormPath::HilbertSvd: return "hilbert_svd";
    case WeakNormPath::SignCoherent: return "sign_coherent";
    case WeakNormPath::CubeVertices: return "cube_vertices";
    case WeakNormPath::CrossPolytopeVertices: return "cross_polytope_vertices";
    case WeakNormPath::Search: return "search";
  }
  return "unknown";
}

namespace {

double abs_pow(double a, double q) {
  const double x = std::abs(a);
  if (q == 1.0) return x;
  if (q == 2.0) return x * x;
  return std::pow(x, q);
}

double root(double s, double q) {
  if (q == 1.0) return s;
  if (q == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / q);
}

// Rows of the family in canonical (lexicographic) order, flattened. Every
// path works on this copy, so reordering the family cannot change a result.
struct Rows {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t k) const { return {data.data() + k * d, d}; }
};

Rows canonical_rows(const VectorFamily& family) {
  std::vector<std::size_t> order(family.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ca = family[a].coords();
    const auto cb = family[b].coords();
    return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
  });
  Rows rows;
  rows.n = family.size();
  rows.d = family.space().dimension();
  rows.data.reserve(rows.n * rows.d);
  for (std::size_t k : order) {
    const auto c = family[k].coords();
    rows.data.insert(rows.data.end(), c.begin(), c.end());
  }
  return rows;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double power_sum(const Rows& rows, std::span<const double> phi, double q) {
  double s = 0.0;
  for (std::size_t k = 0; k < rows.n; ++k) s += abs_pow(dot(phi, rows.row(k)), q);
  return s;
}

double objective(const Rows& rows, std::span<const double> phi, double q) {
  return root(power_sum(rows, phi, q), q);
}

WeakNormResult hilbert_svd(const VectorFamily& family, const Rows& rows) {
  Eigen::MatrixXd x(rows.n, rows.d);
  for (std::size_t k = 0; k < rows.n; ++k) {
    for (std::size_t i = 0; i < rows.d; ++i) x(k, i) = rows.data[k * rows.d + i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const double sigma = svd.singularValues()(0);
  std::vector<double> v(rows.d);
  for (std::size_t i = 0; i < rows.d; ++i) v[i] = svd.matrixV()(i, 0);
  // Fix the sign so the largest entry is positive.
  std::size_t lead = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[lead])) lead = i;
  }
  if (v[lead] < 0.0) {
    for (double& c : v) c = -c;
  }
  return {sigma, Functional(family.space(), std::move(v)), true, WeakNormPath::HilbertSvd};
}

// If some sign pattern σ has σ_i x_{k,i} ≥ 0 for every k and i, φ = σ
// maximizes every |φ(x_k)| over the cube at once, whatever q is.
std::optional<std::vector<double>> coherent_signs(const Rows& rows) {
  std::vector<double> sigma(rows.d, 0.0);
  for (std::size_t k = 0; k < rows.n; ++k) {
    for (std::size_t i = 0; i < rows.d; ++i) {
      const double c = rows.data[k * rows.d + i];
      if (c == 0.0) continue;
      const double s = c > 0.0 ? 1.0 : -1.0;
      if (sigma[i] == 0.0) {
        sigma[i] = s;
      } else if (sigma[i] != s) {
        return std::nullopt;
      }
    }
  }
  for (double& s : sigma) {
    if (s == 0.0) s = 1.0;
  }
  return sigma;
}

// max over the cube [-1,1]^d by Gray-code walk over sign vectors with the
// first sign pinned to +1 (the objective is even).
WeakNormResult cube_vertices(const VectorFamily& family, const Rows& rows, double q) {
  const std::size_t d = rows.d;
  std::vector<double> sigma(d, 1.0);
  std::vector<double> a(rows.n);
  auto refresh = [&] {
    for (std::size_t k = 0; k < rows.n; ++k) a[k] = dot(sigma, rows.row(k));
  };
  auto current = [&] {
    double s = 0.0;
    for (double ak : a) s += abs_pow(ak, q);
    return s;
  };
  refresh();
  double best = current();
  std::vector<double> best_sigma = sigma;
  const std::uint64_t count = d > 1 ? (std::uint64_t{1} << (d - 1)) : 1;
  for (std::uint64_t step = 1; step < count; ++step) {
    const auto flip = static_cast<std::size_t>(std::countr_zero(step)) + 1;
    sigma[flip] = -sigma[flip];
    if (step % 256 == 0) {
      refresh();
    } else {
      for (std::size_t k = 0; k < rows.n; ++k) a[k] += 2.0 * sigma[flip] * rows.data[k * d + flip];
    }
    const double s = current();
    if (s > best) {
      best = s;
      best_sigma = sigma;
    }
  }
  const double value = objective(rows, best_sigma, q);
  return {value, Functional(family.space(), std::move(best_sigma)), true,
          WeakNormPath::CubeVertices};
}

WeakNormResult cross_polytope_vertices(const VectorFamily& family, const Rows& rows, double q) {
  std::size_t best_i = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < rows.d; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < rows.n; ++k) s += abs_pow(rows.data[k * rows.d + i], q);
    if (s > best) {
      best = s;
      best_i = i;
    }
  }
  std::vector<double> phi(rows.d, 0.0);
  phi[best_i] = 1.0;
  return {root(best, q), Functional(family.space(), std::move(phi)), true,
          WeakNormPath::CrossPolytopeVertices};
}

struct Ascent {
  double value = -1.0;
  std::vector<double> phi;
};

// Frank–Wolfe style ascent on the dual sphere: the full step moves to the
// dual-ball maximizer of the gradient, halved until the objective rises,
// then renormalized (the objective is 1-homogeneous).
Ascent ascend(const Rows& rows, std::vector<double> phi, double q, const Exponent& p,
              const Exponent& dual_p, const SearchBudget& budget) {
  double f = objective(rows, phi, q);
  std::vector<double> g(rows.d);
  std::vector<double> y(rows.d);
  for (std::size_t it = 0; it < budget.max_iterations; ++it) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t k = 0; k < rows.n; ++k) {
      const auto x = rows.row(k);
      const double a = dot(phi, x);
      if (a == 0.0) continue;
      const double w = (a > 0.0 ? 1.0 : -1.0) * (q == 1.0 ? 1.0 : std::pow(std::abs(a), q - 1.0));
      for (std::size_t i = 0; i < rows.d; ++i) g[i] += w * x[i];
    }
    const std::vector<double> target = norming_coords(g, p);
    if (std::all_of(target.begin(), target.end(), [](double c) { return c == 0.0; })) break;

    bool accepted = false;
    double t = 1.0;
    double f_new = f;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      for (std::size_t i = 0; i < rows.d; ++i) y[i] = phi[i] + t * (target[i] - phi[i]);
      const double ny = lp_norm(y, dual_p);
      if (ny == 0.0) continue;
      for (double& c : y) c /= ny;
      f_new = objective(rows, y, q);
      if (f_new > f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double gain = (f_new - f) / f_new;
    phi = y;
    f = f_new;
    if (gain < budget.relative_tolerance) break;
  }
  return {f, std::move(phi)};
}

WeakNormResult search(const VectorFamily& family, const Rows& rows, double q,
                      const SearchBudget& budget) {
  const Exponent p = family.space().exponent();
  const Exponent dual_p = dual_exponent(p);
  const std::size_t restarts = std::max<std::size_t>(1, budget.restarts);

  // Starts: norming functionals of the largest vectors (ties by canonical
  // position), then random points of the dual sphere.
  std::vector<std::size_t> by_size(rows.n);
  std::iota(by_size.begin(), by_size.end(), 0);
  std::vector<double> sizes(rows.n);
  for (std::size_t k = 0; k < rows.n; ++k) sizes[k] = lp_norm(rows.row(k), p);
  std::stable_sort(by_size.begin(), by_size.end(),
                   [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });

  std::vector<std::vector<double>> starts;
  const std::size_t anchored = std::min(rows.n, (restarts + 1) / 2);
  for (std::size_t j = 0; j < anchored && sizes[by_size[j]] > 0.0; ++j) {
    starts.push_back(norming_coords(rows.row(by_size[j]), p));
  }
  std::uint64_t instance = hash_combine(family.instance_hash(), hash_doubles(std::span(&q, 1)));
  Rng rng(derive_seed(budget.seed, "weak_norm", instance));
  while (starts.size() < restarts) {
    std::vector<double> z(rows.d);
    double nz = 0.0;
    while (nz == 0.0) {
      for (double& c : z) c = rng.normal();
      nz = lp_norm(z, dual_p);
    }
    for (double& c : z) c /= nz;
    starts.push_back(std::move(z));
  }

  std::vector<Ascent> results(starts.size());
  parallel_for(starts.size(), budget.threads, [&](std::size_t r) {
    results[r] = ascend(rows, starts[r], q, p, dual_p, budget);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].value > results[best].value) best = r;
  }
  return {results[best].value, Functional(family.space(), std::move(results[best].phi)), false,
          WeakNormPath::Search};
}

}  // namespace

double weak_objective(const VectorFamily& family, std::span<const double> phi, double q) {
  if (!(q > 0.0)) throw DomainError("weak-norm exponent q must be positive");
  if (phi.size() != family.space().dimension()) {
    throw StructuralError("functional dimension does not match the family");
  }
  double s = 0.0;
  for (const Vector& x : family) s += abs_pow(dot(phi, x.coords()), q);
  return root(s, q);
}

WeakNormResult weak_norm(const VectorFamily& family, double q, const SearchBudget& budget) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("weak-norm exponent q must be positive");
  const SpaceDescriptor& space = family.space();

  if (family.is_zero()) {
    return {0.0, Functional(space, std::vector<double>(space.dimension(), 0.0)), true,
            WeakNormPath::SingleVector};
  }
  if (!budget.force_search && family.size() == 1) {
    return {norm(family[0]), norming_functional(space, family[0]), true,
            WeakNormPath::SingleVector};
  }

  const Rows rows = canonical_rows(family);
  if (!budget.force_search) {
    if (space.is_hilbert() && q == 2.0) return hilbert_svd(family, rows);
    if (space.is_l1()) {
      if (auto sigma = coherent_signs(rows)) {
        const double value = objective(rows, *sigma, q);
        return {value, Functional(space, std::move(*sigma)), true, WeakNormPath::SignCoherent};
      }
      if (q >= 1.0 && space.dimension() <= 20) return cube_vertices(family, rows, q);
    }
    if (space.is_sup_normed() && q >= 1.0) return cross_polytope_vertices(family, rows, q);
  }
  return search(family, rows, q, budget);
}

double weak_norm_vertex_oracle(const VectorFamily& family, double q) {
  if (!(q > 0.0)) throw DomainError("weak-norm exponent q must be positive");
  if (!family.space().is_l1()) throw StructuralError("vertex oracle needs an l1 family");
  const std::size_t d = family.space().dimension();
  if (d > 20) throw BudgetError("vertex oracle limited to dimension 20");
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    double s = 0.0;
    for (const Vector& x : family) {
      double a = 0.0;
      for (std::size_t i = 0; i < d; ++i) a += ((mask >> i) & 1U ? -1.0 : 1.0) * x[i];
      s += std::pow(std::abs(a), q);
    }
    best = std::max(best, std::pow(s, 1.0 / q));
  }
  return best;
}

}  // namespace summlab
