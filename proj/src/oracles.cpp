#include "summlab/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "summlab/errors.hpp"
#include "summlab/witnesses.hpp"

namespace summlab {

double brute_force_mixed_sum(const MultilinearMap& map, std::span<const VectorFamily> families,
                             double p) {
  const std::size_t m = map.arity();
  if (families.size() != m) throw StructuralError("wrong number of families");
  const std::size_t n = families[0].size();
  std::size_t tuples = 1;
  for (std::size_t i = 0; i < m; ++i) {
    tuples *= n;
    if (tuples > 100'000) throw BudgetError("brute force is limited to 1e5 tuples");
  }

  std::vector<std::size_t> k(m, 0);
  double total = 0.0;
  for (std::size_t t = 0; t < tuples; ++t) {
    std::vector<double> out;
    if (const auto* dense = std::get_if<DenseTensor>(&map.body())) {
      // Walk every coefficient T[j_1, ..., j_m, o] and add its full product.
      const auto& shape = dense->shape;
      out.assign(shape.back(), 0.0);
      std::vector<std::size_t> j(shape.size(), 0);
      for (std::size_t f = 0; f < dense->data.size(); ++f) {
        std::size_t rem = f;
        for (std::size_t a = shape.size(); a-- > 0;) {
          j[a] = rem % shape[a];
          rem /= shape[a];
        }
        double term = dense->data[f];
        for (std::size_t i = 0; i < m; ++i) term *= families[i][k[i]][j[i]];
        out[j[m]] += term;
      }
    } else {
      out = {1.0};
      for (std::size_t i = 0; i < m; ++i) {
        const Vector& x = families[i][k[i]];
        std::vector<double> next;
        for (double a : out) {
          for (std::size_t c = 0; c < x.size(); ++c) next.push_back(a * x[c]);
        }
        out = next;
      }
    }
    double nrm = 0.0;
    const Exponent e = map.codomain().exponent();
    if (e.is_infinite()) {
      for (double c : out) nrm = std::max(nrm, std::abs(c));
    } else {
      for (double c : out) nrm += std::pow(std::abs(c), e.value());
      nrm = std::pow(nrm, 1.0 / e.value());
    }
    total += std::pow(nrm, p);

    for (std::size_t i = m; i-- > 0;) {
      if (++k[i] < n) break;
      k[i] = 0;
    }
  }
  return std::pow(total, 1.0 / p);
}

namespace {

double radical_inverse(std::size_t index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

double brute_force_weak_norm(const VectorFamily& family, double q, std::size_t resolution) {
  static constexpr std::array<unsigned, 6> primes = {2, 3, 5, 7, 11, 13};
  const std::size_t d = family.space().dimension();
  if (d > 6) throw BudgetError("brute-force weak norm is limited to dimension 6");
  if (resolution > 10'000'000) throw BudgetError("brute-force weak norm is limited to 1e7 samples");
  if (!(q > 0.0)) throw DomainError("q must be positive");
  const Exponent dual = dual_exponent(family.space().exponent());

  double best = 0.0;
  std::vector<double> phi(d);
  for (std::size_t i = 1; i <= resolution; ++i) {
    for (std::size_t c = 0; c < d; c += 2) {
      const double u1 = radical_inverse(i, primes[c]);
      const double u2 = radical_inverse(i, primes[c + 1]);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      phi[c] = radius * std::cos(2.0 * std::numbers::pi * u2);
      if (c + 1 < d) phi[c + 1] = radius * std::sin(2.0 * std::numbers::pi * u2);
    }
    double scale = 0.0;
    if (dual.is_infinite()) {
      for (double c : phi) scale = std::max(scale, std::abs(c));
    } else {
      for (double c : phi) scale += std::pow(std::abs(c), dual.value());
      scale = std::pow(scale, 1.0 / dual.value());
    }
    if (scale == 0.0) continue;
    double s = 0.0;
    for (const Vector& x : family) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += phi[c] / scale * x[c];
      s += std::pow(std::abs(dot), q);
    }
    best = std::max(best, std::pow(s, 1.0 / q));
  }
  return best;
}

CheckReport pietsch_check(std::size_t d, const LabBudget& budget) {
  if (d < 1 || d > 32) throw DomainError("pietsch check needs 1 <= d <= 32");
  const auto space = SpaceDescriptor::lp(2.0, d);
  const QuotientTarget target{identity_witness(space), std::nullopt};
  const FamilyStrategy strategies[] = {FamilyStrategy::Basis, FamilyStrategy::RandomAscent};
  const auto search = maximize_quotient(target, d, 2.0, 2.0, strategies, budget);
  const double expected = std::sqrt(static_cast<double>(d));
  const double basis = search.history.front().quotient;
  const bool best_ok =
      search.best.quotient >= expected - 1e-9 && search.best.quotient <= expected + 1e-6;
  const bool basis_ok = std::abs(basis - expected) <= 1e-9;
  return {best_ok && basis_ok,
          nlohmann::json{{"check", "pietsch"},
                         {"d", d},
                         {"expected", expected},
                         {"best", search.best},
                         {"basis_quotient", basis},
                         {"evaluated", search.evaluated},
                         {"pass", best_ok && basis_ok}}};
}

CheckReport konig_growth_check(double q, std::span<const std::size_t> n_grid,
                               const LabBudget& budget) {
  const double exponent = konig_exponent(q);
  bool pass = true;
  std::vector<QuotientSample> samples;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t n : n_grid) {
    if (n == 0) throw DomainError("n must be >= 1");
    const auto space = SpaceDescriptor::lp(2.0, n);
    const auto id = identity_witness(space);
    const VectorFamily basis = VectorFamily::basis(space, n);
    auto s = summing_quotient(id, std::span(&basis, 1), q, 2.0, budget);
    const double floor = konig_constant() * std::pow(static_cast<double>(n), exponent);
    const bool ok = s.quotient >= floor;
    pass = pass && ok;
    rows.push_back({{"n", n}, {"quotient", s.quotient}, {"floor", floor}, {"pass", ok}});
    samples.push_back(std::move(s));
  }
  nlohmann::json record{{"check", "konig"}, {"q", q}, {"exponent", exponent}, {"samples", rows}};
  if (samples.size() >= 3) {
    const auto est = estimate_index(samples);
    const bool slope_ok = std::abs(est.slope - exponent) <= 0.01;
    pass = pass && slope_ok;
    record["estimate"] = est;
    record["slope_pass"] = slope_ok;
  }
  record["pass"] = pass;
  return {pass, std::move(record)};
}

CheckReport summing_cap_check(double p, std::size_t d, const LabBudget& budget) {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  if (d < 1 || d > 16) throw DomainError("summing cap check needs 1 <= d <= 16");
  const auto space = p == 2.0 ? SpaceDescriptor::lp(2.0, d) : SpaceDescriptor::lp(1.0, d);
  const QuotientTarget target{identity_witness(space), std::nullopt};
  const FamilyStrategy strategies[] = {FamilyStrategy::Basis, FamilyStrategy::RandomAscent};
  const auto search = maximize_quotient(target, d, p, p, strategies, budget);
  const double cap = std::pow(static_cast<double>(d), std::max(1.0 / p, 0.5));

  bool pass = true;
  std::size_t exact = 0;
  std::size_t conservative = 0;
  double worst_exact = 0.0;
  for (const auto& s : search.history) {
    if (s.conservative) {
      ++conservative;
      continue;
    }
    ++exact;
    worst_exact = std::max(worst_exact, s.quotient);
    if (s.quotient > cap * (1.0 + 1e-6)) pass = false;
  }
  pass = pass && exact > 0;
  return {pass, nlohmann::json{{"check", "summing_cap"},
                               {"p", p},
                               {"d", d},
                               {"space", space},
                               {"cap", cap},
                               {"max_exact_quotient", worst_exact},
                               {"exact_samples", exact},
                               {"conservative_samples", conservative},
                               {"best", search.best},
                               {"pass", pass}}};
}

}  // namespace summlab
