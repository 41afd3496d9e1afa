#include "summlab/index_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "summlab/errors.hpp"
#include "summlab/random.hpp"

namespace summlab {

void to_json(nlohmann::json& j, const QuotientSample& s) {
  j = nlohmann::json{{"n", s.n},
                     {"quotient", s.quotient},
                     {"conservative", s.conservative},
                     {"provenance", s.provenance}};
}

void to_json(nlohmann::json& j, const IndexEstimate& e) {
  j = nlohmann::json{
      {"slope", e.slope}, {"intercept", e.intercept}, {"residual", e.residual}, {"grid", e.grid}};
}

namespace {

void require_pq(double p, double q) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("p must be positive and finite");
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q must be positive and finite");
}

struct Denominator {
  double value = 1.0;
  bool exact = true;
  nlohmann::json paths = nlohmann::json::array();
};

WeakNormResult checked_weak_norm(const VectorFamily& family, double q, const SearchBudget& budget) {
  auto w = weak_norm(family, q, budget);
  if (!(w.value > 0.0)) throw DegenerateInputError("family has zero weak norm");
  return w;
}

QuotientSample finish(std::size_t n, double numerator, const Denominator& den) {
  QuotientSample s;
  s.n = n;
  s.quotient = numerator / den.value;
  s.conservative = !den.exact;
  s.provenance = nlohmann::json{
      {"numerator", numerator}, {"denominator", den.value}, {"weak_norm_paths", den.paths}};
  return s;
}

}  // namespace

QuotientSample summing_quotient(const MultilinearMap& map, std::span<const VectorFamily> families,
                                double p, double q, const LabBudget& budget) {
  require_pq(p, q);
  if (families.empty()) throw StructuralError("no families given");
  Denominator den;
  for (const auto& f : families) {
    const auto w = checked_weak_norm(f, q, budget.search);
    den.value *= w.value;
    den.exact = den.exact && w.exact;
    den.paths.push_back(to_string(w.path));
  }
  return finish(families[0].size(), mixed_power_sum(map, families, p, budget.sums), den);
}

QuotientSample polynomial_quotient(const HomogeneousPolynomial& poly, const VectorFamily& family,
                                   double p, double q, const LabBudget& budget) {
  require_pq(p, q);
  const auto w = checked_weak_norm(family, q, budget.search);
  Denominator den;
  den.value = std::pow(w.value, static_cast<double>(poly.degree()));
  den.exact = w.exact;
  den.paths.push_back(to_string(w.path));
  return finish(family.size(), poly_power_sum(poly, family, p, budget.sums), den);
}

const char* to_string(FamilyStrategy s) {
  switch (s) {
    case FamilyStrategy::Basis: return "basis";
    case FamilyStrategy::WitnessAnchors: return "witness_anchors";
    case FamilyStrategy::RandomAscent: return "random_ascent";
  }
  return "?";
}

FamilyStrategy family_strategy_from_string(const std::string& s) {
  if (s == "basis") return FamilyStrategy::Basis;
  if (s == "witness_anchors" || s == "anchors") return FamilyStrategy::WitnessAnchors;
  if (s == "random_ascent" || s == "random") return FamilyStrategy::RandomAscent;
  throw SchemaError("unknown family strategy \"" + s + "\"");
}

// ---------------------------------------------------------------------------
// Quotient maximization

namespace {

std::vector<SpaceDescriptor> slot_spaces(const QuotientTarget& t) {
  if (const auto* m = std::get_if<MultilinearMap>(&t.map)) return m->domain();
  return {std::get<HomogeneousPolynomial>(t.map).domain()};
}

// Caches per-slot weak norms so that perturbing one family only recomputes
// its own denominator.
class Evaluator {
 public:
  Evaluator(const QuotientTarget& t, double p, double q, const LabBudget& b)
      : target_(t), p_(p), q_(q), budget_(b) {}

  QuotientSample evaluate(std::span<const VectorFamily> fams,
                          std::span<const WeakNormResult> weak) const {
    Denominator den;
    for (const auto& w : weak) {
      den.value *= w.value;
      den.exact = den.exact && w.exact;
      den.paths.push_back(to_string(w.path));
    }
    double numerator;
    if (const auto* m = std::get_if<MultilinearMap>(&target_.map)) {
      numerator = mixed_power_sum(*m, fams, p_, budget_.sums);
    } else {
      const auto& poly = std::get<HomogeneousPolynomial>(target_.map);
      den.value = std::pow(den.value, static_cast<double>(poly.degree()));
      numerator = poly_power_sum(poly, fams[0], p_, budget_.sums);
    }
    return finish(fams[0].size(), numerator, den);
  }

  WeakNormResult weak(const VectorFamily& f) const { return checked_weak_norm(f, q_, budget_.search); }

 private:
  const QuotientTarget& target_;
  double p_;
  double q_;
  const LabBudget& budget_;
};

Vector random_unit_vector(Rng& rng, const SpaceDescriptor& space) {
  std::vector<double> z(space.dimension());
  double nz = 0.0;
  while (nz == 0.0) {
    for (double& c : z) c = rng.normal();
    nz = lp_norm(z, space.exponent());
  }
  for (double& c : z) c /= nz;
  return Vector(space, std::move(z));
}

}  // namespace

QuotientSearch maximize_quotient(const QuotientTarget& target, std::size_t n, double p, double q,
                                 std::span<const FamilyStrategy> strategies,
                                 const LabBudget& budget) {
  if (n == 0) throw DomainError("n must be >= 1");
  require_pq(p, q);
  const auto spaces = slot_spaces(target);
  const std::string label = std::visit([](const auto& m) { return m.describe(); }, target.map);
  std::uint64_t instance = hash_string(label);
  instance = hash_combine(instance, n);
  instance = hash_combine(instance, std::bit_cast<std::uint64_t>(p));
  instance = hash_combine(instance, std::bit_cast<std::uint64_t>(q));
  const std::uint64_t seed = derive_seed(budget.search.seed, "maximize_quotient", instance);

  Evaluator eval(target, p, q, budget);
  QuotientSearch out;
  bool have_best = false;
  std::optional<BudgetError> budget_failure;

  auto record = [&](QuotientSample s, const char* strategy, nlohmann::json extra) {
    s.provenance["strategy"] = strategy;
    s.provenance["seed"] = seed;
    for (auto& [k, v] : extra.items()) s.provenance[k] = v;
    ++out.evaluated;
    if (!have_best || s.quotient > out.best.quotient) {
      out.best = s;
      have_best = true;
    }
    if (!s.conservative && (!out.best_exact || s.quotient > out.best_exact->quotient)) {
      out.best_exact = s;
    }
    out.history.push_back(std::move(s));
  };

  auto try_families = [&](const std::vector<VectorFamily>& fams, const char* strategy,
                          nlohmann::json extra) -> std::optional<QuotientSample> {
    try {
      std::vector<WeakNormResult> weak;
      for (const auto& f : fams) weak.push_back(eval.weak(f));
      auto s = eval.evaluate(fams, weak);
      record(s, strategy, std::move(extra));
      return s;
    } catch (const DegenerateInputError&) {
      return std::nullopt;
    } catch (const BudgetError& e) {
      budget_failure = e;
      return std::nullopt;
    }
  };

  for (FamilyStrategy strategy : strategies) {
    switch (strategy) {
      case FamilyStrategy::Basis: {
        std::vector<VectorFamily> fams;
        for (const auto& s : spaces) fams.push_back(VectorFamily::basis(s, n));
        try_families(fams, "basis", nlohmann::json::object());
        break;
      }
      case FamilyStrategy::WitnessAnchors: {
        if (!target.anchors || target.anchors->size() != n) break;
        bool fits = std::all_of(spaces.begin(), spaces.end(),
                                [&](const auto& s) { return s == target.anchors->space(); });
        if (!fits) break;
        std::vector<VectorFamily> fams(spaces.size(), *target.anchors);
        try_families(fams, "witness_anchors", nlohmann::json::object());
        break;
      }
      case FamilyStrategy::RandomAscent: {
        Rng rng(seed);
        for (std::size_t trial = 0; trial < budget.random_trials; ++trial) {
          std::vector<VectorFamily> fams;
          for (const auto& s : spaces) {
            std::vector<Vector> vs;
            for (std::size_t k = 0; k < n; ++k) vs.push_back(random_unit_vector(rng, s));
            fams.emplace_back(s, std::move(vs));
          }
          std::vector<WeakNormResult> weak;
          QuotientSample current;
          try {
            for (const auto& f : fams) weak.push_back(eval.weak(f));
            current = eval.evaluate(fams, weak);
          } catch (const DegenerateInputError&) {
            continue;
          } catch (const BudgetError& e) {
            budget_failure = e;
            break;
          }
          // Perturb one vector at a time and keep improvements; the step
          // shrinks on every rejection.
          double step = 0.5;
          std::size_t accepted = 0;
          for (std::size_t it = 0; it < budget.ascent_steps && step > 1e-6; ++it) {
            const auto slot = static_cast<std::size_t>(
                rng.integer(0, static_cast<std::int64_t>(fams.size()) - 1));
            const auto k = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(n) - 1));
            const SpaceDescriptor& s = spaces[slot];
            std::vector<double> z(fams[slot][k].coords().begin(), fams[slot][k].coords().end());
            for (double& c : z) c += step * rng.normal();
            const double nz = lp_norm(z, s.exponent());
            if (nz == 0.0) continue;
            for (double& c : z) c /= nz;
            auto trial_fams = fams;
            trial_fams[slot] = fams[slot].with_vector(k, Vector(s, std::move(z)));
            auto trial_weak = weak;
            try {
              trial_weak[slot] = eval.weak(trial_fams[slot]);
              auto cand = eval.evaluate(trial_fams, trial_weak);
              if (cand.quotient > current.quotient) {
                fams = std::move(trial_fams);
                weak = std::move(trial_weak);
                current = std::move(cand);
                ++accepted;
              } else {
                step *= 0.8;
              }
            } catch (const DegenerateInputError&) {
              step *= 0.8;
            }
          }
          record(current, "random_ascent", nlohmann::json{{"trial", trial}, {"accepted_steps", accepted}});
        }
        break;
      }
    }
  }
  if (!have_best) {
    if (budget_failure) throw *budget_failure;
    throw DegenerateInputError("no strategy produced a usable family");
  }
  return out;
}

IndexEstimate estimate_index(std::span<const QuotientSample> samples) {
  std::vector<const QuotientSample*> sorted;
  for (const auto& s : samples) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->n < b->n; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->n == sorted[i - 1]->n) throw DomainError("sample sizes n must be distinct");
  }
  if (sorted.size() < 3) throw DomainError("need at least 3 samples to estimate an index");
  std::vector<double> xs, ys;
  IndexEstimate e{};
  for (const auto* s : sorted) {
    if (!(s->quotient > 0.0) || !std::isfinite(s->quotient)) {
      throw DomainError("quotients must be positive and finite");
    }
    xs.push_back(std::log(static_cast<double>(s->n)));
    ys.push_back(std::log(s->quotient));
    e.grid.push_back(s->n);
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  e.slope = sxy / sxx;
  e.intercept = my - e.slope * mx;
  e.residual = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    e.residual = std::max(e.residual, std::abs(ys[i] - (e.intercept + e.slope * xs[i])));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Bounds

namespace {

void require_m(std::size_t m) {
  if (m == 0) throw DomainError("m must be >= 1");
}

// Branch thresholds with s = 1/r, so that r = ∞ (s = 0) and the real case
// (s = 1) share one formula set.
double first_seam(std::size_t m, double q, double s) { return q / (static_cast<double>(m) + q * s); }
double second_seam(std::size_t m, double s) { return 2.0 / (static_cast<double>(m) + 2.0 * s); }

double branch_formula(char branch, std::size_t m, double p, double q, double s) {
  const double md = static_cast<double>(m);
  switch (branch) {
    case 'a':
    case 'c': return md / 2.0;
    case 'b': return (md * p + 2.0) / (2.0 * p) - (md / q + s);
    case 'd': return 1.0 / p - s;
  }
  throw DomainError("unknown branch");
}

// p_cap is r for cotype targets and 1 for the real case.
std::vector<BranchValue> lower_branches(std::size_t m, double p, double q, double s, double p_cap) {
  std::vector<BranchValue> out;
  const double t1 = first_seam(m, q, s);
  const double t2 = second_seam(m, s);
  const bool low_q = q >= 1.0 && q <= 2.0;
  const bool high_q = q >= 2.0 && std::isfinite(q);
  if (low_q && p <= t1) out.push_back({'a', branch_formula('a', m, p, q, s)});
  if (low_q && p >= t1 && p <= t2) out.push_back({'b', branch_formula('b', m, p, q, s)});
  if (high_q && p <= t2) out.push_back({'c', branch_formula('c', m, p, q, s)});
  if (high_q && p > t2 && p < p_cap) out.push_back({'d', branch_formula('d', m, p, q, s)});
  return out;
}

}  // namespace

double upper_bound_mult(std::size_t m, double p, double q) {
  require_m(m);
  require_pq(p, q);
  const double md = static_cast<double>(m);
  if (q <= 2.0) return md / p;
  if (p >= q) return md * q / (2.0 * p);
  return md * (q * p - 2.0 * p + 2.0 * q) / (2.0 * q * p);
}

double upper_bound_pol(std::size_t m, double p, double q) {
  require_m(m);
  require_pq(p, q);
  const double md = static_cast<double>(m);
  if (!(p < q / md)) throw ValidityError("polynomial upper bound needs p < q/m");
  if (q <= 2.0) return 1.0 / p;
  return 1.0 / p + md * (q - 2.0) / (2.0 * q);
}

double cotype_branch_formula(char branch, std::size_t m, double p, double q, Exponent r) {
  return branch_formula(branch, m, p, q, r.reciprocal());
}

double real_even_branch_formula(char branch, std::size_t m, double p, double q) {
  return branch_formula(branch, m, p, q, 1.0);
}

std::vector<BranchValue> lower_bound_pol_cotype_branches(std::size_t m, double p, double q,
                                                         Exponent r) {
  require_m(m);
  require_pq(p, q);
  if (!r.is_infinite() && !(r.value() >= 2.0)) throw DomainError("cotype r must be >= 2");
  const double cap = r.is_infinite() ? std::numeric_limits<double>::infinity() : r.value();
  return lower_branches(m, p, q, r.reciprocal(), cap);
}

double lower_bound_pol_cotype(std::size_t m, double p, double q, Exponent r) {
  const auto b = lower_bound_pol_cotype_branches(m, p, q, r);
  if (b.empty()) throw ValidityError("no cotype lower-bound branch covers these parameters");
  return b.front().value;
}

std::vector<BranchValue> lower_bound_pol_real_even_branches(std::size_t m, double p, double q) {
  require_m(m);
  require_pq(p, q);
  if (m % 2 != 0) throw DomainError("real even lower bound needs even m");
  return lower_branches(m, p, q, 1.0, 1.0);
}

double lower_bound_pol_real_even(std::size_t m, double p, double q) {
  const auto b = lower_bound_pol_real_even_branches(m, p, q);
  if (b.empty()) throw ValidityError("no real lower-bound branch covers these parameters");
  return b.front().value;
}

const char* to_string(ExactCase c) {
  switch (c) {
    case ExactCase::HilbertToSupMultilinear: return "l2_to_c0_mult";
    case ExactCase::L1ToL2Polynomial: return "l1_to_l2_pol";
    case ExactCase::SupToCotypeLinear: return "ck_to_cotype_linear";
  }
  return "?";
}

ExactIndex exact_index(ExactCase c, std::size_t m, double p, double r) {
  require_m(m);
  const double md = static_cast<double>(m);
  ExactIndex e{};
  switch (c) {
    case ExactCase::HilbertToSupMultilinear:
      e = {md / 2.0, 2.0, 2.0, true, true};
      if (p != 2.0) throw ValidityError("the l2 -> c0 index is tabulated at p = q = 2 only");
      return e;
    case ExactCase::L1ToL2Polynomial:
      e = {1.0 / p - (md + 1.0) / 2.0, 2.0 / (2.0 * md + 1.0), 2.0 / (md + 1.0), true, false};
      if (!(p >= e.lo && p < e.hi)) throw ValidityError("p outside [2/(2m+1), 2/(m+1))");
      return e;
    case ExactCase::SupToCotypeLinear:
      if (m != 1) throw ValidityError("the C(K) case is linear (m = 1)");
      if (!(r >= 2.0) || !std::isfinite(r)) throw ValidityError("cotype r must be finite and >= 2");
      e = {1.0 / p - 1.0 / r, 2.0 * r / (r + 2.0), r, false, false};
      if (!(p > e.lo && p < e.hi)) throw ValidityError("p outside (2r/(r+2), r)");
      return e;
  }
  throw DomainError("unknown exact case");
}

double index_shift(double p_target, double p_known, double eta_known) {
  if (!(p_target > 0.0) || !(p_target < p_known)) {
    throw DomainError("index shift needs 0 < p_target < p_known");
  }
  return eta_known + 1.0 / p_target - 1.0 / p_known;
}

double lemar_exponent(double s, double d) {
  if (!(1.0 <= d && d <= s && s <= 2.0)) throw DomainError("need 1 <= d <= s <= 2");
  return (2.0 * d + s * (d - 2.0)) / (2.0 * s * d);
}

double konig_exponent(double q) {
  if (!(q > 2.0)) throw DomainError("the basis growth exponent needs q > 2");
  return 1.0 / q;
}

double konig_constant() { return 1.0 / (2.0 * std::numbers::e); }

// ---------------------------------------------------------------------------
// Tables

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

}  // namespace

std::vector<BoundLine> bound_table(std::size_t m, double p, double q, std::optional<double> r) {
  require_m(m);
  require_pq(p, q);
  std::vector<BoundLine> lines;
  auto add = [&](std::string kind, std::string branch, std::string range,
                 std::optional<double> value, std::optional<double> rr = std::nullopt) {
    lines.push_back({std::move(kind), std::move(branch), std::move(range), m, p, q, rr, value});
  };
  const double md = static_cast<double>(m);

  if (q <= 2.0) {
    add("mult_upper", "q<=2", "0<q<=2: m/p", upper_bound_mult(m, p, q));
  } else if (p >= q) {
    add("mult_upper", "q>=2,p>=q", "q>=2, p>=q: mq/(2p)", upper_bound_mult(m, p, q));
  } else {
    add("mult_upper", "q>=2,p<q", "q>=2, p<q: m(qp-2p+2q)/(2qp)", upper_bound_mult(m, p, q));
  }

  const std::string pol_range = "p < q/m = " + num(q / md);
  if (p < q / md) {
    add("pol_upper", q <= 2.0 ? "q<=2" : "q>=2", pol_range, upper_bound_pol(m, p, q));
  } else {
    add("pol_upper", q <= 2.0 ? "q<=2" : "q>=2", pol_range, std::nullopt);
  }

  auto lower_lines = [&](const char* kind, std::vector<BranchValue> hits, double s, double cap,
                         std::optional<double> rr) {
    const double t1 = first_seam(m, q, s);
    const double t2 = second_seam(m, s);
    const std::string ranges[4] = {
        "1<=q<=2, 0<p<=" + num(t1),
        "1<=q<=2, " + num(t1) + "<=p<=" + num(t2),
        "2<=q<inf, 0<p<=" + num(t2),
        "2<=q<inf, " + num(t2) + "<p<" + num(cap),
    };
    for (int b = 0; b < 4; ++b) {
      const char name = static_cast<char>('a' + b);
      std::optional<double> v;
      for (const auto& h : hits) {
        if (h.branch == name) v = h.value;
      }
      add(kind, std::string(1, name), ranges[b], v, rr);
    }
  };

  if (r) {
    const Exponent re = std::isinf(*r) ? Exponent::infinity() : Exponent(*r);
    lower_lines("pol_lower_cotype", lower_bound_pol_cotype_branches(m, p, q, re), re.reciprocal(),
                *r, r);
  }
  if (m % 2 == 0) {
    lower_lines("pol_lower_real_even", lower_bound_pol_real_even_branches(m, p, q), 1.0, 1.0,
                std::nullopt);
  }

  add("exact", "l2_to_c0_mult", "p=q=2",
      (p == 2.0 && q == 2.0) ? std::optional<double>(md / 2.0) : std::nullopt);
  {
    std::optional<double> v;
    if (q == 1.0) {
      try {
        v = exact_index(ExactCase::L1ToL2Polynomial, m, p).value;
      } catch (const ValidityError&) {
      }
    }
    add("exact", "l1_to_l2_pol",
        "q=1, " + num(2.0 / (2.0 * md + 1.0)) + "<=p<" + num(2.0 / (md + 1.0)), v);
  }
  if (r && m == 1) {
    std::optional<double> v;
    if (q == 2.0) {
      try {
        v = exact_index(ExactCase::SupToCotypeLinear, 1, p, *r).value;
      } catch (const ValidityError&) {
      }
    }
    add("exact", "ck_to_cotype_linear",
        "m=1, q=2, " + num(2.0 * *r / (*r + 2.0)) + "<p<" + num(*r), v, r);
  }
  return lines;
}

std::string bound_table_csv(std::span<const BoundLine> lines, bool header) {
  std::ostringstream os;
  if (header) os << "kind,m,p,q,r,branch,value\n";
  for (const auto& l : lines) {
    if (!l.value) continue;
    os << l.kind << ',' << l.m << ',' << num(l.p) << ',' << num(l.q) << ','
       << (l.r ? num(*l.r) : std::string()) << ',' << l.branch << ',' << num(*l.value) << '\n';
  }
  return os.str();
}

std::string format_bound_table(std::span<const BoundLine> lines) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %-20s %-22s %s\n", "bound", "branch", "value", "valid for");
  os << buf;
  for (const auto& l : lines) {
    const std::string value = l.value ? num(*l.value) : "n/a (out of range)";
    std::snprintf(buf, sizeof buf, "%-20s %-20s %-22s %s\n", l.kind.c_str(), l.branch.c_str(),
                  value.c_str(), l.range.c_str());
    os << buf;
  }
  return os.str();
}

}  // namespace summlab
