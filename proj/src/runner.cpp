#include "summlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "summlab/errors.hpp"
#include "summlab/index_lab.hpp"
#include "summlab/oracles.hpp"
#include "summlab/parallel.hpp"
#include "summlab/witnesses.hpp"

namespace summlab {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Schema

struct SlopeAssert {
  std::optional<double> slope;
  double slope_tolerance = 1e-6;
  std::optional<double> max_residual;
  bool upper_bound_sound = false;
  std::optional<double> quotient_cap_exponent;
};

struct Experiment {
  std::string name;
  std::string kind;

  // slope
  WitnessSpec map;
  double p = 0.0;
  double q = 0.0;
  std::vector<std::size_t> n_grid;
  std::vector<FamilyStrategy> strategies;
  LabBudget budget;
  SlopeAssert asserts;

  // bounds: cartesian product of the lists
  std::vector<std::size_t> ms;
  std::vector<double> ps;
  std::vector<double> qs;
  std::vector<std::optional<double>> rs;

  // oracle
  std::string check;
  std::vector<std::size_t> ds;
};

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing \"" + key + "\"");
  if (!j[key].is_number()) throw SchemaError(where + ": \"" + key + "\" must be a number");
  return j[key].get<double>();
}

double positive(const json& j, const std::string& key, const std::string& where) {
  const double v = number(j, key, where);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw SchemaError(where + ": \"" + key + "\" must be positive and finite");
  }
  return v;
}

std::size_t positive_int(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw SchemaError(what + " must be a positive integer");
  }
  return v.get<std::size_t>();
}

template <class F>
auto one_or_many(const json& j, const std::string& key, const std::string& where, F parse) {
  using T = decltype(parse(j));
  std::vector<T> out;
  if (!j.contains(key)) throw SchemaError(where + ": missing \"" + key + "\"");
  const json& v = j[key];
  if (v.is_array()) {
    if (v.empty()) throw SchemaError(where + ": \"" + key + "\" must not be empty");
    for (const auto& e : v) out.push_back(parse(e));
  } else {
    out.push_back(parse(v));
  }
  return out;
}

double positive_value(const json& v, const std::string& what) {
  if (!v.is_number() || !(v.get<double>() > 0.0) || !std::isfinite(v.get<double>())) {
    throw SchemaError(what + " must be a positive number");
  }
  return v.get<double>();
}

LabBudget parse_budget(const json& e, const std::string& where, std::uint64_t seed,
                       std::uint64_t tuple_budget) {
  LabBudget b;
  b.search.seed = seed;
  b.sums.tuple_budget = tuple_budget;
  if (!e.contains("budget")) return b;
  const json& j = e["budget"];
  if (!j.is_object()) throw SchemaError(where + ": \"budget\" must be an object");
  auto get = [&](const char* key, std::size_t& slot) {
    if (j.contains(key)) slot = positive_int(j[key], where + ": budget." + key);
  };
  get("restarts", b.search.restarts);
  get("max_iterations", b.search.max_iterations);
  get("random_trials", b.random_trials);
  get("ascent_steps", b.ascent_steps);
  return b;
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

Experiment parse_experiment(const json& e, std::size_t index, std::uint64_t seed,
                            std::uint64_t tuple_budget) {
  const std::string where = "experiments[" + std::to_string(index) + "]";
  if (!e.is_object()) throw SchemaError(where + " must be an object");
  if (!e.contains("kind") || !e["kind"].is_string()) {
    throw SchemaError(where + ": \"kind\" must be \"slope\", \"oracle\" or \"bounds\"");
  }
  Experiment x;
  x.kind = e["kind"].get<std::string>();
  x.name = x.kind + "_" + std::to_string(index);
  if (e.contains("name")) {
    if (!e["name"].is_string() || !valid_name(e["name"].get<std::string>())) {
      throw SchemaError(where + ": \"name\" may only use letters, digits, '_', '-' and '.'");
    }
    x.name = e["name"].get<std::string>();
  }
  x.budget = parse_budget(e, where, seed, tuple_budget);

  if (x.kind == "slope") {
    if (!e.contains("map")) throw SchemaError(where + ": slope experiments need \"map\"");
    x.p = positive(e, "p", where);
    x.q = positive(e, "q", where);
    try {
      x.map = witness_spec_from_json(e["map"]);
    } catch (const SchemaError& err) {
      throw SchemaError(where + ".map: " + err.what());
    }
    if (x.map.is_polynomial() && !e["map"].contains("p")) x.map.p = x.p;
    x.n_grid = one_or_many(e, "n_grid", where,
                           [&](const json& v) { return positive_int(v, where + ": n_grid entry"); });
    if (e.contains("strategies")) {
      if (!e["strategies"].is_array()) throw SchemaError(where + ": \"strategies\" must be a list");
      for (const auto& s : e["strategies"]) {
        if (!s.is_string()) throw SchemaError(where + ": strategies are strings");
        x.strategies.push_back(family_strategy_from_string(s.get<std::string>()));
      }
    } else {
      x.strategies = {FamilyStrategy::Basis};
    }
    if (e.contains("assert")) {
      const json& a = e["assert"];
      if (!a.is_object()) throw SchemaError(where + ": \"assert\" must be an object");
      if (a.contains("slope")) x.asserts.slope = number(a, "slope", where + ".assert");
      if (a.contains("slope_tolerance")) {
        x.asserts.slope_tolerance = positive(a, "slope_tolerance", where + ".assert");
      }
      if (a.contains("max_residual")) {
        x.asserts.max_residual = number(a, "max_residual", where + ".assert");
      }
      if (a.contains("upper_bound_sound")) {
        if (!a["upper_bound_sound"].is_boolean()) {
          throw SchemaError(where + ".assert: \"upper_bound_sound\" must be a boolean");
        }
        x.asserts.upper_bound_sound = a["upper_bound_sound"].get<bool>();
      }
      if (a.contains("quotient_cap_exponent")) {
        x.asserts.quotient_cap_exponent = number(a, "quotient_cap_exponent", where + ".assert");
      }
    }
    return x;
  }

  if (x.kind == "bounds") {
    x.ms = one_or_many(e, "m", where, [&](const json& v) { return positive_int(v, where + ": m"); });
    x.ps = one_or_many(e, "p", where, [&](const json& v) { return positive_value(v, where + ": p"); });
    x.qs = one_or_many(e, "q", where, [&](const json& v) { return positive_value(v, where + ": q"); });
    if (e.contains("r")) {
      for (double r : one_or_many(e, "r", where, [&](const json& v) {
             if (v.is_string() && v.get<std::string>() == "inf") {
               return std::numeric_limits<double>::infinity();
             }
             const double r = positive_value(v, where + ": r");
             if (r < 2.0) throw SchemaError(where + ": cotype r must be >= 2");
             return r;
           })) {
        x.rs.emplace_back(r);
      }
    } else {
      x.rs.emplace_back(std::nullopt);
    }
    return x;
  }

  if (x.kind == "oracle") {
    if (!e.contains("check") || !e["check"].is_string()) {
      throw SchemaError(where + ": \"check\" must be \"pietsch\", \"konig\" or \"summing_cap\"");
    }
    x.check = e["check"].get<std::string>();
    if (x.check == "pietsch") {
      x.ds = one_or_many(e, "d", where, [&](const json& v) {
        const auto d = positive_int(v, where + ": d");
        if (d > 32) throw SchemaError(where + ": pietsch d must be <= 32");
        return d;
      });
    } else if (x.check == "konig") {
      x.qs = one_or_many(e, "q", where, [&](const json& v) {
        const double q = positive_value(v, where + ": q");
        if (q <= 2.0) throw SchemaError(where + ": konig q must exceed 2");
        return q;
      });
      x.n_grid = one_or_many(e, "n_grid", where,
                             [&](const json& v) { return positive_int(v, where + ": n_grid entry"); });
    } else if (x.check == "summing_cap") {
      x.ps = one_or_many(e, "p", where, [&](const json& v) { return positive_value(v, where + ": p"); });
      x.ds = one_or_many(e, "d", where, [&](const json& v) {
        const auto d = positive_int(v, where + ": d");
        if (d > 16) throw SchemaError(where + ": summing_cap d must be <= 16");
        return d;
      });
    } else {
      throw SchemaError(where + ": unknown check \"" + x.check + "\"");
    }
    return x;
  }
  throw SchemaError(where + ": unknown kind \"" + x.kind + "\"");
}

// ---------------------------------------------------------------------------
// Execution

struct Outcome {
  json record;
  bool pass = true;
  std::string bounds_csv;
  std::string slope_row;
  std::string plot;
};

json assertion(const std::string& name, bool pass, json detail) {
  return json{{"assert", name}, {"pass", pass}, {"detail", std::move(detail)}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}

Outcome run_slope(const Experiment& x, unsigned threads) {
  Outcome out;
  const std::size_t count = x.n_grid.size();
  std::vector<QuotientSearch> searches(count);
  std::vector<std::optional<double>> norms(count);
  std::vector<std::size_t> arity(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const std::size_t n = x.n_grid[i];
    auto w = build_witness(x.map, n, x.budget.sums.tuple_budget);
    norms[i] = w.norm;
    arity[i] = std::visit(
        [](const auto& m) {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MultilinearMap>) {
            return m.arity();
          } else {
            return m.degree();
          }
        },
        w.map);
    QuotientTarget target{std::move(w.map), std::move(w.anchors)};
    searches[i] = maximize_quotient(target, n, x.p, x.q, x.strategies, x.budget);
  });

  std::vector<QuotientSample> best;
  json samples = json::array();
  json exact_samples = json::array();
  bool conservative = false;
  for (const auto& s : searches) {
    best.push_back(s.best);
    samples.push_back(s.best);
    exact_samples.push_back(s.best_exact ? json(*s.best_exact) : json(nullptr));
    conservative = conservative || s.best.conservative;
  }

  json strategies = json::array();
  for (auto s : x.strategies) strategies.push_back(to_string(s));
  json record{{"name", x.name},       {"kind", "slope"},          {"map", x.map},
              {"p", x.p},             {"q", x.q},                 {"strategies", strategies},
              {"samples", samples},   {"best_exact", exact_samples},
              {"conservative", conservative}};
  json asserts = json::array();

  const std::size_t m = arity.front();
  std::optional<IndexEstimate> est;
  std::set<std::size_t> distinct(x.n_grid.begin(), x.n_grid.end());
  if (distinct.size() >= 3 && distinct.size() == x.n_grid.size()) {
    est = estimate_index(best);
    record["estimate"] = *est;
    record["estimate_label"] = "empirical slope";
  } else {
    record["estimate"] = nullptr;
  }

  std::optional<double> r;
  if (x.map.kind == "cotype") r = x.map.r;
  json refs = json::array();
  for (const auto& line : bound_table(m, x.p, x.q, r)) {
    if (!line.value) continue;
    refs.push_back(json{{"kind", line.kind}, {"branch", line.branch}, {"value", *line.value}});
  }
  record["bound_refs"] = refs;
  record["note"] = "searched quotients bound the restricted summing constants from below";

  if (x.asserts.slope) {
    if (!est) {
      asserts.push_back(assertion("slope", false, "needs at least three distinct n"));
    } else {
      const bool ok = std::abs(est->slope - *x.asserts.slope) <= x.asserts.slope_tolerance;
      asserts.push_back(assertion("slope", ok,
                                  json{{"expected", *x.asserts.slope},
                                       {"tolerance", x.asserts.slope_tolerance},
                                       {"measured", est->slope}}));
    }
  }
  if (x.asserts.max_residual) {
    const bool ok = est && est->residual <= *x.asserts.max_residual;
    asserts.push_back(assertion(
        "max_residual", ok,
        json{{"limit", *x.asserts.max_residual}, {"measured", est ? json(est->residual) : json()}}));
  }
  auto check_history = [&](const char* name, auto cap_for) {
    bool ok = true;
    std::size_t checked = 0;
    json worst = nullptr;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const auto cap = cap_for(i);
      if (!cap) continue;
      for (const auto& s : searches[i].history) {
        if (s.conservative) continue;
        ++checked;
        const double ratio = s.quotient / *cap;
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          worst = json{{"n", s.n}, {"quotient", s.quotient}, {"cap", *cap}};
        }
        if (s.quotient > *cap * (1.0 + 1e-6)) ok = false;
      }
    }
    asserts.push_back(assertion(name, ok, json{{"checked", checked}, {"worst", worst}}));
  };
  if (x.asserts.upper_bound_sound) {
    const double ub = upper_bound_mult(m, x.p, x.q);
    check_history("upper_bound_sound", [&](std::size_t i) -> std::optional<double> {
      if (!norms[i]) return std::nullopt;
      return *norms[i] * std::pow(static_cast<double>(x.n_grid[i]), ub);
    });
  }
  if (x.asserts.quotient_cap_exponent) {
    check_history("quotient_cap", [&](std::size_t i) -> std::optional<double> {
      return std::pow(static_cast<double>(x.n_grid[i]), *x.asserts.quotient_cap_exponent);
    });
  }
  for (const auto& a : asserts) out.pass = out.pass && a["pass"].get<bool>();
  record["assertions"] = asserts;
  record["pass"] = out.pass;

  std::ostringstream plot;
  plot << "# log_n log_quotient\n";
  for (const auto& s : best) {
    plot << fmt(std::log(static_cast<double>(s.n))) << ' ' << fmt(std::log(s.quotient)) << '\n';
  }
  out.plot = plot.str();
  if (est) {
    out.slope_row = x.name + ',' + x.map.kind + ',' + std::to_string(m) + ',' + fmt(x.p) + ',' +
                    fmt(x.q) + ',' + fmt(est->slope) + ',' + fmt(est->intercept) + ',' +
                    fmt(est->residual) + ',' + (conservative ? "true" : "false") + '\n';
  }
  out.record = std::move(record);
  return out;
}

Outcome run_bounds(const Experiment& x) {
  Outcome out;
  json lines = json::array();
  std::string csv;
  for (auto m : x.ms) {
    for (double p : x.ps) {
      for (double q : x.qs) {
        for (const auto& r : x.rs) {
          const auto table = bound_table(m, p, q, r);
          csv += bound_table_csv(table, false);
          for (const auto& l : table) {
            lines.push_back(json{{"kind", l.kind},
                                 {"branch", l.branch},
                                 {"range", l.range},
                                 {"m", l.m},
                                 {"p", l.p},
                                 {"q", l.q},
                                 {"r", l.r ? json(*l.r) : json()},
                                 {"value", l.value ? json(*l.value) : json()}});
          }
        }
      }
    }
  }
  out.bounds_csv = std::move(csv);
  out.record = json{{"name", x.name}, {"kind", "bounds"}, {"lines", lines}, {"pass", true}};
  return out;
}

Outcome run_oracle(const Experiment& x) {
  Outcome out;
  json reports = json::array();
  auto take = [&](CheckReport r) {
    out.pass = out.pass && r.pass;
    reports.push_back(std::move(r.record));
  };
  if (x.check == "pietsch") {
    for (auto d : x.ds) take(pietsch_check(d, x.budget));
  } else if (x.check == "konig") {
    for (double q : x.qs) take(konig_growth_check(q, x.n_grid, x.budget));
  } else {
    for (double p : x.ps) {
      for (auto d : x.ds) take(summing_cap_check(p, d, x.budget));
    }
  }
  out.record = json{
      {"name", x.name}, {"kind", "oracle"}, {"check", x.check}, {"reports", reports}, {"pass", out.pass}};
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << content;
}

}  // namespace

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const json& config) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SUMMLAB_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw SchemaError("SUMMLAB_SEED must be a nonnegative integer");
  }
  if (config.is_object() && config.contains("seed")) {
    if (!config["seed"].is_number_integer() || config["seed"].get<long long>() < 0) {
      throw SchemaError("\"seed\" must be a nonnegative integer");
    }
    return config["seed"].get<std::uint64_t>();
  }
  return 42;
}

int run_config(const json& config, const RunOptions& options, std::ostream& log, json* results) {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = utc_now();
  std::vector<Experiment> experiments;
  std::uint64_t seed = 42;
  try {
    if (!config.is_object()) throw SchemaError("config must be a JSON object");
    for (const auto& [key, _] : config.items()) {
      if (key != "experiments" && key != "seed") {
        throw SchemaError("unknown top-level key \"" + key + "\"");
      }
    }
    seed = resolve_seed(options.seed, config);
    if (config.contains("experiments")) {
      if (!config["experiments"].is_array()) throw SchemaError("\"experiments\" must be a list");
      std::size_t i = 0;
      for (const auto& e : config["experiments"]) {
        experiments.push_back(parse_experiment(e, i++, seed, options.tuple_budget));
      }
    }
    std::set<std::string> names;
    for (const auto& x : experiments) {
      if (!names.insert(x.name).second) throw SchemaError("duplicate experiment name \"" + x.name + "\"");
    }
  } catch (const SchemaError& e) {
    log << "config error: " << e.what() << '\n';
    return kRunBadConfig;
  }

  const unsigned threads = std::max(1u, options.threads);
  const unsigned outer = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, experiments.size())));
  const unsigned inner = std::max(1u, threads / outer);
  std::vector<Outcome> outcomes(experiments.size());
  parallel_for(experiments.size(), outer, [&](std::size_t i) {
    const auto& x = experiments[i];
    try {
      if (x.kind == "slope") {
        outcomes[i] = run_slope(x, inner);
      } else if (x.kind == "bounds") {
        outcomes[i] = run_bounds(x);
      } else {
        outcomes[i] = run_oracle(x);
      }
    } catch (const Error& e) {
      outcomes[i].pass = false;
      outcomes[i].record = json{{"name", x.name}, {"kind", x.kind}, {"error", e.what()}, {"pass", false}};
    }
  });

  json records = json::array();
  json failures = json::array();
  std::string bounds_csv = "kind,m,p,q,r,branch,value\n";
  std::string slopes_csv = "name,map,m,p,q,slope,intercept,residual,conservative\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    records.push_back(o.record);
    bounds_csv += o.bounds_csv;
    slopes_csv += o.slope_row;
    if (!o.pass) failures.push_back(experiments[i].name);
  }
  const bool pass = failures.empty();
  json res{{"seed", seed}, {"experiments", records}, {"failures", failures}, {"pass", pass}};

  std::filesystem::create_directories(options.out);
  write_file(options.out / "results.json", res.dump(2) + "\n");
  write_file(options.out / "bounds.csv", bounds_csv);
  write_file(options.out / "slopes.csv", slopes_csv);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].plot.empty()) {
      write_file(options.out / (experiments[i].name + ".dat"), outcomes[i].plot);
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json meta{{"started_at", started_at},
            {"finished_at", utc_now()},
            {"elapsed_seconds", elapsed},
            {"threads", threads},
            {"tuple_budget", options.tuple_budget},
            {"config", options.config.string()},
            {"seed", seed}};
  write_file(options.out / "metadata.json", meta.dump(2) + "\n");

  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    log << (outcomes[i].pass ? "PASS " : "FAIL ") << experiments[i].name << '\n';
    if (!outcomes[i].pass) {
      const auto& rec = outcomes[i].record;
      if (rec.contains("error")) log << "  error: " << rec["error"].get<std::string>() << '\n';
      if (rec.contains("assertions")) {
        for (const auto& a : rec["assertions"]) {
          if (!a["pass"].get<bool>()) log << "  " << a["assert"].get<std::string>() << ": " << a["detail"].dump() << '\n';
        }
      }
      if (rec.contains("reports")) {
        for (const auto& r : rec["reports"]) {
          if (!r["pass"].get<bool>()) log << "  " << r.dump() << '\n';
        }
      }
    }
  }
  if (results) *results = std::move(res);
  return pass ? kRunPassed : kRunFailed;
}

int run(const RunOptions& options, std::ostream& log) {
  std::ifstream in(options.config);
  if (!in) {
    log << "config error: cannot open " << options.config << '\n';
    return kRunBadConfig;
  }
  json config;
  try {
    in >> config;
  } catch (const json::parse_error& e) {
    log << "config error: " << e.what() << '\n';
    return kRunBadConfig;
  }
  return run_config(config, options, log);
}

}  // namespace summlab
