// gcilab: Gaussian correlation inequality experiments from the command line.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gcilab/ineqlab.hpp"
#include "gcilab/io.hpp"
#include "gcilab/search.hpp"
#include "gcilab/sidak_correct.hpp"

using namespace gcilab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolated = 2;

struct Args {
  std::string cov, bounds, bounds2, polygon, polygon2, hpoly, hpoly2;
  std::optional<std::uint64_t> budget;
  std::uint64_t seed = 0;
  std::size_t replicates = 12;
  bool json = false;
  std::string engine = "auto";

  std::string check_name;
  std::string direction = "0,1";
  double width = 1.0;
  std::string a = "1";
  std::size_t index = 1;
  std::optional<std::size_t> split;
  double s = 0.0, t = 0.0;
  std::size_t samples = 1000;

  std::string counterexample = "hull";
  double n = 3.0;
  std::string family = "hull-rectangles";
  std::size_t steps = 20;
  std::size_t copies = 2;
  double alpha = 0.05;
  bool critical = false;
  bool table = false;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::string& need(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing required flag ") + flag);
  return value;
}

CheckOptions options(const Args& a, Engine fallback) {
  CheckOptions o;
  o.seed = a.seed;
  o.qmc.replicates = a.replicates;
  if (a.budget) {
    o.qmc.budget = static_cast<std::size_t>(*a.budget);
    o.mc_budget = *a.budget;
  }
  if (a.engine == "auto") {
    o.engine = fallback;
  } else if (a.engine == "qmc") {
    o.engine = Engine::qmc;
  } else if (a.engine == "mc") {
    o.engine = Engine::mc;
  } else if (a.engine == "oracle") {
    o.engine = Engine::oracle;
  } else {
    throw UsageError("--engine must be auto, qmc, mc or oracle");
  }
  return o;
}

double parse_extended(const std::string& s) { return io::detail::parse_number(s, 0); }

Vector parse_vector(const std::string& s) {
  const auto rows = io::parse_rows(s);
  if (rows.size() != 1) throw UsageError("--direction takes one comma-separated row");
  return Eigen::Map<const Vector>(rows.front().data(), static_cast<Eigen::Index>(rows.front().size()));
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

void print_report(const InequalityReport& r) {
  std::cout << r.label << " [" << to_string(r.backing) << "]\n";
  auto side = [](const char* name, const Side& s) {
    const Estimate e = s.total();
    std::cout << "  " << name << " = " << fmt(e.value) << "  (stderr " << fmt(e.std_error) << ")\n";
    for (const auto& t : s.terms)
      std::cout << "      " << t.name << " = " << fmt(t.p.value) << "  [" << to_string(t.p.method) << "]\n";
  };
  side("lhs", r.lhs);
  side("rhs", r.rhs);
  std::cout << "  margin = " << fmt(r.margin) << "  stderr = " << fmt(r.std_error) << "\n";
  std::cout << "  verdict: " << to_string(r.verdict) << "\n";
  if (!r.trace.empty()) std::cout << "  trace: " << r.trace.dump() << "\n";
}

int emit(const Args& a, const InequalityReport& r) {
  if (a.json)
    std::cout << to_json(r).dump(2) << "\n";
  else
    print_report(r);
  return r.failed() ? kExitViolated : kExitOk;
}

int emit_json(const Args& a, const json& j, const std::string& text) {
  if (a.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
  return kExitOk;
}

// ---------------------------------------------------------------------------

int run_measure(const Args& a) {
  const Stopwatch clock;
  const CheckOptions o = options(a, Engine::qmc);
  json body;
  ProbabilityEstimate p;
  if (!a.polygon.empty()) {
    const auto poly = io::read_polygon(a.polygon);
    body = json{{"polygon", to_json(poly)}};
    p = polygon_measure(poly, o.engine, o.qmc, o.mc_budget, o.seed);
  } else if (!a.hpoly.empty()) {
    const auto h = io::read_hpolytope(a.hpoly);
    body = json{{"hpolytope", to_json(h)}};
    p = gauss_measure_mc(h, o.mc_budget, o.seed);
  } else {
    const SymmetricBand band(io::read_covariance(need(a.cov, "--cov")), io::read_thresholds(need(a.bounds, "--bounds")));
    body = json{{"band", to_json(band)}};
    p = o.engine == Engine::oracle ? gauss_measure_band_oracle(band) : gauss_measure_band(band, o.qmc, o.seed);
  }
  const json j{{"kind", "measure"}, {"body", body}, {"estimate", to_json(p)}, {"seed", a.seed},
               {"runtime_ms", clock.elapsed_ms()}};
  return emit_json(a, j, "gamma = " + fmt(p.value) + "  (stderr " + fmt(p.std_error) + ", " + std::string(to_string(p.method)) + ")\n");
}

int run_check(const Args& a) {
  const CheckOptions o = options(a, Engine::qmc);
  const std::string& name = a.check_name;
  auto model = [&] { return io::read_covariance(need(a.cov, "--cov")); };
  auto s_thr = [&] { return io::read_thresholds(need(a.bounds, "--bounds")); };
  auto t_thr = [&] { return io::read_thresholds(need(a.bounds2, "--bounds2")); };
  auto body_k = [&] {
    return !a.hpoly.empty() ? io::read_hpolytope(a.hpoly) : HPolytope::from_polygon(io::read_polygon(need(a.polygon, "--polygon or --hpoly")));
  };
  auto body_t = [&] {
    return !a.hpoly2.empty() ? io::read_hpolytope(a.hpoly2) : HPolytope::from_polygon(io::read_polygon(need(a.polygon2, "--polygon2 or --hpoly2")));
  };
  if (a.index < 1) throw UsageError("--index is 1-based");

  if (name == "sidak") return emit(a, check_sidak(model(), s_thr(), o));
  if (name == "refined") return emit(a, check_refined_sidak(model(), s_thr(), parse_extended(a.a), a.index - 1, o));
  if (name == "royen") {
    const auto m = model();
    return emit(a, check_royen(m, s_thr(), a.split.value_or(m.size() / 2), o));
  }
  if (name == "strong-bands") return emit(a, check_strong_gci_bands(model(), s_thr(), t_thr(), o));
  if (name == "strong-2d")
    return emit(a, check_strong_gci_2d(io::read_polygon(need(a.polygon, "--polygon")), io::read_polygon(need(a.polygon2, "--polygon2")), o));
  if (name == "slab") {
    const Vector u = parse_vector(a.direction);
    if (!a.polygon.empty()) {
      if (u.size() != 2) throw UsageError("--direction must have two entries for a polygon");
      return emit(a, check_slab(io::read_polygon(a.polygon), Vec2{u(0), u(1)}, a.width, o));
    }
    return emit(a, check_slab(SymmetricBand(model(), s_thr()), u, a.width, o));
  }
  if (name == "unconditional") return emit(a, check_unconditional(body_k(), body_t(), o));
  if (name == "tehranchi") return emit(a, check_tehranchi(model(), s_thr(), t_thr(), a.s, a.t, o));
  if (name == "rogers-shephard")
    return emit(a, check_rogers_shephard(io::read_polygon(need(a.polygon, "--polygon")), io::read_polygon(need(a.polygon2, "--polygon2"))));
  if (name == "lattice") {
    try {
      const auto r = check_lattice_premise(body_k(), body_t(), a.samples, a.seed);
      return emit_json(a, to_json(r), "lattice-premise [theorem]\n  pairs = " + std::to_string(r.pairs) + "  failures = 0\n  verdict: supported\n");
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PremiseViolated) throw;
      std::cerr << "gcilab: " << e.what() << "\n";
      return kExitViolated;
    }
  }
  throw UsageError("unknown check: " + name);
}

int run_counterexample(const Args& a) {
  if (a.counterexample != "hull") throw UsageError("unknown counterexample: " + a.counterexample);
  return emit(a, hull_counterexample(a.n, options(a, Engine::mc)));
}

int run_search(const Args& a) {
  const auto r = search_counterexample(parse_family(a.family), a.steps, options(a, Engine::qmc));
  std::ostringstream text;
  text << "search " << to_string(r.family) << ": " << r.evaluations << " evaluations\n  best params:";
  for (std::size_t j = 0; j < r.params.size(); ++j) text << " " << r.names[j] << "=" << fmt(r.params[j]);
  text << "\n  best margin = " << fmt(r.best.margin) << "  stderr = " << fmt(r.best.std_error)
       << "  verdict: " << to_string(r.best.verdict) << "\n";
  return emit_json(a, to_json(r), text.str());
}

int run_tensorize(const Args& a) {
  const auto m = io::read_covariance(need(a.cov, "--cov"));
  const auto s = io::read_thresholds(need(a.bounds, "--bounds"));
  const auto t = a.bounds2.empty() ? s : io::read_thresholds(a.bounds2);
  return emit(a, tensorize_check(m, s, t, a.copies, options(a, Engine::qmc)));
}

int run_correct(const Args& a) {
  const auto m = io::read_covariance(need(a.cov, "--cov"));
  const CheckOptions o = options(a, Engine::qmc);
  const auto r = improved_confidence(m, a.alpha, o);
  json j = to_json(r);
  std::ostringstream text;
  text << "sidak correction: alpha = " << fmt(r.alpha) << ", k = " << r.k << ", c = " << fmt(r.c) << "\n";
  text << std::setw(12) << "a" << std::setw(16) << "A" << std::setw(16) << "A lower" << std::setw(16) << "level" << "\n";
  for (const auto& row : r.rows)
    text << std::setw(12) << (std::isinf(row.a) ? std::string("inf") : fmt(row.a)) << std::setw(16) << fmt(row.factor.value)
         << std::setw(16) << fmt(row.lower) << std::setw(16) << fmt(row.level) << "\n";
  text << "A_best = " << fmt(r.A_best) << (r.fallback ? " (fallback)" : "") << "\nimproved level = " << fmt(r.improved_level) << "\n";
  if (a.critical) {
    const double c2 = improved_critical_value(m, a.alpha, o);
    j["improved_critical_value"] = c2;
    text << "improved critical value = " << fmt(c2) << "\n";
  }
  // The correction result is always a JSON document unless a table is asked for.
  if (a.table) {
    std::cout << text.str();
    return kExitOk;
  }
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian correlation inequality laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  Args a;
  app.add_option("--cov", a.cov, "covariance matrix CSV");
  app.add_option("--bounds", a.bounds, "thresholds CSV (s)");
  app.add_option("--bounds2", a.bounds2, "second thresholds CSV (t)");
  app.add_option("--polygon", a.polygon, "polygon vertex CSV (x,y rows)");
  app.add_option("--polygon2", a.polygon2, "second polygon CSV");
  app.add_option("--hpoly", a.hpoly, "H-polytope CSV (normal..., offset rows)");
  app.add_option("--hpoly2", a.hpoly2, "second H-polytope CSV");
  app.add_option("--budget", a.budget, "lattice points per randomization (qmc) or samples (mc)");
  app.add_option("--seed", a.seed, "run seed")->capture_default_str();
  app.add_option("--replicates", a.replicates, "QMC randomizations R")->capture_default_str()->check(CLI::Range(2, 1000));
  app.add_option("--engine", a.engine, "polygon measure engine: auto, qmc, mc, oracle")->capture_default_str();
  app.add_flag("--json", a.json, "emit JSON");

  auto* measure = app.add_subcommand("measure", "Gaussian measure of a band, polygon or H-polytope");

  auto* check = app.add_subcommand("check", "run one inequality checker");
  check->add_option("name", a.check_name, "sidak | refined | royen | strong-bands | strong-2d | slab | unconditional | tehranchi | lattice | rogers-shephard")
      ->required();
  check->add_option("--direction", a.direction, "slab normal, comma separated")->capture_default_str();
  check->add_option("--width", a.width, "slab half-width")->capture_default_str();
  check->add_option("--a", a.a, "widening for refined (may be inf)")->capture_default_str();
  check->add_option("--index", a.index, "widened coordinate (1-based)")->capture_default_str();
  check->add_option("--split", a.split, "Royen split k (default n/2)");
  check->add_option("--s", a.s, "Tehranchi s")->capture_default_str();
  check->add_option("--t", a.t, "Tehranchi t")->capture_default_str();
  check->add_option("--samples", a.samples, "lattice premise pairs")->capture_default_str();

  auto* counter = app.add_subcommand("counterexample", "reproduce the convex-hull counterexample");
  counter->add_option("which", a.counterexample, "hull")->capture_default_str();
  counter->add_option("--N", a.n, "rectangle aspect N > 0")->capture_default_str();

  auto* search = app.add_subcommand("search", "Nelder-Mead search for small margins");
  search->add_option("--family", a.family, "hull-rectangles | rotated-boxes | band-triples")->capture_default_str();
  search->add_option("--steps", a.steps, "simplex updates per restart")->capture_default_str();

  auto* tensor = app.add_subcommand("tensorize", "product-model ratio against base ratio^N");
  tensor->add_option("--N", a.copies, "2 or 3")->capture_default_str()->check(CLI::IsMember({2, 3}));

  auto* correct = app.add_subcommand("correct", "refined Sidak simultaneous confidence level");
  correct->add_option("--alpha", a.alpha, "significance level")->capture_default_str();
  correct->add_flag("--critical-value", a.critical, "also invert for the improved critical value");
  correct->add_flag("--table", a.table, "print a numeric table instead of JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*measure) return run_measure(a);
    if (*check) return run_check(a);
    if (*counter) return run_counterexample(a);
    if (*search) return run_search(a);
    if (*tensor) return run_tensorize(a);
    if (*correct) return run_correct(a);
  } catch (const UsageError& e) {
    std::cerr << "gcilab: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "gcilab: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
