#include "toric/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "toric/errors.hpp"
#include "toric/heights.hpp"
#include "toric/json_io.hpp"
#include "toric/mamixint.hpp"

namespace toric::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw SchemaError(what); }

const json& need(const json& job, const char* key) {
  auto it = job.find(key);
  if (it == job.end()) fail(std::string("job is missing '") + key + "'");
  return *it;
}

struct Outcome {
  json result;
  bool exact = true;
  double err = 0.0;
  json numeric;
  std::string method;
};

Outcome of_value(const Value& v, int bits, std::string method) {
  Outcome o;
  o.result = io::value_to_json(v);
  o.exact = v.is_exact();
  o.err = v.error();
  Approx a = v.to_approx(bits);
  o.numeric = json{{"value", a.value}, {"err", a.err}};
  o.method = std::move(method);
  return o;
}

Outcome of_rational(const Rational& q, std::string method) {
  Outcome o;
  o.result = io::rational_to_json(q);
  o.numeric = json{{"value", q.get_d()}, {"err", 0.0}};
  o.method = std::move(method);
  return o;
}

std::vector<MetrizedToricDivisor> divisors(const json& job) {
  const json& ds = need(job, "divisors");
  if (!ds.is_array()) fail("'divisors' must be an array");
  std::vector<MetrizedToricDivisor> out;
  for (const auto& d : ds) out.push_back(io::divisor_from_json(d));
  return out;
}

HeightSpec height_spec(const json& job, int bits) {
  HeightSpec s;
  if (job.contains("quadrature")) s.quadrature = io::quadrature_from_json(job["quadrature"], bits);
  else s.quadrature.precision_bits = bits;
  if (job.contains("grid")) {
    const json& g = job["grid"];
    if (g.contains("k")) s.grid.k = g["k"].get<int>();
    if (g.contains("radius")) s.grid.radius = io::rational_from_json(g["radius"]);
    if (s.grid.k < 1 || (s.grid.radius && *s.grid.radius <= 0)) fail("grid needs k >= 1 and radius > 0");
  }
  if (job.contains("fs_k")) s.fs_k = job["fs_k"].get<int>();
  if (s.fs_k < 1) fail("fs_k must be positive");
  return s;
}

Outcome height(const json& job, int bits) {
  const std::string kind = job.value("kind", "global");
  HeightSpec spec = height_spec(job, bits);
  HeightReport r;
  if (kind == "projection") {
    const json& mj = need(job, "m");
    auto ds = divisors(job);
    r = binomial_height_via_projection(io::lattice_point_from_json(mj, static_cast<int>(mj.size())), ds, spec);
  } else {
    LaurentPoly f = io::laurent_from_json(need(job, "poly"));
    if (kind == "global") {
      r = global_height(f, divisors(job), spec);
    } else if (kind == "canonical") {
      r = canonical_height(f, divisors(job), spec);
    } else if (kind == "rho") {
      r = rho_height(f, spec);
    } else if (kind == "fs") {
      r = fs_height(f, spec);
    } else if (kind == "local") {
      PlaceQ v = io::place_from_json(need(job, "place"));
      auto ds = divisors(job);
      Outcome o = of_value(toric_local_height(f, ds, v, spec), bits, "local");
      return o;
    } else {
      fail("unknown height kind '" + kind + "'");
    }
  }
  Outcome o = of_value(r.total, bits, kind);
  o.result = io::report_to_json(r);
  return o;
}

Outcome dispatch(const std::string& command, const json& job, int bits) {
  if (command == "degree") {
    LaurentPoly f = io::laurent_from_json(need(job, "poly"));
    return of_rational(degree(f, divisors(job)), "mixed-volume");
  }
  if (command == "mahler") {
    LaurentPoly f = io::laurent_from_json(need(job, "poly"));
    QuadratureSpec q = io::quadrature_from_json(job.value("quadrature", json()), bits);
    if (auto j = mahler_jensen(f)) return of_value(*j, bits, j->is_exact() ? "exact-path-univariate" : "jensen");
    return of_value(mahler_measure(f, q), bits, f.size() <= 2 ? "closed-form" : "quadrature");
  }
  if (command == "ronkin-eval") {
    LaurentPoly f = io::laurent_from_json(need(job, "poly"));
    PlaceQ v = job.contains("place") ? io::place_from_json(job["place"]) : PlaceQ::arch();
    QPoint u = io::qpoint_from_json(need(job, "u"), f.rank());
    QuadratureSpec q = io::quadrature_from_json(job.value("quadrature", json()), bits);
    std::string method = !v.is_arch() ? "tropical" : f.size() <= 2 ? "closed-form" : "quadrature";
    return of_value(ronkin(f, v, u, q), bits, method);
  }
  if (command == "mixed-volume") {
    const json& ps = need(job, "polytopes");
    if (!ps.is_array() || ps.empty()) fail("'polytopes' must be a non-empty array");
    std::vector<RationalPolytope> polys;
    for (const auto& p : ps) polys.push_back(io::polytope_from_json(p));
    return of_rational(mixed_volume(polys), "inclusion-exclusion");
  }
  if (command == "mixed-integral") {
    const json& fs = need(job, "functions");
    if (!fs.is_array() || fs.empty()) fail("'functions' must be a non-empty array");
    std::vector<ConcaveFn> gs;
    for (const auto& g : fs) gs.push_back(io::concave_from_json(g));
    const std::string method = job.value("method", "definition");
    if (method == "definition") return of_value(mixed_integral(gs, Execution::parallel), bits, method);
    if (method == "recursive") return of_value(mixed_integral_recursive(gs), bits, method);
    if (method == "both") {
      Value a = mixed_integral(gs, Execution::parallel), b = mixed_integral_recursive(gs);
      if (a.center() != b.center()) throw InvariantViolation("definitional and recursive mixed integrals differ");
      return of_value(a, bits, method);
    }
    fail("method must be definition, recursive or both");
  }
  if (command == "height") return height(job, bits);
  fail("unknown command '" + command + "'");
}

json diagnostic(const char* kind, const std::string& message, int code) {
  return json{{"error", json{{"kind", kind}, {"message", message}}}, {"exit_code", code}};
}

const char* kind_of(ExitCode code) {
  switch (code) {
    case schema: return "schema";
    case precision: return "precision";
    case invariant: return "invariant";
    default: return "internal";
  }
}

}  // namespace

json run_job(const json& job, const RunSettings& settings) {
  if (!job.is_object()) fail("a job is a JSON object");
  if (settings.precision_bits < 53) fail("precision bits must be >= 53");
  if (settings.threads > 0) omp_set_num_threads(settings.threads);
  const std::string command = need(job, "command").get<std::string>();
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = dispatch(command, job, settings.precision_bits);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  json env{{"tool", kToolName},
           {"version", kVersion},
           {"command", command},
           {"result", o.result},
           {"exactness", o.exact ? "exact" : "approx"},
           {"method", o.method},
           {"numeric", o.numeric},
           {"input", job},
           {"settings", json{{"threads", settings.threads}, {"precision_bits", settings.precision_bits}}},
           {"timing_ms", ms}};
  if (!o.exact) env["error"] = o.err;
  return env;
}

ExitCode exit_code_of(const std::exception& e) {
  if (dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const nlohmann::json::exception*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e))
    return schema;
  if (dynamic_cast<const PrecisionExhausted*>(&e)) return precision;
  if (dynamic_cast<const InvariantViolation*>(&e)) return invariant;
  return failure;
}

int resolve_precision(int flag_bits, const char* env_value) {
  if (flag_bits > 0) return flag_bits;
  if (env_value && *env_value) {
    char* end = nullptr;
    long b = std::strtol(env_value, &end, 10);
    if (*end != '\0' || b < 53 || b > kPrecisionCeilingBits)
      fail(std::string("TORIC_HEIGHTS_PRECISION must be an integer in [53, 4096], got '") + env_value + "'");
    return static_cast<int>(b);
  }
  return kDefaultPrecisionBits;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heights of toric hypersurfaces over Q", kToolName};
  std::string command, job_path, out_path;
  int threads = 0, bits = 0;
  app.add_option("command", command, "degree | mahler | ronkin-eval | mixed-volume | mixed-integral | height");
  app.add_option("--job", job_path, "JSON job file")->required();
  app.add_option("--out", out_path, "write the report here instead of standard output");
  app.add_option("--threads", threads, "OpenMP threads")->check(CLI::NonNegativeNumber);
  app.add_option("--precision-bits", bits, "working precision for numeric output")->check(CLI::Range(53, kPrecisionCeilingBits));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return ok;
    }
    err << diagnostic("usage", e.what(), schema).dump() << '\n';
    return schema;
  }

  try {
    RunSettings settings;
    settings.threads = threads;
    settings.precision_bits = resolve_precision(bits, std::getenv("TORIC_HEIGHTS_PRECISION"));
    std::ifstream in(job_path);
    if (!in) fail("cannot read job file '" + job_path + "'");
    json job;
    try {
      job = json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("job is not valid JSON: ") + e.what());
    }
    if (!command.empty()) {
      if (!job.is_object()) fail("a job is a JSON object");
      if (job.contains("command") && job["command"] != command)
        fail("command '" + command + "' disagrees with the job's '" + job["command"].get<std::string>() + "'");
      job["command"] = command;
    }
    json report = run_job(job, settings);
    if (out_path.empty()) {
      out << report.dump(2) << '\n';
    } else {
      std::ofstream o(out_path);
      if (!o) throw Error("cannot write '" + out_path + "'");
      o << report.dump(2) << '\n';
    }
    return ok;
  } catch (const std::exception& e) {
    ExitCode code = exit_code_of(e);
    err << diagnostic(kind_of(code), e.what(), code).dump() << '\n';
    return code;
  }
}

}  // namespace toric::cli
