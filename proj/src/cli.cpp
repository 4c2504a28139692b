#include "nlf/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlf/forms.hpp"
#include "nlf/parallel.hpp"
#include "nlf/solver.hpp"
#include "nlf/spectral.hpp"

namespace nlf {

using nlohmann::json;

namespace {

constexpr std::pair<Task, const char*> kTaskNames[] = {
    {Task::CheckConditions, "check-conditions"},
    {Task::Compare, "compare"},
    {Task::CheckB, "check-b"},
    {Task::Spectral, "spectral"},
    {Task::Solve, "solve"},
    {Task::Holder, "holder"},
    {Task::ThornDemo, "thorn-demo"},
};

void allow_only(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      throw SchemaError(where + ": unknown field '" + it.key() + "'");
  }
}

double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
  if (!j[key].is_number()) throw SchemaError(where + ": field '" + key + "' must be a number");
  return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? get_number(j, key, where) : fallback;
}

int int_or(const json& j, const char* key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw SchemaError(where + ": field '" + key + "' must be an integer");
  return j[key].get<int>();
}

Vec vec_or(const json& j, const char* key, const Vec& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& a = j[key];
  if (a.is_number()) return {a.get<double>(), 0.0, 0.0};
  if (!a.is_array() || a.empty() || a.size() > 3)
    throw SchemaError(where + ": field '" + key + "' must be a number or an array of 1 to 3 numbers");
  Vec v{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw SchemaError(where + ": field '" + key + "' must hold numbers");
    v[i] = a[i].get<double>();
  }
  return v;
}

std::vector<double> list_or(const json& j, const char* key, std::vector<double> fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_array() || j[key].empty()) throw SchemaError(where + ": field '" + key + "' must be a nonempty array");
  std::vector<double> out;
  for (const auto& x : j[key]) {
    if (!x.is_number()) throw SchemaError(where + ": field '" + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

QuadratureBudget parse_budget(const json& j, QuadratureBudget b) {
  const std::string where = "budget";
  if (!j.is_object()) throw SchemaError("budget must be an object");
  allow_only(j, {"rel_tol", "max_cells", "annulus_base", "outer_panels", "outer_angles", "angular_order", "max_shells"},
             where);
  b.rel_tol = number_or(j, "rel_tol", b.rel_tol, where);
  if (j.contains("max_cells")) {
    if (!j["max_cells"].is_number_integer()) throw SchemaError("budget: field 'max_cells' must be an integer");
    b.max_cells = j["max_cells"].get<long>();
  }
  b.annulus_base = number_or(j, "annulus_base", b.annulus_base, where);
  b.outer_panels = int_or(j, "outer_panels", b.outer_panels, where);
  b.outer_angles = int_or(j, "outer_angles", b.outer_angles, where);
  b.angular_order = int_or(j, "angular_order", b.angular_order, where);
  b.max_shells = int_or(j, "max_shells", b.max_shells, where);
  try {
    b.validate();
  } catch (const DomainError& e) {
    throw SchemaError(std::string("budget: ") + e.what());
  }
  return b;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto path = (std::filesystem::path(dir) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  return path;
}

std::string write_json(const std::string& dir, const std::string& name, const json& j) {
  return write_file(dir, name, j.dump(2) + "\n");
}

json budget_json(const QuadratureBudget& b) {
  return {{"rel_tol", b.rel_tol},           {"max_cells", b.max_cells},         {"annulus_base", b.annulus_base},
          {"outer_panels", b.outer_panels}, {"outer_angles", b.outer_angles}, {"angular_order", b.angular_order},
          {"max_shells", b.max_shells}};
}

json header(const ExperimentConfig& c) {
  json h;
  h["schema"] = kSchemaVersion;
  h["task"] = to_string(c.task);
  if (!c.kernel_json.is_null()) h["kernel"] = c.kernel_json;
  h["alpha"] = c.alpha;
  h["seed"] = c.seed;
  h["budget"] = budget_json(c.budget);
  h["params"] = c.params;
  return h;
}

const KernelSpec& need_kernel(const ExperimentConfig& c) {
  if (!c.kernel) throw SchemaError(std::string(to_string(c.task)) + ": a kernel is required");
  return *c.kernel;
}

RunResult run_check_conditions(const ExperimentConfig& c) {
  const auto& k = need_kernel(c);
  const std::string w = "params";
  const int d = k.dim;
  const auto radii = dyadic_radii(int_or(c.params, "k_lo", 1, w), int_or(c.params, "k_hi", 8, w));
  std::vector<ConditionReport> reps;
  reps.push_back(check_U0(k.upper, d, c.budget));
  reps.push_back(check_U1(k.upper, c.alpha, d, radii, c.budget));
  reps.push_back(check_U1prime(k.upper, c.alpha, d, radii, c.budget));
  const int n_dir = int_or(c.params, "directions", d == 1 ? 1 : 8, w);
  reps.push_back(check_Aprime(k.lower, c.alpha, d, radii, sample_directions(d, n_dir), c.budget));
  if (c.params.contains("L1")) {
    const auto& l1 = c.params["L1"];
    L1Options opt;
    opt.cells = int_or(l1, "cells", opt.cells, "params.L1");
    opt.n_min = int_or(l1, "n_min", opt.n_min, "params.L1");
    reps.push_back(check_L1(k.lower, c.alpha, d, number_or(l1, "a", 2.0, "params.L1"),
                            int_or(l1, "n_max", 6, "params.L1"), opt));
  }
  RunResult r;
  json out = header(c);
  std::vector<Verdict> vs;
  for (const auto& rep : reps) {
    out["reports"].push_back(to_json(rep));
    vs.push_back(rep.verdict);
  }
  const Verdict v = combine(vs);
  out["verdict"] = to_string(v);
  r.files.push_back(write_json(c.out_dir, "check-conditions.json", out));
  r.summary = out;
  r.exit_code = exit_code(v);
  return r;
}

RunResult run_compare(const ExperimentConfig& c) {
  const auto& k = need_kernel(c);
  const std::string w = "params";
  const Ball B(vec_or(c.params, "center", {}, w), number_or(c.params, "radius", 0.5, w));
  const int count = int_or(c.params, "count", 10, w);
  if (count < 1) throw SchemaError("params: count must be positive");
  const bool mixtures = c.params.value("mixtures", true);
  const auto fam = bump_family(k.dim, B, count, c.seed, mixtures);
  const auto rep = comparability_scan(k, c.alpha, B, fam, c.budget);
  RunResult r;
  json out = header(c);
  out["report"] = to_json(rep);
  out["verdict"] = to_string(rep.verdict);
  r.files.push_back(write_json(c.out_dir, "compare.json", out));
  r.files.push_back(write_file(c.out_dir, "ratio_table.csv", ratio_table_csv(rep)));
  r.summary = out;
  r.exit_code = exit_code(rep.verdict);
  return r;
}

RunResult run_check_b(const ExperimentConfig& c) {
  const auto& k = need_kernel(c);
  const std::string w = "params";
  const int d = k.dim;
  const double R = number_or(c.params, "R", 0.5, w);
  std::vector<double> rhos = list_or(c.params, "rho", dyadic_radii(2, 6), w);
  const auto radii = dyadic_radii(1, 8);
  const double C0 = check_U0(k.upper, d, c.budget).empirical_constant;
  const double C1 = check_U1(k.upper, c.alpha, d, radii, c.budget).empirical_constant;
  const double c4 = u1prime_constant(C0, C1, c.alpha);
  RunResult r;
  json out = header(c);
  out["C0"] = C0;
  out["C1"] = C1;
  out["C4"] = c4;
  out["bound"] = std::pow(2.0, c.alpha) * c4;
  std::vector<Verdict> vs;
  for (double rho : rhos) {
    const auto rep = check_B(k, c.alpha, R, rho, {}, c.budget, c4);
    out["reports"].push_back(to_json(rep));
    vs.push_back(rep.verdict);
  }
  const Verdict v = combine(vs);
  out["verdict"] = to_string(v);
  r.files.push_back(write_json(c.out_dir, "check-b.json", out));
  r.summary = out;
  r.exit_code = exit_code(v);
  return r;
}

RunResult run_spectral(const ExperimentConfig& c) {
  const auto& k = need_kernel(c);
  const std::string w = "params";
  const double r0 = number_or(c.params, "r0", 1.0, w);
  const int levels = int_or(c.params, "levels", 10, w);
  std::vector<Vec> xis;
  for (double t : list_or(c.params, "xi", {0.5, 1.0, 2.0, 4.0}, w)) xis.push_back({t, 0.0, 0.0});
  const auto samples = sample_multiplier(k.lower, xis, c.budget);
  const auto rep = characterization_check(k.lower, c.alpha, r0, c.budget, {}, levels);
  RunResult r;
  json out = header(c);
  out["characterization"] = to_json(rep);
  out["verdict"] = to_string(rep.verdict);
  r.files.push_back(write_json(c.out_dir, "spectral.json", out));
  r.files.push_back(write_file(c.out_dir, "multiplier.csv", multiplier_csv(samples)));
  r.summary = out;
  r.exit_code = exit_code(rep.verdict);
  return r;
}

std::function<double(const Vec&)> exterior_data(const json& j) {
  const std::string w = "params.data";
  if (!j.is_object()) throw SchemaError("params.data must be an object");
  const std::string type = j.value("type", "");
  if (type == "bump") {
    allow_only(j, {"type", "center", "radius", "power", "height"}, w);
    const Vec c = vec_or(j, "center", {2.0, 0.0, 0.0}, w);
    const double s = number_or(j, "radius", 0.8, w);
    const int m = int_or(j, "power", 3, w);
    const double a = number_or(j, "height", 1.0, w);
    if (!(s > 0.0) || m < 1) throw SchemaError("params.data: bump needs radius > 0 and power >= 1");
    return [=](const Vec& y) {
      const double t = 1.0 - dot(y - c, y - c) / (s * s);
      return t > 0.0 ? a * std::pow(t, m) : 0.0;
    };
  }
  if (type == "constant") {
    allow_only(j, {"type", "value"}, w);
    const double v = get_number(j, "value", w);
    return [v](const Vec&) { return v; };
  }
  if (type == "clamp") {
    allow_only(j, {"type", "bound"}, w);
    const double b = number_or(j, "bound", 3.0, w);
    return [b](const Vec& y) { return std::clamp(y[0], -b, b); };
  }
  throw SchemaError("params.data: type must be bump, constant or clamp");
}

struct SolveSetup {
  StiffnessOperator op;
  DiscreteSolution s;
  double asymmetry = 0.0;
};

SolveSetup solve_from(const ExperimentConfig& c) {
  const auto& k = need_kernel(c);
  const std::string w = "params";
  const double radius = number_or(c.params, "r", 1.0, w);
  const double h = number_or(c.params, "h", radius / 128.0, w);
  const double R = number_or(c.params, "collar", 2.0 * radius, w);
  const Vec x0 = vec_or(c.params, "center", {}, w);
  const auto g = exterior_data(c.params.value("data", json{{"type", "bump"}}));
  SolveSetup out{assemble(k, x0, radius, h, R), {}, 0.0};
  out.asymmetry = (out.op.A - out.op.A.transpose()).cwiseAbs().maxCoeff();
  out.s = solve_dirichlet(out.op, g);
  if (std::isfinite(c.alpha)) out.s.alpha = c.alpha;
  return out;
}

json solve_json(const SolveSetup& st) {
  const auto& s = st.s;
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < s.interior.size(); ++i) {
    lo = std::min(lo, s.value(i));
    hi = std::max(hi, s.value(i));
  }
  return {{"unknowns", s.interior.size()}, {"h", s.h},
          {"radius", s.radius},            {"collar", s.collar_R},
          {"residual", s.residual},        {"asymmetry", st.asymmetry},
          {"data_min", s.data_min},        {"data_max", s.data_max},
          {"solution_min", lo},            {"solution_max", hi},
          {"maximum_principle", s.maximum_principle_holds()}};
}

RunResult run_solve(const ExperimentConfig& c) {
  const auto st = solve_from(c);
  const bool ok = st.s.maximum_principle_holds() && st.asymmetry == 0.0;
  const Verdict v = ok ? Verdict::Pass : Verdict::Fail;
  RunResult r;
  json out = header(c);
  out["solution"] = solve_json(st);
  out["verdict"] = to_string(v);
  r.files.push_back(write_json(c.out_dir, "solve.json", out));
  r.files.push_back(write_file(c.out_dir, "solution.csv", solution_csv(st.s)));
  r.summary = out;
  r.exit_code = exit_code(v);
  return r;
}

RunResult run_holder(const ExperimentConfig& c) {
  const auto st = solve_from(c);
  const std::string w = "params";
  OscillationSchedule sch;
  sch.d = st.s.dim;
  sch.theta = number_or(c.params, "theta", sch.theta, w);
  sch.p = number_or(c.params, "p", sch.p, w);
  sch.c1 = number_or(c.params, "c1", sch.c1, w);
  if (c.params.contains("c2")) sch.c2_override = get_number(c.params, "c2", w);
  const auto rep = holder_estimate(st.s, sch);
  Verdict v = Verdict::Pass;
  if (!rep.certified || !(rep.beta_fit > 0.0)) v = Verdict::Fail;
  else if (!rep.monotone) v = Verdict::Inconclusive;
  RunResult r;
  json out = header(c);
  out["solution"] = solve_json(st);
  out["schedule"] = {{"theta", sch.theta}, {"p", sch.p}, {"c1", sch.c1}, {"d", sch.d},
                     {"c2", sch.c2()},      {"kappa", sch.kappa()}, {"beta_cap", sch.beta_cap()}};
  out["holder"] = to_json(rep);
  if (st.s.data_min >= 0.0) out["harnack"] = to_json(weak_harnack_audit(st.s, number_or(c.params, "p0", 1.0, w), c.budget));
  out["verdict"] = to_string(v);
  r.files.push_back(write_json(c.out_dir, "holder.json", out));
  r.files.push_back(write_file(c.out_dir, "solution.csv", solution_csv(st.s)));
  r.summary = out;
  r.exit_code = exit_code(v);
  return r;
}

RunResult run_thorn_demo(const ExperimentConfig& c) {
  const std::string w = "params";
  const double b = get_number(c.params, "b", w);
  if (!std::isfinite(c.alpha)) throw SchemaError("thorn-demo: alpha is required");
  const ThornParams tp(b, Alpha(c.alpha));
  const int n = int_or(c.params, "grid", 200, w);
  if (n < 8) throw SchemaError("params: grid must be at least 8");

  std::ostringstream csv;
  csv << "x1,x2,in_gamma,in_P0,in_P1\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec z{-1.0 + (i + 0.5) * 2.0 / n, -1.0 + (j + 0.5) * 2.0 / n, 0.0};
      const bool gamma = norm(z) < 1.0 && in_thorn_region(z, b);
      csv << num(z[0]) << ',' << num(z[1]) << ',' << gamma << ',' << in_thorn_P(z, 0) << ',' << in_thorn_P(z, 1)
          << '\n';
    }
  }
  const auto cert = thorn_certificate(tp, number_or(c.params, "R", 0.5, w), c.budget, int_or(c.params, "n_max", 3, w),
                                      int_or(c.params, "family_size", 2, w), c.seed);
  RunResult r;
  json out = header(c);
  out["certificate"] = to_json(cert);
  out["verdict"] = to_string(cert.verdict);
  r.files.push_back(write_file(c.out_dir, "thorn_support.csv", csv.str()));
  r.files.push_back(write_json(c.out_dir, "thorn_certificate.json", out));
  r.summary = out;
  r.exit_code = exit_code(cert.verdict);
  return r;
}

}  // namespace

const char* to_string(Task t) {
  for (const auto& [task, name] : kTaskNames)
    if (task == t) return name;
  return "?";
}

Task task_from_string(const std::string& s) {
  for (const auto& [task, name] : kTaskNames)
    if (s == name) return task;
  throw SchemaError("unknown task '" + s + "'");
}

KernelSpec kernel_from_json(const json& j) {
  if (!j.is_object() || j.empty()) throw SchemaError("kernel: empty specification");
  allow_only(j, {"family", "d", "alpha", "params"}, "kernel");
  if (!j.contains("family") || !j["family"].is_string()) throw SchemaError("kernel: missing string field 'family'");
  if (!j.contains("d") || !j["d"].is_number_integer()) throw SchemaError("kernel: missing integer field 'd'");
  const std::string family = j["family"].get<std::string>();
  const int d = j["d"].get<int>();
  if (d < 1 || d > 3) throw SchemaError("kernel: d must be 1, 2 or 3");
  const double alpha = get_number(j, "alpha", "kernel");
  if (!(alpha > 0.0 && alpha < 2.0)) throw SchemaError("kernel: alpha must lie in (0,2)");
  const json params = j.value("params", json::object());
  if (!params.is_object()) throw SchemaError("kernel: params must be an object");
  const std::string w = "kernel.params";

  if (family == "fractional") {
    allow_only(params, {"c"}, w);
    const double c = number_or(params, "c", 1.0, w);
    if (!(c > 0.0 && c <= 1.0)) throw SchemaError("kernel.params: c must lie in (0,1]");
    return make_fractional_kernel(d, alpha, c);
  }
  if (family == "masked") {
    allow_only(params, {"base"}, w);
    if (!params.contains("base")) return make_masked_kernel(make_fractional_kernel(d, alpha));
    const auto base = kernel_from_json(params["base"]);
    if (base.dim != d) throw SchemaError("kernel.params: base kernel dimension differs");
    return make_masked_kernel(base);
  }
  if (family == "thorn") {
    allow_only(params, {"b"}, w);
    if (d != 2) throw SchemaError("kernel: the thorn family lives in d = 2");
    const double b = get_number(params, "b", w);
    if (!(b > 0.0 && b < 1.0)) throw SchemaError("kernel.params: b must lie in (0,1)");
    return make_thorn_kernel(ThornParams(b, Alpha(alpha)));
  }
  if (family == "table") {
    allow_only(params, {"points"}, w);
    if (!params.contains("points") || !params["points"].is_array() || params["points"].size() < 2)
      throw SchemaError("kernel.params: points must hold at least two [r, value] pairs");
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : params["points"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw SchemaError("kernel.params: each point must be [r, value]");
      const double r = p[0].get<double>(), v = p[1].get<double>();
      if (!(r > 0.0) || !(v > 0.0)) throw SchemaError("kernel.params: points need r > 0 and value > 0");
      if (!pts.empty() && !(r > pts.back().first)) throw SchemaError("kernel.params: r must increase strictly");
      pts.emplace_back(r, v);
    }
    return kernel_from_profile(table_profile(d, std::move(pts)), alpha);
  }
  throw SchemaError("kernel: unknown family '" + family + "'");
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  allow_only(j, {"schema", "task", "kernel", "alpha", "budget", "outputs", "seed", "threads", "params"}, "config");
  if (!j.contains("schema") || !j["schema"].is_number_integer() || j["schema"].get<int>() != kSchemaVersion)
    throw SchemaError("config: 'schema' must be " + std::to_string(kSchemaVersion));
  if (!j.contains("task") || !j["task"].is_string()) throw SchemaError("config: missing string field 'task'");

  ExperimentConfig c;
  c.task = task_from_string(j["task"].get<std::string>());
  if (j.contains("kernel")) {
    c.kernel_json = j["kernel"];
    c.kernel = kernel_from_json(j["kernel"]);
    c.alpha = c.kernel->alpha;
  } else if (c.task != Task::ThornDemo) {
    throw SchemaError(std::string(to_string(c.task)) + ": missing field 'kernel'");
  }
  if (j.contains("alpha")) {
    c.alpha = get_number(j, "alpha", "config");
    if (!(c.alpha > 0.0 && c.alpha < 2.0)) throw SchemaError("config: alpha must lie in (0,2)");
  }

  const int d = c.kernel ? c.kernel->dim : 2;
  if (d >= 2) {
    c.budget.rel_tol = 1e-2;
    c.budget.angular_order = 6;
  } else {
    c.budget.rel_tol = 1e-4;
  }
  if (j.contains("budget")) c.budget = parse_budget(j["budget"], c.budget);

  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    if (!o.is_object()) throw SchemaError("outputs must be an object");
    allow_only(o, {"dir"}, "outputs");
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) throw SchemaError("outputs: 'dir' must be a string");
      c.out_dir = o["dir"].get<std::string>();
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) throw SchemaError("config: seed must be a nonnegative integer");
    c.seed = j["seed"].get<unsigned>();
  }
  c.threads = int_or(j, "threads", 1, "config");
  if (c.threads < 1) throw SchemaError("config: threads must be positive");
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw SchemaError("config: params must be an object");
    c.params = j["params"];
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SchemaError("cannot read config '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Fail: return 1;
    case Verdict::Inconclusive: return 2;
  }
  return 2;
}

Verdict combine(const std::vector<Verdict>& vs) {
  if (std::any_of(vs.begin(), vs.end(), [](Verdict v) { return v == Verdict::Fail; })) return Verdict::Fail;
  if (std::any_of(vs.begin(), vs.end(), [](Verdict v) { return v == Verdict::Inconclusive; }))
    return Verdict::Inconclusive;
  return Verdict::Pass;
}

RunResult run(const ExperimentConfig& config) {
  set_threads(config.threads);
  RunResult r;
  try {
    switch (config.task) {
      case Task::CheckConditions: return run_check_conditions(config);
      case Task::Compare: return run_compare(config);
      case Task::CheckB: return run_check_b(config);
      case Task::Spectral: return run_spectral(config);
      case Task::Solve: return run_solve(config);
      case Task::Holder: return run_holder(config);
      case Task::ThornDemo: return run_thorn_demo(config);
    }
  } catch (const SchemaError& e) {
    r.exit_code = 3;
    r.summary = {{"error", e.what()}};
  } catch (const DomainError& e) {
    r.exit_code = 3;
    r.summary = {{"error", e.what()}};
  } catch (const json::exception& e) {
    r.exit_code = 3;
    r.summary = {{"error", e.what()}};
  } catch (const NumericalError& e) {
    r.exit_code = 2;
    r.summary = {{"error", e.what()}};
  }
  return r;
}

}  // namespace nlf
