#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "nlf/forms.hpp"
#include "nlf/parallel.hpp"
#include "nlf/quadrature.hpp"

namespace nlf {

namespace {

void sphere_breaks(std::vector<double>& radial, const Vec& x, const Ball& b) {
  const double dx = norm(x - b.center);
  radial.push_back(std::abs(dx - b.radius));
  radial.push_back(dx + b.radius);
}

// Breaks of y -> u(y) seen from x: support sphere and declared kinks.
std::vector<Ball> function_spheres(const TestFunction& u) {
  std::vector<Ball> s = u.kinks;
  if (u.support) s.push_back(*u.support);
  if (u.plateau) s.push_back(*u.plateau);
  return s;
}

Hints inner_hints(const Vec& x, const std::vector<KernelSpec>& ks, const std::vector<Ball>& spheres) {
  Hints h;
  for (const auto& k : ks) {
    if (k.radial_breaks) {
      auto r = k.radial_breaks(x);
      h.radial.insert(h.radial.end(), r.begin(), r.end());
    }
  }
  for (const auto& b : spheres) sphere_breaks(h.radial, x, b);
  double cap = 0.0;
  for (const auto& k : ks) cap = std::max(cap, k.support_radius);
  h.cap = cap;
  const int d = ks.front().dim;
  if (d == 2) {
    std::vector<std::function<std::vector<double>(const Vec&, double)>> kab;
    for (const auto& k : ks)
      if (k.angular_breaks) kab.push_back(k.angular_breaks);
    h.angular = [x, kab, spheres](double rho) {
      std::vector<double> out;
      for (const auto& f : kab) {
        auto a = f(x, rho);
        out.insert(out.end(), a.begin(), a.end());
      }
      for (const auto& b : spheres) circle_crossings(out, rho, b.center - x, b.radius);
      return out;
    };
  }
  return h;
}

}  // namespace

KernelSpec reference_kernel(int d, double alpha) {
  return kernel_from_profile(power_profile(d, alpha * (2.0 - alpha), alpha), alpha);
}

std::vector<FormValue> double_form_integral(const TestFunction& u, const std::vector<KernelSpec>& kernels,
                                            const std::optional<Ball>& D, const QuadratureBudget& budget) {
  budget.validate();
  const int d = u.dim;
  const int nk = static_cast<int>(kernels.size());
  if (nk < 1 || 2 * nk > kMaxValues) throw DomainError("double_form_integral takes one to four kernels");
  if (d > 2) throw DomainError("double_form_integral supports d <= 2");
  for (const auto& k : kernels)
    if (k.dim != d) throw DomainError("kernel and function dimensions differ");
  if (!u.value) throw DomainError("test function has no evaluator");
  const auto S = u.working_support();
  if (!D && !S) throw DomainError("whole-space form needs a function with (effective) compact support");

  const Ball outer_ball = D ? *D : *S;
  const std::vector<Ball> spheres = function_spheres(u);
  QuadratureBudget inner_budget = budget;
  inner_budget.rel_tol = budget.rel_tol / 4.0;
  std::atomic<long> inner_evals{0};
  std::atomic<bool> inner_exhausted{false};

  auto outer = [&](const Vec& x, Values& out) {
    const double ux = u(x);
    Hints h = inner_hints(x, kernels, spheres);
    if (u.plateau && u.plateau->contains(x)) h.floor = u.plateau->radius - norm(x - u.plateau->center);
    Integrand g;
    Region region;
    if (D) {
      region = Region::inside(*D);
      if (ux == 0.0 && u.support) h.nonzero_ball = u.support;
      g = [&, ux, x](const Vec& y, Values& v) {
        const double du = u(y) - ux;
        const double w = du * du;
        for (int j = 0; j < nk; ++j) v[j] = w == 0.0 ? 0.0 : w * kernels[static_cast<std::size_t>(j)](x, y);
      };
    } else {
      if (ux == 0.0) h.nonzero_ball = *S;
      const Ball s = *S;
      g = [&, ux, x, s](const Vec& y, Values& v) {
        double w;
        if (s.contains(y)) {
          const double du = u(y) - ux;
          w = du * du;
        } else {
          w = 2.0 * ux * ux;
        }
        for (int j = 0; j < nk; ++j) v[j] = w == 0.0 ? 0.0 : w * kernels[static_cast<std::size_t>(j)](x, y);
      };
      if (ux != 0.0) sphere_breaks(h.radial, x, s);
    }
    const MultiResult r = integrate_about(x, d, region, nk, g, h, inner_budget);
    inner_evals += r.evals;
    if (r.exhausted) inner_exhausted = true;
    for (int j = 0; j < nk; ++j) {
      out[j] = r.value[j];
      out[nk + j] = r.error[j];
    }
  };

  Hints oh;
  oh.controlled = nk;
  for (const auto& b : spheres) sphere_breaks(oh.radial, outer_ball.center, b);
  if (d == 2) {
    const Vec c = outer_ball.center;
    oh.angular = [c, spheres](double rho) {
      std::vector<double> out;
      for (const auto& b : spheres) circle_crossings(out, rho, b.center - c, b.radius);
      return out;
    };
  }
  const MultiResult o =
      integrate_about(outer_ball.center, d, Region::inside(outer_ball), 2 * nk, outer, oh, budget);

  std::vector<FormValue> res(static_cast<std::size_t>(nk));
  for (int j = 0; j < nk; ++j) {
    auto& f = res[static_cast<std::size_t>(j)];
    f.value = o.value[j];
    f.error_estimate = o.error[j] + std::abs(o.value[nk + j]);
    f.budget_used = o.evals + inner_evals.load();
    f.exhausted = o.exhausted || inner_exhausted.load();
  }
  return res;
}

FormValue double_form_integral(const TestFunction& u, const KernelSpec& k, const Ball& D,
                               const QuadratureBudget& budget) {
  return double_form_integral(u, std::vector<KernelSpec>{k}, D, budget).front();
}

FormValue energy_form(const TestFunction& u, const KernelSpec& k, const Ball& D, const QuadratureBudget& budget) {
  return double_form_integral(u, k, D, budget);
}

FormValue reference_form(const TestFunction& u, double alpha, const Ball& D, const QuadratureBudget& budget) {
  return double_form_integral(u, reference_kernel(u.dim, alpha), D, budget);
}

FormValue energy_form_whole(const TestFunction& u, const KernelSpec& k, const QuadratureBudget& budget) {
  return double_form_integral(u, std::vector<KernelSpec>{k}, std::nullopt, budget).front();
}

FormValue reference_form_whole(const TestFunction& u, double alpha, const QuadratureBudget& budget) {
  return energy_form_whole(u, reference_kernel(u.dim, alpha), budget);
}

FormValue l2_norm_sq(const TestFunction& u, const std::optional<Ball>& D, const QuadratureBudget& budget) {
  if (!D && u.l2_norm_sq) return {*u.l2_norm_sq, 0.0, 0, false};
  std::optional<Ball> region = D;
  if (!region) region = u.working_support();
  if (!region) throw DomainError("L2 norm over R^d needs a compactly supported function");
  Hints h;
  const auto spheres = function_spheres(u);
  for (const auto& b : spheres) sphere_breaks(h.radial, region->center, b);
  if (u.dim == 2) {
    const Vec c = region->center;
    h.angular = [c, spheres](double rho) {
      std::vector<double> out;
      for (const auto& b : spheres) circle_crossings(out, rho, b.center - c, b.radius);
      return out;
    };
  }
  if (D && u.support) h.nonzero_ball = u.support;
  auto f = [&u](const Vec& y, Values& v) {
    const double a = u(y);
    v[0] = a * a;
  };
  return integrate_about(region->center, u.dim, Region::inside(*region), 1, f, h, budget).component(0);
}

FormValue sobolev_norm(const TestFunction& u, double alpha, const QuadratureBudget& budget) {
  const FormValue l2 = l2_norm_sq(u, std::nullopt, budget);
  const FormValue e = reference_form_whole(u, alpha, budget);
  FormValue out;
  const double a = std::sqrt(std::max(0.0, l2.value));
  const double b = std::sqrt(std::max(0.0, e.value));
  out.value = a + b;
  out.error_estimate = (a > 0.0 ? l2.error_estimate / (2.0 * a) : std::sqrt(l2.error_estimate)) +
                       (b > 0.0 ? e.error_estimate / (2.0 * b) : std::sqrt(e.error_estimate));
  out.budget_used = l2.budget_used + e.budget_used;
  out.exhausted = l2.exhausted || e.exhausted;
  return out;
}

ComparabilityReport comparability_scan(const KernelSpec& k, double alpha, const Ball& B,
                                       const std::vector<TestFunction>& family, const QuadratureBudget& budget) {
  if (!(B.radius < 1.0)) throw DomainError("comparability is tested on balls of radius < 1");
  if (family.empty()) throw DomainError("empty function family");
  const KernelSpec ref = reference_kernel(k.dim, alpha);
  ComparabilityReport rep;
  rep.rows.resize(family.size());
  std::vector<char> exhausted(family.size(), 0);
  parallel_for(family.size(), [&](std::size_t i) {
    const auto vals = double_form_integral(family[i], {k, ref}, B, budget);
    RatioRow& row = rep.rows[i];
    row.function_id = family[i].id;
    row.alpha = alpha;
    row.E_k = vals[0].value;
    row.E_alpha = vals[1].value;
    exhausted[i] = vals[0].exhausted || vals[1].exhausted;
    const double tiny = 1e-12 * std::max(1.0, std::abs(row.E_k));
    if (!(row.E_alpha > tiny) || !std::isfinite(row.E_k)) {
      row.excluded = true;
      row.ratio = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    row.ratio = row.E_k / row.E_alpha;
    row.err = std::abs(row.ratio) * (vals[0].error_estimate / std::max(std::abs(row.E_k), tiny) +
                                     vals[1].error_estimate / row.E_alpha);
  });
  int used = 0, excl = 0;
  bool any_exhausted = false;
  bool min_resolved = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    if (row.excluded) {
      ++excl;
      continue;
    }
    ++used;
    any_exhausted = any_exhausted || exhausted[i];
    if (row.ratio < rep.min_ratio) {
      rep.min_ratio = row.ratio;
      min_resolved = row.ratio - row.err > 0.0;
    }
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
  }
  std::ostringstream notes;
  if (excl) notes << excl << " function(s) excluded: reference form vanishes. ";
  if (used == 0) {
    rep.verdict = Verdict::Inconclusive;
    notes << "no usable functions";
  } else if (!(rep.min_ratio > 0.0) || !min_resolved) {
    rep.verdict = rep.min_ratio <= 0.0 || !any_exhausted ? Verdict::Fail : Verdict::Inconclusive;
    notes << "lower bracket not bounded away from 0";
  } else if (!std::isfinite(rep.max_ratio)) {
    rep.verdict = Verdict::Fail;
  } else {
    rep.verdict = any_exhausted ? Verdict::Inconclusive : Verdict::Pass;
    if (any_exhausted) notes << "quadrature budget exhausted";
  }
  rep.notes = notes.str();
  return rep;
}

std::string ratio_table_csv(const ComparabilityReport& r) {
  std::ostringstream os;
  os.precision(12);
  os << "function_id,alpha,E_k,E_alpha,ratio,err\n";
  for (const auto& row : r.rows)
    os << row.function_id << ',' << row.alpha << ',' << row.E_k << ',' << row.E_alpha << ','
       << (row.excluded ? std::string("excluded") : std::to_string(row.ratio)) << ',' << row.err << '\n';
  return os.str();
}

nlohmann::json to_json(const ComparabilityReport& r) {
  nlohmann::json j;
  j["verdict"] = to_string(r.verdict);
  j["min_ratio"] = r.min_ratio;
  j["max_ratio"] = r.max_ratio;
  j["notes"] = r.notes;
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json x;
    x["function_id"] = row.function_id;
    x["alpha"] = row.alpha;
    x["E_k"] = row.E_k;
    x["E_alpha"] = row.E_alpha;
    x["ratio"] = row.excluded ? nlohmann::json() : nlohmann::json(row.ratio);
    x["err"] = row.err;
    x["excluded"] = row.excluded;
    rows.push_back(x);
  }
  j["rows"] = rows;
  return j;
}

std::vector<Vec> default_cutoff_grid(int d, double R, double rho, int n, const Vec& center) {
  if (n < 4) throw DomainError("cutoff grid needs at least 4 ramp points");
  std::vector<double> radii;
  for (int i = 0; i < 6; ++i) radii.push_back(R * i / 6.0);
  for (int i = 0; i <= n; ++i) radii.push_back(R + rho * i / n);
  for (int i = 1; i <= 6; ++i) radii.push_back(R + rho + rho * std::pow(2.0, i - 3));
  std::vector<Vec> out;
  if (d == 1) {
    for (double r : radii) {
      out.push_back(center + Vec{r, 0, 0});
      if (r > 0.0) out.push_back(center + Vec{-r, 0, 0});
    }
  } else {
    const int rays = d == 2 ? 3 : 1;
    for (int a = 0; a < rays; ++a) {
      const double t = rays == 1 ? 0.0 : 0.25 * kPi * a / (rays - 1);
      const Vec e{std::cos(t), std::sin(t), 0};
      for (double r : radii) out.push_back(center + r * e);
    }
  }
  return out;
}

ConditionReport check_B(const KernelSpec& k, double alpha, double R, double rho, std::vector<Vec> x_grid,
                        const QuadratureBudget& budget, std::optional<double> c4, const Vec& center) {
  const int d = k.dim;
  const TestFunction tau = build_cutoff(R, rho, d, center);
  if (x_grid.empty()) x_grid = default_cutoff_grid(d, R, rho, 24, center);
  const std::vector<Ball> spheres = function_spheres(tau);
  ConditionReport rep;
  rep.id = ConditionId::B;
  rep.samples.resize(x_grid.size());
  std::vector<char> exhausted(x_grid.size(), 0);
  const double scale = std::pow(rho, alpha);
  parallel_for(x_grid.size(), [&](std::size_t i) {
    const Vec x = x_grid[i];
    const double tx = tau(x);
    Hints h = inner_hints(x, {k}, spheres);
    if (tx == 0.0) h.nonzero_ball = tau.support;
    if (tau.plateau->contains(x)) h.floor = R - norm(x - center);
    auto g = [&, tx, x](const Vec& y, Values& v) {
      const double du = tau(y) - tx;
      v[0] = du == 0.0 ? 0.0 : du * du * k(x, y);
    };
    const FormValue f = integrate_about(x, d, Region::whole(), 1, g, h, budget).component(0);
    rep.samples[i] = {norm(x - center), scale * f.value, scale * f.error_estimate, x - center};
    exhausted[i] = f.exhausted;
  });
  double best = 0.0;
  bool finite = true, any_exh = false;
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    finite = finite && std::isfinite(rep.samples[i].value);
    best = std::max(best, rep.samples[i].value);
    any_exh = any_exh || exhausted[i];
  }
  rep.empirical_constant = finite ? best : kInf;
  std::ostringstream notes;
  if (!finite) {
    rep.verdict = Verdict::Fail;
    notes << "integral diverges at some grid point";
  } else if (any_exh) {
    rep.verdict = Verdict::Inconclusive;
    notes << "quadrature budget exhausted";
  } else if (c4) {
    const double bound = std::pow(2.0, alpha) * *c4;
    rep.secondary = bound;
    rep.verdict = best <= bound * (1.0 + kConditionTol) ? Verdict::Pass : Verdict::Fail;
    notes << "bound 2^alpha C4 = " << bound;
  } else {
    rep.verdict = Verdict::Pass;
  }
  rep.notes = notes.str();
  return rep;
}

double poincare_quotient(const TestFunction& u, const Ball& D, double alpha, const QuadratureBudget& budget) {
  Hints h;
  const auto spheres = function_spheres(u);
  for (const auto& b : spheres) sphere_breaks(h.radial, D.center, b);
  if (u.dim == 2) {
    const Vec c = D.center;
    h.angular = [c, spheres](double rho) {
      std::vector<double> out;
      for (const auto& b : spheres) circle_crossings(out, rho, b.center - c, b.radius);
      return out;
    };
  }
  auto f = [&u](const Vec& y, Values& v) { v[0] = u(y); };
  const double vol = D.volume(u.dim);
  const double mean = integrate_about(D.center, u.dim, Region::inside(D), 1, f, h, budget).value[0] / vol;
  auto g = [&u, mean](const Vec& y, Values& v) {
    const double a = u(y) - mean;
    v[0] = a * a;
  };
  const double var = integrate_about(D.center, u.dim, Region::inside(D), 1, g, h, budget).value[0];
  const FormValue e = reference_form(u, alpha, D, budget);
  if (!(e.value > 1e-14 * std::max(1.0, var))) throw NumericalError("reference form vanishes: u is constant on D");
  return var / e.value;
}

}  // namespace nlf
