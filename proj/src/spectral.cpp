#include "nlf/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "nlf/parallel.hpp"
#include "nlf/quadrature.hpp"

namespace nlf {

namespace {

constexpr int kGkDepth = 24;

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// |xi| -> int over the sphere of radius |xi|, for a radial integrand.
double shell_factor(int d, double rho) { return unit_sphere_area(d) * std::pow(rho, d - 1); }

FormValue gk_piece(const std::function<double(double)>& w, double a, double b, double rel_tol) {
  const MultiResult r = adaptive_gk([&](double t, Values& out) { out[0] = w(t); }, 1, a, b, rel_tol, kGkDepth);
  return r.component(0);
}

// Closed-form transform, oscillating with period 2 pi / freq in |xi|.
FormValue closed_form_integral(const TestFunction& u, const std::function<double(double)>& g,
                               const QuadratureBudget& budget) {
  const int d = u.dim;
  const double tol = budget.rel_tol;
  auto w = [&](double rho) { return rho > 0.0 ? shell_factor(d, rho) * g(rho) * u.fourier_abs2(rho) : 0.0; };
  FormValue total;
  const double freq = u.fourier_frequency;
  if (freq > 0.0) {
    const double half = kPi / freq;
    const double xi_cut = 400.0 / freq;
    for (double a = 0.0; a < xi_cut; a += half) total += gk_piece(w, a, std::min(a + half, xi_cut), tol);
    auto wm = [&](double rho) { return shell_factor(d, rho) * g(rho) * u.fourier_abs2_mean(rho); };
    FormValue tail;
    double a = xi_cut;
    double last = 0.0, prev = 0.0;
    while (a < budget.tail_Rmax) {
      const FormValue s = gk_piece(wm, a, 2.0 * a, tol);
      tail += s;
      prev = last;
      last = s.value;
      a *= 2.0;
      if (std::abs(last) <= 1e-3 * tol * std::abs(total.value + tail.value) && prev != 0.0) break;
    }
    if (a >= budget.tail_Rmax) tail.exhausted = true;
    const double q = prev > 0.0 ? last / prev : 1.0;
    if (q < 1.0 && q > 0.0) tail.error_estimate += last * q / (1.0 - q);
    else tail.exhausted = true;
    // Averaging the oscillation leaves a relative O(1 / (r |xi|)) remainder.
    tail.error_estimate += std::abs(tail.value) * 4.0 / (0.5 * freq * xi_cut);
    total += tail;
    return total;
  }
  // Rapidly decaying transforms: integrate to where the weighted density is negligible.
  double peak = 0.0;
  double xi_cut = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double v = std::abs(w(xi_cut));
    peak = std::max(peak, v);
    if (xi_cut > 1.0 && v <= 1e-20 * peak) break;
    xi_cut *= 1.5;
    if (xi_cut > budget.tail_Rmax) {
      total.exhausted = true;
      break;
    }
  }
  for (double a = 0.0, h = xi_cut / 64.0; a < xi_cut * (1.0 - 1e-12); a += h) total += gk_piece(w, a, a + h, tol);
  total.error_estimate += 1e-20 * peak * xi_cut;
  return total;
}

struct FftSum {
  double full = 0.0;
  double outer_band = 0.0;
};

// Periodized Riemann sum of g(|xi|) |u^(xi)|^2 on a box of side L with N^d nodes.
FftSum fft_sum(const TestFunction& u, const std::function<double(double)>& g, const Vec& c, double L, int N) {
  const int d = u.dim;
  const double h = L / N;
  const double dxi = 2.0 * kPi / L;
  const double nyquist = kPi / h;
  const int nc = N / 2 + 1;
  const std::size_t out_size = d == 1 ? static_cast<std::size_t>(nc) : static_cast<std::size_t>(N) * nc;
  std::vector<double> in(d == 1 ? N : static_cast<std::size_t>(N) * N);
  fftw_complex* out = fftw_alloc_complex(out_size);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = d == 1 ? fftw_plan_dft_r2c_1d(N, in.data(), out, FFTW_ESTIMATE)
                  : fftw_plan_dft_r2c_2d(N, N, in.data(), out, FFTW_ESTIMATE);
  }
  if (d == 1) {
    for (int j = 0; j < N; ++j) in[j] = u(Vec{c[0] - 0.5 * L + j * h, 0, 0});
  } else {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        in[static_cast<std::size_t>(i) * N + j] = u(Vec{c[0] - 0.5 * L + i * h, c[1] - 0.5 * L + j * h, 0});
  }
  fftw_execute(plan);
  // |u^|^2 = (2 pi)^{-d} h^{2d} |DFT|^2
  const double scale = std::pow(h * h / (2.0 * kPi), d) * std::pow(dxi, d);
  FftSum s;
  auto add = [&](double xi_norm, double weight, const fftw_complex& z) {
    const double v = weight * scale * g(xi_norm) * (z[0] * z[0] + z[1] * z[1]);
    s.full += v;
    if (xi_norm >= 0.5 * nyquist) s.outer_band += v;
  };
  auto col_weight = [&](int k) { return (k == 0 || 2 * k == N) ? 1.0 : 2.0; };
  if (d == 1) {
    for (int k = 0; k < nc; ++k) add(k * dxi, col_weight(k), out[k]);
  } else {
    for (int i = 0; i < N; ++i) {
      const int ki = i < N / 2 ? i : i - N;
      for (int k = 0; k < nc; ++k)
        add(dxi * std::hypot(static_cast<double>(ki), static_cast<double>(k)), col_weight(k),
            out[static_cast<std::size_t>(i) * nc + k]);
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(out);
  return s;
}

FormValue fft_integral(const TestFunction& u, const std::function<double(double)>& g) {
  const int d = u.dim;
  if (d > 2) throw DomainError("FFT route supports d <= 2");
  const auto ws = u.working_support();
  if (!ws) throw DomainError("FFT route needs a bounded (effective) support");
  const double r = ws->radius;
  const int N = d == 1 ? 32768 : 512;
  const double L = (d == 1 ? 64.0 : 16.0) * r;
  const FftSum coarse = fft_sum(u, g, ws->center, L, N / 2);
  const FftSum base = fft_sum(u, g, ws->center, L, N);
  const FftSum wide = fft_sum(u, g, ws->center, 2.0 * L, 2 * N);
  FormValue v;
  v.value = wide.full;
  v.error_estimate = std::abs(base.full - coarse.full) + std::abs(wide.full - base.full) + std::abs(wide.outer_band);
  v.budget_used = static_cast<long>(std::pow(N, d) * (1.0 + std::pow(0.5, d) + std::pow(2.0, d)));
  return v;
}

}  // namespace

MultiplierSamples sample_multiplier(const Profile& L, const std::vector<Vec>& xi_points,
                                    const QuadratureBudget& budget) {
  MultiplierSamples s;
  s.L_id = L.name;
  s.dim = L.dim;
  s.xi_points = xi_points;
  s.values.resize(xi_points.size());
  s.errors.resize(xi_points.size());
  parallel_for(xi_points.size(), [&](std::size_t i) {
    const FormValue m = multiplier(L, xi_points[i], budget);
    s.values[i] = std::max(0.0, m.value);
    s.errors[i] = m.error_estimate;
  });
  return s;
}

std::string multiplier_csv(const MultiplierSamples& s) {
  std::ostringstream os;
  os.precision(12);
  for (int i = 0; i < s.dim; ++i) os << "xi" << i + 1 << ",";
  os << "m,err\n";
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    for (int i = 0; i < s.dim; ++i) os << s.xi_points[k][static_cast<std::size_t>(i)] << ",";
    os << s.values[k] << "," << s.errors[k] << "\n";
  }
  return os.str();
}

RadialMultiplier::RadialMultiplier(const Profile& L, double xi_min, double xi_max, int points,
                                   const QuadratureBudget& budget) {
  if (L.dim > 1 && !L.radial) throw DomainError("tabulated multiplier needs d = 1 or a radial profile");
  if (!(xi_min > 0.0 && xi_max > xi_min) || points < 2) throw DomainError("bad multiplier grid");
  std::vector<Vec> xs(static_cast<std::size_t>(points));
  const double step = std::log(xi_max / xi_min) / (points - 1);
  for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = {xi_min * std::exp(i * step), 0, 0};
  const MultiplierSamples s = sample_multiplier(L, xs, budget);
  for (int i = 0; i < points; ++i) {
    const double m = s.values[static_cast<std::size_t>(i)];
    if (!(m > 0.0)) throw NumericalError("multiplier vanishes on the grid");
    log_xi_.push_back(std::log(xs[static_cast<std::size_t>(i)][0]));
    log_m_.push_back(std::log(m));
    max_rel_error_ = std::max(max_rel_error_, s.errors[static_cast<std::size_t>(i)] / m);
  }
}

double RadialMultiplier::operator()(double rho) const {
  if (!(rho > 0.0)) return 0.0;
  const double t = std::log(rho);
  std::size_t i = static_cast<std::size_t>(std::upper_bound(log_xi_.begin(), log_xi_.end(), t) - log_xi_.begin());
  i = std::clamp<std::size_t>(i, 1, log_xi_.size() - 1);
  const double f = (t - log_xi_[i - 1]) / (log_xi_[i] - log_xi_[i - 1]);
  return std::exp(log_m_[i - 1] + f * (log_m_[i] - log_m_[i - 1]));
}

FormValue frequency_integral(const TestFunction& u, const std::function<double(double)>& g, double g_growth,
                             const QuadratureBudget& budget) {
  if (!(g_growth < 2.0)) throw DomainError("weight grows too fast for the transform tails");
  if (u.fourier_abs2 && (u.fourier_frequency == 0.0 || u.fourier_abs2_mean)) return closed_form_integral(u, g, budget);
  return fft_integral(u, g);
}

FormValue plancherel_reference(const TestFunction& u, double alpha, const QuadratureBudget& budget) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
  return frequency_integral(u, [alpha](double rho) { return std::pow(rho, alpha); }, alpha, budget);
}

FormValue reference_form_spectral(const TestFunction& u, double alpha, const QuadratureBudget& budget) {
  FormValue v = plancherel_reference(u, alpha, budget);
  const double f = 2.0 * alpha * (2.0 - alpha) / frac_constant(u.dim, alpha);
  v.value *= f;
  v.error_estimate *= f;
  return v;
}

namespace {

// Frequency window carrying the bulk of |u^|^2.
std::pair<double, double> frequency_window(const TestFunction& u) {
  double scale = 1.0;
  if (const auto ws = u.working_support()) scale = ws->radius;
  if (u.fourier_frequency > 0.0) scale = 0.5 * u.fourier_frequency;
  return {1e-3 / scale, 1e5 / scale};
}

RadialMultiplier tabulate(const Profile& L, const std::vector<TestFunction>& fs, const QuadratureBudget& budget) {
  double lo = kInf, hi = 0.0;
  for (const auto& u : fs) {
    const auto [a, b] = frequency_window(u);
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  const int points = static_cast<int>(std::ceil(6.0 * std::log10(hi / lo))) + 1;
  return RadialMultiplier(L, lo, hi, points, budget);
}

bool is_zero_function(const TestFunction& u) {
  return u.l2_norm_sq && *u.l2_norm_sq == 0.0;
}

}  // namespace

GlobalUpperCheck global_upper_check(const KernelSpec& k, const TestFunction& u, double alpha,
                                    const QuadratureBudget& budget) {
  if (k.dim != u.dim) throw DomainError("kernel and function dimensions differ");
  GlobalUpperCheck c;
  c.l2 = l2_norm_sq(u, std::nullopt, budget);
  c.E_alpha = reference_form_spectral(u, alpha, budget);
  if (is_zero_function(u) || c.l2.value == 0.0) {
    c.verdict = Verdict::Pass;
    c.notes = "u = 0: both sides vanish";
    return c;
  }
  const RadialMultiplier mU = tabulate(k.upper, {u}, budget);
  c.lhs = frequency_integral(u, mU, alpha, budget);
  c.lhs.error_estimate += mU.max_rel_error() * std::abs(c.lhs.value);
  c.c = c.lhs.value / (c.E_alpha.value + c.l2.value);
  c.c_pure = c.E_alpha.value > 0.0 ? c.lhs.value / c.E_alpha.value : kInf;
  c.notes = "lhs = int m_U |u^|^2 with m_U tabulated on a log grid";
  if (c.lhs.exhausted || c.E_alpha.exhausted)
    c.verdict = Verdict::Inconclusive;
  else
    c.verdict = std::isfinite(c.c) && c.c >= 0.0 ? Verdict::Pass : Verdict::Fail;
  return c;
}

CharacterizationReport characterization_check(const Profile& L, double alpha, double r0,
                                              const QuadratureBudget& budget, std::vector<TestFunction> family,
                                              int levels) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
  if (!(r0 > 0.0)) throw DomainError("r0 must be positive");
  if (levels < 3) throw DomainError("need at least three levels");
  const int d = L.dim;
  CharacterizationReport rep;
  rep.r0 = r0;
  std::vector<double> r_grid;
  for (int k = 0; k < levels; ++k) r_grid.push_back(std::ldexp(r0, -k));
  const std::vector<Vec> dirs = (d == 1 || L.radial) ? std::vector<Vec>{{1, 0, 0}} : sample_directions(d, 16);
  rep.aprime = check_Aprime(L, alpha, d, r_grid, dirs, budget);
  rep.c0 = rep.aprime.empirical_constant;
  rep.notes = "r0 = infinity is not distinguishable from large finite r0 on a finite grid";

  if (rep.aprime.verdict == Verdict::Inconclusive) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  if (rep.aprime.verdict == Verdict::Pass) {
    rep.verdict = Verdict::Pass;
    if (d > 1 && !L.radial) {
      rep.notes += "; frequency-side lower bound not checked: multiplier is not radial";
      return rep;
    }
    if (family.empty()) {
      for (double s : {0.25, 1.0, 4.0}) {
        family.push_back(polynomial_bump(d, {}, s * r0, 1));
        family.push_back(polynomial_bump(d, {}, s * r0, 2));
        family.push_back(gaussian(d, {}, 0.5 * s * r0));
      }
    }
    const RadialMultiplier mL = tabulate(L, family, budget);
    rep.consistent = true;
    for (const auto& u : family) {
      Comp0Row row;
      row.function_id = u.id;
      const FormValue lhs = plancherel_reference(u, alpha, budget);
      const FormValue form = frequency_integral(u, mL, alpha, budget);
      const FormValue l2 = l2_norm_sq(u, std::nullopt, budget);
      row.lhs = lhs.value;
      row.rhs_form = form.value / rep.c0;
      row.rhs_l2 = std::pow(2.0 / r0, alpha) * l2.value;
      row.err = lhs.error_estimate + (form.error_estimate + mL.max_rel_error() * std::abs(form.value)) / rep.c0 +
                std::pow(2.0 / r0, alpha) * l2.error_estimate;
      row.holds = row.lhs <= row.rhs_form + row.rhs_l2 + row.err;
      rep.consistent = rep.consistent && row.holds;
      rep.rows.push_back(row);
    }
    return rep;
  }

  rep.verdict = Verdict::Fail;
  rep.consistent = true;
  for (const Vec& h : dirs) {
    RayDecay ray;
    ray.direction = h;
    std::vector<Vec> xs;
    for (int k = 0; k < levels + 2; ++k) {
      const double t = std::ldexp(2.0 / r0, k);
      ray.xi_norms.push_back(t);
      xs.push_back(t * h);
    }
    const MultiplierSamples s = sample_multiplier(L, xs, budget);
    bool all_zero = true;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      ray.ratios.push_back(s.values[k] / std::pow(ray.xi_norms[k], alpha));
      all_zero = all_zero && s.values[k] <= 0.0;
    }
    ray.slope = all_zero ? -kInf : loglog_slope(ray.xi_norms, ray.ratios);
    ray.decays = all_zero || (ray.slope < -0.1 && ray.ratios.back() < ray.ratios.front());
    rep.consistent = rep.consistent && ray.decays;
    rep.rays.push_back(ray);
  }
  rep.notes += "; failure direction probed by the slope of m_L(t h) / t^alpha along rays";
  return rep;
}

nlohmann::json to_json(const CharacterizationReport& r) {
  nlohmann::json j;
  j["verdict"] = to_string(r.verdict);
  j["consistent"] = r.consistent;
  j["c0"] = r.c0;
  j["r0"] = r.r0;
  j["aprime"] = to_json(r.aprime);
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"function", row.function_id},
                    {"lhs", row.lhs},
                    {"rhs_form", row.rhs_form},
                    {"rhs_l2", row.rhs_l2},
                    {"err", row.err},
                    {"holds", row.holds}});
  j["comp0"] = rows;
  auto rays = nlohmann::json::array();
  for (const auto& ray : r.rays) {
    nlohmann::json rj;
    rj["direction"] = {ray.direction[0], ray.direction[1], ray.direction[2]};
    rj["xi_norms"] = ray.xi_norms;
    rj["ratios"] = ray.ratios;
    rj["slope"] = std::isfinite(ray.slope) ? nlohmann::json(ray.slope) : nlohmann::json(nullptr);
    rj["decays"] = ray.decays;
    rays.push_back(rj);
  }
  j["rays"] = rays;
  j["notes"] = r.notes;
  return j;
}

}  // namespace nlf
