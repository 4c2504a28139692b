#include "nlf/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlf/multiplier.hpp"
#include "nlf/parallel.hpp"
#include "nlf/quadrature.hpp"

namespace nlf {

const char* to_string(ConditionId id) {
  switch (id) {
    case ConditionId::U0: return "U0";
    case ConditionId::U1: return "U1";
    case ConditionId::U1prime: return "U1prime";
    case ConditionId::L1: return "L1";
    case ConditionId::U2: return "U2";
    case ConditionId::Aprime: return "Aprime";
    case ConditionId::B: return "B";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

// |z|^2 U(z) is integrable at 0 only if the origin exponent is below 2.
bool diverges_at_origin(const Profile& U) { return U.origin_exponent && *U.origin_exponent >= 2.0; }

void check_radii(const std::vector<double>& radii) {
  if (radii.size() < 8) throw DomainError("need at least 8 sample radii");
  for (double r : radii)
    if (!(r > 0.0 && r < 1.0)) throw DomainError("sample radii must lie in (0,1)");
}

ConditionReport r_scan(ConditionId id, const Profile& U, double alpha, int d, const std::vector<double>& radii,
                       const QuadratureBudget& budget, bool whole_space) {
  check_radii(radii);
  ConditionReport rep;
  rep.id = id;
  if (diverges_at_origin(U)) {
    rep.verdict = Verdict::Fail;
    rep.notes = "|z|^2 U(z) is not integrable at the origin";
    for (double r : radii) rep.samples.push_back({r, kInf, 0.0, {}});
    return rep;
  }
  std::vector<FormValue> vals(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    const double r = radii[i];
    if (whole_space) {
      vals[i] = weighted_radial_integral(
          U, [r](double t) { return std::min(r * r, t * t); }, 0.0, kInf, d, budget, {r});
    } else {
      vals[i] = weighted_radial_integral(U, [](double t) { return t * t; }, 0.0, r, d, budget);
    }
  });
  bool exhausted = false;
  double best = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double scale = std::pow(radii[i], alpha - 2.0);
    rep.samples.push_back({radii[i], scale * vals[i].value, scale * vals[i].error_estimate, {}});
    best = std::max(best, scale * vals[i].value);
    exhausted = exhausted || vals[i].exhausted;
  }
  rep.empirical_constant = best;
  if (exhausted) {
    rep.verdict = whole_space ? Verdict::Inconclusive : Verdict::Fail;
    rep.notes = "refinement did not converge; the integral appears to diverge";
  } else {
    rep.verdict = std::isfinite(best) ? Verdict::Pass : Verdict::Fail;
    rep.notes = "max over sampled r of r^{alpha-2} times the integral";
  }
  return rep;
}

// Squared Euclidean distance transform (lower envelope of parabolas) along
// one line; f holds 0 at feature cells and +inf elsewhere.
void edt_1d(const std::vector<double>& f, std::vector<double>& out, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  auto F = [&](int q) { return f[static_cast<std::size_t>(q)]; };
  int first = 0;
  while (first < n && !std::isfinite(F(first))) ++first;
  if (first == n) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  std::size_t k = 0;
  v[0] = first;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = first + 1; q < n; ++q) {
    if (!std::isfinite(F(q))) continue;
    double s;
    while (true) {
      const int p = v[k];
      s = ((F(q) + 1.0 * q * q) - (F(p) + 1.0 * p * p)) / (2.0 * (q - p));
      if (s <= z[k])
        --k;
      else
        break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const int p = v[k];
    out[static_cast<std::size_t>(q)] = 1.0 * (q - p) * (q - p) + F(p);
  }
}

// Largest distance (in cells) from a member cell to the nearest non-member
// cell centre, on an n^d grid stored row-major.
double max_clearance_cells(const std::vector<char>& member, int n, int d) {
  const std::size_t total = member.size();
  std::vector<double> g(total);
  for (std::size_t i = 0; i < total; ++i) g[i] = member[i] ? kInf : 0.0;
  std::vector<double> line(static_cast<std::size_t>(n)), res(static_cast<std::size_t>(n));
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);
  std::size_t stride = 1;
  for (int axis = 0; axis < d; ++axis) {
    for (std::size_t base = 0; base < total; ++base) {
      if ((base / stride) % static_cast<std::size_t>(n) != 0) continue;
      for (int q = 0; q < n; ++q) line[static_cast<std::size_t>(q)] = g[base + static_cast<std::size_t>(q) * stride];
      edt_1d(line, res, v, z);
      for (int q = 0; q < n; ++q) g[base + static_cast<std::size_t>(q) * stride] = res[static_cast<std::size_t>(q)];
    }
    stride *= static_cast<std::size_t>(n);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < total; ++i)
    if (member[i]) best = std::max(best, g[i]);
  return std::sqrt(best);
}

}  // namespace

nlohmann::json to_json(const ConditionReport& r) {
  nlohmann::json j;
  j["condition"] = to_string(r.id);
  j["verdict"] = to_string(r.verdict);
  j["empirical_constant"] = finite_or_null(r.empirical_constant);
  j["secondary"] = finite_or_null(r.secondary);
  j["notes"] = r.notes;
  auto& s = j["samples"];
  s = nlohmann::json::array();
  for (const auto& x : r.samples) {
    nlohmann::json e{{"parameter", x.parameter}, {"value", finite_or_null(x.value)}, {"error", x.error}};
    if (r.id == ConditionId::Aprime) e["direction"] = {x.direction[0], x.direction[1], x.direction[2]};
    s.push_back(e);
  }
  return j;
}

std::vector<double> dyadic_radii(int k_lo, int k_hi) {
  std::vector<double> r;
  for (int k = k_lo; k <= k_hi; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

ConditionReport check_U0(const Profile& U, int d, const QuadratureBudget& budget, double tol) {
  ConditionReport rep;
  rep.id = ConditionId::U0;
  if (diverges_at_origin(U)) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes = "|z|^2 U(z) is not integrable at the origin";
    rep.samples.push_back({1.0, kInf, 0.0, {}});
    return rep;
  }
  const FormValue v =
      weighted_radial_integral(U, [](double t) { return std::min(1.0, t * t); }, 0.0, kInf, d, budget, {1.0});
  rep.empirical_constant = v.value;
  rep.samples.push_back({1.0, v.value, v.error_estimate, {}});
  const bool resolved = !v.exhausted && v.error_estimate <= tol * std::max(std::abs(v.value), 1e-300);
  if (!std::isfinite(v.value) || !resolved) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes = "refinement did not converge to the requested tolerance";
  } else {
    rep.verdict = Verdict::Pass;
    rep.notes = "integral of (|z|^2 ^ 1) U";
  }
  return rep;
}

ConditionReport check_U1(const Profile& U, double alpha, int d, const std::vector<double>& radii,
                         const QuadratureBudget& budget, double) {
  return r_scan(ConditionId::U1, U, alpha, d, radii, budget, false);
}

double u1prime_constant(double C0, double C1, double alpha) {
  if (C0 < 0.0 || C1 < 0.0) throw DomainError("constants must be nonnegative");
  return (std::pow(2.0, 2.0 - alpha) / (1.0 - std::pow(2.0, -alpha)) + 1.0) * C1 + 4.0 * C0;
}

ConditionReport check_U1prime(const Profile& U, double alpha, int d, const std::vector<double>& radii,
                              const QuadratureBudget& budget, double) {
  return r_scan(ConditionId::U1prime, U, alpha, d, radii, budget, true);
}

ConditionReport check_L1(const Profile& L, double alpha, int d, double a, int n_max, const L1Options& opt) {
  if (!(a > 1.0)) throw DomainError("scale base a must exceed 1");
  if (n_max < 4) throw DomainError("n_max must be at least 4");
  if (opt.cells < 64) throw DomainError("annulus grid needs at least 64 cells");
  if (d < 1 || d > 3) throw DomainError("L1 scan supports d = 1, 2, 3");
  if (opt.c3_log2_min > opt.c3_log2_max) throw DomainError("empty C3 search range");
  const int n = d == 3 ? std::min(opt.cells, 96) : opt.cells;
  // Rescaled coordinates w = a^m z; two padding layers outside |w| < a keep
  // the box boundary out of the member set.
  const double h = 2.0 * a / (n - 4);
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);

  ConditionReport rep;
  rep.id = ConditionId::L1;
  const int levels = n_max - opt.n_min + 1;
  const int c3_count = opt.c3_log2_max - opt.c3_log2_min + 1;
  // clearance[c][m]: inscribed radius (rescaled) for C3 = 2^{c3_log2_max - c}.
  std::vector<std::vector<double>> clearance(static_cast<std::size_t>(c3_count),
                                             std::vector<double>(static_cast<std::size_t>(levels), 0.0));
  parallel_for(static_cast<std::size_t>(levels), [&](std::size_t li) {
    const int m = opt.n_min + static_cast<int>(li);
    const double scale = std::pow(a, -m);
    std::vector<double> ratio(total, 0.0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      Vec w{};
      std::size_t rest = idx;
      for (int ax = 0; ax < d; ++ax) {
        w[static_cast<std::size_t>(ax)] = -a - 2.0 * h + h * (static_cast<double>(rest % static_cast<std::size_t>(n)) + 0.5);
        rest /= static_cast<std::size_t>(n);
      }
      const double rw = norm(w);
      if (rw < 1.0 || rw >= a) continue;
      const Vec z = scale * w;
      const double ref = (2.0 - alpha) * std::pow(scale * rw, -d - alpha);
      ratio[idx] = L(z) / ref;
    }
    std::vector<char> member(total);
    for (int c = 0; c < c3_count; ++c) {
      const double c3 = std::ldexp(1.0, opt.c3_log2_max - c);
      bool any = false;
      for (std::size_t idx = 0; idx < total; ++idx) {
        member[idx] = ratio[idx] >= c3 * (1.0 - 1e-12);
        any = any || member[idx];
      }
      double r = 0.0;
      if (any) r = std::max(0.0, (max_clearance_cells(member, n, d) - 0.5 * std::sqrt(1.0 * d)) * h);
      clearance[static_cast<std::size_t>(c)][li] = r;
    }
  });

  double best_score = 0.0;
  int best_c = -1;
  bool any_nonempty = false;
  for (int c = 0; c < c3_count; ++c) {
    const auto& row = clearance[static_cast<std::size_t>(c)];
    const double c2 = *std::min_element(row.begin(), row.end());
    if (c2 > 0.0) any_nonempty = true;
    if (c2 < 2.0 * h) continue;
    const double score = c2 * std::ldexp(1.0, opt.c3_log2_max - c);
    if (score > best_score) {
      best_score = score;
      best_c = c;
    }
  }
  std::ostringstream notes;
  notes << "annuli n = " << opt.n_min << ".." << n_max << ", grid " << n << "^" << d << ", C3 in 2^[" << opt.c3_log2_min
        << "," << opt.c3_log2_max << "]; radii are grid-conservative";
  if (best_c >= 0) {
    const auto& row = clearance[static_cast<std::size_t>(best_c)];
    rep.verdict = Verdict::Pass;
    rep.empirical_constant = *std::min_element(row.begin(), row.end());
    rep.secondary = std::ldexp(1.0, opt.c3_log2_max - best_c);
    for (int li = 0; li < levels; ++li) rep.samples.push_back({1.0 * (opt.n_min + li), row[static_cast<std::size_t>(li)], h, {}});
  } else {
    rep.verdict = any_nonempty ? Verdict::Inconclusive : Verdict::Fail;
    rep.empirical_constant = 0.0;
    const auto& row = clearance.back();
    for (int li = 0; li < levels; ++li) rep.samples.push_back({1.0 * (opt.n_min + li), row[static_cast<std::size_t>(li)], h, {}});
    notes << (any_nonempty ? "; inscribed balls below two grid cells" : "; some annulus has no admissible ball");
  }
  rep.notes = notes.str();
  return rep;
}

ConditionReport check_U2(const Profile& U, double gamma, int d, const std::vector<double>& R_grid,
                         const QuadratureBudget& budget, double tol) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (R_grid.size() < 3) throw DomainError("need at least three tail radii");
  for (std::size_t i = 0; i < R_grid.size(); ++i)
    if (!(R_grid[i] > 0.0 && std::isfinite(R_grid[i])) || (i > 0 && !(R_grid[i] > R_grid[i - 1])))
      throw DomainError("tail radii must be positive, finite and increasing");
  ConditionReport rep;
  rep.id = ConditionId::U2;
  std::vector<FormValue> vals(R_grid.size());
  parallel_for(R_grid.size(), [&](std::size_t i) { vals[i] = radial_integral(U, R_grid[i], kInf, d, budget); });
  std::vector<double> t(R_grid.size());
  bool exhausted = false;
  for (std::size_t i = 0; i < R_grid.size(); ++i) {
    const double s = std::pow(R_grid[i], gamma);
    t[i] = s * vals[i].value;
    rep.samples.push_back({R_grid[i], t[i], s * vals[i].error_estimate, {}});
    exhausted = exhausted || vals[i].exhausted;
  }
  const std::size_t half = R_grid.size() / 2;
  const std::vector<double> xs(R_grid.begin() + static_cast<long>(half), R_grid.end());
  const std::vector<double> ys(t.begin() + static_cast<long>(half), t.end());
  const bool vanishing = std::all_of(ys.begin(), ys.end(), [](double v) { return v == 0.0; });
  const double slope = vanishing ? -kInf : loglog_slope(xs, ys);
  rep.secondary = slope;
  const std::size_t third = R_grid.size() - (R_grid.size() + 2) / 3;
  bool eventually_small = true;
  for (std::size_t i = third; i < t.size(); ++i) eventually_small = eventually_small && t[i] <= 1.0 + tol;
  rep.empirical_constant = *std::max_element(t.begin() + static_cast<long>(third), t.end());
  rep.notes = "finite-horizon surrogate: R^gamma times the tail mass on the grid, slope fitted on the upper half";
  if (exhausted) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes += "; tail integral unresolved";
  } else if (std::isnan(slope)) {
    rep.verdict = Verdict::Inconclusive;
  } else {
    rep.verdict = eventually_small && slope <= 0.0 ? Verdict::Pass : Verdict::Fail;
  }
  return rep;
}

std::vector<Vec> sample_directions(int d, int n) {
  if (n < 1) throw DomainError("need at least one direction");
  std::vector<Vec> out;
  if (d == 1) return {Vec{1, 0, 0}};
  if (d == 2) {
    for (int i = 0; i < n; ++i) {
      const double t = kPi * i / n;
      out.push_back(Vec{std::cos(t), std::sin(t), 0});
    }
    return out;
  }
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (i + 0.5) / n;  // upper hemisphere
    const double rr = std::sqrt(1.0 - z * z);
    out.push_back(Vec{rr * std::cos(golden * i), rr * std::sin(golden * i), z});
  }
  return out;
}

ConditionReport check_Aprime(const Profile& L, double alpha, int d, const std::vector<double>& r_grid,
                             const std::vector<Vec>& directions, const QuadratureBudget& budget, double slope_tol) {
  if (r_grid.size() < 3) throw DomainError("need at least three radii");
  if (directions.empty()) throw DomainError("need at least one direction");
  if (d == 2 && directions.size() < 16 && !L.radial) throw DomainError("need at least 16 directions in d = 2");
  ConditionReport rep;
  rep.id = ConditionId::Aprime;
  const std::size_t nr = r_grid.size();
  const std::size_t nd = directions.size();
  std::vector<FormValue> vals(nr * nd);
  parallel_for(nr * nd, [&](std::size_t idx) {
    const double r = r_grid[idx % nr];
    const Vec xi = (2.0 / r) * directions[idx / nr];
    vals[idx] = multiplier(L, xi, budget);
  });
  double c0 = kInf;
  double worst_slope = -kInf;
  bool exhausted = false;
  const std::size_t smallest = static_cast<std::size_t>(std::min_element(r_grid.begin(), r_grid.end()) - r_grid.begin());
  for (std::size_t j = 0; j < nd; ++j) {
    std::vector<double> c(nr);
    for (std::size_t i = 0; i < nr; ++i) {
      const FormValue& v = vals[j * nr + i];
      // r^{alpha-2} (r^2/4) m(2h/r)
      const double s = 0.25 * std::pow(r_grid[i], alpha);
      c[i] = s * v.value;
      rep.samples.push_back({r_grid[i], c[i], s * v.error_estimate, directions[j]});
      c0 = std::min(c0, c[i]);
      if (i == smallest) exhausted = exhausted || v.exhausted;
    }
    const bool zero = std::all_of(c.begin(), c.end(), [](double v) { return v <= 0.0; });
    const double slope = zero ? kInf : loglog_slope(r_grid, c);
    worst_slope = std::max(worst_slope, slope);
  }
  rep.empirical_constant = c0;
  rep.secondary = worst_slope;
  rep.notes = "c0(r) = r^{alpha-2} int r^2 sin^2(h.z/r) L; slope of log c0 against log r per direction";
  if (exhausted) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes += "; oscillatory integral unresolved at the smallest r";
  } else if (!(c0 > 0.0) || worst_slope > slope_tol) {
    rep.verdict = Verdict::Fail;
  } else {
    rep.verdict = Verdict::Pass;
  }
  return rep;
}

}  // namespace nlf
