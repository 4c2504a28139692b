#include "nlf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "nlf/parallel.hpp"
#include "nlf/quadrature.hpp"

namespace nlf {

namespace {

Hints kernel_hints(const KernelSpec& k, const Vec& x) {
  Hints h;
  if (k.radial_breaks) h.radial = k.radial_breaks(x);
  h.cap = k.support_radius;
  if (k.dim == 2 && k.angular_breaks) {
    auto ab = k.angular_breaks;
    h.angular = [ab, x](double rho) { return ab(x, rho); };
  }
  return h;
}

QuadratureBudget tail_budget() {
  QuadratureBudget b;
  b.rel_tol = 1e-8;
  return b;
}

// h^d int over the cell centred at c of k(x, .), tensor Gauss-Legendre.
double cell_integral(const KernelSpec& k, const Vec& x, const Vec& c, double h, int order) {
  const auto& gl = gauss_legendre(order);
  double s = 0.0;
  if (k.dim == 1) {
    for (const auto& [t, w] : gl) s += w * k(x, Vec{c[0] + 0.5 * h * t, 0, 0});
    return 0.5 * h * s * h;
  }
  for (const auto& [t, w] : gl)
    for (const auto& [u, v] : gl) s += w * v * k(x, Vec{c[0] + 0.5 * h * t, c[1] + 0.5 * h * u, 0});
  return 0.25 * h * h * s * h * h;
}

int order_for(int cheb) { return cheb <= 2 ? 10 : (cheb <= 8 ? 4 : 2); }

double pair_weight(const KernelSpec& k, const Vec& xi, const Vec& xj, double h, int cheb) {
  const int q = order_for(cheb);
  return 0.5 * (cell_integral(k, xi, xj, h, q) + cell_integral(k, xj, xi, h, q));
}

double tail_integral(const KernelSpec& k, const Vec& x, const Ball& outer, const std::function<double(const Vec&)>& g,
                     double hd) {
  const double reach = outer.radius - norm(x - outer.center);
  if (reach >= k.support_radius) return 0.0;
  const MultiResult r = integrate_about(
      x, k.dim, Region::outside(outer), 1,
      [&](const Vec& y, Values& v) { v[0] = g ? g(y) * k(x, y) : k(x, y); }, kernel_hints(k, x), tail_budget());
  return hd * r.value[0];
}

// x -> tail_integral on B_r(x0). In d = 2 the tail is smooth on B_r (its
// singular set lies beyond R >= 2r), so it is sampled on a Chebyshev tensor
// grid over the bounding box and interpolated.
std::function<double(const Vec&)> tail_field(const KernelSpec& k, const Vec& x0, double r, const Ball& outer,
                                             const std::function<double(const Vec&)>& g, double hd) {
  if (k.dim == 1) return [=](const Vec& x) { return tail_integral(k, x, outer, g, hd); };
  constexpr int n = 13;
  std::array<double, n> t{};
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = std::cos(kPi * (i + 0.5) / n);
  auto vals = std::make_shared<std::vector<double>>(n * n);
  parallel_for(n * n, [&](std::size_t idx) {
    const Vec x{x0[0] + r * t[idx / n], x0[1] + r * t[idx % n], 0};
    (*vals)[idx] = tail_integral(k, x, outer, g, hd);
  });
  auto basis = [t](double s) {
    std::array<double, n> l{};
    for (int i = 0; i < n; ++i) {
      double p = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) p *= (s - t[static_cast<std::size_t>(j)]) / (t[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(j)]);
      l[static_cast<std::size_t>(i)] = p;
    }
    return l;
  };
  return [=](const Vec& x) {
    const auto a = basis((x[0] - x0[0]) / r);
    const auto b = basis((x[1] - x0[1]) / r);
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)] * (*vals)[static_cast<std::size_t>(i * n + j)];
    return v;
  };
}

}  // namespace

Vec CellGrid::node(std::size_t idx) const {
  const auto c = coords(idx);
  Vec x = center;
  for (int a = 0; a < dim; ++a) x[static_cast<std::size_t>(a)] += (c[static_cast<std::size_t>(a)] + 0.5 - 0.5 * n_axis) * h;
  return x;
}

std::array<int, 2> CellGrid::coords(std::size_t idx) const {
  if (dim == 1) return {static_cast<int>(idx), 0};
  return {static_cast<int>(idx / static_cast<std::size_t>(n_axis)), static_cast<int>(idx % static_cast<std::size_t>(n_axis))};
}

Eigen::VectorXd StiffnessOperator::apply_constant(double c) const {
  const Eigen::VectorXd one = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(interior.size()), c);
  Eigen::VectorXd r = A * one;
  for (std::size_t i = 0; i < interior.size(); ++i)
    r[static_cast<Eigen::Index>(i)] -= c * (exterior_row_sum[i] + tail[i]);
  return r;
}

double StiffnessOperator::quadratic_form(const Eigen::VectorXd& u) const { return 2.0 * u.dot(A * u); }

StiffnessOperator assemble(const KernelSpec& k, const Vec& x0, double r, double h, double collar_R) {
  const int d = k.dim;
  if (d < 1 || d > 2) throw DomainError("solver supports d = 1, 2");
  if (!(r > 0.0 && h > 0.0 && h <= r / 32.0 * (1.0 + 1e-12))) throw DomainError("need 0 < h <= r/32");
  if (!(collar_R >= 2.0 * r)) throw DomainError("collar radius must be at least 2r");
  StiffnessOperator op;
  op.kernel = k;
  op.radius = r;
  op.collar_R = collar_R;
  op.grid.dim = d;
  op.grid.h = h;
  op.grid.center = x0;
  op.grid.n_axis = 2 * static_cast<int>(std::ceil(collar_R / h - 1e-9));
  const CellGrid& g = op.grid;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double dist = norm(g.node(idx) - x0);
    if (dist < r)
      op.interior.push_back(idx);
    else if (dist < collar_R)
      op.exterior.push_back(idx);
  }

  auto cheb = [g](std::size_t a, std::size_t b) {
    const auto ca = g.coords(a), cb = g.coords(b);
    return std::max(std::abs(ca[0] - cb[0]), std::abs(ca[1] - cb[1]));
  };
  if (k.translation_invariant) {
    // One weight per offset, indexed by (o0 + n - 1) * (2n - 1) + (o1 + n - 1).
    const int n = g.n_axis;
    const int span = 2 * n - 1;
    const std::size_t count = d == 1 ? static_cast<std::size_t>(span) : static_cast<std::size_t>(span) * span;
    auto table = std::make_shared<std::vector<double>>(count, 0.0);
    parallel_for(count, [&](std::size_t t) {
      const int o0 = d == 1 ? static_cast<int>(t) - (n - 1) : static_cast<int>(t) / span - (n - 1);
      const int o1 = d == 1 ? 0 : static_cast<int>(t) % span - (n - 1);
      if (o0 == 0 && o1 == 0) return;
      const Vec off{o0 * h, o1 * h, 0};
      (*table)[t] = pair_weight(k, Vec{}, off, h, std::max(std::abs(o0), std::abs(o1)));
    });
    op.weight = [g, table, span, n, d](std::size_t a, std::size_t b) {
      const auto ca = g.coords(a), cb = g.coords(b);
      const int o0 = cb[0] - ca[0] + n - 1;
      const int o1 = cb[1] - ca[1] + n - 1;
      return (*table)[d == 1 ? static_cast<std::size_t>(o0) : static_cast<std::size_t>(o0) * span + o1];
    };
  } else {
    op.weight = [k, g, h, cheb](std::size_t a, std::size_t b) {
      return a == b ? 0.0 : pair_weight(k, g.node(a), g.node(b), h, cheb(a, b));
    };
  }

  const std::size_t nI = op.interior.size();
  op.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nI), static_cast<Eigen::Index>(nI));
  op.exterior_row_sum.assign(nI, 0.0);
  op.tail.assign(nI, 0.0);
  const double hd = std::pow(h, d);
  const Ball outer(x0, collar_R);
  const auto tail_at = tail_field(k, x0, r, outer, nullptr, hd);
  parallel_for(nI, [&](std::size_t i) {
    const std::size_t a = op.interior[i];
    double diag = 0.0;
    for (std::size_t j = 0; j < nI; ++j) {
      if (j == i) continue;
      const double w = op.weight(a, op.interior[j]);
      op.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -w;
      diag += w;
    }
    double es = 0.0;
    for (std::size_t b : op.exterior) es += op.weight(a, b);
    op.exterior_row_sum[i] = es;
    op.tail[i] = std::max(0.0, tail_at(g.node(a)));
    op.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag + es + op.tail[i];
  });
  return op;
}

DiscreteSolution solve_dirichlet(const StiffnessOperator& op, const std::function<double(const Vec&)>& exterior_data) {
  if (!exterior_data) throw DomainError("exterior data missing");
  DiscreteSolution s;
  const CellGrid& g = op.grid;
  s.dim = g.dim;
  s.h = g.h;
  s.center = g.center;
  s.radius = op.radius;
  s.collar_R = op.collar_R;
  s.kernel = op.kernel;
  if (std::isfinite(op.kernel.alpha)) s.alpha = op.kernel.alpha;
  s.exterior_data = exterior_data;
  s.grid = g;
  s.interior = op.interior;
  s.grid_values.resize(g.size());
  std::vector<char> is_interior(g.size(), 0);
  for (std::size_t idx : op.interior) is_interior[idx] = 1;
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    if (!is_interior[idx]) s.grid_values[idx] = exterior_data(g.node(idx));

  const std::size_t nI = op.interior.size();
  Eigen::VectorXd b(static_cast<Eigen::Index>(nI));
  std::vector<double> tail_mean(nI, std::nan(""));
  const Ball outer(g.center, op.collar_R);
  const double hd = std::pow(g.h, g.dim);
  const auto data_tail = tail_field(op.kernel, g.center, op.radius, outer, exterior_data, hd);
  parallel_for(nI, [&](std::size_t i) {
    const std::size_t a = op.interior[i];
    double v = 0.0;
    for (std::size_t e : op.exterior) v += op.weight(a, e) * s.grid_values[e];
    if (op.tail[i] > 0.0) {
      const double F = data_tail(g.node(a));
      tail_mean[i] = F / op.tail[i];
      v += F;
    }
    b[static_cast<Eigen::Index>(i)] = v;
  });
  s.data_min = kInf;
  s.data_max = -kInf;
  for (std::size_t e : op.exterior) {
    s.data_min = std::min(s.data_min, s.grid_values[e]);
    s.data_max = std::max(s.data_max, s.grid_values[e]);
  }
  for (double t : tail_mean)
    if (std::isfinite(t)) {
      s.data_min = std::min(s.data_min, t);
      s.data_max = std::max(s.data_max, t);
    }

  const Eigen::LLT<Eigen::MatrixXd> llt(op.A);
  if (llt.info() != Eigen::Success) throw NumericalError("stiffness matrix is not positive definite");
  const Eigen::VectorXd u = llt.solve(b);
  const double bn = b.norm();
  s.residual = (op.A * u - b).norm() / (bn > 0.0 ? bn : 1.0);
  if (!(s.residual < 1e-8)) throw NumericalError("linear solve residual " + std::to_string(s.residual));
  for (std::size_t i = 0; i < nI; ++i) s.grid_values[op.interior[i]] = u[static_cast<Eigen::Index>(i)];
  return s;
}

double DiscreteSolution::interpolate(const Vec& x) const {
  const int n = grid.n_axis;
  auto locate = [&](double coord, double c0, int& i0, double& f) {
    const double t = (coord - c0) / h + 0.5 * n - 0.5;
    i0 = std::clamp(static_cast<int>(std::floor(t)), 0, n - 2);
    f = std::clamp(t - i0, 0.0, 1.0);
  };
  int i, j = 0;
  double fi, fj = 0.0;
  locate(x[0], center[0], i, fi);
  if (dim == 1) return (1.0 - fi) * grid_values[static_cast<std::size_t>(i)] + fi * grid_values[static_cast<std::size_t>(i) + 1];
  locate(x[1], center[1], j, fj);
  auto at = [&](int a, int b) { return grid_values[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)]; };
  return (1.0 - fi) * ((1.0 - fj) * at(i, j) + fj * at(i, j + 1)) + fi * ((1.0 - fj) * at(i + 1, j) + fj * at(i + 1, j + 1));
}

bool DiscreteSolution::maximum_principle_holds(double tol) const {
  const double scale = std::max({1.0, std::abs(data_min), std::abs(data_max)});
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const double v = value(k);
    if (v < data_min - tol * scale || v > data_max + tol * scale) return false;
  }
  return true;
}

std::string solution_csv(const DiscreteSolution& s) {
  std::ostringstream os;
  os.precision(12);
  os << (s.dim == 1 ? "x1,u\n" : "x1,x2,u\n");
  for (std::size_t k = 0; k < s.interior.size(); ++k) {
    const Vec x = s.node(k);
    os << x[0] << ",";
    if (s.dim == 2) os << x[1] << ",";
    os << s.value(k) << "\n";
  }
  return os.str();
}

TailMeasureReport tail_measure(const KernelSpec& k, const Vec& x0, double r, const std::vector<Vec>& x_grid,
                               int j_max, const QuadratureBudget& budget) {
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  if (j_max < 2) throw DomainError("need j_max >= 2");
  if (x_grid.empty()) throw DomainError("need sample points");
  for (const Vec& x : x_grid)
    if (norm(x - x0) >= 0.5 * r * (1.0 + 1e-12)) throw DomainError("sample points must lie in B_{r/2}(x0)");
  const Profile& U = k.upper;
  const int d = k.dim;
  auto measure = [&](const Vec& x, double R) {
    if (R - norm(x - x0) >= U.support_radius) return 0.0;
    Hints hints;
    hints.radial = U.radial_breaks;
    hints.cap = U.support_radius;
    if (d == 2 && U.angular_breaks) hints.angular = U.angular_breaks;
    const MultiResult m = integrate_about(
        x, d, Region::outside(Ball(x0, R)), 1, [&](const Vec& y, Values& v) { v[0] = U(y - x); }, hints, budget);
    return m.value[0];
  };
  const double denom = measure(x0, r);
  if (!(denom > 1e-300)) throw NumericalError("tail mass of the upper envelope vanishes outside B_r");
  TailMeasureReport t;
  t.radius = r;
  for (int j = 0; j <= j_max; ++j) {
    const double R = std::ldexp(r, j);
    double sup = 0.0;
    for (const Vec& x : x_grid) sup = std::max(sup, measure(x, R) / denom);
    t.j.push_back(j);
    t.eta.push_back(sup);
  }
  for (std::size_t i = 1; i < t.eta.size(); ++i)
    if (t.eta[i] > t.eta[i - 1] * (1.0 + 1e-8) + 1e-300) t.nonincreasing = false;
  // Geometric ratio from the second half of the j-range.
  std::vector<double> js, ls;
  for (std::size_t i = t.eta.size() / 2; i < t.eta.size(); ++i)
    if (t.eta[i] > 0.0) {
      js.push_back(t.j[i]);
      ls.push_back(std::log(t.eta[i]));
    }
  if (js.size() < 2) {
    t.ratio = 0.0;
  } else {
    const double mj = std::accumulate(js.begin(), js.end(), 0.0) / js.size();
    const double ml = std::accumulate(ls.begin(), ls.end(), 0.0) / ls.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < js.size(); ++i) {
      num += (js[i] - mj) * (ls[i] - ml);
      den += (js[i] - mj) * (js[i] - mj);
    }
    t.ratio = std::exp(num / den);
  }
  t.verdict = t.nonincreasing && t.ratio < 1.0 - 1e-3 ? Verdict::Pass : Verdict::Fail;
  return t;
}

nlohmann::json to_json(const TailMeasureReport& t) {
  return {{"radius", t.radius}, {"j", t.j},         {"eta", t.eta},
          {"ratio", t.ratio},   {"nonincreasing", t.nonincreasing}, {"verdict", to_string(t.verdict)}};
}

HarnackAudit weak_harnack_audit(const DiscreteSolution& s, double p0, const QuadratureBudget& budget) {
  if (!(p0 > 0.0)) throw DomainError("p0 must be positive");
  if (!s.alpha) throw DomainError("solution kernel carries no alpha");
  double umax = 0.0;
  for (std::size_t k = 0; k < s.interior.size(); ++k) umax = std::max(umax, std::abs(s.value(k)));
  HarnackAudit a;
  a.p0 = p0;
  a.inf_quarter = kInf;
  double sum = 0.0;
  int cnt = 0;
  std::vector<Vec> half_nodes;
  for (std::size_t k = 0; k < s.interior.size(); ++k) {
    const double v = s.value(k);
    if (v < -1e-12 * std::max(1.0, umax)) throw DomainError("solution is negative inside the ball");
    const double dist = norm(s.node(k) - s.center);
    const double vp = std::max(0.0, v);
    if (dist < 0.25 * s.radius) a.inf_quarter = std::min(a.inf_quarter, vp);
    if (dist < 0.5 * s.radius) {
      sum += std::pow(vp, p0);
      ++cnt;
      half_nodes.push_back(s.node(k));
    }
  }
  if (cnt == 0 || !std::isfinite(a.inf_quarter)) throw DomainError("grid too coarse for the audit balls");
  a.mean_p = std::pow(sum / cnt, 1.0 / p0);

  // The tail term only sees the negative part of the data.
  bool has_negative = false;
  for (std::size_t idx = 0; idx < s.grid.size() && !has_negative; ++idx)
    has_negative = norm(s.grid.node(idx) - s.center) >= s.radius && s.grid_values[idx] < 0.0;
  if (has_negative) {
    std::vector<double> t(half_nodes.size());
    const Ball B(s.center, s.radius);
    parallel_for(half_nodes.size(), [&](std::size_t i) {
      const Vec x = half_nodes[i];
      const MultiResult m = integrate_about(
          x, s.dim, Region::outside(B), 1,
          [&](const Vec& y, Values& v) {
            const double g = s.exterior_data(y);
            v[0] = g < 0.0 ? -g * s.kernel(x, y) : 0.0;
          },
          kernel_hints(s.kernel, x), budget);
      t[i] = m.value[0];
    });
    a.tail = std::pow(s.radius, *s.alpha) * *std::max_element(t.begin(), t.end());
  }
  const double den = a.inf_quarter + a.tail;
  a.empirical_c = den > 0.0 ? a.mean_p / den : (a.mean_p > 0.0 ? kInf : 0.0);
  return a;
}

nlohmann::json to_json(const HarnackAudit& a) {
  return {{"p0", a.p0},
          {"inf_quarter", a.inf_quarter},
          {"mean_p", a.mean_p},
          {"tail", a.tail},
          {"empirical_c", std::isfinite(a.empirical_c) ? nlohmann::json(a.empirical_c) : nlohmann::json(nullptr)}};
}

double OscillationSchedule::c2() const {
  if (c2_override) return *c2_override;
  if (!(theta > 1.0 && p > 0.0 && c1 >= 1.0)) throw DomainError("schedule needs theta > 1, p > 0, c1 >= 1");
  return c1 * std::pow(theta, d / p) * std::pow(2.0, (1.0 - d) / p);
}

namespace {

std::vector<Vec> ball_samples(const Vec& c, double rho, int d) {
  std::vector<Vec> pts;
  const double rr = rho * (1.0 - 1e-12);
  if (d == 1) {
    for (int i = 0; i <= 128; ++i) pts.push_back(c + Vec{rr * (-1.0 + i / 64.0), 0, 0});
    return pts;
  }
  pts.push_back(c);
  for (int k = 1; k <= 16; ++k)
    for (int a = 0; a < 48; ++a) {
      const double t = 2.0 * kPi * a / 48.0;
      pts.push_back(c + Vec{rr * k / 16.0 * std::cos(t), rr * k / 16.0 * std::sin(t), 0});
    }
  return pts;
}

}  // namespace

HolderReport holder_estimate(const DiscreteSolution& s, const OscillationSchedule& schedule, std::vector<double> rho_grid) {
  const double theta = schedule.theta;
  if (rho_grid.empty())
    for (double rho = s.radius; rho >= 2.0 * s.h; rho /= theta) rho_grid.push_back(rho);
  if (rho_grid.size() < 3) throw DomainError("fewer than three usable scales");
  HolderReport rep;
  rep.rho = rho_grid;
  const double shift = s.interpolate(s.center);
  double scale = 1.0;
  for (double v : s.grid_values) scale = std::max(scale, std::abs(v));
  std::vector<std::vector<double>> vals;
  for (double rho : rho_grid) {
    std::vector<double> v;
    for (const Vec& x : ball_samples(s.center, rho, s.dim)) v.push_back(s.interpolate(x) - shift);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    // Interpolation roundoff of a constant is not an oscillation.
    rep.osc.push_back(*hi - *lo <= 1e-13 * scale ? 0.0 : *hi - *lo);
    vals.push_back(std::move(v));
  }
  for (std::size_t n = 1; n < rep.osc.size(); ++n)
    if (rep.osc[n] > rep.osc[n - 1] * (1.0 + 1e-12)) rep.monotone = false;

  const std::size_t N = rep.osc.size();
  const std::size_t nfit = std::max<std::size_t>(2, (2 * N + 2) / 3);
  rep.fit_from = static_cast<int>(N - nfit);
  const auto positive = std::count_if(rep.osc.begin() + rep.fit_from, rep.osc.end(), [](double o) { return o > 0.0; });
  if (positive < 2)
    rep.beta_fit = kInf;
  else
    rep.beta_fit = loglog_slope(std::vector<double>(rho_grid.begin() + rep.fit_from, rho_grid.end()),
                                std::vector<double>(rep.osc.begin() + rep.fit_from, rep.osc.end()));

  // Two-sided sequences m_n <= u - u(x0) <= M_n on B_{r theta^-n}.
  rep.beta_cap = schedule.beta_cap();
  const double beta = rep.beta_cap * (1.0 - 1e-6);
  rep.beta_used = beta;
  double M0 = 0.0, m0 = kInf;
  for (double v : s.grid_values) {
    M0 = std::max(M0, std::abs(v - shift));
    m0 = std::min(m0, v - shift);
  }
  rep.K = M0 - m0;
  rep.m.push_back(m0);
  rep.M.push_back(M0);
  const double tol = 1e-12 * std::max(1.0, rep.K);
  bool ok = true;
  for (std::size_t n = 0; n < N; ++n) {
    const auto [lo, hi] = std::minmax_element(vals[n].begin(), vals[n].end());
    if (n > 0) {
      const double mid = 0.5 * (rep.M[n - 1] + rep.m[n - 1]);
      const double width = rep.K * std::pow(theta, -static_cast<double>(n) * beta);
      const auto below = std::count_if(vals[n].begin(), vals[n].end(), [&](double v) { return v <= mid; });
      if (2 * static_cast<std::size_t>(below) >= vals[n].size()) {
        rep.cases.push_back(1);
        rep.m.push_back(rep.m[n - 1]);
        rep.M.push_back(rep.m[n - 1] + width);
      } else {
        rep.cases.push_back(2);
        rep.M.push_back(rep.M[n - 1]);
        rep.m.push_back(rep.M[n - 1] - width);
      }
    }
    ok = ok && rep.m[n] <= *lo + tol && *hi <= rep.M[n] + tol &&
         rep.M[n] - rep.m[n] <= rep.K * std::pow(theta, -static_cast<double>(n) * beta) + tol;
  }
  rep.certified = ok;
  return rep;
}

nlohmann::json to_json(const HolderReport& h) {
  nlohmann::json j;
  j["rho"] = h.rho;
  j["osc"] = h.osc;
  j["beta_fit"] = std::isfinite(h.beta_fit) ? nlohmann::json(h.beta_fit) : nlohmann::json("inf");
  j["monotone"] = h.monotone;
  j["fit_from"] = h.fit_from;
  j["beta_cap"] = h.beta_cap;
  j["beta_used"] = h.beta_used;
  j["K"] = h.K;
  j["m"] = h.m;
  j["M"] = h.M;
  j["cases"] = h.cases;
  j["certified"] = h.certified;
  return j;
}

}  // namespace nlf
