#include "nlf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace nlf {

bool Region::contains(const Vec& y) const {
  switch (mode) {
    case RegionMode::Whole:
      return true;
    case RegionMode::Inside:
      return ball.contains(y);
    case RegionMode::Outside:
      return !ball.contains(y);
  }
  return true;
}

const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<double, double>> rule(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule[static_cast<std::size_t>(i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkPiece {
  Values kronrod{};
  Values error{};
};

GkPiece gk15(const std::function<void(double, Values&)>& f, int count, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Values kr{}, ga{}, fv{};
  f(c, fv);
  for (int i = 0; i < count; ++i) {
    kr[i] = kWgk[7] * fv[i];
    ga[i] = kWg[3] * fv[i];
  }
  for (int j = 0; j < 7; ++j) {
    Values f1{}, f2{};
    f(c - h * kXgk[j], f1);
    f(c + h * kXgk[j], f2);
    for (int i = 0; i < count; ++i) {
      kr[i] += kWgk[j] * (f1[i] + f2[i]);
      if (j % 2 == 1) ga[i] += kWg[j / 2] * (f1[i] + f2[i]);
    }
  }
  GkPiece p;
  for (int i = 0; i < count; ++i) {
    p.kronrod[i] = kr[i] * h;
    p.error[i] = std::abs((kr[i] - ga[i]) * h);
  }
  return p;
}

void adaptive_rec(const std::function<void(double, Values&)>& f, int count, int ctrl, double a, double b, double rel_tol,
                  const Values& abs_tol, int depth, int stalls, const GkPiece& whole, MultiResult& out) {
  bool ok = true;
  for (int i = 0; i < ctrl; ++i) {
    const double tol = std::max(rel_tol * std::abs(whole.kronrod[i]), abs_tol[i]);
    if (whole.error[i] > tol && whole.error[i] > 1e-300) ok = false;
  }
  if (ok || depth <= 0 || stalls >= 3) {
    for (int i = 0; i < count; ++i) {
      out.value[i] += whole.kronrod[i];
      out.error[i] += whole.error[i];
    }
    if (!ok && stalls < 3) out.exhausted = true;
    return;
  }
  const double m = 0.5 * (a + b);
  const GkPiece left = gk15(f, count, a, m);
  const GkPiece right = gk15(f, count, m, b);
  out.evals += 30;
  // Roundoff: bisection no longer reduces the error estimate.
  bool stalled = true;
  for (int i = 0; i < ctrl; ++i)
    if (left.error[i] + right.error[i] < 0.9 * whole.error[i]) stalled = false;
  if (stalled) ++stalls;
  Values half{};
  for (int i = 0; i < count; ++i) half[i] = 0.5 * abs_tol[i];
  adaptive_rec(f, count, ctrl, a, m, rel_tol, half, depth - 1, stalls, left, out);
  adaptive_rec(f, count, ctrl, m, b, rel_tol, half, depth - 1, stalls, right, out);
}

double normalize_angle(double t) {
  const double two_pi = 2.0 * kPi;
  t = std::fmod(t, two_pi);
  if (t < 0.0) t += two_pi;
  return t;
}

void sort_unique(std::vector<double>& v, double scale) {
  std::sort(v.begin(), v.end());
  const double eps = 1e-13 * std::max(scale, 1e-300);
  v.erase(std::unique(v.begin(), v.end(), [eps](double p, double q) { return std::abs(p - q) <= eps; }), v.end());
}

// Evaluates rho^{d-1} int_{S^{d-1}} 1_{region}(x + rho w) f(x + rho w) dw.
class AngularIntegrator {
 public:
  AngularIntegrator(const Vec& x, int d, const Region& region, int count, const Integrand& f, const Hints& hints,
                    const QuadratureBudget& budget)
      : x_(x), d_(d), region_(region), count_(count), f_(f), hints_(hints), order_(budget.angular_order) {}

  long calls = 0;

  bool admissible(const Vec& y) const {
    if (!region_.contains(y)) return false;
    if (hints_.nonzero_ball && !hints_.nonzero_ball->contains(y)) return false;
    return true;
  }

  void operator()(double rho, Values& out) {
    ++calls;
    out.fill(0.0);
    Values tmp{};
    if (hints_.radially_symmetric) {
      Vec y = x_;
      y[0] += rho;
      if (!admissible(y)) return;
      f_(y, tmp);
      const double jac = unit_sphere_area(d_) * std::pow(rho, d_ - 1);
      for (int i = 0; i < count_; ++i) out[i] = jac * tmp[i];
      return;
    }
    if (d_ == 1) {
      for (double s : {1.0, -1.0}) {
        Vec y = x_;
        y[0] += s * rho;
        if (!admissible(y)) continue;
        f_(y, tmp);
        for (int i = 0; i < count_; ++i) out[i] += tmp[i];
      }
      return;
    }
    if (d_ == 2) {
      two_d(rho, out);
      return;
    }
    three_d(rho, out);
  }

 private:
  void two_d(double rho, Values& out) {
    std::vector<double> br;
    if (region_.mode != RegionMode::Whole) circle_crossings(br, rho, region_.ball.center - x_, region_.ball.radius);
    if (hints_.nonzero_ball) circle_crossings(br, rho, hints_.nonzero_ball->center - x_, hints_.nonzero_ball->radius);
    if (hints_.angular) {
      auto extra = hints_.angular(rho);
      br.insert(br.end(), extra.begin(), extra.end());
    }
    for (double& t : br) t = normalize_angle(t);
    br.push_back(0.0);
    br.push_back(2.0 * kPi);
    sort_unique(br, 1.0);
    const auto& gl = gauss_legendre(order_);
    double max_width = kPi / 4.0;
    if (hints_.frequency > 0.0) max_width = std::min(max_width, kPi / (2.0 * hints_.frequency * rho));
    Values tmp{};
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
      const double t0 = br[p];
      const double t1 = br[p + 1];
      if (!(t1 > t0)) continue;
      const double tm = 0.5 * (t0 + t1);
      const Vec ym = x_ + Vec{rho * std::cos(tm), rho * std::sin(tm), 0.0};
      if (!admissible(ym)) continue;
      const int pieces = std::max(1, static_cast<int>(std::ceil((t1 - t0) / max_width)));
      const double w = (t1 - t0) / pieces;
      for (int q = 0; q < pieces; ++q) {
        const double a = t0 + q * w;
        for (const auto& [node, weight] : gl) {
          const double t = a + 0.5 * w * (node + 1.0);
          const Vec y = x_ + Vec{rho * std::cos(t), rho * std::sin(t), 0.0};
          f_(y, tmp);
          const double jac = 0.5 * w * weight * rho;
          for (int i = 0; i < count_; ++i) out[i] += jac * tmp[i];
        }
      }
    }
  }

  void three_d(double rho, Values& out) {
    const auto& gl = gauss_legendre(2 * order_);
    const int nphi = 4 * order_;
    Values tmp{};
    for (const auto& [ct, wt] : gl) {
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int j = 0; j < nphi; ++j) {
        const double phi = 2.0 * kPi * (j + 0.5) / nphi;
        const Vec y = x_ + Vec{rho * st * std::cos(phi), rho * st * std::sin(phi), rho * ct};
        if (!admissible(y)) continue;
        f_(y, tmp);
        const double jac = wt * (2.0 * kPi / nphi) * rho * rho;
        for (int i = 0; i < count_; ++i) out[i] += jac * tmp[i];
      }
    }
  }

  Vec x_;
  int d_;
  const Region& region_;
  int count_;
  const Integrand& f_;
  const Hints& hints_;
  int order_;
};

// Accumulates geometric shells and decides when the remaining geometric tail
// can be extrapolated.
class GeometricShells {
 public:
  GeometricShells(int count, double rel_tol, bool outward, int controlled)
      : count_(count), ctrl_(controlled > 0 ? std::min(controlled, count) : count), rel_tol_(rel_tol),
        outward_(outward) {}

  // Adds the next shell; returns true once every component is settled.
  bool add(const Values& shell, const Values& shell_err) {
    history_.push_back(shell);
    for (int i = 0; i < count_; ++i) {
      total_[i] += shell[i];
      err_[i] += shell_err[i];
    }
    const std::size_t k = history_.size();
    if (k < 3) return false;
    bool all = true;
    for (int i = 0; i < ctrl_; ++i) {
      rem_[i] = 0.0;
      rem_err_[i] = 0.0;
      const double s = history_[k - 1][i];
      const double sp = history_[k - 2][i];
      const double spp = history_[k - 3][i];
      const double tot = std::abs(total_[i]);
      const std::size_t zeros_needed = outward_ ? 3 : 2;
      bool zero_run = true;
      for (std::size_t j = 0; j < std::min(zeros_needed, k); ++j)
        if (history_[k - 1 - j][i] != 0.0) zero_run = false;
      if (zero_run) continue;
      if (std::abs(s) <= 1e-4 * rel_tol_ * tot && std::abs(sp) <= 1e-3 * rel_tol_ * tot) continue;
      if (sp == 0.0 || spp == 0.0) {
        all = false;
        continue;
      }
      const double q = s / sp;
      const double qp = sp / spp;
      if (!(q >= 0.0 && q < 0.999)) {
        all = false;
        continue;
      }
      // Shells carry relative error ~rel_tol, so q itself is only known to
      // about 4 rel_tol; the remainder inherits that noise amplified by 1/(1-q).
      const double rem = s * q / (1.0 - q);
      const double dq = std::abs(q - qp);
      const double noise = 4.0 * rel_tol_ * q;
      rem_[i] = rem;
      rem_err_[i] = std::abs(rem) * (dq + noise) / (1.0 - q);
      const double target = 0.05 * rel_tol_ * std::max(std::abs(total_[i] + rem), 1e-300);
      const bool settled = dq <= noise || std::abs(rem) * dq / (1.0 - q) <= target;
      if (!(dq < 0.5 * (1.0 - q) && settled)) all = false;
    }
    return all;
  }

  // Best-effort remainder when the budget ran out.
  void finalize_exhausted() {
    exhausted_ = true;
    for (int i = 0; i < count_; ++i) {
      rem_err_[i] = std::max(rem_err_[i], std::abs(total_[i]) + std::abs(rem_[i]));
    }
  }

  void result(MultiResult& out) const {
    for (int i = 0; i < count_; ++i) {
      out.value[i] += total_[i] + rem_[i];
      out.error[i] += err_[i] + rem_err_[i];
    }
    out.exhausted = out.exhausted || exhausted_;
  }

 private:
  int count_;
  int ctrl_;
  double rel_tol_;
  bool outward_;
  bool exhausted_ = false;
  std::vector<Values> history_;
  Values total_{}, err_{}, rem_{}, rem_err_{};
};

constexpr int kShellDepth = 24;

bool all_finite(const MultiResult& r, int count) {
  for (int i = 0; i < count; ++i)
    if (!std::isfinite(r.value[i])) return false;
  return true;
}

}  // namespace

MultiResult adaptive_gk(const std::function<void(double, Values&)>& f, int count, double a, double b, double rel_tol,
                        int max_depth, int controlled) {
  const int ctrl = controlled > 0 ? std::min(controlled, count) : count;
  MultiResult out;
  if (!(b > a)) return out;
  const GkPiece whole = gk15(f, count, a, b);
  out.evals += 15;
  Values abs_tol{};
  for (int i = 0; i < count; ++i) abs_tol[i] = rel_tol * std::abs(whole.kronrod[i]);
  adaptive_rec(f, count, ctrl, a, b, rel_tol, abs_tol, max_depth, 0, whole, out);
  return out;
}

MultiResult integrate_about(const Vec& x, int d, const Region& region, int count, const Integrand& f,
                            const Hints& hints, const QuadratureBudget& budget) {
  if (d < 1 || d > 3) throw DomainError("integration supports d = 1, 2, 3");
  if (count < 1 || count > kMaxValues) throw DomainError("too many integrand components");
  MultiResult out;
  double lo = 0.0;
  double hi = kInf;
  std::vector<double> br;
  auto clip_ball = [&](const Ball& b, bool inside) {
    const double dx = norm(x - b.center);
    const double r = b.radius;
    if (inside) {
      if (dx < r) {
        hi = std::min(hi, r + dx);
        br.push_back(r - dx);
      } else {
        lo = std::max(lo, dx - r);
        hi = std::min(hi, dx + r);
      }
    } else {
      if (dx < r) {
        lo = std::max(lo, r - dx);
        br.push_back(r + dx);
      } else {
        br.push_back(dx - r);
        br.push_back(dx + r);
      }
    }
  };
  if (region.mode == RegionMode::Inside) clip_ball(region.ball, true);
  if (region.mode == RegionMode::Outside) clip_ball(region.ball, false);
  if (hints.nonzero_ball) clip_ball(*hints.nonzero_ball, true);
  lo = std::max(lo, hints.floor);
  hi = std::min(hi, hints.cap);
  // Base points on a clipping sphere.
  if (lo > 0.0 && lo < 1e-12 * std::min(hi, 1.0)) lo = 0.0;
  if (!(hi > lo)) return out;
  br.insert(br.end(), hints.radial.begin(), hints.radial.end());
  if (hints.frequency > 0.0) br.push_back(1.0 / hints.frequency);

  std::vector<double> pts{lo};
  for (double b : br)
    if (b > lo && b < hi && std::isfinite(b)) pts.push_back(b);
  if (std::isfinite(hi)) pts.push_back(hi);
  sort_unique(pts, std::isfinite(hi) ? hi : std::max(1.0, pts.back()));
  if (lo == 0.0 && pts.size() == 1) pts.push_back(1.0);
  const bool open_tail = !std::isfinite(hi);

  AngularIntegrator angular(x, d, region, count, f, hints, budget);
  auto radial = [&](double rho, Values& v) { angular(rho, v); };
  const double base = budget.annulus_base;
  const double tol = budget.rel_tol;

  auto integrate_segment = [&](double a, double b) {
    if (hints.frequency > 0.0 && (b - a) * hints.frequency > 2.0 * kPi) {
      const double period = 2.0 * kPi / hints.frequency;
      const int n = static_cast<int>(std::ceil((b - a) / period));
      const double w = (b - a) / n;
      for (int j = 0; j < n; ++j) {
        auto piece = adaptive_gk(radial, count, a + j * w, j + 1 == n ? b : a + (j + 1) * w, tol, kShellDepth, hints.controlled);
        for (int i = 0; i < count; ++i) {
          out.value[i] += piece.value[i];
          out.error[i] += piece.error[i];
        }
        out.exhausted = out.exhausted || piece.exhausted;
      }
      return;
    }
    if (a > 0.0 && b / a > base) {
      const int n = static_cast<int>(std::ceil(std::log(b / a) / std::log(base)));
      const double ratio = std::pow(b / a, 1.0 / n);
      double s = a;
      for (int j = 0; j < n; ++j) {
        const double e = j + 1 == n ? b : s * ratio;
        auto piece = adaptive_gk(radial, count, s, e, tol, kShellDepth, hints.controlled);
        for (int i = 0; i < count; ++i) {
          out.value[i] += piece.value[i];
          out.error[i] += piece.error[i];
        }
        out.exhausted = out.exhausted || piece.exhausted;
        s = e;
      }
    } else {
      auto piece = adaptive_gk(radial, count, a, b, tol, kShellDepth, hints.controlled);
      for (int i = 0; i < count; ++i) {
        out.value[i] += piece.value[i];
        out.error[i] += piece.error[i];
      }
      out.exhausted = out.exhausted || piece.exhausted;
    }
  };

  std::size_t first_finite = 0;
  if (pts[0] == 0.0) {
    // Inward geometric shells from pts[1] towards the singular point.
    GeometricShells shells(count, tol, false, hints.controlled);
    double b = pts[1];
    bool done = false;
    for (int k = 0; k < budget.max_shells && !done; ++k) {
      const double a = b / base;
      auto piece = adaptive_gk(radial, count, a, b, tol, kShellDepth, hints.controlled);
      if (!all_finite(piece, count)) break;
      out.exhausted = out.exhausted || piece.exhausted;
      done = shells.add(piece.value, piece.error);
      b = a;
      if (angular.calls > budget.max_cells) break;
    }
    if (!done) shells.finalize_exhausted();
    shells.result(out);
    first_finite = 1;
  }
  for (std::size_t j = first_finite; j + 1 < pts.size(); ++j) integrate_segment(pts[j], pts[j + 1]);
  if (open_tail) {
    GeometricShells shells(count, tol, true, hints.controlled);
    double a = pts.back();
    if (a <= 0.0) a = 1.0;
    bool done = false;
    for (int k = 0; k < budget.max_shells && !done; ++k) {
      const double b = a * base;
      auto piece = adaptive_gk(radial, count, a, b, tol, kShellDepth, hints.controlled);
      if (!all_finite(piece, count)) break;
      out.exhausted = out.exhausted || piece.exhausted;
      done = shells.add(piece.value, piece.error);
      a = b;
      if (a > budget.tail_Rmax || angular.calls > budget.max_cells) break;
    }
    if (!done) shells.finalize_exhausted();
    shells.result(out);
  }
  out.evals = angular.calls;
  return out;
}

FormValue weighted_radial_integral(const Profile& f, const std::function<double(double)>& weight, double r_lo,
                                   double r_hi, int d, const QuadratureBudget& budget,
                                   std::vector<double> extra_breaks, double frequency) {
  budget.validate();
  if (!(r_lo >= 0.0 && r_hi > r_lo)) throw DomainError("radial integral needs 0 <= r_lo < r_hi");
  if (f.is_zero() || r_lo >= f.support_radius || r_hi <= f.inner_radius) return {};
  Hints hints;
  hints.floor = std::max(r_lo, f.inner_radius);
  hints.cap = std::min(r_hi, f.support_radius);
  hints.radial = f.radial_breaks;
  hints.radial.insert(hints.radial.end(), extra_breaks.begin(), extra_breaks.end());
  hints.angular = f.angular_breaks;
  hints.radially_symmetric = f.radial;
  hints.frequency = frequency;
  if (!f.radial && d > 2) throw DomainError("non-radial profiles are supported for d <= 2");
  const auto& value = f.value;
  Integrand g = [&](const Vec& y, Values& out) { out[0] = weight(norm(y)) * value(y); };
  const auto res = integrate_about(Vec{}, d, Region::whole(), 1, g, hints, budget);
  return res.component(0);
}

FormValue radial_integral(const Profile& f, double r_lo, double r_hi, int d, const QuadratureBudget& budget) {
  return weighted_radial_integral(f, [](double) { return 1.0; }, r_lo, r_hi, d, budget);
}

}  // namespace nlf
