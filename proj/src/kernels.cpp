#include "nlf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nlf {

namespace {

double radius_of(const Vec& z) { return norm(z); }
}  // namespace

void circle_crossings(std::vector<double>& out, double rho, const Vec& c, double a) {
  const double cn = norm(c);
  if (cn == 0.0 || rho <= 0.0) return;
  const double arg = (rho * rho + cn * cn - a * a) / (2.0 * rho * cn);
  if (arg <= -1.0 || arg >= 1.0) return;
  const double phi = std::atan2(c[1], c[0]);
  const double w = std::acos(arg);
  out.push_back(phi - w);
  out.push_back(phi + w);
}

Profile zero_profile(int d) {
  Profile p;
  p.dim = d;
  p.name = "zero";
  p.value = [](const Vec&) { return 0.0; };
  p.radial = true;
  p.support_radius = 0.0;
  p.l1_norm = 0.0;
  p.cosine_transform = [](const Vec&) { return 0.0; };
  return p;
}

Profile power_profile(int d, double coeff, double s) {
  if (coeff < 0.0) throw DomainError("power profile coefficient must be nonnegative");
  Profile p;
  p.dim = d;
  p.name = "power";
  const double expo = -(d + s);
  p.value = [coeff, expo](const Vec& z) { return coeff * std::pow(radius_of(z), expo); };
  p.radial = true;
  p.origin_exponent = s;
  p.tail_exponent = s;
  if (coeff == 0.0) p.support_radius = 0.0;
  return p;
}

Profile stable_profile(int d, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
  Profile p = power_profile(d, 2.0 - alpha, alpha);
  p.name = "stable";
  return p;
}

Profile ball_union_profile(int d, std::vector<Vec> centers, double radius, double height) {
  if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
  if (centers.empty()) throw DomainError("ball union needs at least one center");
  Profile p;
  p.dim = d;
  p.name = "ball_union";
  p.value = [centers, radius, height](const Vec& z) {
    for (const auto& c : centers)
      if (norm(z - c) < radius) return height;
    return 0.0;
  };
  double outer = 0.0;
  double inner = kInf;
  for (const auto& c : centers) {
    outer = std::max(outer, norm(c) + radius);
    inner = std::min(inner, norm(c) - radius);
    const double cn = norm(c);
    p.radial_breaks.push_back(cn + radius);
    if (cn > radius) p.radial_breaks.push_back(cn - radius);
  }
  p.support_radius = outer;
  p.inner_radius = std::max(0.0, inner);
  p.l1_norm = height * static_cast<double>(centers.size()) * unit_ball_volume(d) * std::pow(radius, d);
  p.angular_breaks = [centers, radius](double rho) {
    std::vector<double> out;
    for (const auto& c : centers) circle_crossings(out, rho, c, radius);
    return out;
  };
  p.cosine_transform = [centers, radius, height, d](const Vec& xi) {
    const double s = norm(xi);
    double shape;
    if (d == 1) {
      shape = s == 0.0 ? 2.0 * radius : 2.0 * std::sin(s * radius) / s;
    } else if (d == 2) {
      shape = s * radius < 1e-8 ? kPi * radius * radius : 2.0 * kPi * radius * std::cyl_bessel_j(1.0, s * radius) / s;
    } else {
      const double t = s * radius;
      shape = t < 1e-4 ? 4.0 / 3.0 * kPi * radius * radius * radius
                      : 4.0 * kPi * (std::sin(t) - t * std::cos(t)) / (s * s * s);
    }
    double total = 0.0;
    for (const auto& c : centers) total += std::cos(dot(xi, c)) * shape;
    return height * total;
  };
  return p;
}

Profile radial_step_profile(int d, std::vector<double> edges, std::vector<double> heights) {
  if (edges.size() != heights.size() + 1) throw DomainError("step profile needs one more edge than height");
  if (!std::is_sorted(edges.begin(), edges.end()) || edges.front() < 0.0)
    throw DomainError("step edges must be sorted and nonnegative");
  for (double h : heights)
    if (h < 0.0) throw DomainError("step heights must be nonnegative");
  Profile p;
  p.dim = d;
  p.name = "radial_step";
  p.radial = true;
  p.support_radius = edges.back();
  p.inner_radius = edges.front();
  p.radial_breaks = edges;
  double l1 = 0.0;
  for (std::size_t i = 0; i < heights.size(); ++i)
    l1 += heights[i] * unit_ball_volume(d) * (std::pow(edges[i + 1], d) - std::pow(edges[i], d));
  p.l1_norm = l1;
  p.value = [edges, heights](const Vec& z) {
    const double r = norm(z);
    if (r < edges.front() || r >= edges.back()) return 0.0;
    const auto it = std::upper_bound(edges.begin(), edges.end(), r);
    return heights[static_cast<std::size_t>(it - edges.begin()) - 1];
  };
  return p;
}

Profile table_profile(int d, std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw DomainError("table profile needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].first > 0.0)) throw DomainError("table radii must be positive");
    if (points[i].second < 0.0) throw DomainError("table values must be nonnegative");
    if (i > 0 && !(points[i].first > points[i - 1].first)) throw DomainError("table radii must be increasing");
  }
  Profile p;
  p.dim = d;
  p.name = "table";
  p.radial = true;
  auto slope = [](const std::pair<double, double>& a, const std::pair<double, double>& b) {
    if (a.second <= 0.0 || b.second <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::log(b.second / a.second) / std::log(b.first / a.first);
  };
  const double head = slope(points[0], points[1]);
  const double tail = slope(points[points.size() - 2], points.back());
  if (std::isfinite(head)) p.origin_exponent = -head - d;
  if (std::isfinite(tail)) {
    p.tail_exponent = -tail - d;
  } else {
    p.support_radius = points.back().first;
  }
  p.value = [points, head, tail](const Vec& z) {
    const double r = norm(z);
    if (r <= points.front().first) {
      if (!std::isfinite(head)) return points.front().second;
      return points.front().second * std::pow(r / points.front().first, head);
    }
    if (r >= points.back().first) {
      if (!std::isfinite(tail)) return r == points.back().first ? points.back().second : 0.0;
      return points.back().second * std::pow(r / points.back().first, tail);
    }
    const auto it = std::upper_bound(points.begin(), points.end(), r,
                                     [](double v, const std::pair<double, double>& q) { return v < q.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (lo.second <= 0.0 || hi.second <= 0.0) {
      const double t = (r - lo.first) / (hi.first - lo.first);
      return lo.second + t * (hi.second - lo.second);
    }
    const double t = std::log(r / lo.first) / std::log(hi.first / lo.first);
    return std::exp(std::log(lo.second) + t * std::log(hi.second / lo.second));
  };
  return p;
}

Profile scaled(Profile p, double lambda) {
  if (lambda < 0.0) throw DomainError("profile scale must be nonnegative");
  auto f = p.value;
  p.value = [f, lambda](const Vec& z) { return lambda * f(z); };
  if (p.l1_norm) p.l1_norm = *p.l1_norm * lambda;
  if (p.cosine_transform) {
    auto c = p.cosine_transform;
    p.cosine_transform = [c, lambda](const Vec& xi) { return lambda * c(xi); };
  }
  if (lambda == 0.0) p.support_radius = 0.0;
  p.name = p.name + "_scaled";
  return p;
}

Profile power_law_capped(Profile p, double coeff, double s) {
  auto f = p.value;
  const double expo = -(p.dim + s);
  p.value = [f, coeff, expo](const Vec& z) { return std::min(f(z), coeff * std::pow(norm(z), expo)); };
  p.cosine_transform = nullptr;
  p.l1_norm.reset();
  p.name = p.name + "_capped";
  return p;
}

bool in_thorn_region(const Vec& z, double b) {
  const double a1 = std::abs(z[0]);
  const double a2 = std::abs(z[1]);
  return a2 >= std::pow(a1, b) || a1 >= std::pow(a2, b);
}

double thorn_half_angle(double rho, double b) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("thorn half angle needs rho in (0,1)");
  // With t = log tan(phi) the boundary |x1| = |x2|^b reads
  // (1-b) log rho - b t - (1-b)/2 log1p(e^{2t}) = 0, decreasing in t.
  const double lr = std::log(rho);
  auto g = [&](double t) { return (1.0 - b) * lr - b * t - 0.5 * (1.0 - b) * std::log1p(std::exp(2.0 * t)); };
  double lo = -745.0;
  double hi = 0.0;
  if (g(lo) <= 0.0) return 0.0;
  // Safeguarded Newton from the root without the log1p term.
  double t = std::clamp((1.0 - b) * lr / b, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const double gt = g(t);
    if (gt > 0.0)
      lo = t;
    else
      hi = t;
    const double e = std::exp(2.0 * t);
    const double dg = -b - (1.0 - b) * e / (1.0 + e);
    double next = t - gt / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) {
      t = next;
      break;
    }
    t = next;
  }
  return std::atan(std::exp(t));
}

Profile thorn_profile(const ThornParams& params) {
  Profile p;
  p.dim = 2;
  p.name = "thorn";
  const double pre = 2.0 - params.alpha.value();
  const double expo = -2.0 - params.beta;
  const double b = params.b;
  p.value = [pre, expo, b](const Vec& z) {
    const double r = norm(z);
    if (r >= 1.0 || !in_thorn_region(z, b)) return 0.0;
    return pre * std::pow(r, expo);
  };
  p.support_radius = 1.0;
  p.radial_breaks = {1.0};
  p.angular_breaks = [b](double rho) {
    std::vector<double> out;
    if (!(rho < 1.0)) return out;
    const double w = thorn_half_angle(rho, b);
    for (int q = 0; q < 4; ++q) {
      const double axis = q * kPi / 2.0;
      out.push_back(axis - w);
      out.push_back(axis + w);
    }
    return out;
  };
  return p;
}

double thorn_rect_halfwidth(int n, double b) { return std::pow(2.0, -2.0 - (n + 2.0) / b); }

bool in_thorn_E(const Vec& z, int n, double b) {
  const double a1 = std::abs(z[0]);
  const double a2 = std::abs(z[1]);
  const double lo = std::ldexp(1.0, -n - 2);
  const double hi = std::ldexp(1.0, -n - 1);
  const double w = thorn_rect_halfwidth(n, b);
  return (a1 >= lo && a1 <= hi && a2 <= w) || (a2 >= lo && a2 <= hi && a1 <= w);
}

bool in_thorn_P(const Vec& z, int n) {
  const double s = std::ldexp(1.0, -n - 2);
  const double a1 = std::abs(z[0]);
  const double a2 = std::abs(z[1]);
  return a1 >= 1.25 * s && a1 <= 1.75 * s && a2 >= 1.25 * s && a2 <= 1.75 * s;
}

Profile thorn_auxiliary_profile(const ThornParams& params, int n0, int levels) {
  if (n0 < 0 || levels < 1) throw DomainError("auxiliary profile needs n0 >= 0 and levels >= 1");
  Profile p;
  p.dim = 2;
  p.name = "thorn_auxiliary";
  const double al = params.alpha.value();
  const double pre = (2.0 - al) * std::pow(2.0, -2.0 - 4.0 / params.b);
  p.value = [pre, al, n0, levels](const Vec& z) {
    for (int n = n0; n < n0 + levels; ++n)
      if (in_thorn_P(z, n)) return pre * std::pow(2.0, n * (al + 2.0));
    return 0.0;
  };
  p.support_radius = 1.75 * std::sqrt(2.0) * std::ldexp(1.0, -n0 - 2);
  p.inner_radius = 1.25 * std::sqrt(2.0) * std::ldexp(1.0, -(n0 + levels - 1) - 2);
  return p;
}

double frac_constant(int d, double alpha) {
  if (d < 1) throw DomainError("dimension must be positive");
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
  return alpha * std::tgamma((d + alpha) / 2.0) /
         (std::pow(2.0, 1.0 - alpha) * std::pow(kPi, d / 2.0) * std::tgamma(1.0 - alpha / 2.0));
}

KernelSpec kernel_from_profile(const Profile& p, double alpha) {
  KernelSpec k;
  k.dim = p.dim;
  k.family = p.name;
  k.alpha = alpha;
  auto f = p.value;
  k.value = [f](const Vec& x, const Vec& y) { return f(x - y); };
  k.lower = p;
  k.upper = p;
  k.translation_invariant = true;
  k.support_radius = p.support_radius;
  auto rb = p.radial_breaks;
  k.radial_breaks = [rb](const Vec&) { return rb; };
  if (p.angular_breaks) {
    auto ab = p.angular_breaks;
    k.angular_breaks = [ab](const Vec&, double rho) { return ab(rho); };
  }
  return k;
}

KernelSpec make_fractional_kernel(int d, double alpha, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("fractional kernel scale must lie in (0,1]");
  const double a = frac_constant(d, alpha);
  KernelSpec k = kernel_from_profile(power_profile(d, c * a, alpha), alpha);
  k.family = "fractional";
  k.lower = power_profile(d, c * a, alpha);
  k.upper = power_profile(d, a / c, alpha);
  return k;
}

KernelSpec make_masked_kernel(const KernelSpec& base) {
  KernelSpec k = base;
  k.family = "masked";
  k.translation_invariant = false;
  auto f = base.value;
  k.value = [f](const Vec& x, const Vec& y) {
    const double nx = norm(x);
    const double ny = norm(y);
    const double mask = (nx <= 0.1 * ny ? 1.0 : 0.0) + (ny <= 0.1 * nx ? 1.0 : 0.0);
    return mask == 0.0 ? 0.0 : mask * f(x, y);
  };
  k.lower = zero_profile(base.dim);
  auto base_rb = base.radial_breaks;
  k.radial_breaks = [base_rb](const Vec& x) {
    std::vector<double> out = base_rb ? base_rb(x) : std::vector<double>{};
    const double nx = norm(x);
    for (double t : {0.1 * nx, 10.0 * nx}) {
      out.push_back(std::abs(nx - t));
      out.push_back(nx + t);
    }
    return out;
  };
  auto base_ab = base.angular_breaks;
  k.angular_breaks = [base_ab](const Vec& x, double rho) {
    std::vector<double> out = base_ab ? base_ab(x, rho) : std::vector<double>{};
    const double nx = norm(x);
    for (double t : {0.1 * nx, 10.0 * nx}) circle_crossings(out, rho, -x, t);
    return out;
  };
  return k;
}

KernelSpec make_thorn_kernel(const ThornParams& params) {
  KernelSpec k = kernel_from_profile(thorn_profile(params), params.alpha.value());
  k.family = "thorn";
  return k;
}

KernelSpec zero_kernel(int d) {
  KernelSpec k = kernel_from_profile(zero_profile(d));
  k.family = "zero";
  return k;
}

AuditResult audit_kernel(const KernelSpec& k, int samples, unsigned seed, double box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-box, box);
  AuditResult res;
  for (int s = 0; s < samples; ++s) {
    Vec x{}, y{};
    for (int i = 0; i < k.dim; ++i) {
      x[i] = unif(rng);
      y[i] = unif(rng);
    }
    if (norm(x - y) == 0.0) continue;
    const double kxy = k(x, y);
    const double kyx = k(y, x);
    res.max_asymmetry = std::max(res.max_asymmetry, std::abs(kxy - kyx));
    const double lo = k.lower(x - y);
    const double hi = k.upper(x - y);
    const double scale = std::max({kxy, hi, 1e-300});
    res.max_envelope_violation = std::max({res.max_envelope_violation, (lo - kxy) / scale, (kxy - hi) / scale});
    ++res.samples;
  }
  return res;
}

}  // namespace nlf
