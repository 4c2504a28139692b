#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nlf/forms.hpp"

namespace nlf {

const char* to_string(FamilyTag t) {
  switch (t) {
    case FamilyTag::Bump: return "bump";
    case FamilyTag::PolynomialBump: return "polynomial_bump";
    case FamilyTag::FourierMixture: return "fourier_mixture";
    case FamilyTag::Gaussian: return "gaussian";
    case FamilyTag::Cutoff: return "cutoff";
    case FamilyTag::Custom: return "custom";
  }
  return "?";
}

namespace {

void check_dim(int d) {
  if (d < 1 || d > 3) throw DomainError("test functions support d = 1, 2, 3");
}

double poly_bump_lipschitz(int m, double r) {
  if (m == 1) return 2.0 / r;
  const double s = 1.0 / std::sqrt(2.0 * m - 1.0);
  return 2.0 * m * s * std::pow(1.0 - s * s, m - 1) / r;
}

// Transform of (1 - |x|^2)_+^m: 2^m Gamma(m+1) t^{-nu} J_nu(t), nu = d/2 + m.
double poly_bump_transform(int d, int m, double t) {
  const double nu = d / 2.0 + m;
  const double pre = std::ldexp(std::tgamma(m + 1.0), m);
  if (t < 1e-3) return pre * std::pow(2.0, -nu) / std::tgamma(nu + 1.0) * (1.0 - t * t / (4.0 * (nu + 1.0)));
  return pre * std::pow(t, -nu) * std::cyl_bessel_j(nu, t);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string point_id(const Vec& c, int d) {
  std::string s = "(";
  for (int i = 0; i < d; ++i) s += (i ? "," : "") + fmt(c[static_cast<std::size_t>(i)]);
  return s + ")";
}

Ball scaled_ball(const Ball& b, double r) { return Ball(r * b.center, r * b.radius); }

}  // namespace

TestFunction polynomial_bump(int d, const Vec& center, double radius, int m) {
  check_dim(d);
  if (m < 1) throw DomainError("bump exponent must be at least 1");
  TestFunction u;
  u.id = "poly" + std::to_string(m) + "_" + point_id(center, d) + "_" + fmt(radius);
  u.tag = FamilyTag::PolynomialBump;
  u.dim = d;
  const double inv_r2 = 1.0 / (radius * radius);
  u.value = [center, inv_r2, m](const Vec& x) {
    const Vec z = x - center;
    const double s2 = dot(z, z) * inv_r2;
    if (s2 >= 1.0) return 0.0;
    const double q = 1.0 - s2;
    double v = q;
    for (int i = 1; i < m; ++i) v *= q;
    return v;
  };
  u.support = Ball(center, radius);
  u.kinks = {Ball(center, radius)};
  u.lipschitz_bound = poly_bump_lipschitz(m, radius);
  const double beta = std::tgamma(d / 2.0) * std::tgamma(2.0 * m + 1.0) / std::tgamma(d / 2.0 + 2.0 * m + 1.0);
  u.l2_norm_sq = std::pow(radius, d) * 0.5 * unit_sphere_area(d) * beta;
  const double rd2 = std::pow(radius, 2.0 * d);
  u.fourier_abs2 = [d, m, radius, rd2](double rho) {
    const double f = poly_bump_transform(d, m, radius * rho);
    return rd2 * f * f;
  };
  u.fourier_abs2_mean = [d, m, radius, rd2](double rho) {
    const double t = radius * rho;
    if (t < 10.0) {
      const double f = poly_bump_transform(d, m, t);
      return rd2 * f * f;
    }
    const double pre = std::ldexp(std::tgamma(m + 1.0), m);
    return rd2 * pre * pre * std::pow(t, -(d + 2.0 * m)) / (kPi * t);
  };
  u.fourier_frequency = 2.0 * radius;
  return u;
}

TestFunction smooth_bump(int d, const Vec& center, double radius) {
  check_dim(d);
  TestFunction u;
  u.id = "bump_" + point_id(center, d) + "_" + fmt(radius);
  u.tag = FamilyTag::Bump;
  u.dim = d;
  const double inv_r2 = 1.0 / (radius * radius);
  u.value = [center, inv_r2](const Vec& x) {
    const Vec z = x - center;
    const double s2 = dot(z, z) * inv_r2;
    return s2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s2)) : 0.0;
  };
  u.support = Ball(center, radius);
  double lip = 0.0;
  for (int i = 1; i < 100000; ++i) {
    const double s = i / 100000.0;
    const double q = 1.0 - s * s;
    lip = std::max(lip, std::exp(1.0 - 1.0 / q) * 2.0 * s / (q * q));
  }
  u.lipschitz_bound = 1.001 * lip / radius;
  return u;
}

TestFunction fourier_mixture(int d, const Vec& center, double radius, std::vector<Wave> waves) {
  check_dim(d);
  if (waves.empty()) throw DomainError("fourier mixture needs at least one wave");
  TestFunction u;
  u.id = "mix" + std::to_string(waves.size()) + "_" + point_id(center, d) + "_" + fmt(radius);
  u.tag = FamilyTag::FourierMixture;
  u.dim = d;
  const double inv_r2 = 1.0 / (radius * radius);
  u.value = [center, inv_r2, waves](const Vec& x) {
    const Vec z = x - center;
    const double s2 = dot(z, z) * inv_r2;
    if (s2 >= 1.0) return 0.0;
    double g = 0.0;
    for (const auto& w : waves) g += w.amplitude * std::cos(dot(w.frequency, z) + w.phase);
    const double q = 1.0 - s2;
    return q * q * q * g;
  };
  u.support = Ball(center, radius);
  u.kinks = {Ball(center, radius)};
  double sum_a = 0.0, sum_aw = 0.0;
  for (const auto& w : waves) {
    sum_a += std::abs(w.amplitude);
    sum_aw += std::abs(w.amplitude) * norm(w.frequency);
  }
  u.lipschitz_bound = poly_bump_lipschitz(3, radius) * sum_a + sum_aw;
  return u;
}

TestFunction gaussian(int d, const Vec& center, double s) {
  check_dim(d);
  if (!(s > 0.0)) throw DomainError("gaussian width must be positive");
  TestFunction u;
  u.id = "gauss_" + point_id(center, d) + "_" + fmt(s);
  u.tag = FamilyTag::Gaussian;
  u.dim = d;
  const double k = 0.5 / (s * s);
  u.value = [center, k](const Vec& x) {
    const Vec z = x - center;
    return std::exp(-k * dot(z, z));
  };
  u.effective_support = Ball(center, s * std::sqrt(2.0 * std::log(1e16)));
  u.lipschitz_bound = std::exp(-0.5) / s;
  u.l2_norm_sq = std::pow(kPi * s * s, d / 2.0);
  const double s2d = std::pow(s, 2.0 * d);
  u.fourier_abs2 = [s, s2d](double rho) { return s2d * std::exp(-s * s * rho * rho); };
  u.fourier_abs2_mean = u.fourier_abs2;
  return u;
}

TestFunction build_cutoff(double R, double rho, int d, const Vec& center) {
  check_dim(d);
  if (!(R > 0.0 && R < 1.0 && rho > 0.0 && rho < 1.0)) throw DomainError("cutoff needs R, rho in (0,1)");
  TestFunction u;
  u.id = "cutoff_" + fmt(R) + "_" + fmt(rho);
  u.tag = FamilyTag::Cutoff;
  u.dim = d;
  u.value = [center, R, rho](const Vec& x) {
    const double t = std::clamp((norm(x - center) - R) / rho, 0.0, 1.0);
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  };
  u.support = Ball(center, R + rho);
  u.plateau = Ball(center, R);
  u.kinks = {Ball(center, R), Ball(center, R + rho)};
  u.lipschitz_bound = 2.0 / rho;
  return u;
}

TestFunction custom_function(int d, std::function<double(const Vec&)> f, std::optional<Ball> support,
                             double lipschitz_bound, std::string id) {
  check_dim(d);
  TestFunction u;
  u.id = std::move(id);
  u.dim = d;
  u.value = std::move(f);
  u.support = support;
  if (support) u.kinks = {*support};
  u.lipschitz_bound = lipschitz_bound;
  return u;
}

TestFunction scale_function(TestFunction u, double lambda) {
  auto f = u.value;
  u.id = fmt(lambda) + "*" + u.id;
  u.value = [f, lambda](const Vec& x) { return lambda * f(x); };
  u.lipschitz_bound *= std::abs(lambda);
  if (u.l2_norm_sq) u.l2_norm_sq = *u.l2_norm_sq * lambda * lambda;
  const double l2 = lambda * lambda;
  if (u.fourier_abs2) {
    auto g = u.fourier_abs2;
    u.fourier_abs2 = [g, l2](double r) { return l2 * g(r); };
  }
  if (u.fourier_abs2_mean) {
    auto g = u.fourier_abs2_mean;
    u.fourier_abs2_mean = [g, l2](double r) { return l2 * g(r); };
  }
  return u;
}

TestFunction add_constant(TestFunction u, double c) {
  if (c == 0.0) return u;
  auto f = u.value;
  u.id = u.id + "+" + fmt(c);
  u.value = [f, c](const Vec& x) { return f(x) + c; };
  u.support.reset();
  u.effective_support.reset();
  u.l2_norm_sq.reset();
  u.fourier_abs2 = nullptr;
  u.fourier_abs2_mean = nullptr;
  return u;
}

TestFunction dilate(TestFunction u, double r) {
  if (!(r > 0.0)) throw DomainError("dilation factor must be positive");
  auto f = u.value;
  const double inv = 1.0 / r;
  u.id = u.id + "@" + fmt(r);
  u.value = [f, inv](const Vec& x) { return f(inv * x); };
  if (u.support) u.support = scaled_ball(*u.support, r);
  if (u.plateau) u.plateau = scaled_ball(*u.plateau, r);
  if (u.effective_support) u.effective_support = scaled_ball(*u.effective_support, r);
  for (auto& b : u.kinks) b = scaled_ball(b, r);
  u.lipschitz_bound *= inv;
  const double rd = std::pow(r, u.dim);
  if (u.l2_norm_sq) u.l2_norm_sq = *u.l2_norm_sq * rd;
  if (u.fourier_abs2) {
    auto g = u.fourier_abs2;
    u.fourier_abs2 = [g, r, rd](double rho) { return rd * rd * g(r * rho); };
  }
  if (u.fourier_abs2_mean) {
    auto g = u.fourier_abs2_mean;
    u.fourier_abs2_mean = [g, r, rd](double rho) { return rd * rd * g(r * rho); };
  }
  u.fourier_frequency *= r;
  return u;
}

std::vector<TestFunction> bump_family(int d, const Ball& B, int count, unsigned seed, bool mixtures) {
  check_dim(d);
  if (count < 1) throw DomainError("family size must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto random_unit = [&]() {
    Vec v{};
    if (d == 1) return Vec{unif(rng) < 0.5 ? -1.0 : 1.0, 0, 0};
    double n2 = 0.0;
    do {
      for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] = 2.0 * unif(rng) - 1.0;
      n2 = dot(v, v);
    } while (n2 > 1.0 || n2 < 1e-6);
    return (1.0 / std::sqrt(n2)) * v;
  };
  const int kinds = mixtures ? 5 : 4;
  std::vector<TestFunction> out;
  for (int i = 0; i < count; ++i) {
    const double radius = B.radius * (0.3 + 0.6 * unif(rng));
    const double offset = (B.radius - radius) * unif(rng);
    const Vec c = B.center + offset * random_unit();
    const int kind = i % kinds;
    if (kind < 3) {
      out.push_back(polynomial_bump(d, c, radius, kind + 1));
    } else if (kind == 3) {
      out.push_back(smooth_bump(d, c, radius));
    } else {
      std::vector<Wave> waves;
      for (int w = 0; w < 2; ++w) {
        const double freq = (1.0 + 3.0 * unif(rng)) / radius;
        waves.push_back({freq * random_unit(), 0.5 + 0.5 * unif(rng), 2.0 * kPi * unif(rng)});
      }
      out.push_back(fourier_mixture(d, c, radius, waves));
    }
  }
  return out;
}

}  // namespace nlf
