#include <algorithm>
#include <cmath>

#include "nlf/forms.hpp"

namespace nlf {

namespace {

double box_volume(const Box& b, int d) {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= std::max(0.0, b.hi[i] - b.lo[i]);
  return v;
}

// Angles on the circle of radius rho where it meets the lines z_axis = c.
void line_crossings(std::vector<double>& out, double rho, int axis, double c) {
  if (!(std::abs(c) < rho)) return;
  if (axis == 0) {
    const double t = std::acos(c / rho);
    out.push_back(t);
    out.push_back(2.0 * kPi - t);
  } else {
    const double t = std::asin(c / rho);
    out.push_back(t < 0.0 ? t + 2.0 * kPi : t);
    out.push_back(kPi - t);
  }
}

void dedupe(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) <= 1e-14; }), v.end());
}

Profile lines_profile(int d, std::string name, std::function<double(const Vec&)> f, double support,
                      const std::vector<std::array<double, 2>>& coords, std::vector<double> radial) {
  Profile p;
  p.dim = d;
  p.name = std::move(name);
  p.value = std::move(f);
  p.support_radius = support;
  dedupe(radial);
  p.radial_breaks = radial;
  if (d == 2) {
    std::vector<double> xs, ys;
    for (const auto& c : coords) {
      xs.push_back(c[0]);
      ys.push_back(c[1]);
    }
    dedupe(xs);
    dedupe(ys);
    p.angular_breaks = [xs, ys](double rho) {
      std::vector<double> out;
      for (double c : xs) line_crossings(out, rho, 0, c);
      for (double c : ys) line_crossings(out, rho, 1, c);
      return out;
    };
  }
  return p;
}

}  // namespace

double BoxMeasure::operator()(const Vec& z) const {
  double s = 0.0;
  for (const auto& b : boxes) {
    bool in = true;
    for (int i = 0; i < dim && in; ++i) in = z[i] >= b.lo[i] && z[i] < b.hi[i];
    if (in) s += b.height;
  }
  return s;
}

double BoxMeasure::l1_norm() const {
  double s = 0.0;
  for (const auto& b : boxes) s += b.height * box_volume(b, dim);
  return s;
}

double BoxMeasure::support_radius() const {
  double r = 0.0;
  for (const auto& b : boxes) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double a = std::max(std::abs(b.lo[i]), std::abs(b.hi[i]));
      s += a * a;
    }
    r = std::max(r, std::sqrt(s));
  }
  return r;
}

double BoxMeasure::self_convolution(const Vec& z) const {
  double s = 0.0;
  for (const auto& a : boxes) {
    for (const auto& b : boxes) {
      double v = a.height * b.height;
      for (int i = 0; i < dim && v > 0.0; ++i) {
        const double lo = std::max(a.lo[i], z[i] - b.hi[i]);
        const double hi = std::min(a.hi[i], z[i] - b.lo[i]);
        v *= std::max(0.0, hi - lo);
      }
      s += v;
    }
  }
  return s;
}

Profile BoxMeasure::profile() const {
  std::vector<std::array<double, 2>> coords;
  std::vector<double> radial;
  for (const auto& b : boxes) {
    coords.push_back({b.lo[0], b.lo[1]});
    coords.push_back({b.hi[0], b.hi[1]});
    for (int m = 0; m < (1 << dim); ++m) {
      Vec c{};
      for (int i = 0; i < dim; ++i) c[i] = ((m >> i) & 1) ? b.hi[i] : b.lo[i];
      radial.push_back(norm(c));
    }
    for (int i = 0; i < dim; ++i) {
      radial.push_back(std::abs(b.lo[i]));
      radial.push_back(std::abs(b.hi[i]));
    }
  }
  const BoxMeasure self = *this;
  Profile p = lines_profile(dim, "box_measure", [self](const Vec& z) { return self(z); }, support_radius(), coords,
                            radial);
  p.l1_norm = l1_norm();
  return p;
}

Profile BoxMeasure::convolution_profile() const {
  std::vector<std::array<double, 2>> coords;
  std::vector<double> radial;
  for (const auto& a : boxes) {
    for (const auto& b : boxes) {
      const double s0[4] = {a.lo[0] + b.lo[0], a.lo[0] + b.hi[0], a.hi[0] + b.lo[0], a.hi[0] + b.hi[0]};
      const double s1[4] = {a.lo[1] + b.lo[1], a.lo[1] + b.hi[1], a.hi[1] + b.lo[1], a.hi[1] + b.hi[1]};
      for (int k = 0; k < 4; ++k) {
        coords.push_back({s0[k], s1[k]});
        radial.push_back(std::abs(s0[k]));
        if (dim == 2) {
          radial.push_back(std::abs(s1[k]));
          for (int l = 0; l < 4; ++l) radial.push_back(std::hypot(s0[k], s1[l]));
        }
      }
    }
  }
  const BoxMeasure self = *this;
  Profile p = lines_profile(
      dim, "box_self_convolution", [self](const Vec& z) { return self.self_convolution(z); }, 2.0 * support_radius(),
      coords, radial);
  const double l1 = l1_norm();
  p.l1_norm = l1 * l1;
  return p;
}

BoxMeasure step_measure(const std::vector<double>& edges, const std::vector<double>& heights) {
  if (edges.size() != heights.size() + 1 || heights.empty()) throw DomainError("step measure needs n+1 edges");
  BoxMeasure q;
  q.dim = 1;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (!(edges[i] >= 0.0 && edges[i + 1] > edges[i])) throw DomainError("step edges must increase from 0");
    if (heights[i] < 0.0) throw DomainError("step heights must be nonnegative");
    if (heights[i] == 0.0) continue;
    q.boxes.push_back({{edges[i], 0, 0}, {edges[i + 1], 0, 0}, heights[i]});
    q.boxes.push_back({{-edges[i + 1], 0, 0}, {-edges[i], 0, 0}, heights[i]});
  }
  return q;
}

BoxMeasure thorn_q(const ThornParams& params, int n) {
  if (n < 0) throw DomainError("thorn level must be nonnegative");
  BoxMeasure q;
  q.dim = 2;
  const double lo = std::ldexp(1.0, -n - 2);
  const double hi = std::ldexp(1.0, -n - 1);
  const double w = thorn_rect_halfwidth(n, params.b);
  const double h = std::pow(2.0, n * (params.beta + 2.0));
  q.boxes.push_back({{lo, -w, 0}, {hi, w, 0}, h});
  q.boxes.push_back({{-hi, -w, 0}, {-lo, w, 0}, h});
  q.boxes.push_back({{-w, lo, 0}, {w, hi, 0}, h});
  q.boxes.push_back({{-w, -hi, 0}, {w, -lo, 0}, h});
  return q;
}

ConvolutionCheck convolution_bound_check(const BoxMeasure& q, const TestFunction& u, double R,
                                         const QuadratureBudget& budget) {
  if (q.boxes.empty()) throw DomainError("empty measure");
  if (q.dim != u.dim) throw DomainError("measure and function dimensions differ");
  if (!(R > 0.0)) throw DomainError("R must be positive");
  for (const auto& b : q.boxes)
    if (b.height < 0.0) throw DomainError("measure must be nonnegative");
  const double rho = q.support_radius();
  ConvolutionCheck c;
  c.lhs = energy_form(u, kernel_from_profile(q.convolution_profile()), Ball({}, R), budget);
  c.rhs_form = energy_form(u, kernel_from_profile(q.profile()), Ball({}, R + rho), budget);
  c.q_l1 = q.l1_norm();
  c.rhs = 4.0 * c.q_l1 * c.rhs_form.value;
  c.slack = c.rhs - c.lhs.value;
  const double tol = c.lhs.error_estimate + 4.0 * c.q_l1 * c.rhs_form.error_estimate;
  if (c.lhs.exhausted || c.rhs_form.exhausted)
    c.verdict = Verdict::Inconclusive;
  else
    c.verdict = c.slack >= -tol ? Verdict::Pass : Verdict::Fail;
  return c;
}

ThornCertificate thorn_certificate(const ThornParams& params, double R, const QuadratureBudget& budget, int n_max,
                                   int family_size, unsigned seed) {
  if (!(R > 0.0 && R < 1.0)) throw DomainError("R must lie in (0,1)");
  ThornCertificate cert;
  cert.b = params.b;
  cert.alpha = params.alpha.value();
  cert.R = R;
  const double al = cert.alpha;
  const double b = params.b;
  bool levels_ok = true;
  for (int n = 0; n <= n_max; ++n) {
    const double w = thorn_rect_halfwidth(n, b);
    const double lognorm = n * (al + 2.0) * 2.0;
    if (w < 1e-150 || lognorm > 900.0) {
      cert.n_truncated = n;
      break;
    }
    ThornLevel lv;
    lv.n = n;
    const BoxMeasure q = thorn_q(params, n);
    lv.q_l1_expected = std::pow(2.0, n * al - 1.0 - 2.0 / b);
    lv.q_l1_computed = q.l1_norm();
    lv.conv_bound = std::pow(2.0, -2.0 - 4.0 / b + n * (2.0 * al + 2.0));

    const int g = 9;
    for (const auto& box : q.boxes) {
      for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
          Vec z{box.lo[0] + (box.hi[0] - box.lo[0]) * i / (g - 1), box.lo[1] + (box.hi[1] - box.lo[1]) * j / (g - 1), 0};
          lv.E_in_Gamma = lv.E_in_Gamma && in_thorn_region(z, b) && in_thorn_E(z, n, b);
        }
    }
    const double s = std::ldexp(1.0, -n - 2);
    lv.conv_min_on_P = kInf;
    for (int sx = -1; sx <= 1; sx += 2)
      for (int sy = -1; sy <= 1; sy += 2)
        for (int i = 0; i < g; ++i)
          for (int j = 0; j < g; ++j) {
            const Vec z{sx * s * (1.25 + 0.5 * i / (g - 1)), sy * s * (1.25 + 0.5 * j / (g - 1)), 0};
            if (!in_thorn_P(z, n)) continue;
            lv.conv_min_on_P = std::min(lv.conv_min_on_P, q.self_convolution(z));
            ++lv.samples;
          }
    const bool ok = lv.E_in_Gamma && lv.samples > 0 && lv.conv_min_on_P >= lv.conv_bound * (1.0 - 1e-12) &&
                    std::abs(lv.q_l1_computed - lv.q_l1_expected) <= 1e-12 * lv.q_l1_expected;
    levels_ok = levels_ok && ok;
    cert.levels.push_back(lv);
  }
  const Ball B({}, R);
  cert.scan = comparability_scan(make_thorn_kernel(params), al, B, bump_family(2, B, family_size, seed, true), budget);
  if (!levels_ok || cert.scan.verdict == Verdict::Fail)
    cert.verdict = Verdict::Fail;
  else
    cert.verdict = cert.scan.verdict;
  return cert;
}

nlohmann::json to_json(const ThornCertificate& c) {
  nlohmann::json j;
  j["b"] = c.b;
  j["alpha"] = c.alpha;
  j["R"] = c.R;
  j["verdict"] = to_string(c.verdict);
  j["n_truncated"] = c.n_truncated;
  auto lv = nlohmann::json::array();
  for (const auto& l : c.levels) {
    lv.push_back({{"n", l.n},
                  {"q_l1_expected", l.q_l1_expected},
                  {"q_l1_computed", l.q_l1_computed},
                  {"conv_min_on_P", l.conv_min_on_P},
                  {"conv_bound", l.conv_bound},
                  {"E_in_Gamma", l.E_in_Gamma},
                  {"samples", l.samples}});
  }
  j["levels"] = lv;
  j["scan"] = to_json(c.scan);
  return j;
}

}  // namespace nlf
