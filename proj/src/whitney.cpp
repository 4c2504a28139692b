#include <algorithm>
#include <cmath>
#include <random>

#include "nlf/forms.hpp"

namespace nlf {

namespace {

struct Cube {
  Vec lo{};
  double side = 0.0;
};

// Nearest and farthest points of the cube from c.
double near_dist(const Cube& q, const Vec& c, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double a = std::clamp(c[i], q.lo[i], q.lo[i] + q.side);
    s += (a - c[i]) * (a - c[i]);
  }
  return std::sqrt(s);
}

double far_dist(const Cube& q, const Vec& c, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double a = std::max(std::abs(q.lo[i] - c[i]), std::abs(q.lo[i] + q.side - c[i]));
    s += a * a;
  }
  return std::sqrt(s);
}

}  // namespace

WhitneyCover whitney_cover(int d, const Ball& D, double eta, int max_depth) {
  if (d < 1 || d > 3) throw DomainError("whitney cover supports d = 1, 2, 3");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0,1)");
  if (max_depth <= 0) max_depth = d == 1 ? 16 : (d == 2 ? 9 : 6);
  WhitneyCover w;
  w.dim = d;
  w.eta = eta;
  w.parent = D;
  const double sd = std::sqrt(static_cast<double>(d));
  const double kappa = sd / eta;
  const double R = D.radius;

  Cube root;
  for (int i = 0; i < d; ++i) root.lo[i] = D.center[i] - R;
  root.side = 2.0 * R;
  std::vector<Cube> level{root};
  double c = kInf;
  double s_min = root.side;
  for (int depth = 0; depth <= max_depth && !level.empty(); ++depth) {
    std::vector<Cube> next;
    for (const Cube& q : level) {
      if (near_dist(q, D.center, d) >= R) continue;
      const double dist = R - far_dist(q, D.center, d);
      if (dist >= kappa * q.side) {
        Vec ctr = q.lo;
        for (int i = 0; i < d; ++i) ctr[i] += 0.5 * q.side;
        const double r = 0.75 * q.side * sd;
        w.balls.emplace_back(ctr, r);
        w.sides.push_back(q.side);
        c = std::min(c, 0.25 * q.side * sd / (R - near_dist(q, D.center, d)));
        continue;
      }
      const double h = 0.5 * q.side;
      for (int m = 0; m < (1 << d); ++m) {
        Cube ch;
        ch.side = h;
        for (int i = 0; i < d; ++i) ch.lo[i] = q.lo[i] + (((m >> i) & 1) ? h : 0.0);
        next.push_back(ch);
      }
    }
    s_min = level.front().side;
    level = std::move(next);
  }
  w.pair_constant = c;
  w.boundary_layer = (kappa + sd) * s_min;

  // M: dilates meeting a given dilate, including itself.
  const std::size_t n = w.balls.size();
  for (std::size_t i = 0; i < n; ++i) {
    int cnt = 0;
    const Ball bi = w.dilate(i);
    for (std::size_t j = 0; j < n; ++j) {
      const Ball bj = w.dilate(j);
      if (norm(bi.center - bj.center) < bi.radius + bj.radius) ++cnt;
    }
    w.overlap_bound = std::max(w.overlap_bound, cnt);
  }
  return w;
}

WhitneyAudit audit_whitney(const WhitneyCover& w, int probes, int pairs, unsigned seed) {
  WhitneyAudit a;
  const int d = w.dim;
  const Ball& D = w.parent;
  a.max_containment_excess = -kInf;
  for (std::size_t i = 0; i < w.balls.size(); ++i) {
    const Ball b = w.dilate(i);
    a.max_containment_excess = std::max(a.max_containment_excess, norm(b.center - D.center) + b.radius - D.radius);
  }

  // Overlap on a tensor grid of the bounding cube, restricted to D.
  const int per_axis = std::max(2, static_cast<int>(std::round(std::pow(static_cast<double>(probes), 1.0 / d))));
  long total = 1;
  for (int i = 0; i < d; ++i) total *= per_axis;
  for (long idx = 0; idx < total; ++idx) {
    Vec x = D.center;
    long rem = idx;
    for (int i = 0; i < d; ++i) {
      const int k = static_cast<int>(rem % per_axis);
      rem /= per_axis;
      x[i] += D.radius * (-1.0 + 2.0 * (k + 0.5) / per_axis);
    }
    if (!D.contains(x)) continue;
    ++a.probes;
    int cnt = 0;
    for (std::size_t i = 0; i < w.balls.size(); ++i)
      if (w.dilate(i).contains(x)) ++cnt;
    a.max_overlap = std::max(a.max_overlap, cnt);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto random_in_ball = [&](double r) {
    Vec v{};
    do {
      for (int i = 0; i < d; ++i) v[i] = unif(rng);
    } while (dot(v, v) >= 1.0);
    return r * v;
  };
  const double inner = D.radius - w.boundary_layer;
  if (inner <= 0.0) return a;
  while (a.pairs_tested < pairs) {
    const Vec x = D.center + random_in_ball(D.radius);
    const double dist = D.radius - norm(x - D.center);
    if (dist < w.boundary_layer) continue;
    const Vec y = x + 0.999 * w.pair_constant * dist * random_in_ball(1.0);
    ++a.pairs_tested;
    bool ok = false;
    for (const auto& b : w.balls)
      if (b.contains(x) && b.contains(y)) {
        ok = true;
        break;
      }
    if (!ok) ++a.pair_failures;
  }
  return a;
}

}  // namespace nlf
