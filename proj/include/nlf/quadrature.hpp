#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "nlf/kernels.hpp"
#include "nlf/types.hpp"

namespace nlf {

/// Up to kMaxValues integrands are carried through one quadrature pass.
inline constexpr int kMaxValues = 8;
using Values = std::array<double, kMaxValues>;

enum class RegionMode { Inside, Outside, Whole };

struct Region {
  RegionMode mode = RegionMode::Whole;
  Ball ball{};

  static Region whole() { return {}; }
  static Region inside(const Ball& b) { return {RegionMode::Inside, b}; }
  static Region outside(const Ball& b) { return {RegionMode::Outside, b}; }
  bool contains(const Vec& y) const;
};

/// Geometric information about an integrand y -> f(y) around a base point x.
struct Hints {
  std::vector<double> radial;                              // |y-x| where f may jump
  std::function<std::vector<double>(double)> angular;      // d = 2: angles at radius rho
  double floor = 0.0;                                      // f = 0 for |y-x| < floor
  double cap = kInf;                                       // f = 0 for |y-x| > cap
  std::optional<Ball> nonzero_ball;                        // f = 0 outside this ball
  bool radially_symmetric = false;                         // f depends on |y-x| only
  double frequency = 0.0;                                  // f oscillates like cos(frequency |y-x|)
  int controlled = 0;                                      // leading components that drive adaptivity (0: all)
};

using Integrand = std::function<void(const Vec& y, Values& out)>;

struct MultiResult {
  Values value{};
  Values error{};
  long evals = 0;
  bool exhausted = false;
  FormValue component(int i) const {
    return {value[static_cast<std::size_t>(i)], error[static_cast<std::size_t>(i)], evals, exhausted};
  }
};

/// Integrates f over {y in region} in R^d (d = 1, 2, 3; non-symmetric
/// integrands need d <= 2) using polar coordinates about x. The radial
/// variable is split at region boundaries and hint breaks; shells towards
/// rho = 0 and rho = infinity are geometric with ratio annulus_base and the
/// remaining geometric tail is extrapolated and folded into the error.
MultiResult integrate_about(const Vec& x, int d, const Region& region, int count, const Integrand& f,
                            const Hints& hints, const QuadratureBudget& budget);

/// Adaptive Gauss-Kronrod (7/15) for up to kMaxValues components on [a, b].
MultiResult adaptive_gk(const std::function<void(double, Values&)>& f, int count, double a, double b,
                        double rel_tol, int max_depth, int controlled = 0);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
const std::vector<std::pair<double, double>>& gauss_legendre(int n);

/// int_{r_lo < |z| < r_hi} f(z) dz for a profile on R^d.
FormValue radial_integral(const Profile& f, double r_lo, double r_hi, int d, const QuadratureBudget& budget);

/// int_{r_lo < |z| < r_hi} w(|z|) f(z) dz with a radial weight w.
FormValue weighted_radial_integral(const Profile& f, const std::function<double(double)>& weight, double r_lo,
                                   double r_hi, int d, const QuadratureBudget& budget,
                                   std::vector<double> extra_breaks = {}, double frequency = 0.0);

}  // namespace nlf
