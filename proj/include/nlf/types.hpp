#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nlf {

// Points live in R^3 storage; coordinates beyond the working dimension stay 0,
// so Euclidean norms are correct for d = 1, 2, 3 without carrying d around.
using Vec = std::array<double, 3>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = std::numbers::pi;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec operator-(const Vec& a) { return {-a[0], -a[1], -a[2]}; }

/// Thrown for parameters outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine cannot produce a meaningful value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Order alpha in (0,2) together with a lower threshold alpha0 in (0, alpha).
class Alpha {
 public:
  explicit Alpha(double alpha, double alpha0 = -1.0) : alpha_(alpha), alpha0_(alpha0 < 0 ? alpha / 2 : alpha0) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
    if (!(alpha0_ > 0.0 && alpha0_ < alpha)) throw DomainError("alpha0 must lie in (0, alpha)");
  }
  double value() const { return alpha_; }
  double lower() const { return alpha0_; }
  operator double() const { return alpha_; }

 private:
  double alpha_;
  double alpha0_;
};

struct Ball {
  Vec center{};
  double radius = 1.0;

  Ball() = default;
  Ball(Vec c, double r) : center(c), radius(r) {
    if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  }
  bool contains(const Vec& x) const { return norm(x - center) < radius; }
  double volume(int d) const;
};

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}
/// Surface measure of S^{d-1}.
inline double unit_sphere_area(int d) { return d * unit_ball_volume(d); }

inline double Ball::volume(int d) const { return unit_ball_volume(d) * std::pow(radius, d); }

/// A quadratic-form value with an a-posteriori error estimate.
struct FormValue {
  double value = 0.0;
  double error_estimate = 0.0;
  long budget_used = 0;
  bool exhausted = false;  // refinement stopped on budget before rel_tol

  FormValue& operator+=(const FormValue& o) {
    value += o.value;
    error_estimate += o.error_estimate;
    budget_used += o.budget_used;
    exhausted = exhausted || o.exhausted;
    return *this;
  }
};

struct QuadratureBudget {
  double rel_tol = 1e-6;
  long max_cells = 200000;
  double annulus_base = 2.0;
  double tail_Rmax = 1e12;
  // Resolution knobs for the double-integral engine.
  int outer_panels = 4;     // radial outer panels (d = 2) / initial intervals (d = 1)
  int outer_angles = 32;    // outer angular nodes (d = 2), must be even
  int angular_order = 8;    // Gauss nodes per angular piece
  int max_shells = 400;

  void validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
    if (max_cells < 1000) throw DomainError("max_cells must be at least 1000");
    if (!(annulus_base > 1.0)) throw DomainError("annulus_base must exceed 1");
    if (outer_angles % 2 != 0) throw DomainError("outer_angles must be even");
  }
};

}  // namespace nlf
