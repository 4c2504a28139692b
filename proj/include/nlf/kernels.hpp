#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlf/types.hpp"

namespace nlf {

/// A nonnegative function on R^d together with the metadata the quadrature
/// layer needs: support, power-law behavior at 0 and infinity, and the places
/// where the function may jump.
struct Profile {
  int dim = 1;
  std::string name = "custom";
  std::function<double(const Vec&)> value;

  bool radial = false;
  double support_radius = kInf;  // zero for |z| > support_radius
  double inner_radius = 0.0;     // zero for |z| < inner_radius

  // value(z) ~ |z|^{-d-s}: s at the origin and at infinity, when known.
  std::optional<double> origin_exponent;
  std::optional<double> tail_exponent;

  // Radii where the profile may jump, and (d = 2) angles on the circle of a
  // given radius where it may jump.
  std::vector<double> radial_breaks;
  std::function<std::vector<double>(double)> angular_breaks;

  // Closed-form cosine transform z -> int cos(xi.z) value(z) dz and L^1 norm.
  std::function<double(const Vec&)> cosine_transform;
  std::optional<double> l1_norm;

  double operator()(const Vec& z) const { return value(z); }
  bool is_zero() const { return support_radius <= inner_radius; }
};

/// Appends the angles at which the circle of radius rho about the origin
/// crosses the sphere of radius a about c (d = 2).
void circle_crossings(std::vector<double>& out, double rho, const Vec& c, double a);

Profile zero_profile(int d);
/// coeff * |z|^{-d-s}.
Profile power_profile(int d, double coeff, double s);
/// The stable envelope (2 - alpha) |z|^{-d-alpha}.
Profile stable_profile(int d, double alpha);
/// height times the indicator of a union of disjoint balls of a common radius.
Profile ball_union_profile(int d, std::vector<Vec> centers, double radius, double height = 1.0);
/// Radial step function: value heights[i] for |z| in [edges[i], edges[i+1]).
Profile radial_step_profile(int d, std::vector<double> edges, std::vector<double> heights);
/// Radial profile from sorted (r, value) pairs; linear interpolation of
/// log(value) in log(r), power-law extrapolation at both ends.
Profile table_profile(int d, std::vector<std::pair<double, double>> points);
Profile scaled(Profile p, double lambda);
/// Pointwise minimum envelope, used for surrogates such as L ^ (power law).
Profile power_law_capped(Profile p, double coeff, double s);

/// Parameters of the four-thorn kernel in d = 2.
struct ThornParams {
  double b;
  Alpha alpha;
  double beta;

  ThornParams(double b_, Alpha a) : b(b_), alpha(a), beta(a.value() - 1.0 + 1.0 / b_) {
    if (!(b_ > 0.0 && b_ < 1.0)) throw DomainError("thorn parameter b must lie in (0,1)");
  }
};

/// Membership in the thorn region {|x2| >= |x1|^b or |x1| >= |x2|^b}; the
/// boundary counts as inside.
bool in_thorn_region(const Vec& z, double b);
/// Half-width (in angle) of the thorn around the x1-axis on the circle of
/// radius rho < 1.
double thorn_half_angle(double rho, double b);
/// (2 - alpha) 1_{Gamma cap B_1}(z) |z|^{-2-beta}.
Profile thorn_profile(const ThornParams& params);

/// Half-height 2^{-2-(n+2)/b} of the thin rectangles that make up E_n.
double thorn_rect_halfwidth(int n, double b);
/// E_n: two pairs of thin rectangles along the axes at scale 2^{-n}.
bool in_thorn_E(const Vec& z, int n, double b);
/// P_n = {5/4 2^{-n-2} <= |x1|, |x2| <= 7/4 2^{-n-2}}.
bool in_thorn_P(const Vec& z, int n);
/// f = (2 - alpha) 2^{-2-4/b} sum_{n0 <= n < n0 + levels} 2^{n(alpha+2)} 1_{P_n}.
Profile thorn_auxiliary_profile(const ThornParams& params, int n0, int levels);

/// A symmetric kernel k(x,y) with envelopes L(x-y) <= k(x,y) <= U(x-y).
struct KernelSpec {
  int dim = 1;
  std::string family = "custom";
  double alpha = std::numeric_limits<double>::quiet_NaN();
  std::function<double(const Vec&, const Vec&)> value;
  Profile lower;
  Profile upper;
  bool translation_invariant = true;
  double support_radius = kInf;  // k(x,y) = 0 for |x-y| > support_radius

  // Distances from x at which y -> k(x,y) may jump along rays, and (d = 2)
  // angles on the circle of radius rho about x where it may jump.
  std::function<std::vector<double>(const Vec&)> radial_breaks;
  std::function<std::vector<double>(const Vec&, double)> angular_breaks;

  double operator()(const Vec& x, const Vec& y) const { return value(x, y); }
};

/// A_{d,-alpha} = alpha Gamma((d+alpha)/2) / (2^{1-alpha} pi^{d/2} Gamma(1-alpha/2)).
double frac_constant(int d, double alpha);

/// Translation-invariant kernel k(x,y) = p(x-y); both envelopes equal p.
KernelSpec kernel_from_profile(const Profile& p, double alpha = std::numeric_limits<double>::quiet_NaN());
/// k(x,y) = c A_{d,-alpha} |x-y|^{-d-alpha}, c in (0,1].
KernelSpec make_fractional_kernel(int d, double alpha, double c = 1.0);
/// k(x,y) (1{|x| <= 0.1|y|} + 1{|y| <= 0.1|x|}); zero lower envelope.
KernelSpec make_masked_kernel(const KernelSpec& base);
KernelSpec make_thorn_kernel(const ThornParams& params);
KernelSpec zero_kernel(int d);

struct AuditResult {
  double max_asymmetry = 0.0;      // max |k(x,y) - k(y,x)|
  double max_envelope_violation = 0.0;  // max of L - k and k - U, relative
  int samples = 0;
};
/// Randomized symmetry and envelope audit on pairs in the cube [-box, box]^d.
AuditResult audit_kernel(const KernelSpec& k, int samples, unsigned seed, double box = 1.0);

}  // namespace nlf
