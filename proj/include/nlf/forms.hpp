#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlf/conditions.hpp"
#include "nlf/kernels.hpp"
#include "nlf/types.hpp"

namespace nlf {

enum class FamilyTag { Bump, PolynomialBump, FourierMixture, Gaussian, Cutoff, Custom };
const char* to_string(FamilyTag t);

/// A test function on R^d with the metadata the form engine needs.
struct TestFunction {
  std::string id = "u";
  FamilyTag tag = FamilyTag::Custom;
  int dim = 1;
  std::function<double(const Vec&)> value;

  std::optional<Ball> support;      // u = 0 outside; empty means global
  std::optional<Ball> plateau;      // u is constant on this ball
  std::vector<Ball> kinks;          // spheres across which u may lose smoothness
  double lipschitz_bound = kInf;
  // Global functions: |u| is below 1e-16 sup|u| outside this ball.
  std::optional<Ball> effective_support;

  std::optional<double> l2_norm_sq;
  // |u^(xi)|^2 for the unitary transform, as a function of |xi|, and its
  // average over the oscillation period 2 pi / fourier_frequency.
  std::function<double(double)> fourier_abs2;
  std::function<double(double)> fourier_abs2_mean;
  double fourier_frequency = 0.0;

  double operator()(const Vec& x) const { return value(x); }
  /// support, or the effective support of a global function.
  std::optional<Ball> working_support() const { return support ? support : effective_support; }
};

/// (1 - |x-c|^2/r^2)_+^m.
TestFunction polynomial_bump(int d, const Vec& center, double radius, int m);
/// exp(1 - 1/(1 - |x-c|^2/r^2)) inside the ball, 0 outside.
TestFunction smooth_bump(int d, const Vec& center, double radius);
/// (1 - |x-c|^2/r^2)_+^3 sum_k a_k cos(w_k.(x-c) + phi_k).
struct Wave {
  Vec frequency{};
  double amplitude = 1.0;
  double phase = 0.0;
};
TestFunction fourier_mixture(int d, const Vec& center, double radius, std::vector<Wave> waves);
/// exp(-|x-c|^2 / (2 s^2)).
TestFunction gaussian(int d, const Vec& center, double s);
/// tau = 1 on B_R, 0 outside B_{R+rho}; quintic smoothstep ramp in |x|.
TestFunction build_cutoff(double R, double rho, int d = 1, const Vec& center = {});
TestFunction custom_function(int d, std::function<double(const Vec&)> f, std::optional<Ball> support,
                             double lipschitz_bound, std::string id = "custom");

TestFunction scale_function(TestFunction u, double lambda);  // lambda u
TestFunction add_constant(TestFunction u, double c);         // u + c
TestFunction dilate(TestFunction u, double r);               // x -> u(x / r)

/// Seeded family of polynomial bumps (m in {1,2,3}), smooth bumps and
/// windowed Fourier mixtures with random centres and radii inside B.
std::vector<TestFunction> bump_family(int d, const Ball& B, int count, unsigned seed, bool mixtures = true);

/// alpha (2 - alpha) |x-y|^{-d-alpha}.
KernelSpec reference_kernel(int d, double alpha);

/// int_D int_D (u(y) - u(x))^2 k_j(x, y) dy dx for up to four kernels in one
/// pass (D empty means R^d, which needs a compactly supported u). d <= 2.
std::vector<FormValue> double_form_integral(const TestFunction& u, const std::vector<KernelSpec>& kernels,
                                            const std::optional<Ball>& D, const QuadratureBudget& budget);
FormValue double_form_integral(const TestFunction& u, const KernelSpec& k, const Ball& D,
                               const QuadratureBudget& budget);

FormValue energy_form(const TestFunction& u, const KernelSpec& k, const Ball& D, const QuadratureBudget& budget = {});
FormValue reference_form(const TestFunction& u, double alpha, const Ball& D, const QuadratureBudget& budget = {});
FormValue energy_form_whole(const TestFunction& u, const KernelSpec& k, const QuadratureBudget& budget = {});
FormValue reference_form_whole(const TestFunction& u, double alpha, const QuadratureBudget& budget = {});

/// ||u||^2 in L^2(D) (D empty: R^d); closed form when available.
FormValue l2_norm_sq(const TestFunction& u, const std::optional<Ball>& D, const QuadratureBudget& budget = {});
/// ||u||_{L^2} + E^alpha_{R^d}(u,u)^{1/2}.
FormValue sobolev_norm(const TestFunction& u, double alpha, const QuadratureBudget& budget = {});

struct RatioRow {
  std::string function_id;
  double alpha = 0.0;
  double E_k = 0.0;
  double E_alpha = 0.0;
  double ratio = 0.0;
  double err = 0.0;
  bool excluded = false;
};

struct ComparabilityReport {
  std::vector<RatioRow> rows;
  double min_ratio = kInf;
  double max_ratio = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string notes;
};

ComparabilityReport comparability_scan(const KernelSpec& k, double alpha, const Ball& B,
                                       const std::vector<TestFunction>& family, const QuadratureBudget& budget = {});
std::string ratio_table_csv(const ComparabilityReport& r);
nlohmann::json to_json(const ComparabilityReport& r);

/// Points for the sup in (B): dense across the ramp annulus, coarse elsewhere.
/// In d = 2 a few rays in [0, pi/4] cover anisotropic kernels.
std::vector<Vec> default_cutoff_grid(int d, double R, double rho, int n = 24, const Vec& center = {});

/// max over x of rho^alpha int (tau(y) - tau(x))^2 k(x,y) dy. With c4 given
/// the verdict additionally requires the bound 2^alpha c4.
ConditionReport check_B(const KernelSpec& k, double alpha, double R, double rho, std::vector<Vec> x_grid,
                        const QuadratureBudget& budget = {}, std::optional<double> c4 = std::nullopt,
                        const Vec& center = {});

struct WhitneyCover {
  int dim = 1;
  double eta = 0.5;
  Ball parent;
  std::vector<Ball> balls;
  std::vector<double> sides;   // side of the dyadic cube behind each ball
  double pair_constant = 0.0;  // achieved c in the pair-covering property
  int overlap_bound = 0;       // M: max number of dilates meeting any dilate
  double boundary_layer = 0.0; // points closer than this to the boundary are not covered

  Ball dilate(std::size_t i) const { return Ball(balls[i].center, balls[i].radius / eta); }
};

WhitneyCover whitney_cover(int d, const Ball& D, double eta, int max_depth = 0);

struct WhitneyAudit {
  double max_containment_excess = 0.0;  // max of |c_i - c_D| + r_i/eta - R
  int max_overlap = 0;                  // over the probe grid
  int probes = 0;
  int pairs_tested = 0;
  int pair_failures = 0;
};
WhitneyAudit audit_whitney(const WhitneyCover& w, int probes, int pairs, unsigned seed);

/// Nonnegative combination of axis-aligned boxes (intervals in d = 1).
struct Box {
  Vec lo{};
  Vec hi{};
  double height = 1.0;
};
struct BoxMeasure {
  int dim = 1;
  std::vector<Box> boxes;

  double operator()(const Vec& z) const;
  double l1_norm() const;
  double support_radius() const;
  /// Exact q * q(z) from pairwise box overlaps.
  double self_convolution(const Vec& z) const;
  Profile profile() const;
  Profile convolution_profile() const;
};
/// Even step function in d = 1: height[i] on edges[i] <= |z| < edges[i+1].
BoxMeasure step_measure(const std::vector<double>& edges, const std::vector<double>& heights);
/// q_n = 2^{n(beta+2)} 1_{E_n} for the thorn kernel.
BoxMeasure thorn_q(const ThornParams& params, int n);

struct ConvolutionCheck {
  FormValue lhs;      // E^{q*q}_{B_R}
  FormValue rhs_form; // E^q_{B_{R+rho}}
  double q_l1 = 0.0;
  double rhs = 0.0;   // 4 ||q||_1 E^q_{B_{R+rho}}
  double slack = 0.0; // rhs - lhs
  Verdict verdict = Verdict::Inconclusive;
};
ConvolutionCheck convolution_bound_check(const BoxMeasure& q, const TestFunction& u, double R,
                                         const QuadratureBudget& budget = {});

/// ||u - mean_D u||^2_{L^2(D)} / E^alpha_D(u,u).
double poincare_quotient(const TestFunction& u, const Ball& D, double alpha, const QuadratureBudget& budget = {});

struct ThornLevel {
  int n = 0;
  double q_l1_expected = 0.0;  // 2^{n alpha - 1 - 2/b}
  double q_l1_computed = 0.0;
  double conv_min_on_P = 0.0;  // min of q_n * q_n over samples in P_n
  double conv_bound = 0.0;     // 2^{-2-4/b} 2^{n(2 alpha + 2)}
  bool E_in_Gamma = true;
  int samples = 0;
};
struct ThornCertificate {
  double b = 0.5;
  double alpha = 1.0;
  double R = 0.5;
  std::vector<ThornLevel> levels;
  int n_truncated = -1;  // first level skipped for floating-point range, or -1
  ComparabilityReport scan;
  Verdict verdict = Verdict::Inconclusive;
};
ThornCertificate thorn_certificate(const ThornParams& params, double R, const QuadratureBudget& budget = {},
                                   int n_max = 3, int family_size = 6, unsigned seed = 1);
nlohmann::json to_json(const ThornCertificate& c);

}  // namespace nlf
