#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlf/conditions.hpp"
#include "nlf/forms.hpp"
#include "nlf/multiplier.hpp"

namespace nlf {

struct MultiplierSamples {
  std::string L_id;
  int dim = 1;
  std::vector<Vec> xi_points;
  std::vector<double> values;
  std::vector<double> errors;
};

MultiplierSamples sample_multiplier(const Profile& L, const std::vector<Vec>& xi_points,
                                    const QuadratureBudget& budget = {});
/// Columns xi1[,xi2[,xi3]],m,err.
std::string multiplier_csv(const MultiplierSamples& s);

/// |xi| -> m_L(xi) for profiles whose multiplier depends on |xi| only (d = 1
/// even profiles, radial profiles): log-log interpolation of numerically
/// computed values on a geometric grid, power-law extrapolation outside.
class RadialMultiplier {
 public:
  RadialMultiplier(const Profile& L, double xi_min, double xi_max, int points, const QuadratureBudget& budget = {});
  double operator()(double rho) const;
  double max_rel_error() const { return max_rel_error_; }
  bool exhausted() const { return exhausted_; }

 private:
  std::vector<double> log_xi_, log_m_;
  double max_rel_error_ = 0.0;
  bool exhausted_ = false;
};

/// int g(|xi|) |u^(xi)|^2 dxi (unitary transform). Closed-form transforms are
/// integrated radially with period splitting and an averaged tail; otherwise
/// a zero-padded FFT of u on a box around its support is used (d <= 2), with
/// the difference of two resolutions and a fitted power tail as the error.
/// g_growth bounds the growth exponent of g at infinity.
FormValue frequency_integral(const TestFunction& u, const std::function<double(double)>& g, double g_growth,
                             const QuadratureBudget& budget = {});

/// int |xi|^alpha |u^(xi)|^2 dxi.
FormValue plancherel_reference(const TestFunction& u, double alpha, const QuadratureBudget& budget = {});

/// E^alpha_{R^d}(u,u) from the frequency side: (2 alpha (2-alpha) / A_{d,-alpha}) times the above.
FormValue reference_form_spectral(const TestFunction& u, double alpha, const QuadratureBudget& budget = {});

struct GlobalUpperCheck {
  FormValue lhs;       // int m_U |u^|^2 = E^U_{R^d}(u,u)
  FormValue E_alpha;   // frequency-side E^alpha_{R^d}(u,u)
  FormValue l2;        // ||u||^2
  double c = 0.0;      // lhs / (E_alpha + ||u||^2)
  double c_pure = 0.0; // lhs / E_alpha
  Verdict verdict = Verdict::Inconclusive;
  std::string notes;
};

/// Both sides of E^k_{R^d} <= c (E^alpha_{R^d} + ||u||^2) with the left side
/// bounded through the upper envelope of k (d = 1, or radial envelope).
GlobalUpperCheck global_upper_check(const KernelSpec& k, const TestFunction& u, double alpha,
                                    const QuadratureBudget& budget = {});

struct Comp0Row {
  std::string function_id;
  double lhs = 0.0;       // int |xi|^alpha |u^|^2
  double rhs_form = 0.0;  // (1/c0) int m_L |u^|^2
  double rhs_l2 = 0.0;    // (2/r0)^alpha ||u||^2
  double err = 0.0;
  bool holds = false;
};

struct RayDecay {
  Vec direction{};
  std::vector<double> xi_norms;
  std::vector<double> ratios;  // m_L(t h) / t^alpha
  double slope = 0.0;          // log-log slope of the ratios
  bool decays = false;
};

struct CharacterizationReport {
  ConditionReport aprime;
  double c0 = 0.0;
  double r0 = 1.0;
  std::vector<Comp0Row> rows;
  std::vector<RayDecay> rays;
  Verdict verdict = Verdict::Inconclusive;  // the A'(alpha) direction of the equivalence
  bool consistent = false;                  // the predicted consequence was observed
  std::string notes;
};

/// Runs the A'(alpha) test for L on r in r0 2^{-1..-levels}. On pass the
/// frequency-side lower bound is checked on `family` (default: bumps and
/// Gaussians with closed-form transforms); on fail m_L(t h)/t^alpha is
/// sampled along rays to show that no bound m_L >= c |xi|^alpha survives.
CharacterizationReport characterization_check(const Profile& L, double alpha, double r0,
                                              const QuadratureBudget& budget = {},
                                              std::vector<TestFunction> family = {}, int levels = 10);
nlohmann::json to_json(const CharacterizationReport& r);

}  // namespace nlf
