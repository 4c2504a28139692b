#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nlf/kernels.hpp"
#include "nlf/types.hpp"

namespace nlf {

enum class ConditionId { U0, U1, U1prime, L1, U2, Aprime, B };
enum class Verdict { Pass, Fail, Inconclusive };

const char* to_string(ConditionId id);
const char* to_string(Verdict v);

struct ConditionSample {
  double parameter = 0.0;  // r, R, rho, n, ... depending on the condition
  double value = 0.0;      // the measured normalized quantity
  double error = 0.0;
  Vec direction{};         // A'(alpha) only
};

struct ConditionReport {
  ConditionId id = ConditionId::U0;
  Verdict verdict = Verdict::Inconclusive;
  double empirical_constant = kInf;
  double secondary = 0.0;  // L1: C3; U2, Aprime: fitted log-log slope
  std::vector<ConditionSample> samples;
  std::string notes;

  bool passed() const { return verdict == Verdict::Pass; }
};

nlohmann::json to_json(const ConditionReport& r);

/// Default relative tolerance for constant comparisons.
inline constexpr double kConditionTol = 1e-2;

/// Dyadic radii 2^{-k_lo}, ..., 2^{-k_hi}.
std::vector<double> dyadic_radii(int k_lo, int k_hi);

ConditionReport check_U0(const Profile& U, int d, const QuadratureBudget& budget = {}, double tol = kConditionTol);

ConditionReport check_U1(const Profile& U, double alpha, int d, const std::vector<double>& radii,
                         const QuadratureBudget& budget = {}, double tol = kConditionTol);

/// C4 = (2^{2-alpha} / (1 - 2^{-alpha}) + 1) C1 + 4 C0.
double u1prime_constant(double C0, double C1, double alpha);

ConditionReport check_U1prime(const Profile& U, double alpha, int d, const std::vector<double>& radii,
                              const QuadratureBudget& budget = {}, double tol = kConditionTol);

struct L1Options {
  int cells = 256;         // grid cells across the annulus diameter (>= 64)
  int c3_log2_min = -20;   // C3 searched over 2^{c3_log2_min}, ..., 2^{c3_log2_max}
  int c3_log2_max = 0;
  int n_min = 0;
};

/// Grid scan of the annuli B_{a^{-n+1}} \ B_{a^{-n}}, n_min <= n <= n_max.
/// empirical_constant is C2, secondary is C3.
ConditionReport check_L1(const Profile& L, double alpha, int d, double a, int n_max, const L1Options& opt = {});

/// Finite-horizon surrogate for limsup R^gamma int_{|z|>R} U <= 1.
ConditionReport check_U2(const Profile& U, double gamma, int d, const std::vector<double>& R_grid,
                         const QuadratureBudget& budget = {}, double tol = kConditionTol);

/// c0 = min over (h, r) of r^{alpha-2} int r^2 sin^2(h.z/r) L(z) dz. Fails
/// when the fitted slope of log c0(r) against log r exceeds slope_tol, that
/// is when c0(r) degenerates as r -> 0.
ConditionReport check_Aprime(const Profile& L, double alpha, int d, const std::vector<double>& r_grid,
                             const std::vector<Vec>& directions, const QuadratureBudget& budget = {},
                             double slope_tol = 0.1);

/// n quasi-uniform unit vectors (d = 1: {e1}; d = 2: equally spaced angles on
/// the half circle; d = 3: Fibonacci sphere restricted to a hemisphere).
std::vector<Vec> sample_directions(int d, int n);

/// Least-squares slope of log y against log x; NaN when fewer than two
/// positive samples.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlf
