#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlf/conditions.hpp"
#include "nlf/kernels.hpp"
#include "nlf/types.hpp"

namespace nlf {

/// Uniform cell grid on the box [x0 - R, x0 + R]^d (d = 1, 2) with spacing h;
/// cell centres sit at x0 + (i + 1/2 - n/2) h per axis.
struct CellGrid {
  int dim = 1;
  double h = 0.0;
  Vec center{};
  int n_axis = 0;

  std::size_t size() const { return dim == 1 ? static_cast<std::size_t>(n_axis) : static_cast<std::size_t>(n_axis) * n_axis; }
  Vec node(std::size_t idx) const;
  std::array<int, 2> coords(std::size_t idx) const;
};

/// Stiffness of the exterior Dirichlet problem on B_r(x0). Unknowns are the
/// cells with centre in B_r; cells with centre in B_R \ B_r carry the data,
/// and the kernel mass beyond B_R enters through the tail weights.
struct StiffnessOperator {
  KernelSpec kernel;
  CellGrid grid;
  double radius = 1.0;
  double collar_R = 2.0;
  std::vector<std::size_t> interior;   // grid indices of unknowns
  std::vector<std::size_t> exterior;   // grid indices of data cells
  Eigen::MatrixXd A;                   // interior block, tail and exterior couplings on the diagonal
  std::vector<double> exterior_row_sum; // sum over exterior cells of w_ij
  std::vector<double> tail;            // h^d int_{|y - x0| > R} k(x_i, y) dy
  std::function<double(std::size_t, std::size_t)> weight;  // w_ij for grid indices

  /// A u - sum_E w_ij c - tail_i c for constant data c: vanishes up to roundoff.
  Eigen::VectorXd apply_constant(double c) const;
  /// 2 u^T A u for a vector on the unknowns with zero data: the discrete E^k_{R^d}.
  double quadratic_form(const Eigen::VectorXd& u) const;
};

/// Weights w_ij = (h^d / 2) (int_{C_j} k(x_i, y) dy + int_{C_i} k(x_j, y) dy),
/// symmetric and nonnegative; cells of a translation-invariant kernel share
/// one weight per offset. Requires h <= r/32 and R >= 2r.
StiffnessOperator assemble(const KernelSpec& k, const Vec& x0, double r, double h, double collar_R);

struct DiscreteSolution {
  int dim = 1;
  double h = 0.0;
  Vec center{};
  double radius = 1.0;
  double collar_R = 2.0;
  std::optional<double> alpha;
  KernelSpec kernel;
  std::function<double(const Vec&)> exterior_data;

  CellGrid grid;
  std::vector<double> grid_values;  // solved inside B_r, data elsewhere
  std::vector<std::size_t> interior;
  double residual = 0.0;            // ||A u - b|| / ||b||
  double data_min = 0.0, data_max = 0.0;  // range of the data, including tail averages

  double value(std::size_t interior_k) const { return grid_values[interior[interior_k]]; }
  Vec node(std::size_t interior_k) const { return grid.node(interior[interior_k]); }
  /// Multilinear interpolation of the cell values.
  double interpolate(const Vec& x) const;
  bool maximum_principle_holds(double tol = 1e-10) const;
};

/// Interior values of the Schur-reduced SPD system (dense Cholesky).
DiscreteSolution solve_dirichlet(const StiffnessOperator& op, const std::function<double(const Vec&)>& exterior_data);
/// Columns x1[,x2],u for the unknowns.
std::string solution_csv(const DiscreteSolution& s);

struct TailMeasureReport {
  double radius = 0.0;
  std::vector<int> j;
  std::vector<double> eta;
  double ratio = 0.0;     // fitted eta_{j+1} / eta_j
  bool nonincreasing = true;
  Verdict verdict = Verdict::Inconclusive;
};

/// eta_{r,j} = sup_x nu^x_r(R^d \ B_{2^j r}(x0)), nu^x_r(A) = int_A U(y - x) dy / int_{|y - x0| > r} U(y - x0) dy.
TailMeasureReport tail_measure(const KernelSpec& k, const Vec& x0, double r, const std::vector<Vec>& x_grid,
                               int j_max, const QuadratureBudget& budget = {});
nlohmann::json to_json(const TailMeasureReport& t);

struct HarnackAudit {
  double p0 = 1.0;
  double inf_quarter = 0.0;  // min over nodes in B_{r/4}
  double mean_p = 0.0;       // (mean over nodes in B_{r/2} of u^p0)^{1/p0}
  double tail = 0.0;         // sup_{x in B_{r/2}} r^alpha int_{|z - x0| > r} u^-(z) k(x, z) dz
  double empirical_c = 0.0;  // smallest c with c inf >= mean - c tail
};

HarnackAudit weak_harnack_audit(const DiscreteSolution& s, double p0 = 1.0, const QuadratureBudget& budget = {});
nlohmann::json to_json(const HarnackAudit& a);

struct OscillationSchedule {
  double theta = 4.0;
  double p = 1.0;
  double c1 = 1.0;
  int d = 1;
  std::optional<double> c2_override;  // strong-Harnack variant: c2 supplied by the user

  double c2() const;
  double kappa() const { return 0.5 / c2(); }
  double beta_cap() const { return std::log(2.0 / (2.0 - kappa())) / std::log(theta); }
};

struct HolderReport {
  std::vector<double> rho;
  std::vector<double> osc;
  double beta_fit = 0.0;      // +inf for a constant solution
  bool monotone = true;
  int fit_from = 0;
  // Certified sequences for the schedule's beta_cap.
  double beta_cap = 0.0;
  double beta_used = 0.0;
  double K = 0.0;
  std::vector<double> m, M;
  std::vector<int> cases;     // 1 or 2 per level n >= 1
  bool certified = false;     // m_n <= u <= M_n on every B_{r theta^-n}
};

/// Oscillations over B_rho(x0) (interpolated), beta from the last two thirds
/// of the scales, and the two-sided sequences of the oscillation-decay proof.
/// Default rho grid: r theta^{-n} while rho >= 2h.
HolderReport holder_estimate(const DiscreteSolution& s, const OscillationSchedule& schedule,
                             std::vector<double> rho_grid = {});
nlohmann::json to_json(const HolderReport& h);

}  // namespace nlf
