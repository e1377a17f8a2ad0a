#pragma once

// Big-jump intensity kernels Gamma(u, dv; x), the small-jump drift encoding,
// and the eps-indexed family
//
//   Gamma^eps(u, dv; x) = eps * Gamma(u, dv; x) + rho(x) * delta_{eps d(u;x)}(dv).
//
// With the generator prefactor 1/eps this family gives, per unit of
// accelerated time, big jumps at rate Gamma(u, R^d; x) and jumps of size
// eps d(u;x) at rate rho(x)/eps. Its negligible terms are exact:
//
//   theta_b = eps^-1 int v Gamma^eps - b   = 0
//   theta_c = eps^-1 int vv* Gamma^eps - c = eps rho d d*
//   theta_g = eps^-1 Gamma_g^eps - Gamma_g = rho g(eps d) / eps
//
// with b = rho d + int v Gamma and c = int vv* Gamma. All three vanish as
// eps -> 0 for bounded d and g(v)/|v|^2 -> 0 at the origin.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include <mmjump/rng.hpp>
#include <mmjump/switching.hpp>

namespace mmjump {

using Point = std::vector<double>;

double euclidean_norm(std::span<const double> v);

struct PointMass {
  double v0 = 0.0;
};
struct Gaussian {
  double mean = 0.0;
  double sd = 1.0;
};
struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};
using Marginal = std::variant<PointMass, Gaussian, Uniform>;

double marginal_mean(const Marginal& m);
double marginal_second_moment(const Marginal& m);
double marginal_sample(const Marginal& m, Rng& rng);
std::string family_name(const Marginal& m);

/// One mixture component of Gamma(u, dv; x): a product law on R^d with
/// intensity lambda(u) = rate * (1 + kappa * min(|u|, ucap)).
struct JumpComponent {
  std::vector<Marginal> marginals;
  double rate = 0.0;
  double kappa = 0.0;
  double ucap = 0.0;

  std::size_t dim() const { return marginals.size(); }
  double intensity(std::span<const double> u) const;
  double max_intensity() const;
  bool has_density() const;
  /// Lebesgue density of the normalized law; 0 if any marginal is atomic.
  double law_density(std::span<const double> v) const;
  Eigen::VectorXd law_mean() const;
  Eigen::MatrixXd law_second_moment() const;
  void sample(Rng& rng, std::span<double> v) const;
  void validate(const std::string& where) const;
};

/// offset + slope * clamp(u_i, -cap, cap), coordinatewise. cap = +inf gives
/// an unsaturated linear term; slope = 0 gives a constant.
struct SaturatingTerm {
  Point offset;
  Point slope;
  Point cap;
};

/// Small-jump displacement d(u; x): a sum of saturating terms.
struct Displacement {
  std::vector<SaturatingTerm> terms;

  static Displacement constant(Point value);
  static Displacement linear(Point offset, Point slope, Point cap);

  void evaluate(std::span<const double> u, std::span<double> out) const;
  Point operator()(std::span<const double> u) const;
  bool is_constant() const;
};

struct StateKernel {
  std::vector<JumpComponent> components;
  double rho = 0.0;
  Displacement displacement;
};

/// Probe g(v) for kernel integrals. `radial_breaks` lists radii |v| where g
/// is not smooth; quadrature splits there.
struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> fn;
  std::vector<double> radial_breaks;

  double operator()(std::span<const double> v) const { return fn(v); }
};

namespace probes {
/// min(|v|^3, 1): bounded, g/|v|^2 -> 0.
TestFunction cube_min();
/// |v|^2 1{|v| > c}: tail second moment (the C3 integrand, trace form). Not
/// bounded, so only a tail probe.
TestFunction tail_second_moment(double c);
/// (1 - cos|v|)^2: bounded by 4, ~|v|^4/4 near 0.
TestFunction cosine_squared();
/// The three probes used for characteristic paths, in column order.
std::vector<TestFunction> catalogue(double tail_c = 1.0);
}  // namespace probes

class JumpModel {
 public:
  JumpModel(std::size_t dim, std::vector<StateKernel> states,
            std::optional<double> growth_bound = std::nullopt);

  std::size_t dim() const { return dim_; }
  std::size_t num_states() const { return states_.size(); }
  const StateKernel& state(StateId x) const { return states_.at(x); }
  const std::vector<StateKernel>& states() const { return states_; }
  /// Declared linear-growth constant L, if any.
  std::optional<double> growth_bound() const { return growth_bound_; }

  /// Gamma(u, R^d; x)
  double big_jump_intensity(std::span<const double> u, StateId x) const;
  /// sup_u Gamma(u, R^d; x); finite because rate growth saturates.
  double max_big_jump_intensity(StateId x) const;
  /// No rate growth and constant displacements in every state.
  bool u_independent() const;

 private:
  std::size_t dim_;
  std::vector<StateKernel> states_;
  std::optional<double> growth_bound_;
};

struct KernelMean {
  Eigen::VectorXd jump_mean;  // int v Gamma(u, dv; x)
  Eigen::VectorXd drift;      // b(u; x) = rho d(u; x) + jump_mean
};

KernelMean kernel_mean(const JumpModel& model, std::span<const double> u, StateId x);
/// c(u; x) = int vv* Gamma(u, dv; x)
Eigen::MatrixXd kernel_second_moment(const JumpModel& model, std::span<const double> u,
                                     StateId x);
/// Gamma_g(u; x) = int g(v) Gamma(u, dv; x) by adaptive quadrature, absolute
/// tolerance `abs_tol`. Point-mass coordinates are evaluated exactly.
double kernel_g_moment(const JumpModel& model, std::span<const double> u, StateId x,
                       const TestFunction& g, double abs_tol = 1e-8);
/// E g(V) for V drawn from the component's normalized law.
double law_g_moment(const JumpComponent& component, const TestFunction& g,
                    double abs_tol = 1e-10);

/// The eps-indexed family Gamma^eps over a JumpModel. Holds a reference; the
/// model must outlive it.
class PrelimitKernel {
 public:
  PrelimitKernel(const JumpModel& model, double eps);

  double eps() const { return eps_; }
  const JumpModel& model() const { return *model_; }

  /// eps^-1 int v Gamma^eps(u, dv; x)
  Eigen::VectorXd scaled_mean(std::span<const double> u, StateId x) const;
  /// eps^-1 int vv* Gamma^eps(u, dv; x)
  Eigen::MatrixXd scaled_second_moment(std::span<const double> u, StateId x) const;
  /// eps^-1 int g Gamma^eps(u, dv; x) given the big-jump part Gamma_g(u; x).
  double scaled_g_moment(std::span<const double> u, StateId x, const TestFunction& g,
                         double big_jump_g_moment) const;
  /// Total event rate eps^-1 Gamma^eps(u, R^d; x) = Gamma(u, R^d; x) + rho/eps.
  double event_rate(std::span<const double> u, StateId x) const;
  /// Small-jump size eps d(u; x).
  Point small_jump(std::span<const double> u, StateId x) const;

 private:
  const JumpModel* model_;
  double eps_;
};

// ---------------------------------------------------------------------------
// Validation reports

struct PaRow {
  double eps = 0.0;
  std::size_t u_index = 0;
  StateId x = 0;
  double theta_b = 0.0;
  double theta_c = 0.0;
  double theta_c_closed = 0.0;
  std::vector<double> theta_g;
  std::vector<double> theta_g_closed;
};

/// sup over (u, x) of one negligible term, per eps.
struct PaColumn {
  std::string name;
  std::vector<double> sup_by_eps;
  bool monotone = true;
};

struct PaReport {
  std::vector<double> eps;
  std::vector<Point> u_grid;
  std::vector<std::string> probe_names;
  std::vector<PaRow> rows;
  std::vector<PaColumn> columns;
  double max_closed_form_gap = 0.0;
  bool theta_b_zero = true;
  bool passed = true;
  std::vector<std::string> failures;
};

/// Evaluates theta_b, theta_c, theta_g on eps x u_grid x E from the kernel
/// family and compares them with their closed forms. Failures (a column not
/// non-increasing in eps beyond 1e-12 jitter, or a closed-form gap above
/// 1e-12) are listed in the report by condition name. Throws ValidationError
/// if `eps_grid` is not strictly descending in (0, 1].
PaReport validate_pa(const JumpModel& model, std::span<const double> eps_grid,
                     const std::vector<Point>& u_grid, const std::vector<TestFunction>& probes);

struct C3Row {
  double c = 0.0;
  double sup_tail = 0.0;
};

struct C4Row {
  Point u;
  StateId x = 0;
  double drift_norm = 0.0;
  double second_norm = 0.0;
  double drift_L = 0.0;    // |b| / (1 + |u|)
  double second_L = 0.0;   // |c| / (1 + |u|^2)
  double density_L = 0.0;  // max_v Lambda(u, v; x) / (f(v) (1 + |u|))
};

struct C3C4Report {
  std::vector<C3Row> c3;
  bool c3_monotone = true;
  bool c3_small = true;
  std::vector<C4Row> c4;
  double L = 0.0;
  bool L_declared = false;
  double required_L = 0.0;
  /// int |v|^2 f(v) dv for the envelope f
  double envelope_second_moment = 0.0;
  std::vector<std::string> notes;
  std::vector<std::string> failures;
  bool passed = true;
};

/// C3: sup over (x, u) of int_{|v|>c} |v|^2 Gamma(u, dv; x) on `c_grid`,
/// required non-increasing and below 1e-6 at the largest c. C4: growth
/// bounds on b and c and the density bound against the envelope
/// f(v) = sum_x sum_k sup_u lambda_k(u; x) p_k(v). Uses the declared L if
/// present, otherwise reports the smallest L that works on the grid.
C3C4Report validate_c3_c4(const JumpModel& model, std::span<const double> c_grid,
                          const std::vector<Point>& u_grid);

/// n points t * (1, ..., 1) for t evenly spaced on [lo, hi].
std::vector<Point> diagonal_grid(double lo, double hi, std::size_t n, std::size_t dim);

}  // namespace mmjump
