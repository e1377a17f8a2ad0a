#pragma once

// Averaged limit model and the perturbed-test-function check.
//
// The limit generator acts as
//   Lbar phi(u) = bhat_0(u) phi'(u) + int [phi(u + v) - phi(u)] Gammahat(u, dv)
// with bhat(u) = sum_x pi(x) b(u; x), Gammahat(u, dv) = sum_x pi(x) Gamma(u, dv; x)
// and bhat_0(u) = bhat(u) - int v Gammahat(u, dv).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <mmjump/jump_model.hpp>
#include <mmjump/rng.hpp>
#include <mmjump/switching.hpp>

namespace mmjump {

/// A jump law for compound-Poisson sampling: mixture of product laws.
struct JumpLaw {
  std::vector<double> weights;  // normalized
  std::vector<JumpComponent> laws;

  void sample(Rng& rng, std::span<double> v) const;
  Eigen::VectorXd mean() const;
  Eigen::MatrixXd second_moment() const;
};

class LimitModel {
 public:
  LimitModel(JumpModel source, StationaryLaw pi);

  std::size_t dim() const { return source_.dim(); }
  const JumpModel& source() const { return source_; }
  const StationaryLaw& stationary() const { return pi_; }
  /// Averaged components: every source component with rate scaled by pi(x).
  const std::vector<JumpComponent>& components() const { return components_; }
  /// Index of the source state behind each averaged component.
  const std::vector<StateId>& component_states() const { return component_states_; }

  /// bhat(u)
  Eigen::VectorXd averaged_drift(std::span<const double> u) const;
  /// int v Gammahat(u, dv), from closed-form component means
  Eigen::VectorXd averaged_jump_mean(std::span<const double> u) const;
  /// bhat_0(u) = bhat(u) - int v Gammahat(u, dv)
  Eigen::VectorXd flow_drift(std::span<const double> u) const;
  /// chat(u) = int vv* Gammahat(u, dv)
  Eigen::MatrixXd averaged_second_moment(std::span<const double> u) const;
  /// Gammahat_g(u) given per-component law moments E_k g (one per component).
  double averaged_g_moment(std::span<const double> u, std::span<const double> law_g) const;

  /// Gammahat(u, R^d)
  double jump_intensity(std::span<const double> u) const;
  double max_jump_intensity() const;
  bool u_independent() const { return source_.u_independent(); }
  /// Lambda = Gammahat(R^d) when the kernel does not depend on u.
  std::optional<double> total_rate() const;
  /// Normalized Gammahat(u, .) at u = 0; meaningful when u_independent().
  JumpLaw jump_law() const;
  /// Draws a jump from Gammahat(u, .) / Gammahat(u, R^d).
  void sample_jump(std::span<const double> u, Rng& rng, std::span<double> v) const;

  /// The limit as a single-state model with the same schema: averaged
  /// components and the displacement sum_x pi(x) rho(x) d(.; x) at rho = 1,
  /// so b of the single state equals bhat.
  JumpModel as_single_state_model() const;

 private:
  JumpModel source_;
  StationaryLaw pi_;
  std::vector<JumpComponent> components_;
  std::vector<StateId> component_states_;
};

/// Throws ValidationError when pi's dimension differs from the model's.
LimitModel assemble_limit(const JumpModel& model, const StationaryLaw& pi);

/// Single-state switching spec used when serializing a limit model.
SwitchSpec single_state_switching(const std::string& name = "avg");

struct Pa3Report {
  bool applicable = false;
  std::string reason;
  Eigen::VectorXd jump_mean;       // int v Gamma(dv), Gamma = sum_x pi(x) Gamma(dv; x)
  Eigen::VectorXd averaged_drift;  // sum_x pi(x) b(x)
  double gap = 0.0;                // max-norm of the difference
  bool compound_poisson_enabled = false;
  double total_rate = 0.0;         // Lambda
};

/// Compares both sides of the compound-Poisson balance condition. The
/// compound-Poisson limit is enabled only for u-independent models with
/// gap <= 1e-9.
Pa3Report check_pa3(const JumpModel& model, const StationaryLaw& pi);

/// Smooth probe phi(u) = psi(u_coord) with analytic first derivative.
struct SmoothProbe {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::size_t coord = 0;
};

namespace smooth_probes {
SmoothProbe identity(std::size_t coord = 0);
SmoothProbe square(std::size_t coord = 0);
SmoothProbe sine(std::size_t coord = 0);
/// "identity" | "square" | "sine"; throws ValidationError otherwise.
SmoothProbe by_name(const std::string& name, std::size_t coord = 0);
}  // namespace smooth_probes

struct ResidualRow {
  double u = 0.0;  // grid parameter (u = t * (1, ..., 1))
  StateId x = 0;
  double eps = 0.0;
  double phi1 = 0.0;         // phi_1(u, x)
  double dphi1 = 0.0;        // directional derivative b(u;x) . grad_u phi_1(u, x)
  double residual = 0.0;     // L^eps(phi + eps phi_1) - bhat phi', evaluated term by term
  double closed_form = 0.0;  // eps * b(u;x) . grad_u phi_1(u, x)
};

struct ResidualTable {
  std::vector<ResidualRow> rows;
  std::vector<double> eps;
  /// max_{u,x} |r| / eps per eps
  std::vector<double> scaled_sup;
  /// K fitted at the largest eps: max |r| / eps there
  double K = 0.0;
  /// max over (u, x) with r != 0 of (max_eps |r|/eps) / (min_eps |r|/eps); 1 if r == 0
  double ratio = 1.0;
  double max_closed_form_gap = 0.0;
  bool bounded = true;  // sup|r| <= K eps (1 + 1e-9) on the whole eps grid
};

/// Finite-difference step for grad_u phi_1.
inline constexpr double kPoissonFdStep = 1e-3;

/// For each grid point u: f(x) = (bhat(u) - b(u;x)) . grad phi(u),
/// phi_1(u, .) = solve_poisson(Q, f, pi), and the residual of the reduced
/// generator eps^-1 Q + B applied to phi + eps phi_1.
ResidualTable perturbation_residual(const SwitchSpec& spec, const JumpModel& model,
                                    const SmoothProbe& phi, std::span<const double> u_grid,
                                    std::span<const double> eps_grid);

}  // namespace mmjump
