#pragma once

// Event-driven simulation of the coupled pre-limit process (xi^eps, x(t/eps)),
// the averaged limit (flow plus jumps), the compound-Poisson special case,
// and the predictable-characteristic paths B, C, Gamma_g.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <mmjump/averaging.hpp>
#include <mmjump/jump_model.hpp>
#include <mmjump/rng.hpp>
#include <mmjump/switching.hpp>

namespace mmjump {

enum class EventKind : std::uint8_t { start, switch_state, small_jump, big_jump, flow_sample };

std::string_view kind_name(EventKind kind);

/// Event record, structure-of-arrays. values holds dim entries per event: the
/// value of xi right after the event.
struct Trajectory {
  std::size_t dim = 1;
  double horizon = 0.0;
  double eps = 0.0;  // 0 for limit processes
  std::vector<double> times;
  std::vector<EventKind> kinds;
  std::vector<double> values;
  std::vector<StateId> states;
  /// Thinning: candidate big jumps proposed and accepted.
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;

  std::size_t size() const { return times.size(); }
  std::span<const double> value(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::span<const double> initial() const { return value(0); }
  std::span<const double> terminal() const { return value(size() - 1); }
  /// Value after the last event at or before t. Exact for pre-limit paths and
  /// at recorded times of limit paths.
  std::span<const double> value_at(double t) const;
  /// max over recorded values of |xi|
  double sup_norm() const;
  std::size_t count(EventKind kind) const;

  void push(double t, EventKind kind, std::span<const double> xi, StateId x);
};

struct PrelimitOptions {
  std::uint64_t max_events = 100'000'000;
};

/// Competing exponential clocks at the accelerated time scale: switching at
/// q(x)/eps, small jumps eps d(xi; x) at rho(x)/eps, big jumps by thinning
/// against sup_u Gamma(u, R^d; x). Throws SimulationError past max_events.
Trajectory simulate_prelimit(const SwitchSpec& spec, const JumpModel& model, double eps, double T,
                             std::span<const double> xi0, StateId x0, Rng& rng,
                             const PrelimitOptions& options = {});

struct LimitOptions {
  /// RK4 step; 0 selects 1e-3 * T.
  double h = 0.0;
  /// Run the jump-free step-halving probe before simulating.
  bool check_step = true;
  /// Extra times recorded as flow samples (exact values there).
  std::vector<double> observe;
};

/// Flow d xi/dt = bhat_0(xi) by fixed-step RK4, flow samples every h, jumps
/// by thinning against sup_u Gammahat(u, R^d).
Trajectory simulate_limit(const LimitModel& limit, double T, std::span<const double> xi0, Rng& rng,
                          const LimitOptions& options = {});

/// Jump-free flow of bhat_0 from xi0 over [0, T] with RK4 step h.
Point integrate_flow(const LimitModel& limit, std::span<const double> xi0, double T, double h);

/// Throws SimulationError if halving h moves the jump-free xi(T) by more than
/// 1e-6 (max-norm).
void check_limit_step(const LimitModel& limit, std::span<const double> xi0, double T, double h);

/// nu(T) ~ Poisson(Lambda T) jumps, sizes i.i.d. from `law`.
Trajectory simulate_compound_poisson(double Lambda, const JumpLaw& law, double T,
                                     std::span<const double> xi0, Rng& rng);

/// B, C (trace), and one Gamma_g column per probe on a time grid.
struct CharacteristicPaths {
  std::size_t dim = 1;
  std::vector<double> grid;
  std::vector<double> B;  // dim per grid point
  std::vector<double> C;
  std::vector<std::vector<double>> G;  // per probe, per grid point
  std::vector<std::string> probe_names;

  std::span<const double> B_at(std::size_t k) const { return {B.data() + k * dim, dim}; }
};

/// Integrands of the pre-limit characteristics with component moments
/// precomputed: eps^-1 times the mean, trace second moment, and g-moment of
/// Gamma^eps at (u, x).
class PrelimitIntegrands {
 public:
  PrelimitIntegrands(const JumpModel& model, std::vector<TestFunction> probes);

  std::size_t dim() const { return model_->dim(); }
  std::size_t num_probes() const { return probes_.size(); }
  const std::vector<TestFunction>& probes() const { return probes_; }
  void eval(std::span<const double> u, StateId x, double eps, std::span<double> b, double& c,
            std::span<double> g) const;

 private:
  const JumpModel* model_;
  std::vector<TestFunction> probes_;
  // [state][component]
  std::vector<std::vector<double>> trace_second_;
  std::vector<std::vector<std::vector<double>>> law_g_;
  std::vector<std::vector<Point>> mean_;
};

/// Integrands of the limit characteristics: bhat, trace chat, Gammahat_g.
class LimitIntegrands {
 public:
  LimitIntegrands(const LimitModel& limit, std::vector<TestFunction> probes);

  std::size_t dim() const { return limit_->dim(); }
  std::size_t num_probes() const { return probes_.size(); }
  const std::vector<TestFunction>& probes() const { return probes_; }
  const LimitModel& limit() const { return *limit_; }
  /// bhat_0(u) = sum_x pi(x) rho(x) d(u; x)
  void flow(std::span<const double> u, std::span<double> out) const;
  void eval(std::span<const double> u, std::span<double> b, double& c, std::span<double> g) const;

 private:
  const LimitModel* limit_;
  std::vector<TestFunction> probes_;
  Displacement averaged_displacement_;
  std::vector<double> trace_second_;
  std::vector<std::vector<double>> law_g_;
  std::vector<Point> mean_;
};

/// Exact piecewise-constant integration between events. Throws
/// ValidationError if the grid leaves [0, horizon] or is not ascending.
CharacteristicPaths predictable_characteristics(const Trajectory& traj,
                                                const PrelimitIntegrands& integrands,
                                                std::span<const double> grid);

/// RK4 re-integration of the flow and the integrands over each recorded
/// segment, steps no longer than h.
CharacteristicPaths predictable_characteristics(const Trajectory& traj,
                                                const LimitIntegrands& integrands,
                                                std::span<const double> grid, double h);

/// CSV "t,kind,xi_0,...,state". State names come from `states` when given.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& states = {});

/// CSV "t,B,C,Gamma_g1,..."; B is split into B_0.. when dim > 1.
void write_characteristics_csv(std::ostream& os, const CharacteristicPaths& paths);

}  // namespace mmjump
