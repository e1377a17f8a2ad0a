#pragma once

// Finite-state Markov switching: generator algebra, stationary law,
// Poisson equation, and exact path sampling at the accelerated clock t/eps.
//
// Poisson-equation sign convention: solve_poisson returns h with Q h = f and
// pi(h) = 0. The perturbed-test-function construction calls it with
// f = (Lhat - L(x)) phi, so that Q phi_1 = (Lhat - L) phi.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <mmjump/rng.hpp>

namespace mmjump {

using StateId = std::size_t;

/// Jump intensities q(x) and embedded-chain kernel P(x, y) on a finite E.
struct SwitchSpec {
  std::vector<std::string> states;
  std::vector<double> q;
  Eigen::MatrixXd P;

  std::size_t size() const { return q.size(); }

  /// Throws ValidationError naming the offending row or state. Rows of P
  /// must sum to one within `row_tol`.
  void validate(double row_tol = 1e-9) const;
};

/// Markov generator: zero row sums, nonnegative off-diagonal.
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(Eigen::MatrixXd Q);

  const Eigen::MatrixXd& matrix() const { return Q_; }
  std::size_t size() const { return static_cast<std::size_t>(Q_.rows()); }
  double rate(StateId from, StateId to) const { return Q_(from, to); }

 private:
  Eigen::MatrixXd Q_;
};

struct StationaryLaw {
  Eigen::VectorXd pi;
  /// max-norm of pi Q at solve time
  double residual = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(pi.size()); }
  double operator[](StateId x) const { return pi(static_cast<Eigen::Index>(x)); }
  double expectation(const Eigen::VectorXd& f) const { return pi.dot(f); }
};

/// Right-continuous switching path x(t/eps) on [0, T].
struct SwitchPath {
  std::vector<double> times;
  std::vector<StateId> states;
  double horizon = 0.0;
  double eps = 1.0;

  StateId state_at(double t) const;
  std::size_t jump_count() const { return times.empty() ? 0 : times.size() - 1; }
};

GeneratorMatrix build_generator(const SwitchSpec& spec);

/// Strongly connected components of the off-diagonal support graph, each
/// sorted, ordered by smallest member.
std::vector<std::vector<StateId>> communicating_classes(const GeneratorMatrix& Q);

/// Solves [Q^T; 1^T] pi = (0, ..., 0, 1). Throws ValidationError for n = 0 or
/// a reducible generator (message lists the classes).
StationaryLaw stationary_distribution(const GeneratorMatrix& Q);

/// Returns f - pi(f) 1.
Eigen::VectorXd center(const Eigen::VectorXd& f, const StationaryLaw& pi);

/// h with Q h = f, pi(h) = 0. Requires pi(f) = 0 within 1e-10.
Eigen::VectorXd solve_poisson(const GeneratorMatrix& Q, const Eigen::VectorXd& f,
                              const StationaryLaw& pi);

/// Gillespie sampling with holding rate q(x)/eps. Self-transitions
/// (P(x,x) > 0) are recorded as events that keep the state.
SwitchPath sample_switch_path(const SwitchSpec& spec, double eps, double T, Rng& rng,
                              StateId x0 = 0);

/// Fraction of [0, horizon] spent in each state.
std::vector<double> occupation_fractions(const SwitchPath& path, std::size_t n_states);

/// CSV with header "t,state"; state written by name.
void write_switch_path_csv(std::ostream& os, const SwitchPath& path, const SwitchSpec& spec);

}  // namespace mmjump
