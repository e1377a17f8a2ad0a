#include <mmjump/switching.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <mmjump/errors.hpp>
#include <mmjump/format.hpp>

namespace mmjump {

void SwitchSpec::validate(double row_tol) const {
  const std::size_t n = q.size();
  if (n == 0) throw ValidationError("switching: at least one state required");
  if (!states.empty() && states.size() != n) {
    throw ValidationError("switching: " + std::to_string(states.size()) + " state names but " +
                          std::to_string(n) + " intensities");
  }
  if (static_cast<std::size_t>(P.rows()) != n || static_cast<std::size_t>(P.cols()) != n) {
    throw ValidationError("switching: P must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(q[i]) || q[i] < 0.0) {
      throw ValidationError("switching: q[" + std::to_string(i) + "] must be finite and >= 0");
    }
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = P(i, j);
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw ValidationError("switching: P row " + std::to_string(i) + " has entry " +
                              format_double(p) + " outside [0,1]");
      }
      row += p;
    }
    if (std::abs(row - 1.0) > row_tol) {
      throw ValidationError("switching: P row " + std::to_string(i) + " sums to " +
                            format_double(row) + ", not 1");
    }
  }
}

GeneratorMatrix::GeneratorMatrix(Eigen::MatrixXd Q) : Q_(std::move(Q)) {
  if (Q_.rows() != Q_.cols()) throw ValidationError("generator must be square");
  const double scale = Q_.size() == 0 ? 1.0 : std::max(1.0, Q_.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < Q_.rows(); ++i) {
    for (Eigen::Index j = 0; j < Q_.cols(); ++j) {
      if (i != j && Q_(i, j) < 0.0) {
        throw ValidationError("generator: negative off-diagonal rate at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      }
    }
    if (std::abs(Q_.row(i).sum()) > 1e-12 * scale) {
      throw ValidationError("generator: row " + std::to_string(i) + " does not sum to zero");
    }
  }
}

GeneratorMatrix build_generator(const SwitchSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double out = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      Q(i, j) = spec.q[i] * spec.P(i, j);
      out += Q(i, j);
    }
    // Diagonal from the off-diagonal sum keeps row sums at zero even when
    // P rows deviate from one by rounding.
    Q(i, i) = -out;
  }
  return GeneratorMatrix(std::move(Q));
}

std::vector<std::vector<StateId>> communicating_classes(const GeneratorMatrix& Q) {
  const std::size_t n = Q.size();
  // reach[i][j]: j reachable from i (reflexive-transitive closure)
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<StateId> stack{s};
    reach[s][s] = 1;
    while (!stack.empty()) {
      const StateId i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && Q.rate(i, j) > 0.0 && !reach[s][j]) {
          reach[s][j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  std::vector<std::vector<StateId>> classes;
  std::vector<char> assigned(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (assigned[i]) continue;
    std::vector<StateId> cls;
    for (std::size_t j = i; j < n; ++j) {
      if (!assigned[j] && reach[i][j] && reach[j][i]) {
        cls.push_back(j);
        assigned[j] = 1;
      }
    }
    classes.push_back(std::move(cls));
  }
  return classes;
}

namespace {

double stationary_residual(const Eigen::MatrixXd& Q, const Eigen::VectorXd& pi) {
  return (pi.transpose() * Q).cwiseAbs().maxCoeff();
}

void require_irreducible(const GeneratorMatrix& Q) {
  const auto classes = communicating_classes(Q);
  if (classes.size() <= 1) return;
  std::ostringstream msg;
  msg << "reducible switching chain; communicating classes:";
  for (const auto& cls : classes) {
    msg << " {";
    for (std::size_t k = 0; k < cls.size(); ++k) msg << (k ? "," : "") << cls[k];
    msg << "}";
  }
  throw ValidationError(msg.str());
}

}  // namespace

StationaryLaw stationary_distribution(const GeneratorMatrix& gen) {
  const auto n = static_cast<Eigen::Index>(gen.size());
  if (n == 0) throw ValidationError("stationary distribution of an empty generator");
  require_irreducible(gen);
  const Eigen::MatrixXd& Q = gen.matrix();

  // Square system: n-1 balance equations plus normalization.
  Eigen::MatrixXd A = Q.transpose();
  A.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::VectorXd pi = A.partialPivLu().solve(rhs);

  constexpr double kTol = 1e-10;
  if (!pi.allFinite() || stationary_residual(Q, pi) > kTol) {
    // Least-squares fallback on the full augmented system.
    Eigen::MatrixXd M(n + 1, n);
    M.topRows(n) = Q.transpose();
    M.row(n).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    b(n) = 1.0;
    pi = M.completeOrthogonalDecomposition().solve(b);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pi(i) < 0.0 && pi(i) > -1e-12) pi(i) = 0.0;
  }
  pi /= pi.sum();

  StationaryLaw law{pi, stationary_residual(Q, pi)};
  if (!pi.allFinite() || (pi.array() < 0.0).any() || law.residual > kTol) {
    std::ostringstream msg;
    msg << "stationary solve failed: residual " << law.residual;
    throw std::runtime_error(msg.str());
  }
  return law;
}

Eigen::VectorXd center(const Eigen::VectorXd& f, const StationaryLaw& pi) {
  return f.array() - pi.expectation(f);
}

Eigen::VectorXd solve_poisson(const GeneratorMatrix& gen, const Eigen::VectorXd& f,
                              const StationaryLaw& pi) {
  require_irreducible(gen);
  const Eigen::MatrixXd& Q = gen.matrix();
  const auto n = Q.rows();
  if (f.size() != n || pi.pi.size() != n) {
    throw ValidationError("solve_poisson: dimension mismatch");
  }
  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  const double mean = pi.expectation(f);
  if (std::abs(mean) > 1e-10 * scale) {
    throw ValidationError("solve_poisson: right-hand side not centered, pi(f) = " +
                          format_double(mean));
  }
  // Q - 1 pi^T is invertible for an irreducible chain; its solution of
  // (Q - 1 pi^T) h = f has pi(h) = -pi(f) = 0 and Q h = f.
  const Eigen::MatrixXd M = Q - Eigen::VectorXd::Ones(n) * pi.pi.transpose();
  const auto lu = M.partialPivLu();
  Eigen::VectorXd h = lu.solve(f);
  h += lu.solve(f - M * h);  // one refinement step
  h.array() -= pi.expectation(h);

  const double residual = (Q * h - f).cwiseAbs().maxCoeff();
  if (!h.allFinite() || residual > 1e-9 * scale) {
    throw std::runtime_error("solve_poisson: residual " + format_double(residual));
  }
  return h;
}

StateId SwitchPath::state_at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return states.front();
  return states[static_cast<std::size_t>(std::distance(times.begin(), it)) - 1];
}

SwitchPath sample_switch_path(const SwitchSpec& spec, double eps, double T, Rng& rng,
                              StateId x0) {
  spec.validate();
  if (!(eps > 0.0)) throw ValidationError("sample_switch_path: eps must be > 0");
  if (!(T > 0.0)) throw ValidationError("sample_switch_path: T must be > 0");
  if (x0 >= spec.size()) throw ValidationError("sample_switch_path: initial state out of range");

  std::vector<std::discrete_distribution<StateId>> next;
  next.reserve(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    std::vector<double> w(spec.size());
    for (std::size_t j = 0; j < spec.size(); ++j) w[j] = spec.P(i, j);
    next.emplace_back(w.begin(), w.end());
  }

  SwitchPath path;
  path.horizon = T;
  path.eps = eps;
  path.times.push_back(0.0);
  path.states.push_back(x0);
  double t = 0.0;
  StateId x = x0;
  for (;;) {
    const double rate = spec.q[x] / eps;
    if (rate <= 0.0) break;
    t += exponential(rng, rate);
    if (t > T) break;
    x = next[x](rng);
    path.times.push_back(t);
    path.states.push_back(x);
  }
  return path;
}

std::vector<double> occupation_fractions(const SwitchPath& path, std::size_t n_states) {
  std::vector<double> occ(n_states, 0.0);
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    const double end = k + 1 < path.times.size() ? path.times[k + 1] : path.horizon;
    occ[path.states[k]] += end - path.times[k];
  }
  for (double& o : occ) o /= path.horizon;
  return occ;
}

void write_switch_path_csv(std::ostream& os, const SwitchPath& path, const SwitchSpec& spec) {
  os << "t,state\n";
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    const StateId x = path.states[k];
    os << format_double(path.times[k]) << ','
       << (x < spec.states.size() ? spec.states[x] : std::to_string(x)) << '\n';
  }
}

}  // namespace mmjump
