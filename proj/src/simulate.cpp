#include <mmjump/simulate.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <mmjump/errors.hpp>
#include <mmjump/format.hpp>

namespace mmjump {

namespace {

void require_xi0(std::span<const double> xi0, std::size_t dim) {
  if (xi0.size() != dim) {
    throw ValidationError("initial value has dimension " + std::to_string(xi0.size()) + ", model has " +
                          std::to_string(dim));
  }
}

void require_horizon(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("horizon T must be finite and > 0, got " + format_double(T));
}

std::size_t pick_component(const std::vector<JumpComponent>& comps, std::span<const double> u, double total,
                           Rng& rng) {
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const double w = comps[k].intensity(u);
    if (w <= 0.0) continue;
    acc += w;
    last = k;
    if (target < acc) return k;
  }
  return last;
}

// Classical RK4 on y' = f(y), workspace sized to y.
struct Rk4 {
  std::vector<double> k1, k2, k3, k4, tmp;

  explicit Rk4(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}

  template <class F>
  void step(F&& f, std::span<double> y, double dt) {
    const std::size_t n = y.size();
    f(std::span<const double>(y.data(), n), std::span<double>(k1));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    f(std::span<const double>(tmp), std::span<double>(k2));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    f(std::span<const double>(tmp), std::span<double>(k3));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    f(std::span<const double>(tmp), std::span<double>(k4));
    for (std::size_t i = 0; i < n; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
};

Displacement averaged_displacement(const LimitModel& limit) {
  Displacement out;
  const auto& source = limit.source();
  for (StateId x = 0; x < source.num_states(); ++x) {
    const auto& s = source.state(x);
    const double w = limit.stationary()[x] * s.rho;
    if (w == 0.0) continue;
    for (auto term : s.displacement.terms) {
      for (auto& o : term.offset) o *= w;
      for (auto& sl : term.slope) sl *= w;
      out.terms.push_back(std::move(term));
    }
  }
  return out;
}

void check_grid(std::span<const double> grid, double horizon) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0) || grid[k] > horizon) {
      throw ValidationError("characteristic grid point " + format_double(grid[k]) + " outside [0, " +
                            format_double(horizon) + "]");
    }
    if (k > 0 && grid[k] < grid[k - 1]) throw ValidationError("characteristic grid must be ascending");
  }
}

CharacteristicPaths empty_paths(std::size_t dim, std::span<const double> grid,
                                const std::vector<TestFunction>& probes) {
  CharacteristicPaths out;
  out.dim = dim;
  out.grid.assign(grid.begin(), grid.end());
  out.B.assign(grid.size() * dim, 0.0);
  out.C.assign(grid.size(), 0.0);
  out.G.assign(probes.size(), std::vector<double>(grid.size(), 0.0));
  for (const auto& p : probes) out.probe_names.push_back(p.name);
  return out;
}

}  // namespace

std::string_view kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::start: return "start";
    case EventKind::switch_state: return "switch";
    case EventKind::small_jump: return "small_jump";
    case EventKind::big_jump: return "big_jump";
    case EventKind::flow_sample: return "flow_sample";
  }
  return "unknown";
}

std::span<const double> Trajectory::value_at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  return value(i);
}

double Trajectory::sup_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s = std::max(s, euclidean_norm(value(i)));
  return s;
}

std::size_t Trajectory::count(EventKind kind) const {
  return static_cast<std::size_t>(std::count(kinds.begin(), kinds.end(), kind));
}

void Trajectory::push(double t, EventKind kind, std::span<const double> xi, StateId x) {
  times.push_back(t);
  kinds.push_back(kind);
  values.insert(values.end(), xi.begin(), xi.end());
  states.push_back(x);
}

// ---------------------------------------------------------------------------

Trajectory simulate_prelimit(const SwitchSpec& spec, const JumpModel& model, double eps, double T,
                             std::span<const double> xi0, StateId x0, Rng& rng, const PrelimitOptions& options) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in (0, 1], got " + format_double(eps));
  require_horizon(T);
  require_xi0(xi0, model.dim());
  if (spec.size() != model.num_states()) {
    throw ValidationError("switching has " + std::to_string(spec.size()) + " states, jump model has " +
                          std::to_string(model.num_states()));
  }
  if (x0 >= spec.size()) throw ValidationError("initial state out of range");

  const std::size_t n = spec.size();
  const std::size_t d = model.dim();
  std::vector<std::discrete_distribution<std::size_t>> next;
  next.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = spec.P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    next.emplace_back(w.begin(), w.end());
  }
  std::vector<double> switch_rate(n), small_rate(n), big_bound(n);
  for (StateId x = 0; x < n; ++x) {
    switch_rate[x] = spec.q[x] / eps;
    small_rate[x] = model.state(x).rho / eps;
    big_bound[x] = model.max_big_jump_intensity(x);
  }

  Trajectory traj;
  traj.dim = d;
  traj.horizon = T;
  traj.eps = eps;
  Point xi(xi0.begin(), xi0.end());
  Point buf(d);
  StateId x = x0;
  traj.push(0.0, EventKind::start, xi, x);

  double t = 0.0;
  std::uint64_t events = 0;
  for (;;) {
    const double total = switch_rate[x] + small_rate[x] + big_bound[x];
    if (total <= 0.0) break;
    t += exponential(rng, total);
    if (t > T) break;
    if (++events > options.max_events) {
      throw SimulationError("event guard tripped after " + std::to_string(options.max_events) +
                            " events; use a larger eps or a smaller T");
    }
    const double pick = uniform01(rng) * total;
    if (pick < switch_rate[x]) {
      x = next[x](rng);
      traj.push(t, EventKind::switch_state, xi, x);
    } else if (pick < switch_rate[x] + small_rate[x]) {
      model.state(x).displacement.evaluate(xi, buf);
      for (std::size_t i = 0; i < d; ++i) xi[i] += eps * buf[i];
      traj.push(t, EventKind::small_jump, xi, x);
    } else {
      ++traj.proposals;
      const double lambda = model.big_jump_intensity(xi, x);
      if (uniform01(rng) * big_bound[x] >= lambda) continue;
      ++traj.accepted;
      const auto& comps = model.state(x).components;
      comps[pick_component(comps, xi, lambda, rng)].sample(rng, buf);
      for (std::size_t i = 0; i < d; ++i) xi[i] += buf[i];
      traj.push(t, EventKind::big_jump, xi, x);
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------

Point integrate_flow(const LimitModel& limit, std::span<const double> xi0, double T, double h) {
  require_xi0(xi0, limit.dim());
  if (!(h > 0.0)) throw ValidationError("ODE step h must be > 0");
  const Displacement drift = averaged_displacement(limit);
  auto f = [&](std::span<const double> y, std::span<double> out) { drift.evaluate(y, out); };
  Point y(xi0.begin(), xi0.end());
  Rk4 rk(y.size());
  const auto steps = static_cast<std::uint64_t>(std::ceil(T / h - 1e-9));
  for (std::uint64_t k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * h;
    const double t1 = std::min(T, static_cast<double>(k + 1) * h);
    rk.step(f, y, t1 - t0);
  }
  return y;
}

void check_limit_step(const LimitModel& limit, std::span<const double> xi0, double T, double h) {
  const Point full = integrate_flow(limit, xi0, T, h);
  const Point half = integrate_flow(limit, xi0, T, 0.5 * h);
  double gap = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) gap = std::max(gap, std::abs(full[i] - half[i]));
  if (gap > 1e-6) {
    throw SimulationError("ODE step h = " + format_double(h) + " rejected: halving it moves xi(T) by " +
                          format_double(gap) + " > 1e-6");
  }
}

Trajectory simulate_limit(const LimitModel& limit, double T, std::span<const double> xi0, Rng& rng,
                          const LimitOptions& options) {
  require_horizon(T);
  require_xi0(xi0, limit.dim());
  const double h = options.h > 0.0 ? options.h : 1e-3 * T;
  if (options.check_step) check_limit_step(limit, xi0, T, h);

  const std::size_t d = limit.dim();
  const Displacement drift = averaged_displacement(limit);
  auto f = [&](std::span<const double> y, std::span<double> out) { drift.evaluate(y, out); };
  std::vector<double> observe;
  for (double t : options.observe) {
    if (t > 0.0 && t < T) observe.push_back(t);
  }
  std::sort(observe.begin(), observe.end());

  Trajectory traj;
  traj.dim = d;
  traj.horizon = T;
  traj.eps = 0.0;
  Point xi(xi0.begin(), xi0.end());
  Point jump(d);
  Rk4 rk(d);
  traj.push(0.0, EventKind::start, xi, 0);

  const double bound = limit.max_jump_intensity();
  const double inf = std::numeric_limits<double>::infinity();
  auto next_candidate = [&](double from) { return bound > 0.0 ? from + exponential(rng, bound) : inf; };

  double t = 0.0;
  std::uint64_t k = 1;
  std::size_t obs = 0;
  double candidate = next_candidate(0.0);
  while (t < T) {
    const double grid = std::min(T, static_cast<double>(k) * h);
    const double mark = obs < observe.size() ? observe[obs] : inf;
    const double stop = std::min({grid, mark, candidate});
    if (stop > t) rk.step(f, xi, stop - t);
    t = stop;
    if (t == candidate) {
      ++traj.proposals;
      const double lambda = limit.jump_intensity(xi);
      if (uniform01(rng) * bound < lambda) {
        ++traj.accepted;
        limit.sample_jump(xi, rng, jump);
        for (std::size_t i = 0; i < d; ++i) xi[i] += jump[i];
        traj.push(t, EventKind::big_jump, xi, 0);
      }
      candidate = next_candidate(t);
    }
    bool sampled = false;
    if (t == mark) {
      traj.push(t, EventKind::flow_sample, xi, 0);
      sampled = true;
      while (obs < observe.size() && observe[obs] <= t) ++obs;
    }
    if (t == grid) {
      if (!sampled) traj.push(t, EventKind::flow_sample, xi, 0);
      ++k;
    }
  }
  return traj;
}

Trajectory simulate_compound_poisson(double Lambda, const JumpLaw& law, double T, std::span<const double> xi0,
                                     Rng& rng) {
  if (!(Lambda >= 0.0)) throw ValidationError("compound Poisson rate must be >= 0");
  require_horizon(T);
  Trajectory traj;
  traj.dim = xi0.size();
  traj.horizon = T;
  traj.eps = 0.0;
  Point xi(xi0.begin(), xi0.end());
  Point jump(xi.size());
  traj.push(0.0, EventKind::start, xi, 0);
  if (Lambda == 0.0 || law.laws.empty()) return traj;
  double t = 0.0;
  for (;;) {
    t += exponential(rng, Lambda);
    if (t > T) break;
    law.sample(rng, jump);
    for (std::size_t i = 0; i < xi.size(); ++i) xi[i] += jump[i];
    traj.push(t, EventKind::big_jump, xi, 0);
  }
  return traj;
}

// ---------------------------------------------------------------------------

PrelimitIntegrands::PrelimitIntegrands(const JumpModel& model, std::vector<TestFunction> probes)
    : model_(&model), probes_(std::move(probes)) {
  for (const auto& s : model.states()) {
    std::vector<double> tr;
    std::vector<std::vector<double>> lg;
    std::vector<Point> mean;
    for (const auto& c : s.components) {
      tr.push_back(c.law_second_moment().trace());
      std::vector<double> row;
      for (const auto& g : probes_) row.push_back(law_g_moment(c, g));
      lg.push_back(std::move(row));
      const Eigen::VectorXd m = c.law_mean();
      mean.emplace_back(m.data(), m.data() + m.size());
    }
    trace_second_.push_back(std::move(tr));
    law_g_.push_back(std::move(lg));
    mean_.push_back(std::move(mean));
  }
}

void PrelimitIntegrands::eval(std::span<const double> u, StateId x, double eps, std::span<double> b, double& c,
                              std::span<double> g) const {
  const auto& s = model_->state(x);
  const std::size_t d = dim();
  s.displacement.evaluate(u, b);
  double dd = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    dd += b[i] * b[i];
    b[i] *= s.rho;
  }
  c = eps * s.rho * dd;
  // Small-jump part of the g-moment: rho g(eps d) / eps.
  if (s.rho > 0.0 && !probes_.empty()) {
    Point small(d);
    for (std::size_t i = 0; i < d; ++i) small[i] = eps * b[i] / s.rho;
    for (std::size_t j = 0; j < probes_.size(); ++j) g[j] = s.rho * probes_[j](small) / eps;
  } else {
    std::fill(g.begin(), g.end(), 0.0);
  }
  for (std::size_t k = 0; k < s.components.size(); ++k) {
    const double lambda = s.components[k].intensity(u);
    if (lambda == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) b[i] += lambda * mean_[x][k][i];
    c += lambda * trace_second_[x][k];
    for (std::size_t j = 0; j < probes_.size(); ++j) g[j] += lambda * law_g_[x][k][j];
  }
}

LimitIntegrands::LimitIntegrands(const LimitModel& limit, std::vector<TestFunction> probes)
    : limit_(&limit), probes_(std::move(probes)), averaged_displacement_(averaged_displacement(limit)) {
  for (const auto& c : limit.components()) {
    trace_second_.push_back(c.law_second_moment().trace());
    std::vector<double> row;
    for (const auto& g : probes_) row.push_back(law_g_moment(c, g));
    law_g_.push_back(std::move(row));
    const Eigen::VectorXd m = c.law_mean();
    mean_.emplace_back(m.data(), m.data() + m.size());
  }
}

void LimitIntegrands::flow(std::span<const double> u, std::span<double> out) const {
  averaged_displacement_.evaluate(u, out);
}

void LimitIntegrands::eval(std::span<const double> u, std::span<double> b, double& c, std::span<double> g) const {
  averaged_displacement_.evaluate(u, b);
  c = 0.0;
  std::fill(g.begin(), g.end(), 0.0);
  const auto& comps = limit_->components();
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const double lambda = comps[k].intensity(u);
    if (lambda == 0.0) continue;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += lambda * mean_[k][i];
    c += lambda * trace_second_[k];
    for (std::size_t j = 0; j < probes_.size(); ++j) g[j] += lambda * law_g_[k][j];
  }
}

CharacteristicPaths predictable_characteristics(const Trajectory& traj, const PrelimitIntegrands& integrands,
                                                std::span<const double> grid) {
  check_grid(grid, traj.horizon);
  if (traj.dim != integrands.dim()) throw ValidationError("trajectory and model dimensions differ");
  const std::size_t d = traj.dim;
  const std::size_t np = integrands.num_probes();
  CharacteristicPaths out = empty_paths(d, grid, integrands.probes());

  std::vector<double> accB(d, 0.0), b(d), g(np), accG(np, 0.0);
  double accC = 0.0;
  double c = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < traj.size() && k < grid.size(); ++i) {
    const double t0 = traj.times[i];
    const double t1 = i + 1 < traj.size() ? traj.times[i + 1] : traj.horizon;
    integrands.eval(traj.value(i), traj.states[i], traj.eps, b, c, g);
    // grid points inside [t0, t1): partial segment
    while (k < grid.size() && (grid[k] < t1 || (i + 1 == traj.size() && grid[k] <= t1))) {
      const double dt = grid[k] - t0;
      for (std::size_t j = 0; j < d; ++j) out.B[k * d + j] = accB[j] + dt * b[j];
      out.C[k] = accC + dt * c;
      for (std::size_t j = 0; j < np; ++j) out.G[j][k] = accG[j] + dt * g[j];
      ++k;
    }
    const double dt = t1 - t0;
    for (std::size_t j = 0; j < d; ++j) accB[j] += dt * b[j];
    accC += dt * c;
    for (std::size_t j = 0; j < np; ++j) accG[j] += dt * g[j];
  }
  return out;
}

CharacteristicPaths predictable_characteristics(const Trajectory& traj, const LimitIntegrands& integrands,
                                                std::span<const double> grid, double h) {
  check_grid(grid, traj.horizon);
  if (traj.dim != integrands.dim()) throw ValidationError("trajectory and model dimensions differ");
  if (!(h > 0.0)) throw ValidationError("ODE step h must be > 0");
  const std::size_t d = traj.dim;
  const std::size_t np = integrands.num_probes();
  CharacteristicPaths out = empty_paths(d, grid, integrands.probes());

  // y = (xi, B, C, G)
  const std::size_t n = 2 * d + 1 + np;
  std::vector<double> y(n, 0.0);
  std::vector<double> b(d), g(np);
  auto f = [&](std::span<const double> state, std::span<double> dy) {
    const auto xi = state.subspan(0, d);
    integrands.flow(xi, dy.subspan(0, d));
    double c = 0.0;
    integrands.eval(xi, b, c, g);
    for (std::size_t j = 0; j < d; ++j) dy[d + j] = b[j];
    dy[2 * d] = c;
    for (std::size_t j = 0; j < np; ++j) dy[2 * d + 1 + j] = g[j];
  };
  auto advance = [&](double dt) {
    Rk4 rk(n);
    const auto steps = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(dt / h - 1e-9)));
    for (std::uint64_t s = 0; s < steps; ++s) rk.step(f, y, dt / static_cast<double>(steps));
  };
  auto record = [&](std::size_t k) {
    for (std::size_t j = 0; j < d; ++j) out.B[k * d + j] = y[d + j];
    out.C[k] = y[2 * d];
    for (std::size_t j = 0; j < np; ++j) out.G[j][k] = y[2 * d + 1 + j];
  };

  std::size_t k = 0;
  for (std::size_t i = 0; i < traj.size() && k < grid.size(); ++i) {
    const double t0 = traj.times[i];
    const double t1 = i + 1 < traj.size() ? traj.times[i + 1] : traj.horizon;
    const bool last = i + 1 == traj.size();
    const auto start = traj.value(i);
    std::copy(start.begin(), start.end(), y.begin());
    double t = t0;
    while (k < grid.size() && (grid[k] < t1 || (last && grid[k] <= t1))) {
      if (grid[k] > t) advance(grid[k] - t);
      t = std::max(t, grid[k]);
      record(k);
      ++k;
    }
    if (t1 > t) advance(t1 - t);
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& states) {
  os << "t,kind";
  for (std::size_t i = 0; i < traj.dim; ++i) os << ",xi_" << i;
  os << ",state\n";
  for (std::size_t e = 0; e < traj.size(); ++e) {
    os << format_double(traj.times[e]) << ',' << kind_name(traj.kinds[e]);
    for (double v : traj.value(e)) os << ',' << format_double(v);
    os << ',';
    if (traj.states[e] < states.size()) {
      os << states[traj.states[e]];
    } else {
      os << traj.states[e];
    }
    os << '\n';
  }
}

void write_characteristics_csv(std::ostream& os, const CharacteristicPaths& paths) {
  os << 't';
  if (paths.dim == 1) {
    os << ",B";
  } else {
    for (std::size_t i = 0; i < paths.dim; ++i) os << ",B_" << i;
  }
  os << ",C";
  for (std::size_t j = 0; j < paths.G.size(); ++j) os << ",Gamma_g" << j + 1;
  os << '\n';
  for (std::size_t k = 0; k < paths.grid.size(); ++k) {
    os << format_double(paths.grid[k]);
    for (double v : paths.B_at(k)) os << ',' << format_double(v);
    os << ',' << format_double(paths.C[k]);
    for (const auto& col : paths.G) os << ',' << format_double(col[k]);
    os << '\n';
  }
}

}  // namespace mmjump
