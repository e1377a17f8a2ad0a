#include <mmjump/averaging.hpp>

#include <algorithm>
#include <cmath>

#include <mmjump/errors.hpp>
#include <mmjump/format.hpp>

namespace mmjump {

namespace {

std::size_t pick_weighted(std::span<const double> weights, double total, Rng& rng) {
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (target < acc) return k;
  }
  // Rounding can leave target == total; take the last positive weight.
  for (std::size_t k = weights.size(); k-- > 0;) {
    if (weights[k] > 0.0) return k;
  }
  return 0;
}

}  // namespace

void JumpLaw::sample(Rng& rng, std::span<double> v) const {
  const std::size_t k = pick_weighted(weights, 1.0, rng);
  laws[k].sample(rng, v);
}

Eigen::VectorXd JumpLaw::mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(laws.empty() ? 0 : static_cast<Eigen::Index>(laws[0].dim()));
  for (std::size_t k = 0; k < laws.size(); ++k) m += weights[k] * laws[k].law_mean();
  return m;
}

Eigen::MatrixXd JumpLaw::second_moment() const {
  const auto d = laws.empty() ? 0 : static_cast<Eigen::Index>(laws[0].dim());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < laws.size(); ++k) s += weights[k] * laws[k].law_second_moment();
  return s;
}

// ---------------------------------------------------------------------------

LimitModel::LimitModel(JumpModel source, StationaryLaw pi) : source_(std::move(source)), pi_(std::move(pi)) {
  if (pi_.size() != source_.num_states()) {
    throw ValidationError("assemble_limit: stationary law has " + std::to_string(pi_.size()) +
                          " states, jump model has " + std::to_string(source_.num_states()));
  }
  for (StateId x = 0; x < source_.num_states(); ++x) {
    for (const auto& c : source_.state(x).components) {
      JumpComponent avg = c;
      avg.rate = pi_[x] * c.rate;
      components_.push_back(std::move(avg));
      component_states_.push_back(x);
    }
  }
}

Eigen::VectorXd LimitModel::averaged_drift(std::span<const double> u) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  for (StateId x = 0; x < source_.num_states(); ++x) b += pi_[x] * kernel_mean(source_, u, x).drift;
  return b;
}

Eigen::VectorXd LimitModel::averaged_jump_mean(std::span<const double> u) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  for (const auto& c : components_) m += c.intensity(u) * c.law_mean();
  return m;
}

Eigen::VectorXd LimitModel::flow_drift(std::span<const double> u) const {
  return averaged_drift(u) - averaged_jump_mean(u);
}

Eigen::MatrixXd LimitModel::averaged_second_moment(std::span<const double> u) const {
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  for (const auto& comp : components_) c += comp.intensity(u) * comp.law_second_moment();
  return c;
}

double LimitModel::averaged_g_moment(std::span<const double> u, std::span<const double> law_g) const {
  double s = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) s += components_[k].intensity(u) * law_g[k];
  return s;
}

double LimitModel::jump_intensity(std::span<const double> u) const {
  double s = 0.0;
  for (const auto& c : components_) s += c.intensity(u);
  return s;
}

double LimitModel::max_jump_intensity() const {
  double s = 0.0;
  for (const auto& c : components_) s += c.max_intensity();
  return s;
}

std::optional<double> LimitModel::total_rate() const {
  if (!u_independent()) return std::nullopt;
  double s = 0.0;
  for (const auto& c : components_) s += c.rate;
  return s;
}

JumpLaw LimitModel::jump_law() const {
  JumpLaw law;
  double total = 0.0;
  for (const auto& c : components_) total += c.rate;
  for (const auto& c : components_) {
    if (c.rate == 0.0) continue;
    law.weights.push_back(c.rate / total);
    law.laws.push_back(c);
  }
  return law;
}

void LimitModel::sample_jump(std::span<const double> u, Rng& rng, std::span<double> v) const {
  double weights[64];
  std::vector<double> heap;
  std::span<double> w;
  if (components_.size() <= 64) {
    w = std::span<double>(weights, components_.size());
  } else {
    heap.resize(components_.size());
    w = heap;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    w[k] = components_[k].intensity(u);
    total += w[k];
  }
  components_[pick_weighted(w, total, rng)].sample(rng, v);
}

JumpModel LimitModel::as_single_state_model() const {
  StateKernel avg;
  avg.components = components_;
  avg.rho = 1.0;
  for (StateId x = 0; x < source_.num_states(); ++x) {
    const auto& s = source_.state(x);
    const double w = pi_[x] * s.rho;
    if (w == 0.0) continue;
    for (auto term : s.displacement.terms) {
      for (auto& o : term.offset) o *= w;
      for (auto& sl : term.slope) sl *= w;
      avg.displacement.terms.push_back(std::move(term));
    }
  }
  if (avg.displacement.terms.empty()) avg.displacement = Displacement::constant(Point(dim(), 0.0));
  return JumpModel(dim(), {std::move(avg)}, source_.growth_bound());
}

LimitModel assemble_limit(const JumpModel& model, const StationaryLaw& pi) { return LimitModel(model, pi); }

SwitchSpec single_state_switching(const std::string& name) {
  SwitchSpec spec;
  spec.states = {name};
  spec.q = {0.0};
  spec.P = Eigen::MatrixXd::Ones(1, 1);
  return spec;
}

// ---------------------------------------------------------------------------

Pa3Report check_pa3(const JumpModel& model, const StationaryLaw& pi) {
  const LimitModel limit(model, pi);
  Pa3Report rep;
  const Point origin(model.dim(), 0.0);
  rep.jump_mean = limit.averaged_jump_mean(origin);
  rep.averaged_drift = limit.averaged_drift(origin);
  rep.gap = (rep.averaged_drift - rep.jump_mean).cwiseAbs().maxCoeff();
  rep.total_rate = limit.jump_intensity(origin);
  rep.applicable = model.u_independent();
  if (!rep.applicable) {
    rep.reason = "kernel or drift depends on u; the compound-Poisson balance needs a u-independent model";
  } else if (rep.gap > 1e-9) {
    rep.reason = "averaged drift differs from the averaged jump mean by " + format_double(rep.gap);
  }
  rep.compound_poisson_enabled = rep.applicable && rep.gap <= 1e-9;
  return rep;
}

// ---------------------------------------------------------------------------

namespace smooth_probes {

SmoothProbe identity(std::size_t coord) {
  return {"identity", [](double u) { return u; }, [](double) { return 1.0; }, coord};
}

SmoothProbe square(std::size_t coord) {
  return {"square", [](double u) { return u * u; }, [](double u) { return 2.0 * u; }, coord};
}

SmoothProbe sine(std::size_t coord) {
  return {"sine", [](double u) { return std::sin(u); }, [](double u) { return std::cos(u); }, coord};
}

SmoothProbe by_name(const std::string& name, std::size_t coord) {
  if (name == "identity") return identity(coord);
  if (name == "square") return square(coord);
  if (name == "sine") return sine(coord);
  throw ValidationError("unknown smooth probe '" + name + "' (identity, square, sine)");
}

}  // namespace smooth_probes

ResidualTable perturbation_residual(const SwitchSpec& spec, const JumpModel& model, const SmoothProbe& phi,
                                    std::span<const double> u_grid, std::span<const double> eps_grid) {
  if (spec.size() != model.num_states()) {
    throw ValidationError("perturbation_residual: switching has " + std::to_string(spec.size()) +
                          " states, jump model has " + std::to_string(model.num_states()));
  }
  if (phi.coord >= model.dim()) throw ValidationError("perturbation_residual: probe coordinate out of range");
  if (eps_grid.empty()) throw ValidationError("perturbation_residual: empty eps grid");
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw ValidationError("perturbation_residual: eps must be > 0");
  }
  const GeneratorMatrix Q = build_generator(spec);
  const StationaryLaw pi = stationary_distribution(Q);
  const std::size_t n = spec.size();
  const std::size_t d = model.dim();
  const auto c = static_cast<Eigen::Index>(phi.coord);

  auto drifts = [&](std::span<const double> u) {
    Eigen::MatrixXd b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (StateId x = 0; x < n; ++x) b.row(static_cast<Eigen::Index>(x)) = kernel_mean(model, u, x).drift.transpose();
    return b;
  };
  // phi_1(u, .) solving Q phi_1 = (bhat - b) . grad phi
  auto corrector = [&](std::span<const double> u) {
    const Eigen::MatrixXd b = drifts(u);
    const Eigen::RowVectorXd bhat = pi.pi.transpose() * b;
    const double dphi = phi.derivative(u[phi.coord]);
    Eigen::VectorXd f(static_cast<Eigen::Index>(n));
    for (Eigen::Index x = 0; x < f.size(); ++x) f(x) = (bhat(c) - b(x, c)) * dphi;
    return solve_poisson(Q, f, pi);
  };

  ResidualTable table;
  table.eps.assign(eps_grid.begin(), eps_grid.end());
  for (const double t : u_grid) {
    const Point u(d, t);
    const Eigen::MatrixXd b = drifts(u);
    const Eigen::RowVectorXd bhat = pi.pi.transpose() * b;
    const double phi_u = phi.value(u[phi.coord]);
    const double dphi = phi.derivative(u[phi.coord]);
    const Eigen::VectorXd phi1 = corrector(u);

    // grad_u phi_1 by centered differences, one column per coordinate
    Eigen::MatrixXd grad(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      Point up = u;
      Point dn = u;
      up[i] += kPoissonFdStep;
      dn[i] -= kPoissonFdStep;
      grad.col(static_cast<Eigen::Index>(i)) = (corrector(up) - corrector(dn)) / (2.0 * kPoissonFdStep);
    }

    for (const double eps : eps_grid) {
      const Eigen::VectorXd phi_eps = (phi_u + eps * phi1.array()).matrix();
      const Eigen::VectorXd switching_part = (Q.matrix() * phi_eps) / eps;
      for (StateId x = 0; x < n; ++x) {
        const auto xi = static_cast<Eigen::Index>(x);
        // b . grad(phi + eps phi_1)
        double transport = b(xi, c) * dphi;
        double directional = 0.0;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i) {
          transport += eps * b(xi, i) * grad(xi, i);
          directional += b(xi, i) * grad(xi, i);
        }
        ResidualRow row;
        row.u = t;
        row.x = x;
        row.eps = eps;
        row.phi1 = phi1(xi);
        row.dphi1 = directional;
        row.residual = switching_part(xi) + transport - bhat(c) * dphi;
        row.closed_form = eps * directional;
        table.max_closed_form_gap = std::max(table.max_closed_form_gap, std::abs(row.residual - row.closed_form));
        table.rows.push_back(row);
      }
    }
  }

  const std::size_t ne = eps_grid.size();
  table.scaled_sup.assign(ne, 0.0);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t k = (r / n) % ne;
    table.scaled_sup[k] = std::max(table.scaled_sup[k], std::abs(table.rows[r].residual) / eps_grid[k]);
  }
  const std::size_t largest =
      static_cast<std::size_t>(std::distance(eps_grid.begin(), std::max_element(eps_grid.begin(), eps_grid.end())));
  table.K = table.scaled_sup[largest];
  for (std::size_t k = 0; k < ne; ++k) {
    if (table.scaled_sup[k] > table.K * (1.0 + 1e-6) + 1e-12) table.bounded = false;
  }
  // Ratio of |r|/eps across eps at each (u, x); rows are ordered u, eps, x.
  const std::size_t block = ne * n;
  for (std::size_t base = 0; base < table.rows.size(); base += block) {
    for (std::size_t x = 0; x < n; ++x) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      for (std::size_t k = 0; k < ne; ++k) {
        const double s = std::abs(table.rows[base + k * n + x].residual) / eps_grid[k];
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      if (hi <= 1e-12) continue;
      table.ratio = std::max(table.ratio, lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    }
  }
  return table;
}

}  // namespace mmjump
