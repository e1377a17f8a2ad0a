#include <mmjump/jump_model.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <mmjump/errors.hpp>
#include <mmjump/format.hpp>

namespace mmjump {

double euclidean_norm(std::span<const double> v) {
  if (v.size() == 1) return std::abs(v[0]);
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

double marginal_mean(const Marginal& m) {
  return std::visit(overloaded{[](const PointMass& p) { return p.v0; },
                               [](const Gaussian& g) { return g.mean; },
                               [](const Uniform& u) { return 0.5 * (u.lo + u.hi); }},
                    m);
}

double marginal_second_moment(const Marginal& m) {
  return std::visit(
      overloaded{[](const PointMass& p) { return p.v0 * p.v0; },
                 [](const Gaussian& g) { return g.mean * g.mean + g.sd * g.sd; },
                 [](const Uniform& u) { return (u.lo * u.lo + u.lo * u.hi + u.hi * u.hi) / 3.0; }},
      m);
}

double marginal_sample(const Marginal& m, Rng& rng) {
  return std::visit(
      overloaded{[](const PointMass& p) { return p.v0; },
                 [&](const Gaussian& g) {
                   return std::normal_distribution<double>(g.mean, g.sd)(rng);
                 },
                 [&](const Uniform& u) {
                   return std::uniform_real_distribution<double>(u.lo, u.hi)(rng);
                 }},
      m);
}

std::string family_name(const Marginal& m) {
  return std::visit(overloaded{[](const PointMass&) { return std::string("point"); },
                               [](const Gaussian&) { return std::string("gauss"); },
                               [](const Uniform&) { return std::string("uniform"); }},
                    m);
}

namespace {

double marginal_density(const Marginal& m, double v) {
  return std::visit(
      overloaded{[](const PointMass&) { return 0.0; },
                 [&](const Gaussian& g) {
                   const double z = (v - g.mean) / g.sd;
                   return std::exp(-0.5 * z * z) / (g.sd * std::sqrt(2.0 * std::numbers::pi));
                 },
                 [&](const Uniform& u) { return (v >= u.lo && v <= u.hi) ? 1.0 / (u.hi - u.lo) : 0.0; }},
      m);
}

}  // namespace

// ---------------------------------------------------------------------------
// JumpComponent

double JumpComponent::intensity(std::span<const double> u) const {
  if (kappa == 0.0 || rate == 0.0) return rate;
  return rate * (1.0 + kappa * std::min(euclidean_norm(u), ucap));
}

double JumpComponent::max_intensity() const {
  if (kappa == 0.0 || rate == 0.0) return rate;
  return rate * (1.0 + kappa * ucap);
}

bool JumpComponent::has_density() const {
  return std::none_of(marginals.begin(), marginals.end(),
                      [](const Marginal& m) { return std::holds_alternative<PointMass>(m); });
}

double JumpComponent::law_density(std::span<const double> v) const {
  double p = 1.0;
  for (std::size_t i = 0; i < marginals.size(); ++i) p *= marginal_density(marginals[i], v[i]);
  return p;
}

Eigen::VectorXd JumpComponent::law_mean() const {
  Eigen::VectorXd m(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < dim(); ++i) m(static_cast<Eigen::Index>(i)) = marginal_mean(marginals[i]);
  return m;
}

Eigen::MatrixXd JumpComponent::law_second_moment() const {
  const Eigen::VectorXd m = law_mean();
  Eigen::MatrixXd s = m * m.transpose();
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    s(k, k) = marginal_second_moment(marginals[i]);
  }
  return s;
}

void JumpComponent::sample(Rng& rng, std::span<double> v) const {
  for (std::size_t i = 0; i < marginals.size(); ++i) v[i] = marginal_sample(marginals[i], rng);
}

void JumpComponent::validate(const std::string& where) const {
  auto fail = [&](const std::string& what) { throw ValidationError(where + ": " + what); };
  if (!std::isfinite(rate) || rate < 0.0) fail("rate must be finite and >= 0");
  if (!std::isfinite(kappa) || kappa < 0.0) fail("kappa must be finite and >= 0");
  if (std::isnan(ucap) || ucap < 0.0) fail("ucap must be >= 0");
  if (kappa > 0.0 && rate > 0.0 && !std::isfinite(ucap)) {
    fail("rate growth needs a finite ucap (thinning bound)");
  }
  for (const auto& m : marginals) {
    std::visit(overloaded{[&](const PointMass& p) {
                            if (!std::isfinite(p.v0)) fail("point mass location must be finite");
                          },
                          [&](const Gaussian& g) {
                            if (!std::isfinite(g.mean)) fail("gaussian mean must be finite");
                            if (!std::isfinite(g.sd) || g.sd <= 0.0) fail("gaussian sd must be > 0");
                          },
                          [&](const Uniform& u) {
                            if (!std::isfinite(u.lo) || !std::isfinite(u.hi) || !(u.lo < u.hi)) {
                              fail("uniform needs finite lo < hi");
                            }
                          }},
               m);
  }
}

// ---------------------------------------------------------------------------
// Displacement

Displacement Displacement::constant(Point value) {
  const std::size_t d = value.size();
  return Displacement{{SaturatingTerm{std::move(value), Point(d, 0.0),
                                      Point(d, std::numeric_limits<double>::infinity())}}};
}

Displacement Displacement::linear(Point offset, Point slope, Point cap) {
  return Displacement{{SaturatingTerm{std::move(offset), std::move(slope), std::move(cap)}}};
}

void Displacement::evaluate(std::span<const double> u, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& t : terms) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += t.offset[i];
      if (t.slope[i] != 0.0) out[i] += t.slope[i] * std::clamp(u[i], -t.cap[i], t.cap[i]);
    }
  }
}

Point Displacement::operator()(std::span<const double> u) const {
  Point out(u.size());
  evaluate(u, out);
  return out;
}

bool Displacement::is_constant() const {
  for (const auto& t : terms) {
    for (std::size_t i = 0; i < t.slope.size(); ++i) {
      if (t.slope[i] != 0.0 && t.cap[i] > 0.0) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Probes

namespace probes {

TestFunction cube_min() {
  return {"cube_min",
          [](std::span<const double> v) {
            const double r = euclidean_norm(v);
            return std::min(r * r * r, 1.0);
          },
          {0.0, 1.0}};
}

TestFunction tail_second_moment(double c) {
  return {"tail_sq_" + format_double(c),
          [c](std::span<const double> v) {
            const double r = euclidean_norm(v);
            return r > c ? r * r : 0.0;
          },
          {c}};
}

TestFunction cosine_squared() {
  return {"cos_sq",
          [](std::span<const double> v) {
            const double s = 1.0 - std::cos(euclidean_norm(v));
            return s * s;
          },
          {0.0}};
}

std::vector<TestFunction> catalogue(double tail_c) {
  return {cube_min(), tail_second_moment(tail_c), cosine_squared()};
}

}  // namespace probes

// ---------------------------------------------------------------------------
// JumpModel

JumpModel::JumpModel(std::size_t dim, std::vector<StateKernel> states,
                     std::optional<double> growth_bound)
    : dim_(dim), states_(std::move(states)), growth_bound_(growth_bound) {
  if (dim_ == 0) throw ValidationError("jump model: dimension must be >= 1");
  if (states_.empty()) throw ValidationError("jump model: at least one state required");
  if (growth_bound_ && !(*growth_bound_ > 0.0 && std::isfinite(*growth_bound_))) {
    throw ValidationError("jump model: growth bound L must be finite and > 0");
  }
  for (std::size_t x = 0; x < states_.size(); ++x) {
    const auto& s = states_[x];
    const std::string where = "state " + std::to_string(x);
    if (!std::isfinite(s.rho) || s.rho < 0.0) throw ValidationError(where + ": rho must be >= 0");
    for (std::size_t k = 0; k < s.components.size(); ++k) {
      const auto& c = s.components[k];
      if (c.dim() != dim_) {
        throw ValidationError(where + " component " + std::to_string(k) + ": has " +
                              std::to_string(c.dim()) + " marginals, model dimension is " +
                              std::to_string(dim_));
      }
      c.validate(where + " component " + std::to_string(k));
    }
    for (const auto& t : s.displacement.terms) {
      if (t.offset.size() != dim_ || t.slope.size() != dim_ || t.cap.size() != dim_) {
        throw ValidationError(where + ": displacement term dimension mismatch");
      }
      for (std::size_t i = 0; i < dim_; ++i) {
        if (!std::isfinite(t.offset[i]) || !std::isfinite(t.slope[i]) || std::isnan(t.cap[i]) ||
            t.cap[i] < 0.0) {
          throw ValidationError(where + ": displacement needs finite offset/slope and cap >= 0");
        }
      }
    }
  }
}

double JumpModel::big_jump_intensity(std::span<const double> u, StateId x) const {
  double total = 0.0;
  for (const auto& c : states_[x].components) total += c.intensity(u);
  return total;
}

double JumpModel::max_big_jump_intensity(StateId x) const {
  double total = 0.0;
  for (const auto& c : states_[x].components) total += c.max_intensity();
  return total;
}

bool JumpModel::u_independent() const {
  for (const auto& s : states_) {
    if (!s.displacement.is_constant() && s.rho > 0.0) return false;
    for (const auto& c : s.components) {
      if (c.kappa > 0.0 && c.rate > 0.0 && c.ucap > 0.0) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Kernel moments

KernelMean kernel_mean(const JumpModel& model, std::span<const double> u, StateId x) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  const auto& s = model.state(x);
  KernelMean out{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  for (const auto& c : s.components) out.jump_mean += c.intensity(u) * c.law_mean();
  const Point disp = s.displacement(u);
  for (Eigen::Index i = 0; i < d; ++i) out.drift(i) = s.rho * disp[static_cast<std::size_t>(i)];
  out.drift += out.jump_mean;
  return out;
}

Eigen::MatrixXd kernel_second_moment(const JumpModel& model, std::span<const double> u, StateId x) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  for (const auto& comp : model.state(x).components) c += comp.intensity(u) * comp.law_second_moment();
  return c;
}

double kernel_g_moment(const JumpModel& model, std::span<const double> u, StateId x,
                       const TestFunction& g, double abs_tol) {
  const auto& comps = model.state(x).components;
  double total_rate = 0.0;
  for (const auto& c : comps) total_rate += c.intensity(u);
  if (total_rate == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& c : comps) {
    const double lambda = c.intensity(u);
    if (lambda == 0.0) continue;
    // Split the budget so the rate-weighted errors add up to abs_tol.
    sum += lambda * law_g_moment(c, g, abs_tol / (total_rate * static_cast<double>(comps.size())));
  }
  return sum;
}

// ---------------------------------------------------------------------------
// PrelimitKernel

PrelimitKernel::PrelimitKernel(const JumpModel& model, double eps) : model_(&model), eps_(eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw ValidationError("prelimit kernel: eps must lie in (0, 1], got " + format_double(eps));
  }
}

Eigen::VectorXd PrelimitKernel::scaled_mean(std::span<const double> u, StateId x) const {
  const auto& s = model_->state(x);
  const auto d = static_cast<Eigen::Index>(model_->dim());
  // eps^-1 [eps int v Gamma + rho (eps d)]: eps cancels term by term, so the
  // sum is formed in the same order as kernel_mean and theta_b is exactly 0.
  Eigen::VectorXd big = Eigen::VectorXd::Zero(d);
  for (const auto& c : s.components) big += c.intensity(u) * c.law_mean();
  const Point disp = s.displacement(u);
  Eigen::VectorXd out(d);
  for (Eigen::Index i = 0; i < d; ++i) out(i) = s.rho * disp[static_cast<std::size_t>(i)];
  out += big;
  return out;
}

Eigen::MatrixXd PrelimitKernel::scaled_second_moment(std::span<const double> u, StateId x) const {
  const auto& s = model_->state(x);
  const Point jump = small_jump(u, x);
  const Eigen::Map<const Eigen::VectorXd> j(jump.data(), static_cast<Eigen::Index>(jump.size()));
  const Eigen::MatrixXd mass = eps_ * kernel_second_moment(*model_, u, x) + s.rho * j * j.transpose();
  return mass / eps_;
}

double PrelimitKernel::scaled_g_moment(std::span<const double> u, StateId x, const TestFunction& g,
                                       double big_jump_g_moment) const {
  const auto& s = model_->state(x);
  const Point jump = small_jump(u, x);
  const double mass = eps_ * big_jump_g_moment + s.rho * g(jump);
  return mass / eps_;
}

double PrelimitKernel::event_rate(std::span<const double> u, StateId x) const {
  return model_->big_jump_intensity(u, x) + model_->state(x).rho / eps_;
}

Point PrelimitKernel::small_jump(std::span<const double> u, StateId x) const {
  Point j = model_->state(x).displacement(u);
  for (double& v : j) v *= eps_;
  return j;
}

// ---------------------------------------------------------------------------
// PA ledger

PaReport validate_pa(const JumpModel& model, std::span<const double> eps_grid,
                     const std::vector<Point>& u_grid, const std::vector<TestFunction>& probes) {
  if (eps_grid.empty()) throw ValidationError("validate_pa: empty eps grid");
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] > 0.0 && eps_grid[k] <= 1.0)) {
      throw ValidationError("validate_pa: eps values must lie in (0, 1]");
    }
    if (k > 0 && !(eps_grid[k] < eps_grid[k - 1])) {
      throw ValidationError("validate_pa: eps grid must be strictly descending");
    }
  }
  for (const auto& u : u_grid) {
    if (u.size() != model.dim()) throw ValidationError("validate_pa: u grid dimension mismatch");
  }

  PaReport rep;
  rep.eps.assign(eps_grid.begin(), eps_grid.end());
  rep.u_grid = u_grid;
  for (const auto& g : probes) rep.probe_names.push_back(g.name);

  const std::size_t nx = model.num_states();
  const std::size_t nu = u_grid.size();
  const std::size_t ng = probes.size();

  // Big-jump moments do not depend on eps.
  std::vector<KernelMean> means(nu * nx);
  std::vector<Eigen::MatrixXd> seconds(nu * nx);
  std::vector<double> gmoments(nu * nx * ng);
  for (std::size_t j = 0; j < nu; ++j) {
    for (std::size_t x = 0; x < nx; ++x) {
      means[j * nx + x] = kernel_mean(model, u_grid[j], x);
      seconds[j * nx + x] = kernel_second_moment(model, u_grid[j], x);
      for (std::size_t p = 0; p < ng; ++p) {
        gmoments[(j * nx + x) * ng + p] = kernel_g_moment(model, u_grid[j], x, probes[p]);
      }
    }
  }

  for (const double eps : eps_grid) {
    const PrelimitKernel kernel(model, eps);
    for (std::size_t j = 0; j < nu; ++j) {
      const auto& u = u_grid[j];
      for (std::size_t x = 0; x < nx; ++x) {
        const auto& s = model.state(x);
        PaRow row;
        row.eps = eps;
        row.u_index = j;
        row.x = x;
        row.theta_b = max_abs(kernel.scaled_mean(u, x) - means[j * nx + x].drift);
        row.theta_c = max_abs(kernel.scaled_second_moment(u, x) - seconds[j * nx + x]);

        const Point dvec = s.displacement(u);
        const Eigen::Map<const Eigen::VectorXd> dv(dvec.data(), static_cast<Eigen::Index>(dvec.size()));
        row.theta_c_closed = eps * s.rho * max_abs(dv * dv.transpose());

        Point scaled_jump = dvec;
        for (double& v : scaled_jump) v *= eps;
        for (std::size_t p = 0; p < ng; ++p) {
          const double G = gmoments[(j * nx + x) * ng + p];
          row.theta_g.push_back(std::abs(kernel.scaled_g_moment(u, x, probes[p], G) - G));
          row.theta_g_closed.push_back(s.rho * probes[p](scaled_jump) / eps);
        }

        rep.theta_b_zero = rep.theta_b_zero && row.theta_b == 0.0;
        rep.max_closed_form_gap =
            std::max(rep.max_closed_form_gap, std::abs(row.theta_c - row.theta_c_closed));
        for (std::size_t p = 0; p < ng; ++p) {
          rep.max_closed_form_gap =
              std::max(rep.max_closed_form_gap, std::abs(row.theta_g[p] - row.theta_g_closed[p]));
        }
        rep.rows.push_back(std::move(row));
      }
    }
  }

  // Columns: sup over (u, x) per eps, plus per-(u, x) monotonicity.
  constexpr double kJitter = 1e-12;
  const std::size_t per_eps = nu * nx;
  auto column_value = [&](const PaRow& r, std::size_t col) {
    if (col == 0) return r.theta_b;
    if (col == 1) return r.theta_c;
    return r.theta_g[col - 2];
  };
  std::vector<std::string> names{"theta_b", "theta_c"};
  for (const auto& g : probes) names.push_back("theta_g[" + g.name + "]");
  for (std::size_t col = 0; col < names.size(); ++col) {
    PaColumn column{names[col], {}, true};
    for (std::size_t k = 0; k < eps_grid.size(); ++k) {
      double sup = 0.0;
      for (std::size_t r = 0; r < per_eps; ++r) sup = std::max(sup, column_value(rep.rows[k * per_eps + r], col));
      column.sup_by_eps.push_back(sup);
      if (k > 0) {
        if (sup > column.sup_by_eps[k - 1] + kJitter) column.monotone = false;
        for (std::size_t r = 0; r < per_eps; ++r) {
          if (column_value(rep.rows[k * per_eps + r], col) >
              column_value(rep.rows[(k - 1) * per_eps + r], col) + kJitter) {
            column.monotone = false;
          }
        }
      }
    }
    if (!column.monotone) {
      rep.failures.push_back("PA: " + column.name + " is not non-increasing as eps decreases");
    }
    rep.columns.push_back(std::move(column));
  }
  if (rep.max_closed_form_gap > 1e-12) {
    rep.failures.push_back("PA: negligible terms deviate from their closed forms by " +
                           format_double(rep.max_closed_form_gap));
  }
  rep.passed = rep.failures.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// C3 / C4

namespace {

std::vector<Point> density_probe_points(const JumpComponent& c) {
  constexpr int kPoints = 25;
  std::vector<Point> pts;
  for (int k = 0; k < kPoints; ++k) {
    const double s = static_cast<double>(k) / (kPoints - 1);
    Point v(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i) {
      v[i] = std::visit(overloaded{[](const PointMass& p) { return p.v0; },
                                   [&](const Gaussian& g) { return g.mean + (12.0 * s - 6.0) * g.sd; },
                                   [&](const Uniform& u) {
                                     // interior points only
                                     return u.lo + (u.hi - u.lo) * (0.02 + 0.96 * s);
                                   }},
                        c.marginals[i]);
    }
    pts.push_back(std::move(v));
  }
  return pts;
}

}  // namespace

C3C4Report validate_c3_c4(const JumpModel& model, std::span<const double> c_grid,
                          const std::vector<Point>& u_grid) {
  if (c_grid.empty()) throw ValidationError("validate_c3_c4: empty c grid");
  for (std::size_t k = 1; k < c_grid.size(); ++k) {
    if (!(c_grid[k] > c_grid[k - 1])) throw ValidationError("validate_c3_c4: c grid must be ascending");
  }
  for (const auto& u : u_grid) {
    if (u.size() != model.dim()) throw ValidationError("validate_c3_c4: u grid dimension mismatch");
  }
  C3C4Report rep;
  const std::size_t nx = model.num_states();

  // C3
  for (const double c : c_grid) {
    const auto g = probes::tail_second_moment(c);
    double sup = 0.0;
    for (const auto& u : u_grid) {
      for (std::size_t x = 0; x < nx; ++x) sup = std::max(sup, kernel_g_moment(model, u, x, g));
    }
    if (!rep.c3.empty() && sup > rep.c3.back().sup_tail + 1e-12) rep.c3_monotone = false;
    rep.c3.push_back({c, sup});
  }
  rep.c3_small = rep.c3.back().sup_tail < 1e-6;
  if (!rep.c3_monotone) rep.failures.push_back("C3: tail second moment not non-increasing in c");
  if (!rep.c3_small) {
    rep.failures.push_back("C3: tail second moment " + format_double(rep.c3.back().sup_tail) +
                           " at c = " + format_double(c_grid.back()) + " is not below 1e-6");
  }

  // Envelope f(v) over all density components of all states.
  std::vector<const JumpComponent*> density_components;
  for (std::size_t x = 0; x < nx; ++x) {
    const auto& comps = model.state(x).components;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      if (comps[k].rate == 0.0) continue;
      if (comps[k].has_density()) {
        density_components.push_back(&comps[k]);
        rep.envelope_second_moment += comps[k].max_intensity() * comps[k].law_second_moment().trace();
      } else {
        rep.notes.push_back("state " + std::to_string(x) + " component " + std::to_string(k) +
                            " has an atomic marginal and no Lebesgue density; only the kernel "
                            "moment bounds apply to it");
      }
    }
  }
  auto envelope = [&](std::span<const double> v) {
    double f = 0.0;
    for (const auto* c : density_components) f += c->max_intensity() * c->law_density(v);
    return f;
  };
  std::vector<Point> v_grid;
  for (const auto* c : density_components) {
    auto pts = density_probe_points(*c);
    v_grid.insert(v_grid.end(), pts.begin(), pts.end());
  }

  // C4
  for (const auto& u : u_grid) {
    const double un = euclidean_norm(u);
    for (std::size_t x = 0; x < nx; ++x) {
      C4Row row;
      row.u = u;
      row.x = x;
      row.drift_norm = kernel_mean(model, u, x).drift.norm();
      row.second_norm = kernel_second_moment(model, u, x).norm();
      row.drift_L = row.drift_norm / (1.0 + un);
      row.second_L = row.second_norm / (1.0 + un * un);
      for (const auto& v : v_grid) {
        double lambda = 0.0;
        for (const auto& c : model.state(x).components) {
          if (c.has_density()) lambda += c.intensity(u) * c.law_density(v);
        }
        const double f = envelope(v);
        if (lambda > 0.0) row.density_L = std::max(row.density_L, lambda / (f * (1.0 + un)));
      }
      rep.required_L = std::max({rep.required_L, row.drift_L, row.second_L, row.density_L});
      rep.c4.push_back(std::move(row));
    }
  }
  if (model.growth_bound()) {
    rep.L = *model.growth_bound();
    rep.L_declared = true;
    for (const auto& row : rep.c4) {
      auto where = [&] {
        std::string s = "u = (";
        for (std::size_t i = 0; i < row.u.size(); ++i) s += (i ? "," : "") + format_double(row.u[i]);
        return s + "), x = " + std::to_string(row.x);
      };
      if (row.drift_L > rep.L) rep.failures.push_back("C4: |b| > L(1+|u|) at " + where());
      if (row.second_L > rep.L) rep.failures.push_back("C4: |c| > L(1+|u|^2) at " + where());
      if (row.density_L > rep.L) rep.failures.push_back("C4: density bound violated at " + where());
    }
  } else {
    rep.L = rep.required_L;
  }
  if (!std::isfinite(rep.envelope_second_moment)) {
    rep.failures.push_back("C4: envelope has infinite second moment");
  }
  rep.passed = rep.failures.empty();
  return rep;
}

std::vector<Point> diagonal_grid(double lo, double hi, std::size_t n, std::size_t dim) {
  std::vector<Point> grid;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    grid.emplace_back(dim, t);
  }
  return grid;
}

}  // namespace mmjump
