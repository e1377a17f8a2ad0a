#include <mmjump/verify.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <mmjump/errors.hpp>
#include <mmjump/format.hpp>
#include <mmjump/stats.hpp>

namespace mmjump {

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> dyadic_grid(double T, unsigned level) {
  const std::size_t n = std::size_t{1} << level;
  std::vector<double> g(n + 1);
  for (std::size_t k = 0; k <= n; ++k) g[k] = T * static_cast<double>(k) / static_cast<double>(n);
  g.back() = T;
  return g;
}

std::vector<double> EnsembleSummary::marginal(std::size_t k, std::size_t coord) const {
  std::vector<double> out(N);
  for (std::size_t p = 0; p < N; ++p) out[p] = values[k][p * dim + coord];
  return out;
}

namespace {

EnsembleSummary make_summary(double eps, std::size_t N, std::size_t dim, double T, std::size_t probes,
                             const EnsembleOptions& options) {
  EnsembleSummary s;
  s.eps = eps;
  s.N = N;
  s.dim = dim;
  s.T = T;
  s.grid = dyadic_grid(T, options.dyadic_level);
  s.values.assign(s.grid.size(), std::vector<double>(N * dim, 0.0));
  s.sup.assign(N, 0.0);
  s.B.assign(dim, std::vector<double>(N, 0.0));
  s.C.assign(N, 0.0);
  s.G.assign(probes, std::vector<double>(N, 0.0));
  return s;
}

void store_path(EnsembleSummary& s, std::size_t p, const Trajectory& traj, const CharacteristicPaths& ch,
                std::vector<std::uint64_t>& proposals, std::vector<std::uint64_t>& accepted) {
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    const auto v = traj.value_at(s.grid[k]);
    std::copy(v.begin(), v.end(), s.values[k].begin() + static_cast<std::ptrdiff_t>(p * s.dim));
  }
  s.sup[p] = traj.sup_norm();
  const auto b = ch.B_at(0);
  for (std::size_t i = 0; i < s.dim; ++i) s.B[i][p] = b[i];
  s.C[p] = ch.C[0];
  for (std::size_t j = 0; j < ch.G.size(); ++j) s.G[j][p] = ch.G[j][0];
  proposals[p] = traj.proposals;
  accepted[p] = traj.accepted;
}

void sum_thinning(EnsembleSummary& s, const std::vector<std::uint64_t>& proposals,
                  const std::vector<std::uint64_t>& accepted) {
  for (std::size_t p = 0; p < s.N; ++p) {
    s.proposals += proposals[p];
    s.accepted += accepted[p];
  }
}

}  // namespace

EnsembleSummary run_prelimit_ensemble(const SwitchSpec& spec, const JumpModel& model,
                                      const PrelimitIntegrands& integrands, double eps, double T, std::size_t N,
                                      std::uint64_t seed, std::uint64_t ensemble_index, std::span<const double> xi0,
                                      StateId x0, const EnsembleOptions& options) {
  EnsembleSummary s = make_summary(eps, N, model.dim(), T, integrands.num_probes(), options);
  for (const auto& p : integrands.probes()) s.probe_names.push_back(p.name);
  std::vector<std::uint64_t> proposals(N), accepted(N);
  const double terminal[] = {T};
  parallel_for(N, options.threads, [&](std::size_t p) {
    Rng rng = make_stream(seed, ensemble_index, p);
    const Trajectory traj = simulate_prelimit(spec, model, eps, T, xi0, x0, rng);
    store_path(s, p, traj, predictable_characteristics(traj, integrands, terminal), proposals, accepted);
  });
  sum_thinning(s, proposals, accepted);
  return s;
}

EnsembleSummary run_limit_ensemble(const LimitIntegrands& integrands, double T, std::size_t N, std::uint64_t seed,
                                   std::uint64_t ensemble_index, std::span<const double> xi0, bool compound_poisson,
                                   const EnsembleOptions& options) {
  const LimitModel& limit = integrands.limit();
  EnsembleSummary s = make_summary(0.0, N, limit.dim(), T, integrands.num_probes(), options);
  for (const auto& p : integrands.probes()) s.probe_names.push_back(p.name);
  const double h = options.h > 0.0 ? options.h : 1e-3 * T;
  LimitOptions lo;
  lo.h = h;
  lo.check_step = false;
  lo.observe = s.grid;
  if (!compound_poisson) check_limit_step(limit, xi0, T, h);
  const JumpLaw law = compound_poisson ? limit.jump_law() : JumpLaw{};
  const double Lambda = compound_poisson ? limit.total_rate().value_or(0.0) : 0.0;

  std::vector<std::uint64_t> proposals(N), accepted(N);
  const double terminal[] = {T};
  parallel_for(N, options.threads, [&](std::size_t p) {
    Rng rng = make_stream(seed, ensemble_index, p);
    const Trajectory traj = compound_poisson ? simulate_compound_poisson(Lambda, law, T, xi0, rng)
                                             : simulate_limit(limit, T, xi0, rng, lo);
    store_path(s, p, traj, predictable_characteristics(traj, integrands, terminal, h), proposals, accepted);
  });
  sum_thinning(s, proposals, accepted);
  return s;
}

CccTable ccc_table(const EnsembleSummary& ensemble, std::span<const double> c_grid) {
  CccTable t;
  t.c.assign(c_grid.begin(), c_grid.end());
  for (double c : c_grid) {
    std::size_t above = 0;
    for (double v : ensemble.sup) above += v > c ? 1 : 0;
    t.tail.push_back(ensemble.N == 0 ? 0.0 : static_cast<double>(above) / static_cast<double>(ensemble.N));
  }
  for (std::size_t k = 1; k < t.tail.size(); ++k) {
    if (t.c[k] >= t.c[k - 1] && t.tail[k] > t.tail[k - 1]) t.non_increasing = false;
  }
  return t;
}

IncrementModulus increment_modulus(const EnsembleSummary& s) {
  IncrementModulus m;
  const std::size_t K = s.grid.size();
  double adjacent_sum = 0.0;
  std::size_t adjacent = 0;
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = a + 1; b < K; ++b) {
      const double gap = s.grid[b] - s.grid[a];
      if (gap <= 0.0) continue;
      double acc = 0.0;
      for (std::size_t p = 0; p < s.N; ++p) {
        for (std::size_t i = 0; i < s.dim; ++i) {
          const double d = s.values[b][p * s.dim + i] - s.values[a][p * s.dim + i];
          acc += d * d;
        }
      }
      const double ratio = acc / static_cast<double>(s.N) / gap;
      m.max_ratio = std::max(m.max_ratio, ratio);
      if (b == a + 1) {
        adjacent_sum += ratio;
        ++adjacent;
      }
    }
  }
  if (adjacent > 0) m.small_gap_ratio = adjacent_sum / static_cast<double>(adjacent);
  return m;
}

double sup_second_moment(const EnsembleSummary& s) {
  double acc = 0.0;
  for (double v : s.sup) acc += v * v;
  return s.N == 0 ? 0.0 : acc / static_cast<double>(s.N);
}

TrendVerdict trend_verdict(std::span<const double> values, std::span<const double> se, std::size_t allowed,
                           double se_factor) {
  TrendVerdict v;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double rise = values[i + 1] - values[i];
    if (rise <= 0.0) continue;
    const double slack = se_factor * std::sqrt(se[i] * se[i] + se[i + 1] * se[i + 1]);
    ++v.inversions;
    std::string note = "rise " + format_double(rise) + " between rows " + std::to_string(i) + " and " +
                       std::to_string(i + 1) + " (slack " + format_double(slack) + ")";
    if (rise > slack) {
      v.passed = false;
      note += " exceeds the slack";
    }
    v.notes.push_back(std::move(note));
  }
  if (v.inversions > allowed) {
    v.passed = false;
    v.notes.push_back(std::to_string(v.inversions) + " inversions, " + std::to_string(allowed) + " allowed");
  }
  return v;
}

namespace {

double spread(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi == 0.0) return 1.0;
  if (*lo <= 0.0) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

void validate_config(const StudyConfig& c) {
  if (c.N < 100) throw ValidationError("convergence study needs N >= 100, got " + std::to_string(c.N));
  if (c.eps.empty()) throw ValidationError("convergence study needs at least one eps");
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    if (!(c.eps[i] > 0.0 && c.eps[i] <= 1.0)) {
      throw ValidationError("eps must lie in (0, 1], got " + format_double(c.eps[i]));
    }
    if (i > 0 && !(c.eps[i] < c.eps[i - 1])) throw ValidationError("eps list must be strictly descending");
  }
  if (!(c.T > 0.0)) throw ValidationError("T must be > 0");
  if (c.dyadic_level < 2) throw ValidationError("dyadic level must be >= 2");
}

}  // namespace

ConvergenceReport run_convergence_study(const SwitchSpec& spec, const JumpModel& model, const StudyConfig& config) {
  validate_config(config);
  spec.validate();
  ConvergenceReport rep;
  rep.config = config;
  rep.dim = model.dim();
  const std::size_t d = model.dim();
  std::vector<double> xi0 = config.xi0.empty() ? std::vector<double>(d, 0.0) : config.xi0;
  if (xi0.size() != d) throw ValidationError("xi0 has the wrong dimension");
  rep.config.xi0 = xi0;

  const GeneratorMatrix Q = build_generator(spec);
  const StationaryLaw pi = stationary_distribution(Q);
  const LimitModel limit = assemble_limit(model, pi);
  if (model.u_independent()) rep.compound_poisson_limit = check_pa3(model, pi).compound_poisson_enabled;

  const auto probes = probes::catalogue(config.probe_tail_c);
  for (const auto& p : probes) rep.probe_names.push_back(p.name);
  const PrelimitIntegrands pre_int(model, probes);
  const LimitIntegrands lim_int(limit, probes);
  EnsembleOptions opts;
  opts.dyadic_level = config.dyadic_level;
  opts.threads = config.threads;
  opts.h = config.h;

  const EnsembleSummary lim =
      run_limit_ensemble(lim_int, config.T, config.N, config.seed, kLimitStream, xi0, rep.compound_poisson_limit, opts);
  const EnsembleSummary lim_b = run_limit_ensemble(lim_int, config.T, config.N, config.seed, kLimitStreamB, xi0,
                                                   rep.compound_poisson_limit, opts);
  rep.limit_self_w1 = wasserstein1(lim.terminal(0), lim_b.terminal(0));

  if (config.c_grid.empty()) {
    for (double p : {0.5, 0.9, 0.99, 0.999}) rep.c_grid.push_back(quantile(lim.sup, p));
  } else {
    rep.c_grid = config.c_grid;
  }
  rep.limit_ccc_tail = ccc_table(lim, rep.c_grid).tail;
  rep.limit_increment_ratio = increment_modulus(lim).max_ratio;
  rep.limit_sup_second_moment = sup_second_moment(lim);
  rep.ccc_sup_over_eps.assign(rep.c_grid.size(), 0.0);

  std::vector<std::vector<double>> lim_terminal(d), lim_B(d);
  for (std::size_t i = 0; i < d; ++i) {
    lim_terminal[i] = lim.terminal(i);
    lim_B[i] = lim.B[i];
  }
  const std::size_t quarter = (lim.grid.size() - 1) / 4;

  for (std::size_t e = 0; e < config.eps.size(); ++e) {
    const double eps = config.eps[e];
    const EnsembleSummary pre =
        run_prelimit_ensemble(spec, model, pre_int, eps, config.T, config.N, config.seed, e, xi0, config.x0, opts);
    ConvergenceRow row;
    row.eps = eps;
    Rng boot = make_stream(config.seed, kBootstrapStream, e);
    for (std::size_t i = 0; i < d; ++i) {
      const auto a = pre.terminal(i);
      row.w1.push_back(wasserstein1(a, lim_terminal[i]));
      row.w1_se.push_back(bootstrap_se(a, lim_terminal[i], wasserstein1, config.bootstrap, boot));
      const KsResult ks = ks_statistic(a, lim_terminal[i]);
      row.ks_D.push_back(ks.D);
      row.ks_p.push_back(ks.p_value);
      row.mean_gap.push_back(mean(a) - mean(lim_terminal[i]));
      row.var_gap.push_back(variance(a) - variance(lim_terminal[i]));
      row.B_w1.push_back(wasserstein1(pre.B[i], lim_B[i]));
      row.B_w1_se.push_back(bootstrap_se(pre.B[i], lim_B[i], wasserstein1, config.bootstrap, boot));
    }
    for (std::size_t q = 1; q <= 3; ++q) {
      const std::size_t k = q * quarter;
      row.interior_times.push_back(pre.grid[k]);
      row.interior_w1.push_back(wasserstein1(pre.marginal(k, 0), lim.marginal(k, 0)));
    }
    row.C_w1 = wasserstein1(pre.C, lim.C);
    for (std::size_t j = 0; j < pre.G.size(); ++j) row.G_w1.push_back(wasserstein1(pre.G[j], lim.G[j]));
    row.ccc_tail = ccc_table(pre, rep.c_grid).tail;
    for (std::size_t k = 0; k < rep.c_grid.size(); ++k) {
      rep.ccc_sup_over_eps[k] = std::max(rep.ccc_sup_over_eps[k], row.ccc_tail[k]);
    }
    const IncrementModulus inc = increment_modulus(pre);
    row.increment_ratio = inc.max_ratio;
    row.increment_small_gap = inc.small_gap_ratio;
    row.sup_second_moment = sup_second_moment(pre);
    row.acceptance_rate =
        pre.proposals == 0 ? 1.0 : static_cast<double>(pre.accepted) / static_cast<double>(pre.proposals);
    rep.rows.push_back(std::move(row));
  }

  std::vector<double> w1, se, bw1, sup2, inc;
  for (const auto& r : rep.rows) {
    w1.push_back(r.w1[0]);
    se.push_back(r.w1_se[0]);
    bw1.push_back(r.B_w1[0]);
    sup2.push_back(r.sup_second_moment);
    inc.push_back(r.increment_ratio);
  }
  rep.w1_trend = trend_verdict(w1, se, config.allowed_inversions, config.inversion_se);
  for (double p : rep.rows.back().ks_p) rep.ks_passed = rep.ks_passed && p >= config.ks_level;
  for (std::size_t i = 0; i + 1 < bw1.size(); ++i) {
    if (!(bw1[i + 1] < bw1[i])) rep.characteristic_decreasing = false;
  }
  rep.sup_moment_spread = spread(sup2);
  rep.increment_spread = spread(inc);
  rep.passed = rep.w1_trend.passed && rep.ks_passed;
  return rep;
}

nlohmann::ordered_json to_json(const ConvergenceReport& r) {
  using nlohmann::ordered_json;
  ordered_json cfg;
  cfg["eps"] = r.config.eps;
  cfg["T"] = r.config.T;
  cfg["N"] = r.config.N;
  cfg["seed"] = r.config.seed;
  cfg["xi0"] = r.config.xi0;
  cfg["x0"] = r.config.x0;
  cfg["h"] = r.config.h > 0.0 ? r.config.h : 1e-3 * r.config.T;
  cfg["dyadic_level"] = r.config.dyadic_level;
  cfg["bootstrap"] = r.config.bootstrap;
  cfg["ks_level"] = r.config.ks_level;
  cfg["allowed_inversions"] = r.config.allowed_inversions;
  cfg["inversion_se"] = r.config.inversion_se;
  cfg["probe_tail_c"] = r.config.probe_tail_c;

  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json j;
    j["eps"] = row.eps;
    j["w1"] = row.w1;
    j["w1_se"] = row.w1_se;
    j["ks_D"] = row.ks_D;
    j["ks_p"] = row.ks_p;
    j["mean_gap"] = row.mean_gap;
    j["var_gap"] = row.var_gap;
    j["interior_times"] = row.interior_times;
    j["interior_w1"] = row.interior_w1;
    j["B_w1"] = row.B_w1;
    j["B_w1_se"] = row.B_w1_se;
    j["C_w1"] = row.C_w1;
    j["G_w1"] = row.G_w1;
    j["ccc_tail"] = row.ccc_tail;
    j["increment_ratio"] = row.increment_ratio;
    j["increment_small_gap"] = row.increment_small_gap;
    j["sup_second_moment"] = row.sup_second_moment;
    j["acceptance_rate"] = row.acceptance_rate;
    rows.push_back(std::move(j));
  }

  ordered_json out;
  out["schema"] = "mmjump.report/1";
  out["config"] = std::move(cfg);
  out["dim"] = r.dim;
  out["probes"] = r.probe_names;
  out["compound_poisson_limit"] = r.compound_poisson_limit;
  out["c_grid"] = r.c_grid;
  out["rows"] = std::move(rows);
  out["limit"] = {{"ccc_tail", r.limit_ccc_tail},
                  {"increment_ratio", r.limit_increment_ratio},
                  {"sup_second_moment", r.limit_sup_second_moment},
                  {"self_w1", r.limit_self_w1}};
  out["ccc_sup_over_eps"] = r.ccc_sup_over_eps;
  out["verdict"] = {{"w1_trend", r.w1_trend.passed},
                    {"w1_inversions", r.w1_trend.inversions},
                    {"w1_notes", r.w1_trend.notes},
                    {"ks", r.ks_passed},
                    {"characteristic_decreasing", r.characteristic_decreasing},
                    {"sup_moment_spread", r.sup_moment_spread},
                    {"increment_spread", r.increment_spread},
                    {"passed", r.passed}};
  return out;
}

void write_report_csv(std::ostream& os, const ConvergenceReport& r) {
  os << "eps,w1,w1_se,ks_D,ks_p,mean_gap,var_gap,B_w1,C_w1";
  for (std::size_t j = 0; j < r.probe_names.size(); ++j) os << ",G_w1_" << j + 1;
  os << ",increment_ratio,sup_second_moment,acceptance_rate\n";
  for (const auto& row : r.rows) {
    os << format_double(row.eps) << ',' << format_double(row.w1[0]) << ',' << format_double(row.w1_se[0]) << ','
       << format_double(row.ks_D[0]) << ',' << format_double(row.ks_p[0]) << ',' << format_double(row.mean_gap[0])
       << ',' << format_double(row.var_gap[0]) << ',' << format_double(row.B_w1[0]) << ','
       << format_double(row.C_w1);
    for (double g : row.G_w1) os << ',' << format_double(g);
    os << ',' << format_double(row.increment_ratio) << ',' << format_double(row.sup_second_moment) << ','
       << format_double(row.acceptance_rate) << '\n';
  }
}

}  // namespace mmjump
