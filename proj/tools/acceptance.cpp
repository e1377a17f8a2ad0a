// Acceptance run: one PASS/FAIL line per criterion, with the measured value,
// its pinned tolerance, and wall time against the pinned budget. Exit status
// is 0 only if every criterion passes.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mmjump/averaging.hpp>
#include <mmjump/cli.hpp>
#include <mmjump/jump_model.hpp>
#include <mmjump/model_io.hpp>
#include <mmjump/simulate.hpp>
#include <mmjump/stats.hpp>
#include <mmjump/switching.hpp>
#include <mmjump/verify.hpp>

namespace fs = std::filesystem;
using namespace mmjump;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

std::string join(const std::vector<double>& v, int prec = 4) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i], prec);
  return s;
}

// Random irreducible spec: a forced cycle plus random extra edges.
SwitchSpec random_irreducible(std::mt19937_64& gen) {
  std::uniform_int_distribution<std::size_t> size(1, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = size(gen);
  SwitchSpec s;
  const auto N = static_cast<Eigen::Index>(n);
  s.P = Eigen::MatrixXd::Zero(N, N);
  for (std::size_t i = 0; i < n; ++i) {
    s.states.push_back(std::to_string(i));
    s.q.push_back(0.1 + 5.0 * u(gen));
    const auto I = static_cast<Eigen::Index>(i);
    if (n == 1) {
      s.P(0, 0) = 1.0;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      s.P(I, static_cast<Eigen::Index>(j)) = (j == (i + 1) % n) ? 0.2 + u(gen) : (u(gen) < 0.5 ? u(gen) : 0.0);
    }
    s.P.row(I) /= s.P.row(I).sum();
  }
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmjump acceptance criteria"};
  std::string root = MMJUMP_SOURCE_DIR;
  std::uint64_t seed = 42;
  std::size_t threads = 0;
  std::string work = (fs::temp_directory_path() / "mmjump_acceptance").string();
  app.add_option("--root", root, "source tree holding models/");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads (0: all cores)");
  app.add_option("--work", work, "scratch directory for the determinism check");
  CLI11_PARSE(app, argc, argv);

  const auto fixture = load_model(fs::path(root) / "models" / "two_state.json");
  const std::vector<double> eps_grid{0.1, 0.05, 0.02, 0.01};
  // The study backs criteria 5, 6 and 8; it runs once, inside criterion 5's budget.
  std::optional<ConvergenceReport> study;

  std::vector<Criterion> criteria;

  criteria.push_back({1, "switching algebra", 5.0, [&] {
    std::mt19937_64 gen(seed);
    double worst_pi = 0.0, worst_poisson = 0.0;
    for (int t = 0; t < 100; ++t) {
      const auto Q = build_generator(random_irreducible(gen));
      const auto pi = stationary_distribution(Q);
      worst_pi = std::max(worst_pi, (pi.pi.transpose() * Q.matrix()).cwiseAbs().maxCoeff());
      std::normal_distribution<double> z(0.0, 3.0);
      Eigen::VectorXd f(static_cast<Eigen::Index>(pi.size()));
      for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = z(gen);
      f = center(f, pi);
      const Eigen::VectorXd h = solve_poisson(Q, f, pi);
      worst_poisson = std::max(worst_poisson, (Q.matrix() * h - f).cwiseAbs().maxCoeff());
    }
    return Outcome{worst_pi <= 1e-10 && worst_poisson <= 1e-9,
                   "max |pi Q| = " + fmt(worst_pi, 3) + " (<= 1e-10), max |Qh - f| = " + fmt(worst_poisson, 3) +
                       " (<= 1e-9) over 100 specs"};
  }});

  criteria.push_back({2, "negligible terms", 1.0, [&] {
    const auto rep = validate_pa(fixture.model, eps_grid, diagonal_grid(-4, 4, 9, 1), probes::catalogue());
    bool monotone = true;
    for (const auto& c : rep.columns) monotone = monotone && c.monotone;
    std::string cols;
    for (const auto& c : rep.columns) {
      if (c.name != "theta_b") cols += " " + c.name + "=[" + join(c.sup_by_eps, 3) + "]";
    }
    return Outcome{rep.theta_b_zero && rep.max_closed_form_gap <= 1e-12 && monotone,
                   std::string("theta_b == 0: ") + (rep.theta_b_zero ? "yes" : "no") +
                       ", closed-form gap = " + fmt(rep.max_closed_form_gap, 3) + " (<= 1e-12), non-increasing: " +
                       (monotone ? "yes" : "no") + ";" + cols};
  }});

  criteria.push_back({3, "compound-Poisson moments", 30.0, [&] {
    const JumpLaw law{{1.0}, {JumpComponent{{PointMass{1.0}}, 1.0, 0.0, 0.0}}};
    const std::size_t N = 100000;
    std::vector<double> x(N);
    const Point xi0{0.0};
    parallel_for(N, threads, [&](std::size_t p) {
      Rng rng = make_stream(seed, 3, p);
      x[p] = simulate_compound_poisson(2.0, law, 3.0, xi0, rng).terminal()[0];
    });
    const double m = mean(x), s2 = variance(x);
    double m4 = 0.0;
    for (double v : x) m4 += std::pow(v - m, 4);
    m4 /= static_cast<double>(N);
    const double se_m = std::sqrt(s2 / N), se_v = std::sqrt((m4 - s2 * s2) / N);
    const bool ok = std::abs(m - 6.0) <= 3 * se_m && std::abs(s2 - 6.0) <= 3 * se_v;
    return Outcome{ok, "mean = " + fmt(m, 6) + " (6 +- " + fmt(3 * se_m, 3) + "), var = " + fmt(s2, 6) + " (6 +- " +
                           fmt(3 * se_v, 3) + "), N = 1e5"};
  }});

  criteria.push_back({4, "pre-limit exactness", 30.0, [&] {
    const auto spec = single_state_switching("only");
    const JumpModel model(1, {StateKernel{{JumpComponent{{PointMass{1.0}}, 2.0, 0.0, 0.0}}, 0.0,
                                          Displacement::constant({0.0})}});
    const std::size_t N = 10000;
    std::vector<std::size_t> counts(N);
    const Point xi0{0.0};
    parallel_for(N, threads, [&](std::size_t p) {
      Rng rng = make_stream(seed, 4, p);
      counts[p] = simulate_prelimit(spec, model, 0.1, 1.0, xi0, 0, rng).count(EventKind::big_jump);
    });
    const auto fit = chi_square_counts(counts, [](std::size_t k) {
      return std::exp(-2.0 + static_cast<double>(k) * std::log(2.0) - std::lgamma(static_cast<double>(k) + 1.0));
    });
    return Outcome{fit.p_value > 0.01, "chi2 = " + fmt(fit.statistic) + ", dof = " + std::to_string(fit.dof) +
                                           ", p = " + fmt(fit.p_value) + " (> 0.01), N = 1e4"};
  }});

  criteria.push_back({5, "weak convergence", 600.0, [&] {
    StudyConfig cfg;
    cfg.eps = eps_grid;
    cfg.N = 10000;
    cfg.T = 1.0;
    cfg.seed = seed;
    cfg.threads = threads;
    study = run_convergence_study(fixture.switching, fixture.model, cfg);
    std::vector<double> w1, se;
    for (const auto& r : study->rows) {
      w1.push_back(r.w1[0]);
      se.push_back(r.w1_se[0]);
    }
    const auto& last = study->rows.back();
    return Outcome{study->w1_trend.passed && study->ks_passed,
                   "W1 = [" + join(w1) + "], SE = [" + join(se, 2) + "], inversions = " +
                       std::to_string(study->w1_trend.inversions) + " (<= 1 within 2 SE); KS at eps 0.01: D = " +
                       fmt(last.ks_D[0]) + ", p = " + fmt(last.ks_p[0]) + " (> 0.01)"};
  }});

  criteria.push_back({6, "characteristic convergence", 0.0, [&] {
    if (!study) return Outcome{false, "study did not run"};
    std::vector<double> b;
    for (const auto& r : study->rows) b.push_back(r.B_w1[0]);
    return Outcome{study->characteristic_decreasing, "W1(B^eps(T), B^0(T)) = [" + join(b) + "] strictly decreasing"};
  }});

  criteria.push_back({7, "singular perturbation", 1.0, [&] {
    std::vector<double> u;
    for (int k = -8; k <= 8; ++k) u.push_back(0.25 * k);
    const auto tab = perturbation_residual(fixture.switching, fixture.model, smooth_probes::identity(), u, eps_grid);
    return Outcome{tab.max_closed_form_gap <= 1e-10 && tab.ratio <= 1.01,
                   "closed-form gap = " + fmt(tab.max_closed_form_gap, 3) + " (<= 1e-10), max/min |r|/eps = " +
                       fmt(tab.ratio, 8) + " (<= 1.01), K = " + fmt(tab.K)};
  }});

  criteria.push_back({8, "eps-uniform bounds", 0.0, [&] {
    if (!study) return Outcome{false, "study did not run"};
    std::vector<double> s2, inc;
    for (const auto& r : study->rows) {
      s2.push_back(r.sup_second_moment);
      inc.push_back(r.increment_ratio);
    }
    return Outcome{study->sup_moment_spread < 2.0 && study->increment_spread < 2.0,
                   "E sup|xi|^2 = [" + join(s2) + "] spread " + fmt(study->sup_moment_spread) +
                       " (< 2); increment ratio = [" + join(inc) + "] spread " + fmt(study->increment_spread) + " (< 2)"};
  }});

  criteria.push_back({9, "determinism", 120.0, [&] {
    fs::remove_all(work);
    const std::string model = (fs::path(root) / "models" / "two_state.json").string();
    const std::string seed_s = std::to_string(seed);
    const std::vector<std::vector<std::string>> runs{
        {"validate", "--model", model},
        {"stationary", "--model", model},
        {"simulate", "--model", model, "--eps", "0.02", "--seed", seed_s},
        {"limit", "--model", model, "--seed", seed_s},
        {"verify", "--model", model, "--N", "500", "--bootstrap", "20", "--seed", seed_s},
    };
    std::size_t files = 0, identical = 0;
    for (const auto& args : runs) {
      const fs::path first = fs::path(work) / args[0];
      const fs::path second = fs::path(work) / (args[0] + "_replay");
      auto with_out = args;
      with_out.insert(with_out.end(), {"--out", first.string()});
      std::ostringstream sink;
      if (run_cli(with_out, sink, sink) == kExitRuntime) return Outcome{false, args[0] + " failed: " + sink.str()};
      if (run_cli({"replay", "--manifest", (first / "manifest.json").string(), "--out", second.string()}, sink, sink) !=
          kExitOk) {
        return Outcome{false, "replay of " + args[0] + " reported a mismatch"};
      }
      for (const auto& e : fs::directory_iterator(first)) {
        ++files;
        if (slurp(e.path()) == slurp(second / e.path().filename())) ++identical;
      }
    }
    fs::remove_all(work);
    return Outcome{files > 0 && identical == files, std::to_string(identical) + " of " + std::to_string(files) +
                                                        " files byte-identical after manifest replay (5 commands)"};
  }});

  bool all = true;
  double study_time = 0.0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("error: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // 6 and 8 reuse the study, so they share its budget.
    double budget = c.budget_s;
    double elapsed = dt;
    if (c.id == 5) study_time = dt;
    if (budget == 0.0) {
      budget = 600.0;
      elapsed = study_time;
    }
    const bool in_time = elapsed <= budget;
    const bool ok = o.passed && in_time;
    all = all && ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": " << o.detail << "; time "
              << fmt(elapsed, 3) << " s (budget " << fmt(budget, 3) << " s" << (in_time ? "" : ", EXCEEDED") << ")"
              << std::endl;
  }
  std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}
