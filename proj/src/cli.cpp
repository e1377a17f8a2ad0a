#include <mmjump/cli.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <mmjump/averaging.hpp>
#include <mmjump/errors.hpp>
#include <mmjump/format.hpp>
#include <mmjump/jump_model.hpp>
#include <mmjump/model_io.hpp>
#include <mmjump/simulate.hpp>
#include <mmjump/switching.hpp>
#include <mmjump/verify.hpp>

namespace mmjump {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const std::vector<double> kDefaultEps{0.1, 0.05, 0.02, 0.01};
const std::vector<double> kDefaultCGrid{1.0, 2.0, 4.0, 8.0};
constexpr std::size_t kCharacteristicPoints = 101;

struct Options {
  std::string model;
  std::vector<double> eps;
  double T = 1.0;
  std::size_t N = 0;  // 0: command default
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "json";
  double h = 0.0;
  std::size_t threads = 0;
  std::vector<double> xi0;
  std::size_t x0 = 0;
  std::vector<double> c_grid;
  std::string probe = "identity";
  std::size_t bootstrap = 200;
  std::string manifest;
};

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

class OutputDir {
 public:
  explicit OutputDir(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }
  bool enabled() const { return !dir_.empty(); }

  template <class Fn>
  void write(const std::string& name, Fn&& fn) {
    if (!enabled()) return;
    std::ofstream os(fs::path(dir_) / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (fs::path(dir_) / name).string());
    fn(os);
    files_.push_back(name);
  }

  void write_json(const std::string& name, const ordered_json& j) {
    write(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }

  void write_manifest(const std::string& command, const std::vector<std::string>& args, const std::string& model_path,
                      std::uint64_t seed) {
    if (!enabled()) return;
    std::string config;
    for (const auto& a : args) config += a + '\n';
    ordered_json m;
    m["schema"] = "mmjump.manifest/1";
    m["version"] = MMJUMP_VERSION;
    m["command"] = command;
    m["seed"] = seed;
    m["config_fnv1a"] = hex64(fnv1a(config));
    m["args"] = args;
    m["model"] = model_path;
    m["model_fnv1a"] = model_path.empty() ? "" : hex64(fnv1a(read_file(model_path)));
    std::sort(files_.begin(), files_.end());
    ordered_json outs = ordered_json::array();
    for (const auto& f : files_) {
      outs.push_back({{"file", f}, {"fnv1a", hex64(fnv1a(read_file(fs::path(dir_) / f)))}});
    }
    m["outputs"] = std::move(outs);
    std::ofstream os(fs::path(dir_) / "manifest.json", std::ios::binary);
    os << m.dump(2) << '\n';
  }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

// Canonical argument list recorded in the manifest; --out is appended on replay.
std::vector<std::string> canonical_args(const std::string& command, const Options& o) {
  std::vector<std::string> a{command, "--model", o.model};
  if (!o.eps.empty()) a.insert(a.end(), {"--eps", join_numbers(o.eps)});
  a.insert(a.end(), {"--T", format_double(o.T)});
  if (o.N > 0) a.insert(a.end(), {"--N", std::to_string(o.N)});
  a.insert(a.end(), {"--seed", std::to_string(o.seed), "--format", o.format});
  if (o.h > 0.0) a.insert(a.end(), {"--step", format_double(o.h)});
  if (!o.xi0.empty()) a.insert(a.end(), {"--xi0", join_numbers(o.xi0)});
  if (o.x0 != 0) a.insert(a.end(), {"--x0", std::to_string(o.x0)});
  if (!o.c_grid.empty()) a.insert(a.end(), {"--c-grid", join_numbers(o.c_grid)});
  if (command == "limit") a.insert(a.end(), {"--probe", o.probe});
  if (command == "verify") a.insert(a.end(), {"--bootstrap", std::to_string(o.bootstrap)});
  return a;
}

std::vector<double> initial_value(const Options& o, std::size_t dim) {
  if (o.xi0.empty()) return std::vector<double>(dim, 0.0);
  if (o.xi0.size() != dim) throw ValidationError("--xi0 needs " + std::to_string(dim) + " values");
  return o.xi0;
}

// ---------------------------------------------------------------------------
// report serialization

ordered_json pa_to_json(const PaReport& r) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"eps", row.eps},
                    {"u", r.u_grid[row.u_index]},
                    {"x", row.x},
                    {"theta_b", row.theta_b},
                    {"theta_c", row.theta_c},
                    {"theta_c_closed", row.theta_c_closed},
                    {"theta_g", row.theta_g},
                    {"theta_g_closed", row.theta_g_closed}});
  }
  ordered_json cols = ordered_json::array();
  for (const auto& c : r.columns) cols.push_back({{"name", c.name}, {"sup_by_eps", c.sup_by_eps}, {"monotone", c.monotone}});
  ordered_json out;
  out["schema"] = "mmjump.pa/1";
  out["eps"] = r.eps;
  out["probes"] = r.probe_names;
  out["rows"] = std::move(rows);
  out["columns"] = std::move(cols);
  out["max_closed_form_gap"] = r.max_closed_form_gap;
  out["theta_b_zero"] = r.theta_b_zero;
  out["failures"] = r.failures;
  out["passed"] = r.passed;
  return out;
}

ordered_json c3c4_to_json(const C3C4Report& r) {
  ordered_json c3 = ordered_json::array();
  for (const auto& row : r.c3) c3.push_back({{"c", row.c}, {"sup_tail", row.sup_tail}});
  ordered_json c4 = ordered_json::array();
  for (const auto& row : r.c4) {
    c4.push_back({{"u", row.u},
                  {"x", row.x},
                  {"drift_norm", row.drift_norm},
                  {"second_norm", row.second_norm},
                  {"drift_L", row.drift_L},
                  {"second_L", row.second_L},
                  {"density_L", row.density_L}});
  }
  ordered_json out;
  out["schema"] = "mmjump.c3c4/1";
  out["c3"] = std::move(c3);
  out["c3_monotone"] = r.c3_monotone;
  out["c3_small"] = r.c3_small;
  out["c4"] = std::move(c4);
  out["L"] = r.L;
  out["L_declared"] = r.L_declared;
  out["required_L"] = r.required_L;
  out["envelope_second_moment"] = r.envelope_second_moment;
  out["notes"] = r.notes;
  out["failures"] = r.failures;
  out["passed"] = r.passed;
  return out;
}

ordered_json pa3_to_json(const Pa3Report& r) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  ordered_json out;
  out["schema"] = "mmjump.pa3/1";
  out["applicable"] = r.applicable;
  out["reason"] = r.reason;
  out["jump_mean"] = vec(r.jump_mean);
  out["averaged_drift"] = vec(r.averaged_drift);
  out["gap"] = r.gap;
  out["compound_poisson_enabled"] = r.compound_poisson_enabled;
  out["total_rate"] = r.total_rate;
  return out;
}

void write_terminal_csv(std::ostream& os, const std::vector<Trajectory>& paths) {
  const std::size_t d = paths.empty() ? 1 : paths[0].dim;
  os << "path";
  for (std::size_t i = 0; i < d; ++i) os << ",xi_" << i;
  os << ",sup\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    os << p;
    for (double v : paths[p].terminal()) os << ',' << format_double(v);
    os << ',' << format_double(paths[p].sup_norm()) << '\n';
  }
}

std::vector<double> uniform_grid(double T, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = T * static_cast<double>(k) / static_cast<double>(n - 1);
  g.back() = T;
  return g;
}

// ---------------------------------------------------------------------------
// commands

int cmd_validate(const Options& o, std::ostream& out) {
  const ModelFile mf = load_model(o.model);
  mf.switching.validate();
  const StationaryLaw pi = stationary_distribution(build_generator(mf.switching));
  const auto eps = o.eps.empty() ? kDefaultEps : o.eps;
  const auto cg = o.c_grid.empty() ? kDefaultCGrid : o.c_grid;
  const auto ugrid = diagonal_grid(-4.0, 4.0, 9, mf.model.dim());
  const PaReport pa = validate_pa(mf.model, eps, ugrid, probes::catalogue());
  const C3C4Report c34 = validate_c3_c4(mf.model, cg, ugrid);

  out << "switching: " << mf.switching.size() << " states, irreducible, residual " << format_double(pi.residual) << '\n';
  out << "PA: " << (pa.passed ? "pass" : "FAIL") << " (max closed-form gap " << format_double(pa.max_closed_form_gap)
      << ")\n";
  for (const auto& f : pa.failures) out << "  " << f << '\n';
  out << "C3/C4: " << (c34.passed ? "pass" : "FAIL") << " (L " << format_double(c34.L)
      << (c34.L_declared ? ", declared" : ", fitted") << ")\n";
  for (const auto& f : c34.failures) out << "  " << f << '\n';
  for (const auto& n : c34.notes) out << "  note: " << n << '\n';

  OutputDir dir(o.out);
  if (o.format == "csv") {
    dir.write("pa_report.csv", [&](std::ostream& os) {
      os << "eps,u,x,theta_b,theta_c,theta_c_closed";
      for (std::size_t j = 0; j < pa.probe_names.size(); ++j) os << ",theta_g" << j + 1;
      os << '\n';
      for (const auto& r : pa.rows) {
        os << format_double(r.eps) << ',' << format_double(pa.u_grid[r.u_index][0]) << ',' << r.x << ','
           << format_double(r.theta_b) << ',' << format_double(r.theta_c) << ',' << format_double(r.theta_c_closed);
        for (double g : r.theta_g) os << ',' << format_double(g);
        os << '\n';
      }
    });
    dir.write("c3c4_report.csv", [&](std::ostream& os) {
      os << "u,x,drift_norm,second_norm,drift_L,second_L,density_L\n";
      for (const auto& r : c34.c4) {
        os << format_double(r.u[0]) << ',' << r.x << ',' << format_double(r.drift_norm) << ','
           << format_double(r.second_norm) << ',' << format_double(r.drift_L) << ',' << format_double(r.second_L)
           << ',' << format_double(r.density_L) << '\n';
      }
    });
  } else {
    dir.write_json("pa_report.json", pa_to_json(pa));
    dir.write_json("c3c4_report.json", c3c4_to_json(c34));
  }
  dir.write_manifest("validate", canonical_args("validate", o), o.model, o.seed);
  return pa.passed && c34.passed ? kExitOk : kExitValidation;
}

int cmd_stationary(const Options& o, std::ostream& out) {
  const ModelFile mf = load_model(o.model);
  mf.switching.validate();
  const GeneratorMatrix Q = build_generator(mf.switching);
  const StationaryLaw pi = stationary_distribution(Q);
  out << "pi = (";
  for (std::size_t x = 0; x < pi.size(); ++x) out << (x ? ", " : "") << format_double(pi[x]);
  out << ")\n";
  OutputDir dir(o.out);
  if (o.format == "csv") {
    dir.write("stationary.csv", [&](std::ostream& os) {
      os << "state,pi\n";
      for (std::size_t x = 0; x < pi.size(); ++x) os << mf.switching.states[x] << ',' << format_double(pi[x]) << '\n';
    });
  } else {
    ordered_json gen = ordered_json::array();
    for (Eigen::Index i = 0; i < Q.matrix().rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index j = 0; j < Q.matrix().cols(); ++j) row.push_back(Q.matrix()(i, j));
      gen.push_back(std::move(row));
    }
    ordered_json j;
    j["schema"] = "mmjump.stationary/1";
    j["states"] = mf.switching.states;
    j["pi"] = std::vector<double>(pi.pi.data(), pi.pi.data() + pi.pi.size());
    j["residual"] = pi.residual;
    j["generator"] = std::move(gen);
    dir.write_json("stationary.json", j);
  }
  dir.write_manifest("stationary", canonical_args("stationary", o), o.model, o.seed);
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const ModelFile mf = load_model(o.model);
  mf.switching.validate();
  if (o.eps.size() != 1) throw ValidationError("simulate takes exactly one --eps value");
  if (o.out.empty()) throw ValidationError("simulate needs --out");
  const double eps = o.eps[0];
  const std::size_t N = o.N > 0 ? o.N : 1;
  const auto xi0 = initial_value(o, mf.model.dim());
  std::vector<Trajectory> paths(N);
  parallel_for(N, o.threads, [&](std::size_t p) {
    Rng rng = make_stream(o.seed, 0, p);
    paths[p] = simulate_prelimit(mf.switching, mf.model, eps, o.T, xi0, o.x0, rng);
  });
  const PrelimitIntegrands integrands(mf.model, probes::catalogue());
  const auto grid = uniform_grid(o.T, kCharacteristicPoints);
  const CharacteristicPaths ch = predictable_characteristics(paths[0], integrands, grid);

  OutputDir dir(o.out);
  dir.write("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, paths[0], mf.switching.states); });
  dir.write("characteristics.csv", [&](std::ostream& os) { write_characteristics_csv(os, ch); });
  dir.write("terminal.csv", [&](std::ostream& os) { write_terminal_csv(os, paths); });
  dir.write_manifest("simulate", canonical_args("simulate", o), o.model, o.seed);
  out << "simulated " << N << " path(s), eps " << format_double(eps) << ", T " << format_double(o.T) << ", "
      << paths[0].size() << " events on path 0\n";
  return kExitOk;
}

int cmd_limit(const Options& o, std::ostream& out) {
  const ModelFile mf = load_model(o.model);
  mf.switching.validate();
  if (o.out.empty()) throw ValidationError("limit needs --out");
  const StationaryLaw pi = stationary_distribution(build_generator(mf.switching));
  const LimitModel limit = assemble_limit(mf.model, pi);
  const Pa3Report pa3 = check_pa3(mf.model, pi);
  const std::size_t N = o.N > 0 ? o.N : 1;
  const auto xi0 = initial_value(o, mf.model.dim());
  const double h = o.h > 0.0 ? o.h : 1e-3 * o.T;
  const bool cp = pa3.compound_poisson_enabled;
  if (!cp) check_limit_step(limit, xi0, o.T, h);

  const auto eps = o.eps.empty() ? kDefaultEps : o.eps;
  const std::vector<double> ugrid{-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
  const ResidualTable residual =
      perturbation_residual(mf.switching, mf.model, smooth_probes::by_name(o.probe), ugrid, eps);

  const JumpLaw law = cp ? limit.jump_law() : JumpLaw{};
  const double Lambda = cp ? limit.total_rate().value_or(0.0) : 0.0;
  LimitOptions lo;
  lo.h = h;
  lo.check_step = false;
  std::vector<Trajectory> paths(N);
  parallel_for(N, o.threads, [&](std::size_t p) {
    Rng rng = make_stream(o.seed, kLimitStream, p);
    paths[p] = cp ? simulate_compound_poisson(Lambda, law, o.T, xi0, rng) : simulate_limit(limit, o.T, xi0, rng, lo);
  });
  const LimitIntegrands integrands(limit, probes::catalogue());
  const CharacteristicPaths ch = predictable_characteristics(paths[0], integrands, uniform_grid(o.T, kCharacteristicPoints), h);

  OutputDir dir(o.out);
  const std::string name = (mf.name.empty() ? std::string("model") : mf.name) + "_limit";
  dir.write_json("limit_model.json", model_to_json(name, single_state_switching(), limit.as_single_state_model()));
  dir.write_json("pa3.json", pa3_to_json(pa3));
  dir.write("residual.csv", [&](std::ostream& os) {
    os << "u,x,eps,residual\n";
    for (const auto& r : residual.rows) {
      os << format_double(r.u) << ',' << mf.switching.states[r.x] << ',' << format_double(r.eps) << ','
         << format_double(r.residual) << '\n';
    }
  });
  dir.write("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, paths[0]); });
  dir.write("characteristics.csv", [&](std::ostream& os) { write_characteristics_csv(os, ch); });
  dir.write("terminal.csv", [&](std::ostream& os) { write_terminal_csv(os, paths); });
  dir.write_manifest("limit", canonical_args("limit", o), o.model, o.seed);

  out << "limit: " << (cp ? "compound Poisson" : "flow with jumps") << ", jump intensity bound "
      << format_double(limit.max_jump_intensity()) << ", PA3 gap " << format_double(pa3.gap) << '\n';
  out << "residual: K " << format_double(residual.K) << ", closed-form gap " << format_double(residual.max_closed_form_gap)
      << '\n';
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const ModelFile mf = load_model(o.model);
  mf.switching.validate();
  StudyConfig cfg;
  if (!o.eps.empty()) cfg.eps = o.eps;
  cfg.T = o.T;
  if (o.N > 0) cfg.N = o.N;
  cfg.seed = o.seed;
  cfg.xi0 = initial_value(o, mf.model.dim());
  cfg.x0 = o.x0;
  cfg.h = o.h;
  cfg.c_grid = o.c_grid;
  cfg.threads = o.threads;
  cfg.bootstrap = o.bootstrap;
  const ConvergenceReport rep = run_convergence_study(mf.switching, mf.model, cfg);

  out << std::left << std::setw(12) << "eps" << std::setw(22) << "W1" << std::setw(22) << "SE" << std::setw(26) << "KS p"
      << "B W1\n";
  for (const auto& r : rep.rows) {
    out << std::left << std::setw(12) << format_double(r.eps) << std::setw(22) << format_double(r.w1[0])
        << std::setw(22) << format_double(r.w1_se[0]) << std::setw(26) << format_double(r.ks_p[0])
        << format_double(r.B_w1[0]) << '\n';
  }
  out << "limit self-distance W1 " << format_double(rep.limit_self_w1) << '\n';
  out << "verdict: " << (rep.passed ? "PASS" : "FAIL") << '\n';

  OutputDir dir(o.out);
  if (o.format == "csv") {
    dir.write("report.csv", [&](std::ostream& os) { write_report_csv(os, rep); });
  } else {
    dir.write_json("report.json", to_json(rep));
  }
  dir.write_manifest("verify", canonical_args("verify", o), o.model, o.seed);
  return rep.passed ? kExitOk : kExitValidation;
}

int cmd_replay(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.manifest.empty()) throw ValidationError("replay needs --manifest");
  const ordered_json m = ordered_json::parse(read_file(o.manifest));
  if (m.value("schema", "") != "mmjump.manifest/1") throw ValidationError("not a manifest: " + o.manifest);
  const fs::path src_dir = fs::path(o.manifest).parent_path();
  const std::string dst = o.out.empty() ? (src_dir / "replay").string() : o.out;
  if (fs::absolute(dst) == fs::absolute(src_dir)) throw ValidationError("replay --out must differ from the manifest directory");
  const std::string model = m.at("model").get<std::string>();
  if (!model.empty() && hex64(fnv1a(read_file(model))) != m.at("model_fnv1a").get<std::string>()) {
    err << "replay: model file " << model << " changed since the recorded run\n";
    return kExitValidation;
  }
  std::vector<std::string> args = m.at("args").get<std::vector<std::string>>();
  args.insert(args.end(), {"--out", dst});
  std::ostringstream sink;
  const int code = run_cli(args, sink, err);
  std::size_t same = 0;
  std::vector<std::string> differing;
  for (const auto& entry : m.at("outputs")) {
    const std::string f = entry.at("file").get<std::string>();
    const fs::path p = fs::path(dst) / f;
    if (fs::exists(p) && hex64(fnv1a(read_file(p))) == entry.at("fnv1a").get<std::string>()) {
      ++same;
    } else {
      differing.push_back(f);
    }
  }
  for (const auto& f : differing) out << "differs: " << f << '\n';
  out << "replay: " << same << " of " << m.at("outputs").size() << " outputs byte-identical (exit " << code << ")\n";
  return differing.empty() ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov-modulated jump processes: simulation, averaging, and convergence checks", "mmjump"};
  app.set_version_flag("--version", MMJUMP_VERSION);
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool needs_model = true) {
    auto* m = sub->add_option("--model", o.model, "model JSON file");
    if (needs_model) m->required()->check(CLI::ExistingFile);
    sub->add_option("--eps", o.eps, "eps values, comma separated")->delimiter(',');
    sub->add_option("--T", o.T, "horizon")->check(CLI::PositiveNumber);
    sub->add_option("--N", o.N, "number of paths")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--step", o.h, "limit ODE step (default 1e-3 T)")->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "worker threads (0: all cores)");
    sub->add_option("--xi0", o.xi0, "initial value, comma separated")->delimiter(',');
    sub->add_option("--x0", o.x0, "initial switching state index");
    sub->add_option("--c-grid", o.c_grid, "tail thresholds, comma separated")->delimiter(',');
  };
  auto* validate = app.add_subcommand("validate", "check the model against the approximation conditions");
  common(validate);
  auto* stationary = app.add_subcommand("stationary", "stationary law of the switching chain");
  common(stationary);
  auto* simulate = app.add_subcommand("simulate", "simulate pre-limit paths");
  common(simulate);
  auto* limit = app.add_subcommand("limit", "assemble and simulate the averaged limit");
  common(limit);
  limit->add_option("--probe", o.probe, "smooth probe for the residual table")
      ->check(CLI::IsMember({"identity", "square", "sine"}));
  auto* verify = app.add_subcommand("verify", "Monte Carlo convergence study");
  common(verify);
  verify->add_option("--bootstrap", o.bootstrap, "bootstrap resamples");
  auto* replay = app.add_subcommand("replay", "rerun a recorded command and compare outputs");
  replay->add_option("--manifest", o.manifest, "manifest.json of a previous run")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", o.out, "output directory for the rerun");

  std::vector<const char*> argv{"mmjump"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitRuntime;
  }

  try {
    for (double e : o.eps) {
      if (!(e > 0.0 && e <= 1.0)) throw ValidationError("--eps values must lie in (0, 1], got " + format_double(e));
    }
    if (*validate) return cmd_validate(o, out);
    if (*stationary) return cmd_stationary(o, out);
    if (*simulate) {
      if (o.eps.empty()) o.eps = {0.1};
      return cmd_simulate(o, out);
    }
    if (*limit) return cmd_limit(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*replay) return cmd_replay(o, out, err);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace mmjump
