#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <mmjump/averaging.hpp>
#include <mmjump/jump_model.hpp>
#include <mmjump/model_io.hpp>
#include <mmjump/switching.hpp>

namespace mmjump::testing {

inline JumpComponent point(double v0, double rate, double kappa = 0.0, double ucap = 0.0) {
  return JumpComponent{{PointMass{v0}}, rate, kappa, ucap};
}

inline JumpComponent gauss(double mean, double sd, double rate, double kappa = 0.0, double ucap = 0.0) {
  return JumpComponent{{Gaussian{mean, sd}}, rate, kappa, ucap};
}

inline JumpComponent uniform(double lo, double hi, double rate) {
  return JumpComponent{{Uniform{lo, hi}}, rate, 0.0, 0.0};
}

inline StateKernel kernel(std::vector<JumpComponent> comps, double rho = 0.0, double d = 0.0) {
  return StateKernel{std::move(comps), rho, Displacement::constant({d})};
}

inline StateKernel kernel_linear(std::vector<JumpComponent> comps, double rho, double offset, double slope,
                                 double cap = std::numeric_limits<double>::infinity()) {
  return StateKernel{std::move(comps), rho, Displacement::linear({offset}, {slope}, {cap})};
}

inline SwitchSpec make_spec(std::vector<double> q, const Eigen::MatrixXd& P) {
  SwitchSpec s;
  for (std::size_t i = 0; i < q.size(); ++i) s.states.push_back("s" + std::to_string(i));
  s.q = std::move(q);
  s.P = P;
  return s;
}

inline Eigen::MatrixXd swap2() {
  Eigen::MatrixXd P(2, 2);
  P << 0, 1, 1, 0;
  return P;
}

inline SwitchSpec one_state() { return single_state_switching("only"); }

inline JumpModel one_state_model(StateKernel k) { return JumpModel(1, {std::move(k)}); }

inline std::string source_path(const std::string& rel) { return std::string(MMJUMP_SOURCE_DIR) + "/" + rel; }

inline ModelFile fixture() { return load_model(source_path("models/two_state.json")); }

}  // namespace mmjump::testing
