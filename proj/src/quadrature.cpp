// Adaptive quadrature of g against a product law. Coordinates are integrated
// one at a time (outermost first); atomic marginals are substituted directly.
// Each density coordinate is split at the points where the radial breaks of g
// cross that coordinate given the coordinates already fixed, and at the
// marginal's mean and +-5, +-10 sd. Gaussians are truncated at +-40 sd, where
// the density underflows to zero in double precision.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <mmjump/errors.hpp>
#include <mmjump/format.hpp>
#include <mmjump/jump_model.hpp>

namespace mmjump {
namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr unsigned kMaxDepth = 18;
constexpr double kRelTol = 1e-13;

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct NestedIntegrator {
  const JumpComponent& component;
  const TestFunction& g;
  std::vector<double> v;
  // Largest inner error seen while integrating coordinate k. Inner errors
  // are bounded by this maximum after integrating against a probability
  // density.
  std::vector<double> inner_max = std::vector<double>(v.size() + 1, 0.0);

  Estimate integrate(std::size_t coord, double fixed_sq) {
    if (coord == v.size()) return {g(v), 0.0};
    const Marginal& m = component.marginals[coord];
    if (const auto* p = std::get_if<PointMass>(&m)) {
      v[coord] = p->v0;
      return integrate(coord + 1, fixed_sq + p->v0 * p->v0);
    }

    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> cuts;
    std::function<double(double)> density;
    if (const auto* gs = std::get_if<Gaussian>(&m)) {
      lo = gs->mean - 40.0 * gs->sd;
      hi = gs->mean + 40.0 * gs->sd;
      for (double k : {-10.0, -5.0, 0.0, 5.0, 10.0}) cuts.push_back(gs->mean + k * gs->sd);
      const double norm = 1.0 / (gs->sd * std::sqrt(2.0 * std::numbers::pi));
      const double mean = gs->mean;
      const double sd = gs->sd;
      density = [=](double t) {
        const double z = (t - mean) / sd;
        return norm * std::exp(-0.5 * z * z);
      };
    } else {
      const auto& u = std::get<Uniform>(m);
      lo = u.lo;
      hi = u.hi;
      const double h = 1.0 / (u.hi - u.lo);
      density = [h](double) { return h; };
    }
    for (double r : g.radial_breaks) {
      const double rem = r * r - fixed_sq;
      if (rem < 0.0) continue;
      const double s = std::sqrt(rem);
      cuts.push_back(-s);
      cuts.push_back(s);
    }
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::erase_if(cuts, [&](double c) { return c < lo || c > hi; });
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const bool innermost = coord + 1 == v.size();
    inner_max[coord] = 0.0;
    Estimate total;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      double seg_error = 0.0;
      const double a = cuts[k];
      const double b = cuts[k + 1];
      if (b <= a) continue;
      auto integrand = [&](double t) {
        const double p = density(t);
        if (p == 0.0) return 0.0;
        v[coord] = t;
        if (innermost) return p * g(v);
        const Estimate inner = integrate(coord + 1, fixed_sq + t * t);
        inner_max[coord] = std::max(inner_max[coord], inner.error);
        return p * inner.value;
      };
      total.value += Kronrod::integrate(integrand, a, b, kMaxDepth, kRelTol, &seg_error);
      total.error += seg_error;
    }
    total.error += inner_max[coord];
    return total;
  }
};

}  // namespace

double law_g_moment(const JumpComponent& component, const TestFunction& g, double abs_tol) {
  NestedIntegrator integrator{component, g, std::vector<double>(component.dim(), 0.0)};
  const Estimate est = integrator.integrate(0, 0.0);
  if (!std::isfinite(est.value) || est.error > abs_tol) {
    throw QuadratureError("quadrature of " + g.name + " did not converge: achieved error " +
                              format_double(est.error) + " > " + format_double(abs_tol),
                          est.error);
  }
  return est.value;
}

}  // namespace mmjump
