#include <mmjump/stats.hpp>

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include <mmjump/errors.hpp>

namespace mmjump {

namespace {

void require_nonempty(std::span<const double> x, const char* what) {
  if (x.empty()) throw ValidationError(std::string(what) + ": empty sample");
}

std::vector<double> sorted(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double quantile(std::span<const double> x, double p) {
  require_nonempty(x, "quantile");
  const auto s = sorted(x);
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, "wasserstein1");
  require_nonempty(b, "wasserstein1");
  auto sa = sorted(a);
  auto sb = sorted(b);
  if (sa.size() != sb.size()) {
    auto& big = sa.size() > sb.size() ? sa : sb;
    const std::size_t n = std::min(sa.size(), sb.size());
    std::vector<double> picked(n);
    for (std::size_t i = 0; i < n; ++i) {
      picked[i] = big[static_cast<std::size_t>((static_cast<double>(i) + 0.5) * static_cast<double>(big.size()) /
                                               static_cast<double>(n))];
    }
    big = std::move(picked);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) s += std::abs(sa[i] - sb[i]);
  return s / static_cast<double>(sa.size());
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_statistic(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, "ks_statistic");
  require_nonempty(b, "ks_statistic");
  const auto sa = sorted(a);
  const auto sb = sorted(b);
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double D = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    D = std::max(D, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  return {D, kolmogorov_q((en + 0.12 + 0.11 / en) * D)};
}

KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf) {
  require_nonempty(x, "ks_one_sample");
  const auto s = sorted(x);
  const double n = static_cast<double>(s.size());
  double D = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double F = cdf(s[i]);
    D = std::max({D, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  const double en = std::sqrt(n);
  return {D, kolmogorov_q((en + 0.12 + 0.11 / en) * D)};
}

ChiSquareResult chi_square_counts(std::span<const std::size_t> counts, const std::function<double(std::size_t)>& pmf,
                                  double min_expected) {
  if (counts.empty()) throw ValidationError("chi_square_counts: no observations");
  std::size_t max_k = 0;
  for (std::size_t c : counts) max_k = std::max(max_k, c);
  const double n = static_cast<double>(counts.size());
  std::vector<double> observed(max_k + 1, 0.0);
  for (std::size_t c : counts) observed[c] += 1.0;
  std::vector<double> expected(max_k + 1, 0.0);
  double cum = 0.0;
  for (std::size_t k = 0; k <= max_k; ++k) {
    expected[k] = n * pmf(k);
    cum += pmf(k);
  }
  expected[max_k] += n * std::max(0.0, 1.0 - cum);

  // Pool left to right until each bin reaches min_expected; a short final
  // bin is merged into the previous one.
  std::vector<double> o_bins;
  std::vector<double> e_bins;
  double o_acc = 0.0;
  double e_acc = 0.0;
  for (std::size_t k = 0; k <= max_k; ++k) {
    o_acc += observed[k];
    e_acc += expected[k];
    if (e_acc >= min_expected) {
      o_bins.push_back(o_acc);
      e_bins.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (e_bins.empty()) {
      o_bins.push_back(o_acc);
      e_bins.push_back(e_acc);
    } else {
      o_bins.back() += o_acc;
      e_bins.back() += e_acc;
    }
  }
  ChiSquareResult r;
  r.bins = e_bins.size();
  for (std::size_t k = 0; k < e_bins.size(); ++k) {
    const double diff = o_bins[k] - e_bins[k];
    r.statistic += diff * diff / e_bins[k];
  }
  if (r.bins < 2) return r;
  r.dof = r.bins - 1;
  const boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

double bootstrap_se(std::span<const double> a, std::span<const double> b,
                    const std::function<double(std::span<const double>, std::span<const double>)>& metric,
                    std::size_t resamples, Rng& rng) {
  require_nonempty(a, "bootstrap_se");
  require_nonempty(b, "bootstrap_se");
  if (resamples < 2) return 0.0;
  std::uniform_int_distribution<std::size_t> ia(0, a.size() - 1);
  std::uniform_int_distribution<std::size_t> ib(0, b.size() - 1);
  std::vector<double> ra(a.size());
  std::vector<double> rb(b.size());
  std::vector<double> values;
  values.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    for (auto& v : ra) v = a[ia(rng)];
    for (auto& v : rb) v = b[ib(rng)];
    values.push_back(metric(ra, rb));
  }
  return std::sqrt(variance(values));
}

}  // namespace mmjump
