#pragma once

// Sample statistics for comparing Monte Carlo ensembles.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <mmjump/rng.hpp>

namespace mmjump {

double mean(std::span<const double> x);
/// Unbiased sample variance; 0 for fewer than two values.
double variance(std::span<const double> x);
/// Linear-interpolation quantile of an unsorted sample, p in [0, 1].
double quantile(std::span<const double> x, double p);

/// Mean absolute difference of sorted samples. Samples of different size are
/// compared after taking the larger one at the midpoint ranks
/// floor((i + 1/2) n_large / n_small) of its sorted order. Throws
/// ValidationError on an empty sample.
double wasserstein1(std::span<const double> a, std::span<const double> b);

struct KsResult {
  double D = 0.0;
  double p_value = 1.0;
};

/// Q_KS(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2), clamped to [0, 1].
double kolmogorov_q(double lambda);

/// Two-sample sup-gap of the empirical CDFs. p-value from the asymptotic
/// series with en = sqrt(n m / (n + m)) and
/// lambda = (en + 0.12 + 0.11 / en) D.
KsResult ks_statistic(std::span<const double> a, std::span<const double> b);

/// One-sample test against a continuous CDF, en = sqrt(n).
KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::size_t bins = 0;
};

/// Pearson goodness of fit of integer counts to a pmf on {0, 1, ...}. Bins
/// with expected count below `min_expected` are pooled into their neighbour;
/// the last bin absorbs the upper tail.
ChiSquareResult chi_square_counts(std::span<const std::size_t> counts,
                                  const std::function<double(std::size_t)>& pmf,
                                  double min_expected = 5.0);

/// Nonparametric bootstrap standard error of metric(a, b): both samples are
/// resampled with replacement `resamples` times.
double bootstrap_se(std::span<const double> a, std::span<const double> b,
                    const std::function<double(std::span<const double>, std::span<const double>)>& metric,
                    std::size_t resamples, Rng& rng);

}  // namespace mmjump
