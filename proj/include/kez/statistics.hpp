#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace kez {

double mean_of(const std::vector<double>& x);
double variance_of(const std::vector<double>& x);  // unbiased

// Means of `batches` contiguous equal-size batches (the tail remainder is
// folded into the last batch).
std::vector<double> batch_means(const std::vector<double>& x, int batches);

// Stationary-series standard error from non-overlapping batch means.
double batch_means_se(const std::vector<double>& x, int batches = 50);

// Effective sample size n * var(x) / (batches * var(batch means) * size),
// capped at n.
double effective_sample_size(const std::vector<double>& x, int batches = 50);

double median_of(std::vector<double> x);

// Hill estimator of the tail index from log-values (largest k order stats).
double hill_tail_index_log(std::vector<double> log_values, std::size_t k);

// Kolmogorov-Smirnov sup distance of the empirical cdf of `x` from `cdf`.
double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf);

// 99% one-sample threshold, asymptotic.
inline double ks_threshold_99(double n_eff) { return 1.63 / std::sqrt(n_eff); }

}  // namespace kez
