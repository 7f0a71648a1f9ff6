#include "kez/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kez/errors.hpp"

namespace kez {

double mean_of(const std::vector<double>& x) {
    if (x.empty()) throw ValidationError("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

std::vector<double> batch_means(const std::vector<double>& x, int batches) {
    if (batches < 1) throw ValidationError("batch count must be positive");
    const std::size_t n = x.size();
    const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(batches), n);
    if (b == 0) return {};
    const std::size_t size = n / b;
    std::vector<double> out;
    for (std::size_t k = 0; k < b; ++k) {
        const std::size_t lo = k * size, hi = (k + 1 == b) ? n : lo + size;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i];
        out.push_back(s / static_cast<double>(hi - lo));
    }
    return out;
}

double batch_means_se(const std::vector<double>& x, int batches) {
    const auto bm = batch_means(x, batches);
    if (bm.size() < 2) return 0.0;
    return std::sqrt(variance_of(bm) / static_cast<double>(bm.size()));
}

double effective_sample_size(const std::vector<double>& x, int batches) {
    const double n = static_cast<double>(x.size());
    const double v = variance_of(x);
    const double se = batch_means_se(x, batches);
    if (se == 0.0 || v == 0.0) return n;
    return std::min(n, v / (se * se));
}

double median_of(std::vector<double> x) {
    if (x.empty()) throw ValidationError("median of an empty sample");
    const std::size_t mid = x.size() / 2;
    std::nth_element(x.begin(), x.begin() + static_cast<long>(mid), x.end());
    const double hi = x[mid];
    if (x.size() % 2) return hi;
    const double lo = *std::max_element(x.begin(), x.begin() + static_cast<long>(mid));
    return 0.5 * (lo + hi);
}

double hill_tail_index_log(std::vector<double> log_values, std::size_t k) {
    if (log_values.size() <= k || k < 2) return std::numeric_limits<double>::infinity();
    std::partial_sort(log_values.begin(), log_values.begin() + static_cast<long>(k + 1), log_values.end(), std::greater<>());
    const double ref = log_values[k];
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += log_values[i] - ref;
    if (s <= 0.0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(k) / s;
}

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
    if (x.empty()) throw ValidationError("KS statistic of an empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    return d;
}

}  // namespace kez
