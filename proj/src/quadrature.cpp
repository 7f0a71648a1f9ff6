#include "kez/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "kez/errors.hpp"

namespace kez {

const QuadratureRule& gauss_legendre(int n) {
    if (n < 1) throw ValidationError("quadrature needs at least one node");
    static std::map<int, QuadratureRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    QuadratureRule r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[static_cast<std::size_t>(i)] = -x;
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        r.weights[static_cast<std::size_t>(i)] = w;
        r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return cache.emplace(n, std::move(r)).first->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const auto& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
    return s * h;
}

std::vector<double> legendre_values(int L, double t) {
    std::vector<double> p(static_cast<std::size_t>(L + 1));
    p[0] = 1.0;
    if (L >= 1) p[1] = t;
    for (int l = 2; l <= L; ++l)
        p[static_cast<std::size_t>(l)] = ((2.0 * l - 1.0) * t * p[static_cast<std::size_t>(l - 1)] - (l - 1.0) * p[static_cast<std::size_t>(l - 2)]) / l;
    return p;
}

}  // namespace kez
