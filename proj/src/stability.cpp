#include "kez/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kez/errors.hpp"

namespace kez {

LogFanoCurve::LogFanoCurve(std::vector<PlaneCoord> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() != weights_.size()) throw ValidationError("marked points and weights differ in length");
    for (double w : weights_)
        if (!std::isfinite(w)) throw ValidationError("weights must be finite");
    for (auto& p : points_) sphere_.push_back(stereo_to_sphere(p));
    for (std::size_t i = 0; i < sphere_.size(); ++i)
        for (std::size_t j = i + 1; j < sphere_.size(); ++j)
            if (chordal(sphere_[i], sphere_[j]) < 1e-12) throw ValidationError("marked points must be distinct");
}

double LogFanoCurve::d_L() const { return 2.0 - std::accumulate(weights_.begin(), weights_.end(), 0.0); }

bool LogFanoCurve::is_log_fano() const {
    for (double w : weights_)
        if (w >= 1.0) return false;
    return d_L() > 0.0;
}

void LogFanoCurve::require_log_fano() const {
    if (!is_log_fano()) throw ValidationError("divisor is not log Fano (need every w_i < 1 and d_L > 0)");
}

nlohmann::json LogFanoCurve::to_json() const {
    nlohmann::json j;
    auto pts = nlohmann::json::array();
    for (auto& p : points_) pts.push_back(p.str());
    j["marked_points"] = pts;
    j["weights"] = weights_;
    j["d_L"] = d_L();
    return j;
}

std::string to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::NotLogFano: return "NotLogFano";
        case StabilityClass::GibbsStable: return "GibbsStable";
        case StabilityClass::NotGibbsStable: return "NotGibbsStable";
    }
    return "?";
}

nlohmann::json StabilityVerdict::to_json() const {
    nlohmann::json j;
    j["verdict"] = to_string(kind);
    if (kind != StabilityClass::NotLogFano) j["limit_threshold"] = limit_threshold;
    if (N) j["N"] = *N;
    if (gamma_N) j["gamma_N"] = *gamma_N;
    if (stable_at_level_N) j["finite_at_beta_minus_one"] = *stable_at_level_N;
    return j;
}

bool weight_condition(const std::vector<double>& w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double wi : w)
        if (!(wi < total - wi)) return false;
    return true;
}

double gamma_threshold(const std::vector<double>& w, int N) {
    if (N < 2) throw ValidationError("gamma_threshold needs N >= 2");
    const double d = 2.0 - std::accumulate(w.begin(), w.end(), 0.0);
    if (!(d > 0.0)) throw ValidationError("gamma_threshold needs d_L > 0");
    const double wmax = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
    if (wmax >= 1.0) throw ValidationError("gamma_threshold needs every w_i < 1");
    const double nn = static_cast<double>(N);
    return 2.0 / d * std::min((nn - 1.0) / nn, 1.0 - wmax);
}

StabilityVerdict classify(const std::vector<double>& w, std::optional<int> N) {
    StabilityVerdict v;
    v.N = N;
    const double d = 2.0 - std::accumulate(w.begin(), w.end(), 0.0);
    const bool klt = std::all_of(w.begin(), w.end(), [](double x) { return x < 1.0; });
    if (!klt || !(d > 0.0)) return v;
    v.kind = weight_condition(w) ? StabilityClass::GibbsStable : StabilityClass::NotGibbsStable;
    const double wmax = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
    v.limit_threshold = 2.0 * (1.0 - wmax) / d;
    if (N) {
        v.gamma_N = gamma_threshold(w, *N);
        v.stable_at_level_N = -1.0 > -*v.gamma_N;
    }
    return v;
}

StabilityVerdict classify(const LogFanoCurve& curve, std::optional<int> N) { return classify(curve.weights(), N); }

bool radial_integral_finite(double gamma_c) {
    // int_{10^-(k+1)}^{10^-k} r^p dr = int r^{p+1} d(log r) per decade,
    // 8-point Gauss-Legendre in log r.
    static constexpr double x[] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                   -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
    static constexpr double wt[] = {0.1012285362903763, 0.2223810344533745, 0.3137066661229979,
                                    0.3626837833783620, 0.3626837833783620, 0.3137066661229979,
                                    0.2223810344533745, 0.1012285362903763};
    const double q = 2.0 - 2.0 * gamma_c;  // p + 1 with p = 1 - 2 gamma c
    const double ln10 = std::log(10.0);
    auto decade = [&](int k) {
        const double a = -(k + 1) * ln10, b = -k * ln10;
        double s = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double u = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
            s += wt[i] * std::exp(q * u);
        }
        return 0.5 * (b - a) * s;
    };
    // finite iff the decade contributions decay geometrically
    const double first = decade(20), second = decade(40);
    return second < first;
}

double lct_point_divisor(const std::vector<double>& coeffs) {
    if (coeffs.empty()) throw ValidationError("lct_point_divisor needs at least one coefficient");
    for (double c : coeffs)
        if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("lct coefficients must be positive");
    const double cmax = *std::max_element(coeffs.begin(), coeffs.end());
    const double lct = 1.0 / cmax;
    const double eps = 1e-3;
    if (!radial_integral_finite(lct * (1.0 - eps) * cmax) || radial_integral_finite(lct * (1.0 + eps) * cmax))
        throw OracleMismatchError("radial quadrature probe disagrees with analytic lct");
    return lct;
}

}  // namespace kez
