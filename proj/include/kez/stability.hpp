#pragma once

// Gibbs-stability of log Fano curves (P^1, Delta = sum w_i p_i) and the
// finite-N integrability threshold of the partition function
//   Z_N(beta) = int exp(-beta N E^(N)) dV_Delta^{N}.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kez/sphere_geom.hpp"

namespace kez {

class LogFanoCurve {
public:
    // Trivial divisor: d_L = 2.
    LogFanoCurve() = default;
    // Marked points must be pairwise distinct and weights finite. Weights
    // >= 1 or d_L <= 0 are accepted here and reported by is_log_fano() /
    // classify(); consumers that need a log Fano pair call require_log_fano().
    LogFanoCurve(std::vector<PlaneCoord> points, std::vector<double> weights);

    const std::vector<PlaneCoord>& marked_points() const { return points_; }
    const std::vector<SpherePoint>& marked_sphere_points() const { return sphere_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }
    double d_L() const;

    bool is_log_fano() const;
    void require_log_fano() const;  // ValidationError otherwise

    nlohmann::json to_json() const;

private:
    std::vector<PlaneCoord> points_;
    std::vector<SpherePoint> sphere_;
    std::vector<double> weights_;
};

enum class StabilityClass { NotLogFano, GibbsStable, NotGibbsStable };

std::string to_string(StabilityClass c);

struct StabilityVerdict {
    StabilityClass kind = StabilityClass::NotLogFano;
    std::optional<int> N;
    std::optional<double> gamma_N;
    // beta = -1 > -gamma_N: Z_N at the Kahler-Einstein temperature is finite.
    std::optional<bool> stable_at_level_N;
    double limit_threshold = 0.0;  // lim gamma_N = 2(1 - max w)/d_L

    nlohmann::json to_json() const;
};

// w_i < sum_{j != i} w_j for every i (strict; empty sum is 0).
bool weight_condition(const std::vector<double>& w);

// Exact threshold: Z_N(beta) < infinity iff beta > -gamma_N, with
//   gamma_N = (2 / d_L) * min((N - 1)/N, 1 - max_i w_i),  max(empty) = 0.
// The first term controls all N points colliding, the second all N points
// collapsing onto the heaviest marked point.
double gamma_threshold(const std::vector<double>& w, int N);

StabilityVerdict classify(const LogFanoCurve& curve, std::optional<int> N = std::nullopt);
StabilityVerdict classify(const std::vector<double>& w, std::optional<int> N = std::nullopt);

// Integrability threshold of prod |z - p_i|^{-2 gamma c_i}: 1 / max c_i.
// Cross-checked against the radial probe below; OracleMismatchError if they
// disagree.
double lct_point_divisor(const std::vector<double>& coeffs);

// Numerical probe for int_0^1 r^{1 - 2 gamma c} dr < infinity, from the
// decay of the per-decade contributions of a log-variable quadrature.
bool radial_integral_finite(double gamma_c);

}  // namespace kez
