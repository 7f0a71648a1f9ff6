#pragma once

// Monte Carlo estimators for the integrals with closed forms: the Selberg
// integral (mapped to the sphere), Z_N(beta) under the Z(0) = 1 pin, the
// circular ensemble and Gaussian determinant moments.
//
// Importance sampling draws the N points sequentially from a mixture on S^2:
// a base measure, power-law caps at the marked points, and power-law caps
// around previously drawn points when the pair interaction is attractive.
// A cap with exponent s around c has density (2 - s) 2^{s-1} r^{-s} against
// the uniform probability measure, r the chordal distance to c.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kez/sphere_geom.hpp"
#include "kez/stability.hpp"

namespace kez {

struct McOptions {
    std::int64_t n_samples = 1000000;
    std::uint64_t seed = 1;
    int workers = 1;
    int batches = 100;
};

struct McDiagnostics {
    double batch_means_variance = 0.0;
    double tail_index_estimate = std::numeric_limits<double>::infinity();
    double median_of_means = 0.0;
    bool variance_warning = false;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double log_mean = 0.0;  // log of mean, safe when mean over/underflows
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    int worker_count = 1;
    McDiagnostics diagnostics;
    std::vector<std::string> warnings;
    // raw-convention value = mean * conversion_factor (1 when none applies)
    double conversion_factor = 1.0;
    std::string conversion_note;

    nlohmann::json to_json() const;
};

// Aggregates per-sample log-weights (ordered by worker, then draw).
McEstimate summarize_log_weights(const std::vector<double>& log_w, const McOptions& opt);

enum class BaseKind {
    Uniform,    // sigma
    Reference,  // exact axial dV_Delta (marked points only at the poles)
};

struct ProposalComponent {
    enum class Kind { Base, MarkedPointSingular, Cluster };
    Kind kind = Kind::Base;
    std::optional<SpherePoint> point;  // MarkedPointSingular only
    double exponent = 0.0;             // radial exponent s < 2
    double weight = 0.0;               // Cluster: total, split over previous points
};

struct ProposalMixture {
    BaseKind base = BaseKind::Uniform;
    // Reference base parameters: weights at north (t = 1) and south poles.
    double w_north = 0.0, w_south = 0.0;
    std::vector<ProposalComponent> components;

    // Default mixture for an integrand prod_{i<j} r_ij^{-a} prod_{i,k} r_ik^{-e_k}
    // over N points (e_k = 2 w_k).
    static ProposalMixture for_integrand(BaseKind base, const std::vector<SpherePoint>& marked,
                                         const std::vector<double>& marked_exponent, double a, int N,
                                         double w_north = 0.0, double w_south = 0.0);
    // Weights of the components present before the first point is drawn.
    void validate() const;
    nlohmann::json to_json() const;
};

// Generic target on (S^2)^N against sigma^N:
//   exp(log_const) prod_{i<j} r_ij^{-a} prod_{i,k} r(x_i, p_k)^{-e_k}.
struct SphereIntegrand {
    int N = 2;
    double log_const = 0.0;
    double a = 0.0;
    std::vector<SpherePoint> marked;
    std::vector<double> marked_exponent;
};

McEstimate importance_sample(const SphereIntegrand& f, const ProposalMixture& q, const McOptions& opt);

// Complex Selberg integral over C^N with weights (w1, w2, w3) at (0, 1, inf).
// Refuses (StabilityError) where the integral diverges at level N.
McEstimate mc_selberg(const std::array<double, 3>& w, int N, const McOptions& opt,
                      std::optional<ProposalMixture> proposal = std::nullopt);

// Z_N(beta) = int exp(-beta N E^(N)) dV_Delta^N, dV_Delta a probability
// measure, so Z_N(0) = 1. StabilityError when beta <= -gamma_N.
McEstimate mc_sphere_partition(const LogFanoCurve& curve, double beta, int N, const McOptions& opt);

// Mass of prod ||x - p_k||^{-2 w_k} against sigma: closed form for curves
// with marked points only at the poles, importance-sampled otherwise.
struct MassEstimate {
    double value = 1.0;
    double std_error = 0.0;
    bool exact = true;
};
MassEstimate reference_mass(const LogFanoCurve& curve, const McOptions& opt);
bool is_axial(const LogFanoCurve& curve);

// int over the torus of prod_{i<j} |e^{i t_i} - e^{i t_j}|^{2 beta/(N-1)} d theta^N.
McEstimate mc_circular(int N, double beta, const McOptions& opt);

// int |det A|^{2s} e^{-|A|^2} d lambda over (n+1)^2 complex entries.
McEstimate mc_gaussian_det(int n, double s, const McOptions& opt);
// Z(s2) / Z(s1) as a ratio estimator on shared samples.
McEstimate mc_gaussian_det_ratio(int n, double s1, double s2, const McOptions& opt);

}  // namespace kez
