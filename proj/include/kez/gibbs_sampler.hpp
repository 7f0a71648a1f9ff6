#pragma once

// Metropolis-Hastings for the Gibbs measure on (S^2)^N with density
//   exp(-beta N E(x)) prod_{i,j} ||x_i - p_j||^{-2 w_j}
// against sigma^N. Single-site moves: tangent Gaussian, re-projected.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kez/mc_estimators.hpp"
#include "kez/random.hpp"
#include "kez/sphere_geom.hpp"
#include "kez/stability.hpp"

namespace kez {

// -beta N config_energy + sum_{i,j} 2 w_j green(x_i, p_j).
double log_target(const PointConfiguration& c, const LogFanoCurve& curve, double beta);

// log_target(c with x_i replaced by y) - log_target(c), in O(N).
double single_site_log_ratio(const PointConfiguration& c, std::size_t i, const SpherePoint& y,
                             const LogFanoCurve& curve, double beta);

// min(1, exp(log_ratio)) acceptance.
bool metropolis_accept(double log_ratio, Rng& rng);

// Tangent-plane Gaussian step of scale `step` at x, projected back to S^2.
SpherePoint tangent_proposal(const SpherePoint& x, double step, Rng& rng);

struct ChainOptions {
    int N = 2;
    std::int64_t sweeps = 10000;
    std::int64_t burn_in = 1000;
    int thinning = 1;
    std::uint64_t seed = 1;
    int chains = 1;
    int workers = 1;
    double initial_step = 0.5;
    int adapt_window = 50;  // sweeps between step updates during burn-in
};

struct AdaptationRecord {
    std::int64_t sweep = 0;
    double acceptance = 0.0;
    double step = 0.0;
};

struct ChainReport {
    int chain = 0;
    std::int64_t accept_count = 0;
    std::int64_t proposal_count = 0;
    double step_scale = 0.0;
    std::vector<AdaptationRecord> adaptation;
    std::vector<std::string> warnings;

    double acceptance_rate() const {
        return proposal_count ? static_cast<double>(accept_count) / static_cast<double>(proposal_count) : 0.0;
    }
    nlohmann::json to_json() const;
};

struct ChainResult {
    int N = 0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    // retained configurations ordered by (chain, step)
    std::vector<PointConfiguration> samples;
    std::vector<double> energies;
    std::vector<int> chain_of;
    std::vector<ChainReport> reports;

    nlohmann::json manifest() const;
    std::string to_csv() const;  // chain,sample,point,x,y,z
};

// StabilityError when beta <= -gamma_N; ValidationError if not log Fano.
ChainResult run_chain(const LogFanoCurve& curve, double beta, const ChainOptions& opt);

// Batch-means estimate of E[config_energy] (each chain batched separately).
McEstimate mean_energy_estimate(const ChainResult& r, const LogFanoCurve& curve);

struct MarginalHistogram {
    std::vector<double> edges;
    std::vector<double> counts;
    std::vector<double> values;  // pooled t = cos(theta), sorted
    double effective_sample_size = 0.0;

    double total() const;
    // probability mass per bin for an absolutely continuous reference cdf
    std::vector<double> reference_masses(const std::function<double(double)>& cdf) const;
    nlohmann::json to_json() const;
};

MarginalHistogram marginal_histogram(const ChainResult& r, int bins);
// Kolmogorov-Smirnov distance of the pooled axial sample against `cdf`.
double ks_against(const MarginalHistogram& h, const std::function<double(double)>& cdf);
// sum over bins of |empirical mass - reference mass|
double l1_against(const MarginalHistogram& h, const std::function<double(double)>& cdf);

// F_N(beta) = -(1/N) log Z_N(beta) by thermodynamic integration of the mean
// energy from beta_grid.front() (where F is taken as `F_start`).
struct FreeEnergyPoint {
    double beta = 0.0;
    double mean_energy = 0.0;
    double mean_energy_se = 0.0;
    double free_energy = 0.0;
    double free_energy_se = 0.0;
};
std::vector<FreeEnergyPoint> free_energy_curve(const LogFanoCurve& curve, const std::vector<double>& beta_grid,
                                               const ChainOptions& opt, double F_start = 0.0);

}  // namespace kez
