#include "kez/gibbs_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "kez/errors.hpp"
#include "kez/statistics.hpp"

namespace kez {

namespace {

constexpr double kGuard = 1e-12;

struct Target {
    double pair_coef = 0.0;  // 2 beta d_L / (N - 1)
    std::vector<SpherePoint> marked;
    std::vector<double> marked_coef;  // 2 w_j, nonzero only

    Target(const LogFanoCurve& curve, double beta, std::size_t N) {
        pair_coef = 2.0 * beta * curve.d_L() / static_cast<double>(N - 1);
        for (std::size_t k = 0; k < curve.size(); ++k) {
            if (curve.weights()[k] == 0.0) continue;
            marked.push_back(curve.marked_sphere_points()[k]);
            marked_coef.push_back(2.0 * curve.weights()[k]);
        }
    }

    bool admissible(const std::vector<SpherePoint>& x, std::size_t i, const SpherePoint& y) const {
        for (std::size_t j = 0; j < x.size(); ++j)
            if (j != i && chordal(y, x[j]) < kGuard) return false;
        for (auto& p : marked)
            if (chordal(y, p) < kGuard) return false;
        return true;
    }

    double ratio(const std::vector<SpherePoint>& x, std::size_t i, const SpherePoint& y) const {
        double pair = 0.0;
        if (pair_coef != 0.0)
            for (std::size_t j = 0; j < x.size(); ++j)
                if (j != i) pair += green(y, x[j]) - green(x[i], x[j]);
        double m = 0.0;
        for (std::size_t k = 0; k < marked.size(); ++k) m += marked_coef[k] * (green(y, marked[k]) - green(x[i], marked[k]));
        return -pair_coef * pair + m;
    }
};

ChainReport run_one(const LogFanoCurve& curve, double beta, const ChainOptions& opt, int chain,
                    std::vector<PointConfiguration>& samples, std::vector<double>& energies) {
    const auto N = static_cast<std::size_t>(opt.N);
    const Target tg(curve, beta, N);
    Rng rng = Rng(opt.seed).substream(static_cast<std::uint64_t>(chain));
    std::vector<SpherePoint> x;
    while (x.size() < N) {
        const SpherePoint y = sample_uniform(rng);
        x.push_back(y);
        if (!tg.admissible(x, x.size() - 1, y)) x.pop_back();
    }
    ChainReport rep;
    rep.chain = chain;
    double step = opt.initial_step;
    std::int64_t win_acc = 0, win_prop = 0;
    const std::int64_t total = opt.burn_in + opt.sweeps;
    for (std::int64_t s = 0; s < total; ++s) {
        const bool burning = s < opt.burn_in;
        for (std::size_t i = 0; i < N; ++i) {
            const SpherePoint y = tangent_proposal(x[i], step, rng);
            bool acc = false;
            if (tg.admissible(x, i, y)) acc = metropolis_accept(tg.ratio(x, i, y), rng);
            if (acc) x[i] = y;
            if (burning) {
                win_acc += acc;
                ++win_prop;
            } else {
                rep.accept_count += acc;
                ++rep.proposal_count;
            }
        }
        if (burning && (s + 1) % opt.adapt_window == 0) {
            const double rate = static_cast<double>(win_acc) / static_cast<double>(win_prop);
            if (rate < 0.2) step *= 0.7;
            else if (rate > 0.5) step = std::min(step * 1.3, std::numbers::pi);
            rep.adaptation.push_back({s + 1, rate, step});
            win_acc = win_prop = 0;
        }
        if (!burning && (s - opt.burn_in + 1) % opt.thinning == 0) {
            samples.emplace_back(x);
            energies.push_back(config_energy(samples.back(), curve));
        }
    }
    rep.step_scale = step;
    const double r = rep.acceptance_rate();
    if (r < 0.05 || r > 0.95) rep.warnings.push_back("pathological acceptance rate " + std::to_string(r));
    return rep;
}

}  // namespace

double log_target(const PointConfiguration& c, const LogFanoCurve& curve, double beta) {
    const double N = static_cast<double>(c.size());
    double l = -beta * N * config_energy(c, curve);
    for (std::size_t k = 0; k < curve.size(); ++k) {
        const double w = curve.weights()[k];
        if (w == 0.0) continue;
        for (auto& x : c.points()) l += 2.0 * w * green(x, curve.marked_sphere_points()[k]);
    }
    return l;
}

double single_site_log_ratio(const PointConfiguration& c, std::size_t i, const SpherePoint& y,
                             const LogFanoCurve& curve, double beta) {
    if (i >= c.size()) throw ValidationError("site index out of range");
    return Target(curve, beta, c.size()).ratio(c.points(), i, y);
}

bool metropolis_accept(double log_ratio, Rng& rng) {
    if (log_ratio >= 0.0) return true;
    return std::log(rng.uniform_pos()) < log_ratio;
}

SpherePoint tangent_proposal(const SpherePoint& x, double step, Rng& rng) {
    const Vec3 g{rng.normal(), rng.normal(), rng.normal()};
    const Vec3& v = x.vec();
    const double dot = g[0] * v[0] + g[1] * v[1] + g[2] * v[2];
    return SpherePoint(v[0] + step * (g[0] - dot * v[0]), v[1] + step * (g[1] - dot * v[1]),
                       v[2] + step * (g[2] - dot * v[2]));
}

nlohmann::json ChainReport::to_json() const {
    auto trace = nlohmann::json::array();
    for (auto& a : adaptation) trace.push_back({{"sweep", a.sweep}, {"acceptance", a.acceptance}, {"step", a.step}});
    return {{"chain", chain},
            {"accept_count", accept_count},
            {"proposal_count", proposal_count},
            {"acceptance_rate", acceptance_rate()},
            {"step_scale", step_scale},
            {"adaptation", trace},
            {"warnings", warnings}};
}

nlohmann::json ChainResult::manifest() const {
    auto chains = nlohmann::json::array();
    for (auto& r : reports) chains.push_back(r.to_json());
    return {{"N", N}, {"beta", beta}, {"seed", seed}, {"retained", samples.size()}, {"chains", chains}};
}

std::string ChainResult::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "chain,sample,point,x,y,z\n";
    std::vector<std::int64_t> idx(reports.size(), 0);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const int c = chain_of[s];
        const auto k = idx[static_cast<std::size_t>(c)]++;
        for (std::size_t i = 0; i < samples[s].size(); ++i) {
            const auto& p = samples[s][i];
            os << c << ',' << k << ',' << i << ',' << p[0] << ',' << p[1] << ',' << p[2] << '\n';
        }
    }
    return os.str();
}

ChainResult run_chain(const LogFanoCurve& curve, double beta, const ChainOptions& opt) {
    if (opt.N < 2) throw ValidationError("run_chain needs N >= 2");
    if (opt.sweeps < 1 || opt.burn_in < 0 || opt.thinning < 1 || opt.chains < 1 || opt.workers < 1 ||
        opt.adapt_window < 1 || !(opt.initial_step > 0.0))
        throw ValidationError("invalid chain options");
    if (!std::isfinite(beta)) throw ValidationError("beta must be finite");
    curve.require_log_fano();
    const double g = gamma_threshold(curve.weights(), opt.N);
    if (!(beta > -g))
        throw StabilityError("Gibbs measure not defined: beta <= -gamma_N = " + std::to_string(-g));

    const auto C = static_cast<std::size_t>(opt.chains);
    std::vector<std::vector<PointConfiguration>> samples(C);
    std::vector<std::vector<double>> energies(C);
    std::vector<ChainReport> reports(C);
    auto job = [&](std::size_t c) { reports[c] = run_one(curve, beta, opt, static_cast<int>(c), samples[c], energies[c]); };
    if (opt.workers == 1 || C == 1) {
        for (std::size_t c = 0; c < C; ++c) job(c);
    } else {
        std::vector<std::thread> threads;
        std::exception_ptr err;
        std::mutex mu;
        const auto W = std::min<std::size_t>(C, static_cast<std::size_t>(opt.workers));
        for (std::size_t w = 0; w < W; ++w)
            threads.emplace_back([&, w] {
                try {
                    for (std::size_t c = w; c < C; c += W) job(c);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            });
        for (auto& t : threads) t.join();
        if (err) std::rethrow_exception(err);
    }
    ChainResult r;
    r.N = opt.N;
    r.beta = beta;
    r.seed = opt.seed;
    r.reports = std::move(reports);
    for (std::size_t c = 0; c < C; ++c) {
        for (auto& s : samples[c]) r.samples.push_back(std::move(s));
        r.energies.insert(r.energies.end(), energies[c].begin(), energies[c].end());
        r.chain_of.insert(r.chain_of.end(), energies[c].size(), static_cast<int>(c));
    }
    return r;
}

McEstimate mean_energy_estimate(const ChainResult& r, const LogFanoCurve& curve) {
    (void)curve;
    if (r.energies.empty()) throw ValidationError("empty sample stream");
    McEstimate e;
    e.n_samples = static_cast<std::int64_t>(r.energies.size());
    e.seed = r.seed;
    e.worker_count = static_cast<int>(r.reports.size());
    e.mean = mean_of(r.energies);
    e.log_mean = std::log(std::abs(e.mean));
    e.std_error = batch_means_se(r.energies, 100);
    const auto bm = batch_means(r.energies, 100);
    e.diagnostics.batch_means_variance = variance_of(bm);
    e.diagnostics.median_of_means = median_of(bm);
    e.conversion_note = "mean of config_energy over retained samples";
    return e;
}

double MarginalHistogram::total() const {
    double s = 0.0;
    for (double c : counts) s += c;
    return s;
}

std::vector<double> MarginalHistogram::reference_masses(const std::function<double(double)>& cdf) const {
    std::vector<double> m;
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) m.push_back(cdf(edges[b + 1]) - cdf(edges[b]));
    return m;
}

nlohmann::json MarginalHistogram::to_json() const {
    return {{"edges", edges}, {"counts", counts}, {"effective_sample_size", effective_sample_size}};
}

MarginalHistogram marginal_histogram(const ChainResult& r, int bins) {
    if (bins < 10) throw ValidationError("marginal_histogram needs at least 10 bins");
    if (r.samples.empty()) throw ValidationError("empty sample stream");
    MarginalHistogram h;
    for (int b = 0; b <= bins; ++b) h.edges.push_back(-1.0 + 2.0 * b / bins);
    h.counts.assign(static_cast<std::size_t>(bins), 0.0);
    const std::size_t S = r.samples.size(), N = r.samples.front().size();
    std::vector<double> f1(S), f2(S), f3(S);
    std::vector<double> all;
    all.reserve(S * N);
    for (std::size_t s = 0; s < S; ++s) {
        double a = 0, b = 0, c = 0;
        for (auto& p : r.samples[s].points()) {
            const double t = p.t();
            all.push_back(t);
            const auto k = std::min<std::size_t>(static_cast<std::size_t>((t + 1.0) / 2.0 * bins), static_cast<std::size_t>(bins - 1));
            h.counts[k] += 1.0;
            a += t;
            b += t * t;
            c += t > 0.0;
        }
        f1[s] = a / N;
        f2[s] = b / N;
        f3[s] = c / N;
    }
    // n_eff = per-point variance / squared batch-means SE of the per-sample
    // average, minimized over t, t^2 and 1{t > 0}.
    const double n_tot = static_cast<double>(all.size());
    double n_eff = n_tot;
    auto point_var = [&](auto f) {
        double m = 0, v = 0;
        for (double t : all) m += f(t);
        m /= n_tot;
        for (double t : all) v += (f(t) - m) * (f(t) - m);
        return v / (n_tot - 1);
    };
    const double v1 = point_var([](double t) { return t; });
    const double v2 = point_var([](double t) { return t * t; });
    const double v3 = point_var([](double t) { return t > 0.0 ? 1.0 : 0.0; });
    for (auto [series, v] : {std::pair{&f1, v1}, std::pair{&f2, v2}, std::pair{&f3, v3}}) {
        const double se = batch_means_se(*series, 100);
        if (se > 0.0) n_eff = std::min(n_eff, v / (se * se));
    }
    h.effective_sample_size = n_eff;
    std::sort(all.begin(), all.end());
    h.values = std::move(all);
    return h;
}

double ks_against(const MarginalHistogram& h, const std::function<double(double)>& cdf) {
    return ks_statistic(h.values, cdf);
}

double l1_against(const MarginalHistogram& h, const std::function<double(double)>& cdf) {
    const auto ref = h.reference_masses(cdf);
    const double n = h.total();
    double s = 0.0;
    for (std::size_t b = 0; b < ref.size(); ++b) s += std::abs(h.counts[b] / n - ref[b]);
    return s;
}

std::vector<FreeEnergyPoint> free_energy_curve(const LogFanoCurve& curve, const std::vector<double>& beta_grid,
                                               const ChainOptions& opt, double F_start) {
    if (beta_grid.size() < 2) throw ValidationError("free_energy_curve needs at least two beta values");
    for (std::size_t k = 1; k < beta_grid.size(); ++k)
        if (!(beta_grid[k] > beta_grid[k - 1])) throw ValidationError("beta grid must be increasing");
    std::vector<FreeEnergyPoint> out;
    for (std::size_t k = 0; k < beta_grid.size(); ++k) {
        ChainOptions o = opt;
        o.seed = Rng(opt.seed).substream(1000 + k).seed();
        const auto r = run_chain(curve, beta_grid[k], o);
        const auto e = mean_energy_estimate(r, curve);
        out.push_back({beta_grid[k], e.mean, e.std_error, 0.0, 0.0});
    }
    // trapezoid; F_k = F_start + sum_i c_i E_i with independent E_i
    std::vector<double> c(out.size(), 0.0);
    out[0].free_energy = F_start;
    for (std::size_t k = 1; k < out.size(); ++k) {
        const double h = out[k].beta - out[k - 1].beta;
        c[k - 1] += 0.5 * h;
        c[k] += 0.5 * h;
        double f = F_start, v = 0.0;
        for (std::size_t i = 0; i <= k; ++i) {
            f += c[i] * out[i].mean_energy;
            v += c[i] * c[i] * out[i].mean_energy_se * out[i].mean_energy_se;
        }
        out[k].free_energy = f;
        out[k].free_energy_se = std::sqrt(v);
    }
    return out;
}

}  // namespace kez
