#include "kez/mc_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <mutex>
#include <thread>

#include "kez/errors.hpp"
#include "kez/statistics.hpp"

namespace kez {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinR = 1e-300;
constexpr double kMaxCapExponent = 1.98;

double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double cap_log_density(double s, double r) {
    return std::log(2.0 - s) + (s - 1.0) * std::log(2.0) - s * std::log(std::max(r, kMinR));
}

double cap_draw_r(Rng& rng, double s) { return 2.0 * std::pow(rng.uniform_pos(), 1.0 / (2.0 - s)); }

double gamma_draw(Rng& rng, double k) {
    if (k < 1.0) return gamma_draw(rng, k + 1.0) * std::pow(rng.uniform_pos(), 1.0 / k);
    const double d = k - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = rng.normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.uniform_pos();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

// log of 4^{-a-b} B(1-b, 1-a): mass of (2-2t)^{-a} (2+2t)^{-b} against sigma
double axial_log_mass(double a, double b) {
    return -(a + b) * std::log(4.0) + std::lgamma(1.0 - a) + std::lgamma(1.0 - b) - std::lgamma(2.0 - a - b);
}

struct Drawn {
    SpherePoint x;
    std::vector<double> r_marked;
    int src = -1;  // cluster source
    double r_src = 0.0;
};

class Sampler {
public:
    Sampler(const SphereIntegrand& f, const ProposalMixture& q) : f_(f), q_(q) {
        if (q_.base == BaseKind::Reference) {
            log_ref_mass_ = axial_log_mass(q_.w_north, q_.w_south);
            for (auto& p : f_.marked) {
                if (p == SpherePoint::north()) pole_.push_back(1);
                else if (p == SpherePoint::south()) pole_.push_back(-1);
                else throw ValidationError("reference base needs marked points at the poles");
            }
        }
        for (auto& c : q_.components) {
            if (c.kind == ProposalComponent::Kind::Base) base_w_ += c.weight;
            else if (c.kind == ProposalComponent::Kind::Cluster) cluster_ = &c;
            else marked_caps_.push_back(&c);
        }
        for (auto* c : marked_caps_) {
            int idx = -1;
            for (std::size_t k = 0; k < f_.marked.size() && idx < 0; ++k)
                if (f_.marked[k] == *c->point) idx = static_cast<int>(k);
            cap_index_.push_back(idx);
        }
    }

    // One draw of N points; returns log f - log q.
    double draw(Rng& rng) {
        pts_.clear();
        double log_q = 0.0;
        for (int i = 0; i < f_.N; ++i) {
            const double cw = (i == 0 || !cluster_) ? 0.0 : cluster_->weight;
            const double bw = base_w_ + ((i == 0 && cluster_) ? cluster_->weight : 0.0);
            double u = rng.uniform();
            Drawn d;
            bool done = false;
            if (u < bw || (marked_caps_.empty() && cw == 0.0)) {
                d = draw_base(rng);
                done = true;
            } else {
                u -= bw;
            }
            for (std::size_t c = 0; !done && c < marked_caps_.size(); ++c) {
                if (u < marked_caps_[c]->weight) {
                    d = draw_cap(rng, *marked_caps_[c], cap_index_[c]);
                    done = true;
                } else {
                    u -= marked_caps_[c]->weight;
                }
            }
            if (!done) {
                if (cw > 0.0) {
                    const int j = std::min(i - 1, static_cast<int>(rng.uniform() * i));
                    const double r = cap_draw_r(rng, cluster_->exponent);
                    d.x = point_at_chordal(pts_[static_cast<std::size_t>(j)].x, r, 2.0 * kPi * rng.uniform());
                    d.src = j;
                    d.r_src = r;
                    fill_marked(d);
                } else {
                    d = draw_base(rng);
                }
            }
            pts_.push_back(std::move(d));
            log_q += log_mixture_density(i, bw, cw);
        }
        return log_f() - log_q;
    }

private:
    void fill_marked(Drawn& d) const {
        d.r_marked.assign(f_.marked.size(), 0.0);
        for (std::size_t k = 0; k < f_.marked.size(); ++k) d.r_marked[k] = chordal(d.x, f_.marked[k]);
    }

    Drawn draw_base(Rng& rng) const {
        Drawn d;
        if (q_.base == BaseKind::Uniform) {
            d.x = sample_uniform(rng);
            fill_marked(d);
            return d;
        }
        const double phi = 2.0 * kPi * rng.uniform();
        // u = (1 + t)/2 ~ Beta(1 - w_south, 1 - w_north)
        const double g1 = gamma_draw(rng, 1.0 - q_.w_south), g2 = gamma_draw(rng, 1.0 - q_.w_north);
        const double u = g1 / (g1 + g2), v = g2 / (g1 + g2);
        const double st = 2.0 * std::sqrt(u * v);
        d.x = SpherePoint(st * std::cos(phi), st * std::sin(phi), u - v);
        d.r_marked.assign(f_.marked.size(), 0.0);
        for (std::size_t k = 0; k < f_.marked.size(); ++k) d.r_marked[k] = pole_[k] > 0 ? 2.0 * std::sqrt(v) : 2.0 * std::sqrt(u);
        return d;
    }

    Drawn draw_cap(Rng& rng, const ProposalComponent& c, int marked_index) const {
        Drawn d;
        const double r = cap_draw_r(rng, c.exponent);
        d.x = point_at_chordal(*c.point, r, 2.0 * kPi * rng.uniform());
        fill_marked(d);
        if (marked_index >= 0) {
            d.r_marked[static_cast<std::size_t>(marked_index)] = r;
            if (!pole_.empty()) {
                // the other pole sits at exact distance sqrt(4 - r^2)
                for (std::size_t k = 0; k < f_.marked.size(); ++k)
                    if (static_cast<int>(k) != marked_index) d.r_marked[k] = std::sqrt(std::max(0.0, 4.0 - r * r));
            }
        }
        return d;
    }

    double pair_r(std::size_t i, std::size_t j) const {
        // j < i
        const Drawn& a = pts_[i];
        if (a.src == static_cast<int>(j)) return a.r_src;
        return chordal(a.x, pts_[j].x);
    }

    double log_base_density(const Drawn& d) const {
        if (q_.base == BaseKind::Uniform) return 0.0;
        double l = -log_ref_mass_;
        for (std::size_t k = 0; k < f_.marked.size(); ++k) {
            const double w = pole_[k] > 0 ? q_.w_north : q_.w_south;
            l -= 2.0 * w * std::log(std::max(d.r_marked[k], kMinR));
        }
        return l;
    }

    double log_mixture_density(int i, double bw, double cw) {
        terms_.clear();
        const Drawn& d = pts_[static_cast<std::size_t>(i)];
        if (bw > 0.0) terms_.push_back(std::log(bw) + log_base_density(d));
        for (std::size_t c = 0; c < marked_caps_.size(); ++c) {
            const auto& comp = *marked_caps_[c];
            const double r = cap_index_[c] >= 0 ? d.r_marked[static_cast<std::size_t>(cap_index_[c])] : chordal(d.x, *comp.point);
            terms_.push_back(std::log(comp.weight) + cap_log_density(comp.exponent, r));
        }
        if (cw > 0.0) {
            const double lw = std::log(cw / i);
            for (int j = 0; j < i; ++j)
                terms_.push_back(lw + cap_log_density(cluster_->exponent, pair_r(static_cast<std::size_t>(i), static_cast<std::size_t>(j))));
        }
        return log_sum_exp(terms_);
    }

    double log_f() const {
        double l = f_.log_const;
        const std::size_t n = pts_.size();
        if (f_.a != 0.0) {
            double s = 0.0;
            for (std::size_t i = 1; i < n; ++i)
                for (std::size_t j = 0; j < i; ++j) s += std::log(std::max(pair_r(i, j), kMinR));
            l -= f_.a * s;
        }
        for (std::size_t k = 0; k < f_.marked.size(); ++k) {
            const double e = f_.marked_exponent[k];
            if (e == 0.0) continue;
            double s = 0.0;
            for (auto& p : pts_) s += std::log(std::max(p.r_marked[k], kMinR));
            l -= e * s;
        }
        return l;
    }

    const SphereIntegrand& f_;
    const ProposalMixture& q_;
    double base_w_ = 0.0;
    const ProposalComponent* cluster_ = nullptr;
    std::vector<const ProposalComponent*> marked_caps_;
    std::vector<int> cap_index_;
    std::vector<int> pole_;
    double log_ref_mass_ = 0.0;
    std::vector<Drawn> pts_;
    std::vector<double> terms_;
};

// Runs `body(rng, count, out)` on deterministic chunks; concatenates results.
template <class Body>
std::vector<double> run_workers(const McOptions& opt, Body body) {
    if (opt.n_samples < 2) throw ValidationError("need at least two samples");
    if (opt.workers < 1) throw ValidationError("worker count must be positive");
    const int W = opt.workers;
    std::vector<std::vector<double>> parts(static_cast<std::size_t>(W));
    const Rng master(opt.seed);
    auto job = [&](int w) {
        const std::int64_t lo = opt.n_samples * w / W, hi = opt.n_samples * (w + 1) / W;
        Rng rng = master.substream(static_cast<std::uint64_t>(w));
        auto& out = parts[static_cast<std::size_t>(w)];
        out.reserve(static_cast<std::size_t>(hi - lo));
        body(rng, hi - lo, out);
    };
    if (W == 1) {
        job(0);
    } else {
        std::vector<std::thread> threads;
        std::exception_ptr err;
        std::mutex mu;
        for (int w = 0; w < W; ++w)
            threads.emplace_back([&, w] {
                try {
                    job(w);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            });
        for (auto& t : threads) t.join();
        if (err) std::rethrow_exception(err);
    }
    std::vector<double> all;
    all.reserve(static_cast<std::size_t>(opt.n_samples));
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

void require_cap_exponent(double& s, std::vector<std::string>* notes) {
    if (s >= kMaxCapExponent) {
        if (notes) notes->push_back("cap exponent clamped to " + std::to_string(kMaxCapExponent));
        s = kMaxCapExponent;
    }
}

}  // namespace

nlohmann::json McEstimate::to_json() const {
    nlohmann::json j;
    j["mean"] = mean;
    j["std_error"] = std_error;
    j["log_mean"] = log_mean;
    j["n_samples"] = n_samples;
    j["seed"] = seed;
    j["worker_count"] = worker_count;
    j["diagnostics"] = {{"batch_means_variance", diagnostics.batch_means_variance},
                        {"tail_index_estimate", std::isfinite(diagnostics.tail_index_estimate) ? nlohmann::json(diagnostics.tail_index_estimate) : nlohmann::json("inf")},
                        {"median_of_means", diagnostics.median_of_means},
                        {"variance_warning", diagnostics.variance_warning}};
    j["warnings"] = warnings;
    j["conversion_factor"] = conversion_factor;
    if (!conversion_note.empty()) j["conversion_note"] = conversion_note;
    return j;
}

McEstimate summarize_log_weights(const std::vector<double>& log_w, const McOptions& opt) {
    McEstimate e;
    e.n_samples = static_cast<std::int64_t>(log_w.size());
    e.seed = opt.seed;
    e.worker_count = opt.workers;
    double lmax = -std::numeric_limits<double>::infinity();
    for (double l : log_w) {
        if (std::isnan(l) || l == std::numeric_limits<double>::infinity())
            throw ConvergenceError("non-finite importance weight");
        lmax = std::max(lmax, l);
    }
    if (!std::isfinite(lmax)) {
        e.log_mean = lmax;
        return e;
    }
    std::vector<double> w(log_w.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_w[i] - lmax);
    const double n = static_cast<double>(w.size());
    const double m = mean_of(w);
    const double v = variance_of(w);
    const double scale = std::exp(lmax);
    e.log_mean = lmax + std::log(m);
    e.mean = std::exp(e.log_mean);
    e.std_error = scale * std::sqrt(v / n);
    const auto bm = batch_means(w, opt.batches);
    e.diagnostics.batch_means_variance = scale * scale * variance_of(bm);
    e.diagnostics.median_of_means = scale * median_of(bm);
    if (v > 0.0) {
        const std::size_t k = std::max<std::size_t>(10, w.size() / 100);
        e.diagnostics.tail_index_estimate = hill_tail_index_log(log_w, k);
        if (e.diagnostics.tail_index_estimate <= 2.0) {
            e.diagnostics.variance_warning = true;
            std::ostringstream os;
            os << "Hill tail index " << e.diagnostics.tail_index_estimate
               << " <= 2: importance weights may have infinite variance; median of batch means "
               << e.diagnostics.median_of_means;
            e.warnings.push_back(os.str());
        }
    }
    return e;
}

ProposalMixture ProposalMixture::for_integrand(BaseKind base, const std::vector<SpherePoint>& marked,
                                                 const std::vector<double>& marked_exponent, double a, int N,
                                                 double w_north, double w_south) {
    ProposalMixture q;
    q.base = base;
    q.w_north = w_north;
    q.w_south = w_south;
    const bool attractive = a > 0.0;
    const bool need_caps = attractive || base == BaseKind::Uniform;
    std::vector<std::size_t> singular;
    if (need_caps)
        for (std::size_t k = 0; k < marked.size(); ++k)
            if (marked_exponent[k] > 0.0) singular.push_back(k);
    const double cap_total = std::min(0.3, 0.1 * static_cast<double>(singular.size()));
    const double cluster_total = attractive ? 0.3 : 0.0;
    q.components.push_back({ProposalComponent::Kind::Base, std::nullopt, 0.0, 1.0 - cap_total - cluster_total});
    for (std::size_t k : singular) {
        const double e = marked_exponent[k];
        double s = 0.5 * (std::max(e, 2.0 * e + std::max(a, 0.0) * (N - 1) - 2.0) + 2.0);
        require_cap_exponent(s, nullptr);
        q.components.push_back({ProposalComponent::Kind::MarkedPointSingular, marked[k], s, cap_total / singular.size()});
    }
    if (attractive) {
        double s = std::max(a, a * N / 2.0);
        require_cap_exponent(s, nullptr);
        q.components.push_back({ProposalComponent::Kind::Cluster, std::nullopt, s, cluster_total});
    }
    q.validate();
    return q;
}

void ProposalMixture::validate() const {
    double total = 0.0;
    for (auto& c : components) {
        if (!(c.weight > 0.0)) throw ValidationError("proposal component weights must be positive");
        if (c.kind != ProposalComponent::Kind::Base && !(c.exponent < 2.0))
            throw ValidationError("cap exponent must be below 2 to stay normalizable");
        if (c.kind == ProposalComponent::Kind::MarkedPointSingular && !c.point)
            throw ValidationError("marked-point component needs a point");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("proposal weights must sum to 1");
    if (base == BaseKind::Reference && (!(w_north < 1.0) || !(w_south < 1.0)))
        throw ValidationError("reference base needs pole weights below 1");
}

nlohmann::json ProposalMixture::to_json() const {
    nlohmann::json j;
    j["base"] = base == BaseKind::Uniform ? "uniform" : "reference";
    auto arr = nlohmann::json::array();
    for (auto& c : components) {
        nlohmann::json e;
        e["kind"] = c.kind == ProposalComponent::Kind::Base ? "base"
                    : c.kind == ProposalComponent::Kind::Cluster ? "cluster" : "marked_point";
        e["weight"] = c.weight;
        if (c.kind != ProposalComponent::Kind::Base) e["exponent"] = c.exponent;
        if (c.point) e["point"] = {(*c.point)[0], (*c.point)[1], (*c.point)[2]};
        arr.push_back(e);
    }
    j["components"] = arr;
    return j;
}

McEstimate importance_sample(const SphereIntegrand& f, const ProposalMixture& q, const McOptions& opt) {
    if (f.N < 1) throw ValidationError("need at least one point");
    if (f.marked.size() != f.marked_exponent.size()) throw ValidationError("marked exponents mismatch");
    q.validate();
    auto lw = run_workers(opt, [&](Rng& rng, std::int64_t count, std::vector<double>& out) {
        Sampler s(f, q);
        for (std::int64_t i = 0; i < count; ++i) out.push_back(s.draw(rng));
    });
    return summarize_log_weights(lw, opt);
}

McEstimate mc_selberg(const std::array<double, 3>& w, int N, const McOptions& opt, std::optional<ProposalMixture> proposal) {
    if (N < 2) throw ValidationError("mc_selberg needs N >= 2");
    const StabilityVerdict v = classify(std::vector<double>(w.begin(), w.end()), N);
    if (v.kind == StabilityClass::NotLogFano) throw StabilityError("weights are not log Fano; the integral diverges");
    if (!v.stable_at_level_N.value())
        throw StabilityError("Selberg integral diverges: beta = -1 is not above -gamma_N = " + std::to_string(-*v.gamma_N));
    const double d = 2.0 - w[0] - w[1] - w[2];
    SphereIntegrand f;
    f.N = N;
    const double ln2 = std::log(2.0);
    f.log_const = N * (std::log(kPi) + d * ln2 + 2.0 * w[0] * ln2 + w[1] * ln2 + 2.0 * w[2] * ln2);
    f.a = 2.0 * d / (N - 1);
    f.marked = {SpherePoint::south(), SpherePoint(1.0, 0.0, 0.0), SpherePoint::north()};
    f.marked_exponent = {2.0 * w[0], 2.0 * w[1], 2.0 * w[2]};
    const ProposalMixture q = proposal ? *proposal
                                       : ProposalMixture::for_integrand(BaseKind::Uniform, f.marked, f.marked_exponent, f.a, N);
    McEstimate e = importance_sample(f, q, opt);
    e.conversion_note = "integral over C^N against Lebesgue measure (no Z(0)=1 pin)";
    return e;
}

bool is_axial(const LogFanoCurve& curve) {
    bool north = false, south = false;
    for (auto& p : curve.marked_sphere_points()) {
        if (p == SpherePoint::north() && !north) north = true;
        else if (p == SpherePoint::south() && !south) south = true;
        else return false;
    }
    return true;
}

MassEstimate reference_mass(const LogFanoCurve& curve, const McOptions& opt) {
    MassEstimate m;
    if (is_axial(curve)) {
        double wn = 0.0, ws = 0.0;
        for (std::size_t k = 0; k < curve.size(); ++k)
            (curve.marked_sphere_points()[k] == SpherePoint::north() ? wn : ws) = curve.weights()[k];
        m.value = std::exp(axial_log_mass(wn, ws));
        return m;
    }
    SphereIntegrand f;
    f.N = 1;
    f.marked = curve.marked_sphere_points();
    for (double w : curve.weights()) f.marked_exponent.push_back(2.0 * w);
    const auto q = ProposalMixture::for_integrand(BaseKind::Uniform, f.marked, f.marked_exponent, 0.0, 1);
    const McEstimate e = importance_sample(f, q, opt);
    m.value = e.mean;
    m.std_error = e.std_error;
    m.exact = false;
    return m;
}

McEstimate mc_sphere_partition(const LogFanoCurve& curve, double beta, int N, const McOptions& opt) {
    curve.require_log_fano();
    if (N < 2) throw ValidationError("mc_sphere_partition needs N >= 2");
    const double g = gamma_threshold(curve.weights(), N);
    if (!(beta > -g)) throw StabilityError("Z_N(beta) diverges: beta <= -gamma_N = " + std::to_string(-g));
    SphereIntegrand f;
    f.N = N;
    f.a = -2.0 * beta * curve.d_L() / (N - 1);
    f.marked = curve.marked_sphere_points();
    for (double w : curve.weights()) f.marked_exponent.push_back(2.0 * w);

    const bool axial = is_axial(curve);
    MassEstimate mass;
    ProposalMixture q;
    if (axial) {
        double wn = 0.0, ws = 0.0;
        for (std::size_t k = 0; k < curve.size(); ++k) (f.marked[k] == SpherePoint::north() ? wn : ws) = curve.weights()[k];
        mass = reference_mass(curve, opt);
        q = ProposalMixture::for_integrand(BaseKind::Reference, f.marked, f.marked_exponent, f.a, N, wn, ws);
    } else {
        McOptions mopt = opt;
        mopt.seed = opt.seed ^ 0x5DEECE66DULL;
        mass = reference_mass(curve, mopt);
        q = ProposalMixture::for_integrand(BaseKind::Uniform, f.marked, f.marked_exponent, f.a, N);
    }
    f.log_const = -N * std::log(mass.value);
    McEstimate e = importance_sample(f, q, opt);
    if (!mass.exact) {
        const double rel_num = e.mean > 0 ? e.std_error / e.mean : 0.0;
        const double rel_mass = N * mass.std_error / mass.value;
        e.std_error = e.mean * std::sqrt(rel_num * rel_num + rel_mass * rel_mass);
        e.warnings.push_back("reference mass estimated by Monte Carlo; its error is folded into std_error");
    }
    e.conversion_factor = std::pow(mass.value, N);
    e.conversion_note = "multiply by conversion_factor for the unnormalized reference prod ||x-p||^{-2w} dsigma";
    return e;
}

McEstimate mc_circular(int N, double beta, const McOptions& opt) {
    if (N < 2) throw ValidationError("mc_circular needs N >= 2");
    const double g = (N - 1.0) / N;
    if (!(beta > -g)) throw StabilityError("circular ensemble integral diverges for beta <= -(N-1)/N");
    const double ex = 2.0 * beta / (N - 1);
    const double lc = N * std::log(2.0 * kPi);
    auto lw = run_workers(opt, [&](Rng& rng, std::int64_t count, std::vector<double>& out) {
        std::vector<double> th(static_cast<std::size_t>(N));
        for (std::int64_t s = 0; s < count; ++s) {
            for (auto& t : th) t = 2.0 * kPi * rng.uniform();
            double l = 0.0;
            if (ex != 0.0) {
                for (int i = 1; i < N; ++i)
                    for (int j = 0; j < i; ++j)
                        l += std::log(std::max(2.0 * std::abs(std::sin(0.5 * (th[static_cast<std::size_t>(i)] - th[static_cast<std::size_t>(j)]))), kMinR));
            }
            out.push_back(lc + ex * l);
        }
    });
    return summarize_log_weights(lw, opt);
}

namespace {

double log_abs_det(std::vector<std::complex<double>> a, int m) {
    double l = 0.0;
    for (int k = 0; k < m; ++k) {
        int p = k;
        for (int i = k + 1; i < m; ++i)
            if (std::abs(a[static_cast<std::size_t>(i * m + k)]) > std::abs(a[static_cast<std::size_t>(p * m + k)])) p = i;
        if (p != k)
            for (int j = 0; j < m; ++j) std::swap(a[static_cast<std::size_t>(k * m + j)], a[static_cast<std::size_t>(p * m + j)]);
        const auto piv = a[static_cast<std::size_t>(k * m + k)];
        if (piv == 0.0) return -std::numeric_limits<double>::infinity();
        l += std::log(std::abs(piv));
        for (int i = k + 1; i < m; ++i) {
            const auto f = a[static_cast<std::size_t>(i * m + k)] / piv;
            for (int j = k; j < m; ++j) a[static_cast<std::size_t>(i * m + j)] -= f * a[static_cast<std::size_t>(k * m + j)];
        }
    }
    return l;
}

std::vector<double> gaussian_log_dets(int n, const McOptions& opt) {
    const int m = n + 1;
    return run_workers(opt, [&](Rng& rng, std::int64_t count, std::vector<double>& out) {
        std::vector<std::complex<double>> a(static_cast<std::size_t>(m * m));
        const double sc = std::sqrt(0.5);
        for (std::int64_t s = 0; s < count; ++s) {
            for (auto& z : a) {
                const double x = rng.normal(), y = rng.normal();
                z = {sc * x, sc * y};
            }
            out.push_back(log_abs_det(a, m));
        }
    });
}

}  // namespace

McEstimate mc_gaussian_det(int n, double s, const McOptions& opt) {
    if (n < 0) throw ValidationError("mc_gaussian_det needs n >= 0");
    if (!(s > -1.0)) throw StabilityError("Gaussian determinant moment diverges for s <= -1");
    const int m = n + 1;
    auto ld = gaussian_log_dets(n, opt);
    for (auto& l : ld) l = m * m * std::log(kPi) + (s == 0.0 ? 0.0 : 2.0 * s * l);
    return summarize_log_weights(ld, opt);
}

McEstimate mc_gaussian_det_ratio(int n, double s1, double s2, const McOptions& opt) {
    if (n < 0) throw ValidationError("mc_gaussian_det_ratio needs n >= 0");
    if (!(s1 > -1.0) || !(s2 > -1.0)) throw StabilityError("Gaussian determinant moment diverges for s <= -1");
    const auto ld = gaussian_log_dets(n, opt);
    // A = |det|^{2 s2}, B = |det|^{2 s1}, both scaled by the largest |det|.
    std::vector<double> A(ld.size()), B(ld.size());
    double lmax = -std::numeric_limits<double>::infinity();
    for (double l : ld) lmax = std::max(lmax, l);
    for (std::size_t i = 0; i < ld.size(); ++i) {
        A[i] = std::exp(2.0 * s2 * (ld[i] - lmax));
        B[i] = std::exp(2.0 * s1 * (ld[i] - lmax));
    }
    const double ma = mean_of(A), mb = mean_of(B);
    const double R = ma / mb;
    double va = 0, vb = 0, cab = 0;
    for (std::size_t i = 0; i < A.size(); ++i) {
        va += (A[i] - ma) * (A[i] - ma);
        vb += (B[i] - mb) * (B[i] - mb);
        cab += (A[i] - ma) * (B[i] - mb);
    }
    const double nn = static_cast<double>(A.size());
    va /= nn - 1;
    vb /= nn - 1;
    cab /= nn - 1;
    const double scale = std::exp(2.0 * (s2 - s1) * lmax);
    McEstimate e;
    e.n_samples = static_cast<std::int64_t>(A.size());
    e.seed = opt.seed;
    e.worker_count = opt.workers;
    e.mean = R * scale;
    e.log_mean = std::log(R) + 2.0 * (s2 - s1) * lmax;
    const double var_r = (va - 2.0 * R * cab + R * R * vb) / (mb * mb * nn);
    e.std_error = scale * std::sqrt(std::max(0.0, var_r));
    std::vector<double> la(ld.size());
    for (std::size_t i = 0; i < ld.size(); ++i) la[i] = 2.0 * s2 * ld[i];
    e.diagnostics.tail_index_estimate = hill_tail_index_log(la, std::max<std::size_t>(10, la.size() / 100));
    e.diagnostics.variance_warning = e.diagnostics.tail_index_estimate <= 2.0;
    e.conversion_note = "ratio Z(s2)/Z(s1)";
    return e;
}

}  // namespace kez
