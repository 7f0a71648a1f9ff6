#include "kez/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "kez/errors.hpp"

namespace kez {

namespace {

constexpr double kPi = std::numbers::pi;

AffineArg P(const std::string& name, Rational coeff = 1, Rational c = 0) { return AffineArg::param(name, coeff, c); }

// c = d / (2(N-1)) with d = 2 - w1 - w2 - w3
AffineArg selberg_c(int N) {
    const Rational k(1, 2 * (N - 1));
    return AffineArg({{"w1", -k}, {"w2", -k}, {"w3", -k}}, Rational(2) * k);
}

double lgamma_int(int n) { return std::lgamma(static_cast<double>(n)); }

}  // namespace

GammaProduct selberg_gamma_product(int N) {
    if (N < 2) throw ValidationError("selberg_gamma_product needs N >= 2");
    const AffineArg c = selberg_c(N);
    const double log_const = lgamma_int(N + 1) + N * std::log(kPi);
    GammaProduct z = GammaProduct::constant(1.0).scaled_by_log({log_const, 0.0});
    z *= GammaProduct::l_function(-c, -N);
    for (int j = 1; j <= N; ++j) z *= GammaProduct::l_function(Rational(-j) * c);
    for (int j = 0; j < N; ++j)
        for (const char* w : {"w1", "w2", "w3"}) z *= GammaProduct::l_function(P(w) + Rational(j) * c, -1);
    z.set_note("N! pi^N; positive real");
    return z;
}

namespace {

// 1 for (0, inf), -(n+1) for (-n-1, -n), nullopt on a pole
std::optional<std::int64_t> gamma_cell(Rational x) {
    if (x > Rational(0)) return 1;
    if (x.is_integer()) return std::nullopt;
    return x.floor();
}

}  // namespace

bool selberg_integral_converges(int N, const std::array<Rational, 3>& w) {
    const GammaProduct gp = selberg_gamma_product(N);
    const std::map<std::string, Rational> ref{{"w1", Rational(1, 2)}, {"w2", Rational(1, 2)}, {"w3", Rational(1, 2)}};
    const std::map<std::string, Rational> at{{"w1", w[0]}, {"w2", w[1]}, {"w3", w[2]}};
    auto value = [](const AffineArg& a, const std::map<std::string, Rational>& p) {
        Rational v = a.constant();
        for (auto& [k, c] : a.coeffs()) v += c * p.at(k);
        return v;
    };
    for (const auto& f : gp.factors()) {
        if (f.exponent <= 0) continue;
        const auto c0 = gamma_cell(value(f.arg, ref));
        const auto c1 = gamma_cell(value(f.arg, at));
        if (!c0 || !c1 || *c0 != *c1) return false;
    }
    return true;
}

bool selberg_integral_converges_direct(int N, const std::array<Rational, 3>& w) {
    const Rational d = Rational(2) - w[0] - w[1] - w[2];
    if (!(d > Rational(0))) return false;
    if (!(Rational(N) * d < Rational(2 * (N - 1)))) return false;
    for (auto wi : w)
        if (!(wi + d / Rational(2) < Rational(1))) return false;
    return true;
}

GammaProduct pn_minimal_Z(int n) {
    if (n < 1) throw ValidationError("pn_minimal_Z needs n >= 1");
    double log_c = n * lgamma_int(n + 1);
    for (int j = 1; j <= n; ++j) log_c -= lgamma_int(j);
    const AffineArg s = P("beta", n + 1);
    GammaProduct z = GammaProduct::constant(1.0).scaled_by_log({log_c, 0.0});
    for (int j = 1; j <= n; ++j) z *= GammaProduct::gamma(s + Rational(j));
    z *= GammaProduct::gamma(s + Rational(n + 1), -n);
    z.set_note("c_n = Gamma(n+1)^n / prod Gamma(j), pinned by Z(0) = 1");
    return z;
}

GammaProduct p1_three_point_Z() {
    const AffineArg b = P("beta");
    GammaProduct z = GammaProduct::constant(1.0).scaled_by_log({3.0 * std::log(kPi), 0.0});
    z *= GammaProduct::gamma(Rational(2) * b + Rational(2), -3);
    z *= GammaProduct::gamma(Rational(3) * b + Rational(2));
    z *= GammaProduct::gamma(b + Rational(1), 3);
    z.set_note("pi^3");
    return z;
}

double p1_three_point_sphere_log_Z(double beta) {
    if (!(beta > -2.0 / 3.0)) throw StabilityError("three-point partition function diverges for beta <= -2/3");
    const MeroValue v = eval(p1_three_point_Z(), std::map<std::string, Complex>{{"beta", {beta, 0.0}}});
    return 3.0 * beta * std::log(4.0) + v.log_modulus() - 3.0 * std::log(kPi);
}

GammaProduct circular_Z(int N) {
    if (N < 2) throw ValidationError("circular_Z needs N >= 2");
    const AffineArg b = P("beta");
    GammaProduct z = GammaProduct::constant(1.0).scaled_by_log({N * std::log(2.0 * kPi), 0.0});
    z *= GammaProduct::gamma(Rational(1, N - 1) * b + Rational(1), -N);
    z *= GammaProduct::gamma(Rational(N, N - 1) * b + Rational(1));
    z.set_note("(2 pi)^N");
    return z;
}

GammaProduct gaussian_det_Z(int n) {
    if (n < 0) throw ValidationError("gaussian_det_Z needs n >= 0");
    const int m = n + 1;
    double log_c = m * m * std::log(kPi);
    for (int j = 1; j <= m; ++j) log_c -= lgamma_int(j);
    GammaProduct z = GammaProduct::constant(1.0).scaled_by_log({log_c, 0.0});
    for (int j = 1; j <= m; ++j) z *= GammaProduct::gamma(P("s") + Rational(j));
    z.set_note("pi^{(n+1)^2} / prod Gamma(j), pinned by Z(0)");
    return z;
}

// --------------------------------------------------------------- tube tests

TubeDomain& TubeDomain::less(std::map<std::string, Rational> coeffs, Rational bound) {
    constraints.push_back({std::move(coeffs), TubeConstraint::Sense::Less, bound});
    return *this;
}

TubeDomain& TubeDomain::greater(std::map<std::string, Rational> coeffs, Rational bound) {
    constraints.push_back({std::move(coeffs), TubeConstraint::Sense::Greater, bound});
    return *this;
}

bool TubeDomain::contains(const std::map<std::string, Rational>& re_w) const {
    for (auto& c : constraints) {
        Rational v = 0;
        for (auto& [k, a] : c.coeffs) {
            auto it = re_w.find(k);
            if (it == re_w.end()) throw ValidationError("point misses tube parameter '" + k + "'");
            v += a * it->second;
        }
        if (c.sense == TubeConstraint::Sense::Less ? !(v < c.bound) : !(v > c.bound)) return false;
    }
    return true;
}

TubeDomain TubeDomain::selberg_omega() {
    TubeDomain d;
    for (const char* w : {"w1", "w2", "w3"}) d.less({{w, 1}}, 1);
    d.greater({{"w1", 1}, {"w2", 1}, {"w3", 1}}, 0);
    return d;
}

TubeDomain TubeDomain::selberg_positive_cube() {
    TubeDomain d;
    for (const char* w : {"w1", "w2", "w3"}) {
        d.less({{w, 1}}, 1);
        d.greater({{w, 1}}, 0);
    }
    return d;
}

nlohmann::json TubeDomain::to_json() const {
    auto arr = nlohmann::json::array();
    for (auto& c : constraints) {
        nlohmann::json co = nlohmann::json::object();
        for (auto& [k, v] : c.coeffs) co[k] = v.str();
        arr.push_back({{"coeffs", co}, {"sense", c.sense == TubeConstraint::Sense::Less ? "<" : ">"}, {"bound", c.bound.str()}});
    }
    return arr;
}

nlohmann::json TubeReport::to_json() const {
    nlohmann::json j;
    j["zero_free"] = zero_free;
    j["hyperplanes_checked"] = hyperplanes_checked;
    if (witness) {
        nlohmann::json w = nlohmann::json::object();
        for (auto& [k, v] : *witness) w[k] = v.str();
        j["witness"] = w;
        j["witness_hyperplane"] = witness_hyperplane;
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

namespace {

// a . x < b, strict. Exact Fourier-Motzkin over rationals; systems here have
// at most a handful of variables and rows.
struct Ineq {
    std::vector<Rational> a;
    Rational b;
    friend bool operator==(const Ineq&, const Ineq&) = default;
};

using System = std::vector<Ineq>;

System eliminate(const System& sys, std::size_t k) {
    System pos, neg, out;
    for (auto& r : sys) {
        if (r.a[k] > Rational(0)) pos.push_back(r);
        else if (r.a[k] < Rational(0)) neg.push_back(r);
        else out.push_back(r);
    }
    for (auto& p : pos)
        for (auto& q : neg) {
            const Rational sp = Rational(1) / p.a[k], sq = Rational(-1) / q.a[k];
            Ineq r{std::vector<Rational>(p.a.size()), p.b * sp + q.b * sq};
            for (std::size_t i = 0; i < p.a.size(); ++i) r.a[i] = p.a[i] * sp + q.a[i] * sq;
            r.a[k] = 0;
            if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(std::move(r));
        }
    return out;
}

bool constant_rows_hold(const System& sys) {
    for (auto& r : sys) {
        bool all_zero = std::all_of(r.a.begin(), r.a.end(), [](const Rational& x) { return x.is_zero(); });
        if (all_zero && !(Rational(0) < r.b)) return false;
    }
    return true;
}

// A strictly feasible point, with `frac` steering where inside each open
// interval the coordinate is placed.
std::optional<std::vector<Rational>> feasible_point(const System& sys, std::size_t n, Rational frac) {
    std::vector<System> stages{sys};
    for (std::size_t k = n; k-- > 0;) stages.push_back(eliminate(stages.back(), k));
    if (!constant_rows_hold(stages.back())) return std::nullopt;
    std::vector<Rational> x(n, Rational(0));
    for (std::size_t k = 0; k < n; ++k) {
        const System& s = stages[n - 1 - k];  // variables 0..k present
        std::optional<Rational> lo, hi;
        for (auto& r : s) {
            if (r.a[k].is_zero()) continue;
            Rational rhs = r.b;
            for (std::size_t j = 0; j < k; ++j) rhs -= r.a[j] * x[j];
            const Rational bnd = rhs / r.a[k];
            if (r.a[k] > Rational(0)) hi = hi ? std::min(*hi, bnd) : bnd;
            else lo = lo ? std::max(*lo, bnd) : bnd;
        }
        if (lo && hi) {
            if (!(*lo < *hi)) return std::nullopt;
            x[k] = *lo + (*hi - *lo) * frac;
        } else if (hi) {
            x[k] = *hi - frac;
        } else if (lo) {
            x[k] = *lo + frac;
        } else {
            x[k] = frac;
        }
    }
    return x;
}

struct Hyperplane {
    std::vector<Rational> s;  // normalized: first nonzero entry is 1
    Rational rhs;
    auto operator<=>(const Hyperplane&) const = default;
};

}  // namespace

TubeReport zero_free_in_tube(const GammaProduct& gp, const TubeDomain& dom) {
    std::set<std::string> name_set = gp.parameters();
    for (auto& c : dom.constraints)
        for (auto& [k, v] : c.coeffs) name_set.insert(k);
    const std::vector<std::string> names(name_set.begin(), name_set.end());
    const std::size_t n = names.size();

    auto vec_of = [&](const std::map<std::string, Rational>& m) {
        std::vector<Rational> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto it = m.find(names[i]);
            if (it != m.end()) v[i] = it->second;
        }
        return v;
    };

    System tube;
    for (auto& c : dom.constraints) {
        Ineq r{vec_of(c.coeffs), c.bound};
        if (c.sense == TubeConstraint::Sense::Greater) {
            for (auto& a : r.a) a = -a;
            r.b = -r.b;
        }
        tube.push_back(std::move(r));
    }

    // System in which x_k is replaced by y = s . x.
    auto substitute = [&](const std::vector<Rational>& s, std::size_t k) {
        System out;
        for (auto& r : tube) {
            Ineq q{std::vector<Rational>(n), r.b};
            for (std::size_t j = 0; j < n; ++j) q.a[j] = (j == k) ? r.a[k] / s[k] : r.a[j] - r.a[k] * s[j] / s[k];
            out.push_back(std::move(q));
        }
        return out;
    };

    // Open interval of s . x over the tube projection.
    auto range = [&](const std::vector<Rational>& s, std::size_t k) -> std::optional<std::pair<std::optional<Rational>, std::optional<Rational>>> {
        System sys = substitute(s, k);
        for (std::size_t j = 0; j < n; ++j)
            if (j != k) sys = eliminate(sys, j);
        std::optional<Rational> lo, hi;
        for (auto& r : sys) {
            if (r.a[k].is_zero()) {
                if (!(Rational(0) < r.b)) return std::nullopt;
                continue;
            }
            const Rational bnd = r.b / r.a[k];
            if (r.a[k] > Rational(0)) hi = hi ? std::min(*hi, bnd) : bnd;
            else lo = lo ? std::max(*lo, bnd) : bnd;
        }
        if (lo && hi && !(*lo < *hi)) return std::nullopt;
        return std::make_pair(lo, hi);
    };

    TubeReport report;
    if (!feasible_point(tube, n, Rational(1, 2))) return report;  // empty tube

    struct Candidate {
        Hyperplane plane;
        std::vector<Rational> s_raw;
        Rational value;  // s_raw . x = value on the plane
        std::size_t pivot;
        std::string label;
    };
    std::map<Hyperplane, Candidate> candidates;

    for (const auto& f : gp.factors()) {
        const std::vector<Rational> s = vec_of(f.arg.coeffs());
        const bool flat = std::all_of(s.begin(), s.end(), [](const Rational& x) { return x.is_zero(); });
        if (flat) {
            if (f.arg.constant().is_nonpositive_integer())
                throw UnsupportedError("factor Gamma(" + f.arg.str() + ") is singular on the whole tube");
            continue;
        }
        if (f.exponent > 0) continue;
        std::size_t k = 0;
        while (s[k].is_zero()) ++k;
        const auto rg = range(s, k);
        if (!rg) continue;
        // s . x + c = -m with lo < s . x < hi
        const Rational c = f.arg.constant();
        const std::int64_t m_min = rg->second ? std::max<std::int64_t>(0, (-(*rg->second) - c).floor() + 1) : 0;
        if (!rg->first) throw UnsupportedError("zero family of Gamma(" + f.arg.str() + ") is unbounded in the tube");
        const std::int64_t m_max = (-(*rg->first) - c).ceil() - 1;
        if (m_max - m_min > 100000) throw UnsupportedError("too many zero hyperplanes in the tube");
        for (std::int64_t m = m_min; m <= m_max; ++m) {
            const Rational value = Rational(-m) - c;
            Hyperplane h{s, value};
            const Rational lead = s[k];
            for (auto& x : h.s) x /= lead;
            h.rhs /= lead;
            candidates.emplace(h, Candidate{h, s, value, k, f.arg.str() + " = " + std::to_string(-m)});
        }
    }

    const Rational fracs[] = {Rational(1, 2), Rational(1, 3), Rational(2, 7), Rational(5, 11), Rational(7, 13),
                              Rational(3, 17), Rational(11, 19), Rational(13, 23)};

    for (auto& [plane, cand] : candidates) {
        ++report.hyperplanes_checked;
        int net = 0;
        for (const auto& g : gp.factors()) {
            const std::vector<Rational> sg = vec_of(g.arg.coeffs());
            const Rational lambda = sg[cand.pivot] / plane.s[cand.pivot];
            bool parallel = true;
            for (std::size_t i = 0; i < n; ++i)
                if (sg[i] != lambda * plane.s[i]) parallel = false;
            if (!parallel || lambda.is_zero()) continue;
            if ((lambda * plane.rhs + g.arg.constant()).is_nonpositive_integer()) net += g.exponent;
        }
        if (net >= 0) continue;

        // Point on the plane inside the tube, validated as a zero of gp.
        System on_plane = substitute(cand.s_raw, cand.pivot);
        for (auto& r : on_plane) {
            r.b -= r.a[cand.pivot] * cand.value;
            r.a[cand.pivot] = 0;
        }
        for (const Rational& frac : fracs) {
            auto x = feasible_point(on_plane, n, frac);
            if (!x) break;
            Rational rest = cand.value;
            for (std::size_t j = 0; j < n; ++j)
                if (j != cand.pivot) rest -= cand.s_raw[j] * (*x)[j];
            (*x)[cand.pivot] = rest / cand.s_raw[cand.pivot];
            std::map<std::string, Rational> pt;
            for (std::size_t i = 0; i < n; ++i) pt[names[i]] = (*x)[i];
            if (!dom.contains(pt)) continue;
            const MeroValue v = eval(gp, pt);
            if (v.is_zero()) {
                report.zero_free = false;
                report.witness = pt;
                report.witness_hyperplane = cand.label;
                return report;
            }
        }
    }
    return report;
}

}  // namespace kez
