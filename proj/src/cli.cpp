#include "kez/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kez/acceptance.hpp"
#include "kez/closed_forms.hpp"
#include "kez/errors.hpp"
#include "kez/field_oracle.hpp"
#include "kez/gamma_mero.hpp"
#include "kez/gibbs_sampler.hpp"
#include "kez/mc_estimators.hpp"
#include "kez/random.hpp"
#include "kez/sphere_geom.hpp"
#include "kez/stability.hpp"

namespace kez {

namespace {

using nlohmann::json;

enum class Kind { Int, Real, Text, List, Flag };

struct OptSpec {
    std::string name;
    Kind kind;
    json def;  // null: unset
    std::string help;
};

struct CommandDef {
    std::string name;
    std::string help;
    std::string default_op;
    std::vector<OptSpec> options;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

std::string fmt17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double parse_real(const std::string& name, const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        throw ValidationError("--" + name + ": '" + s + "' is not a finite number");
    return v;
}

std::int64_t parse_int(const std::string& name, const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size()) throw ValidationError("--" + name + ": '" + s + "' is not an integer");
    return v;
}

Rational parse_rational(const std::string& name, const std::string& s) {
    const std::string t = trim(s);
    if (t.find_first_of(".eE") == std::string::npos) {
        try {
            return Rational::parse(t);
        } catch (const std::exception&) {
            throw ValidationError("--" + name + ": '" + s + "' is not a rational number");
        }
    }
    const double v = parse_real(name, t);
    const Rational r = Rational::from_double(v);
    if (std::abs(r.to_double() - v) > 1e-12 * std::max(1.0, std::abs(v)))
        throw ValidationError("--" + name + ": '" + s + "' has no short rational form; use p/q");
    return r;
}

json normalize(const OptSpec& o, const json& v) {
    const std::string n = o.name;
    switch (o.kind) {
    case Kind::Int:
        if (v.is_string()) return parse_int(n, v.get<std::string>());
        if (v.is_number_integer()) return v;
        if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<std::int64_t>(v.get<double>());
        break;
    case Kind::Real:
        if (v.is_string()) return parse_real(n, v.get<std::string>());
        if (v.is_number() && std::isfinite(v.get<double>())) return v.get<double>();
        break;
    case Kind::Text:
        if (v.is_string()) return v;
        break;
    case Kind::List: {
        json arr = json::array();
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            if (trim(s).empty()) return arr;
            for (auto& item : split(s, ',')) {
                if (item.empty()) throw ValidationError("--" + n + ": empty entry in '" + s + "'");
                arr.push_back(item);
            }
            return arr;
        }
        if (v.is_array()) {
            for (auto& e : v) {
                if (e.is_string()) arr.push_back(e);
                else if (e.is_number()) arr.push_back(e.dump());
                else throw ValidationError("--" + n + ": list entries must be numbers or strings");
            }
            return arr;
        }
        break;
    }
    case Kind::Flag:
        if (v.is_boolean()) return v;
        if (v == "true") return true;
        if (v == "false") return false;
        break;
    }
    throw ValidationError("--" + n + ": invalid value " + v.dump());
}

class Params {
public:
    explicit Params(json j) : j_(std::move(j)) {}
    const json& raw() const { return j_; }
    bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }
    const json& need(const std::string& k) const {
        if (!has(k)) throw ValidationError("--" + k + " is required");
        return j_.at(k);
    }
    std::int64_t integer(const std::string& k) const { return need(k).get<std::int64_t>(); }
    int small_int(const std::string& k, std::int64_t lo, std::int64_t hi = 1000000000) const {
        const auto v = integer(k);
        if (v < lo || v > hi)
            throw ValidationError("--" + k + " must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(v));
        return static_cast<int>(v);
    }
    std::int64_t count(const std::string& k, std::int64_t lo) const {
        const auto v = integer(k);
        if (v < lo) throw ValidationError("--" + k + " must be >= " + std::to_string(lo));
        return v;
    }
    double real(const std::string& k) const { return need(k).get<double>(); }
    std::string text(const std::string& k) const { return need(k).get<std::string>(); }
    bool flag(const std::string& k) const { return has(k) && j_.at(k).get<bool>(); }
    std::vector<std::string> list(const std::string& k) const {
        if (!has(k)) return {};
        return j_.at(k).get<std::vector<std::string>>();
    }
    std::vector<double> reals(const std::string& k) const {
        std::vector<double> v;
        for (auto& s : list(k)) v.push_back(parse_real(k, s));
        return v;
    }
    std::vector<Rational> rationals(const std::string& k) const {
        std::vector<Rational> v;
        for (auto& s : list(k)) v.push_back(parse_rational(k, s));
        return v;
    }
    Rational rational(const std::string& k) const {
        const json& v = need(k);
        return parse_rational(k, v.is_string() ? v.get<std::string>() : v.dump());
    }
    std::uint64_t seed() const {
        const auto v = integer("seed");
        if (v < 0) throw ValidationError("--seed must be nonnegative");
        return static_cast<std::uint64_t>(v);
    }
    int workers() const { return small_int("workers", 1, 256); }

private:
    json j_;
};

struct Result {
    json result;
    std::vector<std::pair<std::string, std::string>> files;  // name, contents
    int exit = exit_code::ok;
    std::vector<std::string> lines;  // printed instead of the manifest
};

using Handler = Result (*)(const Params&);

// ---- shared builders ----

LogFanoCurve curve_of(const Params& p) {
    const auto w = p.reals("w");
    std::vector<PlaneCoord> pts;
    if (p.has("points")) {
        for (auto& s : split(p.text("points"), ';')) pts.push_back(PlaneCoord::parse(s));
    } else if (w.size() == 1) {
        pts = {PlaneCoord::infinity()};
    } else if (w.size() == 2) {
        pts = {PlaneCoord::infinity(), PlaneCoord(Complex(0.0, 0.0))};
    } else if (w.size() == 3) {
        pts = {PlaneCoord(Complex(0.0, 0.0)), PlaneCoord(Complex(1.0, 0.0)), PlaneCoord::infinity()};
    } else if (!w.empty()) {
        throw ValidationError("--points is required for more than three weights");
    }
    if (pts.size() != w.size())
        throw ValidationError("--points lists " + std::to_string(pts.size()) + " points for " + std::to_string(w.size()) + " weights");
    return LogFanoCurve(pts, w);
}

struct Family {
    std::string name;
    GammaProduct gp;
    std::map<std::string, Rational> point;
};

Family family_of(const Params& p) {
    Family f;
    f.name = p.text("family");
    if (f.name == "selberg") {
        const int N = p.small_int("n", 2, 200);
        const auto w = p.rationals("w");
        if (w.size() != 3) throw ValidationError("--w needs three weights for the selberg family");
        f.gp = selberg_gamma_product(N);
        f.point = {{"w1", w[0]}, {"w2", w[1]}, {"w3", w[2]}};
    } else if (f.name == "pn") {
        f.gp = pn_minimal_Z(p.small_int("n", 1, 200));
        f.point = {{"beta", p.rational("beta")}};
    } else if (f.name == "p1_three_point") {
        f.gp = p1_three_point_Z();
        f.point = {{"beta", p.rational("beta")}};
    } else if (f.name == "circular") {
        f.gp = circular_Z(p.small_int("n", 2, 10000));
        f.point = {{"beta", p.rational("beta")}};
    } else if (f.name == "gaussian") {
        f.gp = gaussian_det_Z(p.small_int("n", 0, 200));
        f.point = {{"s", p.rational("s")}};
    } else {
        throw ValidationError("--family must be one of selberg, pn, p1_three_point, circular, gaussian; got '" + f.name + "'");
    }
    return f;
}

json point_json(const std::map<std::string, Rational>& m) {
    json j = json::object();
    for (auto& [k, v] : m) j[k] = v.str();
    return j;
}

McOptions mc_options(const Params& p) {
    McOptions o;
    o.n_samples = p.count("samples", 2);
    o.seed = p.seed();
    o.workers = p.workers();
    return o;
}

ChainOptions chain_options(const Params& p) {
    ChainOptions o;
    o.N = p.small_int("n", 2, 100000);
    o.sweeps = p.count("sweeps", 1);
    o.burn_in = p.count("burn-in", 0);
    o.thinning = p.small_int("thinning", 1);
    o.seed = p.seed();
    o.chains = p.small_int("chains", 1, 4096);
    o.workers = p.workers();
    o.initial_step = p.real("step");
    if (!(o.initial_step > 0)) throw ValidationError("--step must be positive");
    return o;
}

FieldOptions field_options(const Params& p) {
    FieldOptions o;
    o.grid = p.small_int("grid", 10, 10000000);
    o.c_lap = p.real("c-lap");
    o.max_newton = p.small_int("max-newton", 1);
    o.tolerance = p.real("tolerance");
    o.legendre_degree = p.small_int("degree", 1, 100000);
    if (!(o.tolerance > 0)) throw ValidationError("--tolerance must be positive");
    return o;
}

AxialField read_field(const std::string& path, FieldKind kind) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read '" + path + "'");
    std::vector<double> t, v;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == 't') continue;
        const auto cells = split(line, ',');
        if (cells.size() != 2) throw ValidationError(path + ": expected rows t,value");
        t.push_back(parse_real("input", cells[0]));
        v.push_back(parse_real("input", cells[1]));
    }
    if (t.size() < 3) throw ValidationError(path + ": too few rows");
    const int M = static_cast<int>(t.size()) - 1;
    AxialField f = AxialField::on_grid(M, kind);
    for (int k = 0; k <= M; ++k) {
        if (std::abs(t[k] - f.t[k]) > 1e-9) throw ValidationError(path + ": nodes must be t_k = -1 + 2k/M");
        f.values[k] = v[k];
    }
    return f;
}

std::function<double(double)> target_of(const Params& p) {
    const std::string t = p.text("target");
    if (t == "uniform") return [](double) { return 0.5; };
    if (t == "exp") {
        const double a = p.real("a");
        if (a == 0.0) return [](double) { return 0.5; };
        const double z = 2.0 * std::sinh(a) / a;
        return [a, z](double x) { return std::exp(a * x) / z; };
    }
    if (t == "file") {
        auto f = std::make_shared<AxialField>(read_field(p.text("input"), FieldKind::Density));
        return [f](double x) { return f->at(x); };
    }
    throw ValidationError("--target must be exp, uniform or file; got '" + t + "'");
}

std::string estimate_csv(const McEstimate& e) {
    std::ostringstream os;
    os << std::setprecision(17) << "mean,std_error,log_mean,n_samples,seed,workers,conversion_factor\n"
       << e.mean << "," << e.std_error << "," << e.log_mean << "," << e.n_samples << "," << e.seed << "," << e.worker_count << ","
       << e.conversion_factor << "\n";
    return os.str();
}

// ---- zeta ----

Result zeta_value(const Params& p) {
    const Family f = family_of(p);
    const MeroValue v = eval(f.gp, f.point);
    Result r;
    r.result = {{"family", f.name}, {"point", point_json(f.point)}, {"gamma_product", f.gp.str()}, {"value_str", v.str()},
                {"order", v.order()}};
    std::ostringstream csv;
    csv << std::setprecision(17) << "family,kind,order,value_re,value_im,log_re,log_im\n" << f.name << ",";
    if (v.is_regular()) {
        const Complex z = v.value();
        r.result["kind"] = "regular";
        r.result["value"] = z.imag() == 0.0 ? fmt17(z.real()) : fmt17(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt17(std::abs(z.imag())) + "i";
        r.result["value_re"] = z.real();
        r.result["value_im"] = z.imag();
        r.result["log_value"] = {v.log_value().real(), v.log_value().imag()};
        csv << "regular,0," << z.real() << "," << z.imag() << "," << v.log_value().real() << "," << v.log_value().imag() << "\n";
    } else {
        r.result["kind"] = v.is_pole() ? "pole" : "zero";
        if (auto s = v.scaled_limit()) r.result["scaled_limit"] = {s->real(), s->imag()};
        csv << (v.is_pole() ? "pole," : "zero,") << v.order() << ",,,,\n";
    }
    if (!v.warnings().empty()) r.result["warnings"] = v.warnings();
    r.files.push_back({"zeta_value.csv", csv.str()});
    return r;
}

Result zeta_strip(const Params& p) {
    Family f = family_of(p);
    if (f.name == "selberg") {
        const auto s = p.rationals("slope"), c = p.rationals("intercept");
        if (s.size() != 3 || c.size() != 3)
            throw ValidationError("the selberg family needs --slope and --intercept (three entries each) to restrict to a line");
        f.gp = restrict_to_line(f.gp, {{"w1", {s[0], c[0]}}, {"w2", {s[1], c[1]}}, {"w3", {s[2], c[2]}}}, "t");
    }
    const double lo = p.real("re-min"), hi = p.real("re-max");
    if (!(lo < hi)) throw ValidationError("--re-min must be below --re-max");
    auto pts = zeros_and_poles_in_strip(f.gp, lo, hi);
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.location < b.location; });
    Result r;
    json arr = json::array();
    std::ostringstream csv;
    csv << std::setprecision(17) << "location,location_value,net_order,type\n";
    for (auto& s : pts) {
        const char* type = s.net_order > 0 ? "pole" : "zero";
        arr.push_back({{"location", s.location.str()}, {"net_order", s.net_order}, {"type", type}});
        csv << s.location.str() << "," << s.location.to_double() << "," << s.net_order << "," << type << "\n";
    }
    r.result = {{"family", f.name}, {"parameter", *f.gp.parameters().begin()}, {"re_min", lo}, {"re_max", hi}, {"points", arr}};
    r.files.push_back({"singular_points.csv", csv.str()});
    return r;
}

Result zeta_tube(const Params& p) {
    if (p.text("family") != "selberg") throw ValidationError("zeta tube supports --family selberg only");
    const int N = p.small_int("n", 2, 200);
    const std::string d = p.text("domain");
    TubeDomain dom;
    if (d == "omega") dom = TubeDomain::selberg_omega();
    else if (d == "cube") dom = TubeDomain::selberg_positive_cube();
    else throw ValidationError("--domain must be omega or cube");
    if (p.has("widen")) dom.constraints[0].bound = parse_rational("widen", fmt17(p.real("widen")));
    const TubeReport rep = zero_free_in_tube(selberg_gamma_product(N), dom);
    Result r;
    r.result = {{"N", N}, {"domain", dom.to_json()}, {"report", rep.to_json()}};
    std::ostringstream csv;
    csv << "N,zero_free,hyperplane,witness_w1,witness_w2,witness_w3\n" << N << "," << (rep.zero_free ? "true" : "false") << ","
        << rep.witness_hyperplane;
    if (rep.witness) csv << "," << rep.witness->at("w1").str() << "," << rep.witness->at("w2").str() << "," << rep.witness->at("w3").str();
    else csv << ",,,";
    csv << "\n";
    r.files.push_back({"tube.csv", csv.str()});
    return r;
}

Result zeta_loggamma(const Params& p) {
    const auto z = p.reals("z");
    if (z.size() != 2) throw ValidationError("--z takes re,im");
    const Complex v = log_gamma({z[0], z[1]});
    Result r;
    r.result = {{"z", {z[0], z[1]}}, {"log_gamma", {v.real(), v.imag()}}};
    std::ostringstream csv;
    csv << std::setprecision(17) << "re,im,loggamma_re,loggamma_im\n" << z[0] << "," << z[1] << "," << v.real() << "," << v.imag() << "\n";
    r.files.push_back({"loggamma.csv", csv.str()});
    return r;
}

// ---- stability ----

Result stability_classify(const Params& p) {
    const auto w = p.reals("w");
    std::optional<int> N;
    if (p.has("n")) N = p.small_int("n", 2);
    const StabilityVerdict v = classify(w, N);
    Result r;
    r.result = {{"weights", w}, {"verdict", v.to_json()}, {"kind", to_string(v.kind)}, {"weight_condition", weight_condition(w)}};
    if (N && v.kind != StabilityClass::NotLogFano) r.result["gamma_threshold"] = gamma_threshold(w, *N);
    if (N && w.size() == 3) {
        const auto q = p.rationals("w");
        r.result["selberg_integral_converges"] = selberg_integral_converges(*N, {q[0], q[1], q[2]});
    }
    std::ostringstream csv;
    csv << std::setprecision(17) << "kind,N,gamma_N,stable_at_level_N,weight_condition\n" << to_string(v.kind) << ","
        << (N ? std::to_string(*N) : "") << "," << (v.gamma_N ? fmt17(*v.gamma_N) : "") << ","
        << (v.stable_at_level_N ? (*v.stable_at_level_N ? "true" : "false") : "") << "," << (weight_condition(w) ? "true" : "false") << "\n";
    r.files.push_back({"stability.csv", csv.str()});
    return r;
}

Result stability_lct(const Params& p) {
    const auto c = p.reals("coeffs");
    const double l = lct_point_divisor(c);
    Result r;
    r.result = {{"coeffs", c}, {"lct", l}};
    r.files.push_back({"lct.csv", "lct\n" + fmt17(l) + "\n"});
    return r;
}

// ---- mc ----

Result mc_result(const McEstimate& e, std::optional<double> reference) {
    Result r;
    r.result = {{"estimate", e.to_json()}};
    if (reference) {
        r.result["reference"] = *reference;
        if (e.std_error > 0) r.result["z_score"] = (e.mean - *reference) / e.std_error;
    }
    r.files.push_back({"estimate.csv", estimate_csv(e)});
    return r;
}

std::optional<double> regular_value(const GammaProduct& gp, const std::map<std::string, Rational>& at) {
    const MeroValue v = eval(gp, at);
    if (!v.is_regular()) return std::nullopt;
    return v.value().real();
}

Result mc_selberg_op(const Params& p) {
    auto w = p.reals("w");
    auto q = p.rationals("w");
    if (w.empty()) {  // default (1/2, 1/2, 1/2)
        w.assign(3, 0.5);
        q.assign(3, Rational(1, 2));
    }
    if (w.size() != 3) throw ValidationError("--w needs three weights");
    const int N = p.small_int("n", 2, 200);
    const McEstimate e = mc_selberg({w[0], w[1], w[2]}, N, mc_options(p));
    std::optional<double> ref;
    ref = regular_value(selberg_gamma_product(N), {{"w1", q[0]}, {"w2", q[1]}, {"w3", q[2]}});
    return mc_result(e, ref);
}

Result mc_sphere_op(const Params& p) {
    const LogFanoCurve c = curve_of(p);
    const int N = p.small_int("n", 2, 100000);
    const double beta = p.real("beta");
    std::optional<double> ref;
    if (c.size() == 0 && N == 3) ref = std::exp(p1_three_point_sphere_log_Z(beta));
    Result r = mc_result(mc_sphere_partition(c, beta, N, mc_options(p)), ref);
    r.result["curve"] = c.to_json();
    return r;
}

Result mc_circular_op(const Params& p) {
    const int N = p.small_int("n", 2, 10000);
    const double beta = p.real("beta");
    const auto ref = regular_value(circular_Z(N), {{"beta", parse_rational("beta", fmt17(beta))}});
    return mc_result(mc_circular(N, beta, mc_options(p)), ref);
}

Result mc_gaussian_op(const Params& p) {
    const int n = p.small_int("n", 0, 50);
    const double s = p.real("s");
    const auto ref = regular_value(gaussian_det_Z(n), {{"s", parse_rational("s", fmt17(s))}});
    return mc_result(mc_gaussian_det(n, s, mc_options(p)), ref);
}

Result mc_gaussian_ratio_op(const Params& p) {
    const int n = p.small_int("n", 0, 50);
    const double s1 = p.real("s"), s2 = p.real("s2");
    const auto g = gaussian_det_Z(n);
    const auto a = regular_value(g, {{"s", parse_rational("s", fmt17(s1))}});
    const auto b = regular_value(g, {{"s", parse_rational("s2", fmt17(s2))}});
    std::optional<double> ref;
    if (a && b) ref = *b / *a;
    return mc_result(mc_gaussian_det_ratio(n, s1, s2, mc_options(p)), ref);
}

// ---- sample ----

std::optional<std::function<double(double)>> reference_cdf(const LogFanoCurve& c) {
    AxialReference ref;
    try {
        ref = AxialReference::from_curve(c);
    } catch (const Error&) {
        return std::nullopt;
    }
    const int M = 4000;
    auto field = AxialField::on_grid(M, FieldKind::Density);
    const auto m = ref.cell_masses(M);
    for (int k = 0; k <= M; ++k) field.values[k] = m[k] / field.cell_length(k);
    return [field](double t) { return field.cdf(t); };
}

Result sample_chain(const Params& p) {
    const LogFanoCurve c = curve_of(p);
    const double beta = p.real("beta");
    const int bins = p.small_int("bins", 10, 100000);
    const ChainResult run = run_chain(c, beta, chain_options(p));
    const McEstimate me = mean_energy_estimate(run, c);
    const MarginalHistogram h = marginal_histogram(run, bins);
    Result r;
    r.result = run.manifest();
    r.result["curve"] = c.to_json();
    r.result["mean_energy"] = me.to_json();
    r.result["histogram"] = h.to_json();
    if (auto cdf = reference_cdf(c)) r.result["ks_vs_reference_measure"] = ks_against(h, *cdf);
    std::ostringstream hist;
    hist << std::setprecision(17) << "bin_lo,bin_hi,count,density\n";
    const double total = h.total();
    for (std::size_t k = 0; k + 1 < h.edges.size(); ++k)
        hist << h.edges[k] << "," << h.edges[k + 1] << "," << h.counts[k] << "," << h.counts[k] / (total * (h.edges[k + 1] - h.edges[k])) << "\n";
    r.files.push_back({"samples.csv", run.to_csv()});
    r.files.push_back({"histogram.csv", hist.str()});
    return r;
}

Result sample_free_energy(const Params& p) {
    const LogFanoCurve c = curve_of(p);
    const auto grid = p.reals("beta-grid");
    if (grid.size() < 2) throw ValidationError("--beta-grid needs at least two values");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ValidationError("--beta-grid must be increasing");
    const auto pts = free_energy_curve(c, grid, chain_options(p), p.real("f-start"));
    Result r;
    json arr = json::array();
    std::ostringstream csv;
    csv << std::setprecision(17) << "beta,mean_energy,mean_energy_se,free_energy,free_energy_se\n";
    for (auto& q : pts) {
        arr.push_back({{"beta", q.beta}, {"mean_energy", q.mean_energy}, {"mean_energy_se", q.mean_energy_se}, {"free_energy", q.free_energy},
                       {"free_energy_se", q.free_energy_se}});
        csv << q.beta << "," << q.mean_energy << "," << q.mean_energy_se << "," << q.free_energy << "," << q.free_energy_se << "\n";
    }
    r.result = {{"curve", c.to_json()}, {"N", p.integer("n")}, {"points", arr}};
    r.files.push_back({"free_energy.csv", csv.str()});
    return r;
}

PointConfiguration uniform_configuration(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SpherePoint> pts;
    for (int i = 0; i < n; ++i) pts.push_back(sample_uniform(rng));
    return PointConfiguration(pts);
}

Result sample_energy(const Params& p) {
    const LogFanoCurve c = curve_of(p);
    PointConfiguration cfg;
    if (p.has("input")) {
        std::ifstream in(p.text("input"));
        if (!in) throw ValidationError("cannot read '" + p.text("input") + "'");
        cfg = PointConfiguration::from_csv(in);
    } else {
        cfg = uniform_configuration(p.small_int("n", 2, 100000), p.seed());
    }
    const double beta = p.real("beta");
    std::ostringstream csv;
    csv << std::setprecision(17) << "i,j,chordal,green\n";
    double dmin = 2.0;
    for (std::size_t i = 0; i < cfg.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.size(); ++j) {
            const double d = chordal(cfg[i], cfg[j]);
            dmin = std::min(dmin, d);
            csv << i << "," << j << "," << d << "," << green(cfg[i], cfg[j]) << "\n";
        }
    Result r;
    r.result = {{"N", cfg.size()},
                {"curve", c.to_json()},
                {"energy", config_energy(cfg, c)},
                {"log_target", log_target(cfg, c, beta)},
                {"beta", beta},
                {"min_chordal", dmin},
                {"configuration", cfg.to_json()}};
    r.files.push_back({"pairs.csv", csv.str()});
    return r;
}

Result sample_uniform_op(const Params& p) {
    const auto cfg = uniform_configuration(p.small_int("n", 2, 10000000), p.seed());
    std::ostringstream csv;
    csv << std::setprecision(17) << "x,y,z,plane_re,plane_im\n";
    double roundtrip = 0.0;
    for (auto& x : cfg.points()) {
        const PlaneCoord z = sphere_to_stereo(x);
        roundtrip = std::max(roundtrip, chordal(stereo_to_sphere(z), x));
        csv << x[0] << "," << x[1] << "," << x[2] << ",";
        if (z.is_infinity()) csv << "inf,\n";
        else csv << z.z().real() << "," << z.z().imag() << "\n";
    }
    Result r;
    r.result = {{"N", cfg.size()}, {"seed", p.seed()}, {"max_roundtrip_chordal_error", roundtrip}};
    r.files.push_back({"points.csv", csv.str()});
    return r;
}

// ---- oracle ----

Result oracle_meanfield(const Params& p) {
    const LogFanoCurve c = curve_of(p);
    const double beta = p.real("beta");
    const MeanFieldSolution s = solve_mean_field(c, beta, field_options(p));
    const FreeEnergyValue fe = free_energy_functional(s.mu, c, beta);
    Result r;
    r.result = {{"curve", c.to_json()},
                {"beta", beta},
                {"residual", s.residual},
                {"fixed_point_residual", s.fixed_point_residual},
                {"newton_steps", s.newton_steps},
                {"log_normalization", s.log_normalization},
                {"energy", fe.energy},
                {"entropy", fe.entropy},
                {"free_energy", fe.free_energy}};
    r.files.push_back({"phi.csv", s.phi.to_csv()});
    r.files.push_back({"mu.csv", s.mu.to_csv()});
    return r;
}

Result oracle_poisson(const Params& p) {
    const FieldOptions fo = field_options(p);
    const double V = p.real("v");
    if (!(V > 0)) throw ValidationError("--v must be positive");
    const PoissonSolution s = p.text("target") == "file" ? solve_poisson(read_field(p.text("input"), FieldKind::Density), fo, V)
                                                        : solve_poisson(target_of(p), fo, V);
    Result r;
    r.result = {{"target", p.text("target")}, {"V", V}, {"residual", s.residual}, {"gauge_shift", s.gauge_shift}, {"coefficients", s.coeffs.a},
                {"warnings", s.warnings}};
    std::ostringstream co;
    co << std::setprecision(17) << "l,a_l\n";
    for (std::size_t l = 0; l < s.coeffs.a.size(); ++l) co << l << "," << s.coeffs.a[l] << "\n";
    r.files.push_back({"phi.csv", s.phi.to_csv()});
    r.files.push_back({"coefficients.csv", co.str()});
    return r;
}

Result oracle_phin(const Params& p) {
    PhiOptions po;
    const std::string mode = p.text("mode");
    if (mode == "quadrature") po.mode = PhiMode::Quadrature;
    else if (mode == "montecarlo") po.mode = PhiMode::MonteCarlo;
    else throw ValidationError("--mode must be quadrature or montecarlo");
    po.samples = p.count("samples", 2);
    po.seed = p.seed();
    const int N = p.small_int("n", 2, 100000);
    const AxialField phi = phi_N_approximant(target_of(p), N, po, field_options(p));
    Result r;
    r.result = {{"target", p.text("target")}, {"N", N}, {"mode", mode}, {"grid", phi.M()}};
    r.files.push_back({"phi.csv", phi.to_csv()});
    return r;
}

Result oracle_calibrate(const Params& p) {
    const CalibrationReport rep = calibrate_laplacian(field_options(p), p.real("t0"));
    Result r;
    r.result = rep.to_json();
    r.files.push_back({"calibration.csv", "c_lap,sup_error,tolerance,pass\n" + fmt17(rep.c_lap) + "," + fmt17(rep.sup_error) + "," +
                                              fmt17(rep.tolerance) + "," + (rep.pass ? "true" : "false") + "\n"});
    if (!rep.pass) r.exit = exit_code::mismatch;
    return r;
}

Result oracle_laplacian(const Params& p) {
    const AxialField phi = read_field(p.text("input"), FieldKind::Potential);
    const AxialField l = reduced_laplacian(phi, p.real("c-lap"));
    Result r;
    r.result = {{"input", p.text("input")}, {"grid", phi.M()}, {"c_lap", p.real("c-lap")}};
    r.files.push_back({"laplacian.csv", l.to_csv()});
    return r;
}

Result oracle_free_energy(const Params& p) {
    const LogFanoCurve c = curve_of(p);
    const AxialField mu = read_field(p.text("input"), FieldKind::Density);
    const double beta = p.real("beta");
    const FreeEnergyValue fe = free_energy_functional(mu, c, beta);
    Result r;
    r.result = {{"curve", c.to_json()}, {"beta", beta}, {"energy", fe.energy}, {"entropy", fe.entropy}, {"free_energy", fe.free_energy}};
    r.files.push_back({"free_energy.csv", "beta,energy,entropy,free_energy\n" + fmt17(beta) + "," + fmt17(fe.energy) + "," + fmt17(fe.entropy) +
                                              "," + fmt17(fe.free_energy) + "\n"});
    return r;
}

// ---- verify ----

Result verify_level(const Params& p, VerifyLevel level) {
    AcceptanceOptions o;
    o.level = level;
    o.seed = p.seed();
    o.workers = p.workers();
    o.c_lap = p.real("c-lap");
    o.budget_scale = p.real("budget-scale");
    if (!(o.budget_scale > 0)) throw ValidationError("--budget-scale must be positive");
    if (p.has("data-dir")) o.data_dir = p.text("data-dir");
    const bool timing = p.flag("timing");
    const auto results = run_acceptance(o);
    Result r;
    r.result = acceptance_report(results, o, timing);
    std::string txt;
    for (auto& c : results) {
        r.lines.push_back(format_line(c, timing));
        txt += r.lines.back() + "\n";
    }
    const bool ok = gate_passed(results);
    r.lines.push_back(std::string("gate: ") + (ok ? "PASS" : "FAIL") + " (" + std::to_string(r.result["passed"].get<int>()) + "/" +
                      std::to_string(r.result["gate_total"].get<int>()) + ")");
    txt += r.lines.back() + "\n";
    r.files.push_back({"verify_report.json", r.result.dump(2) + "\n"});
    r.files.push_back({"verify_report.txt", txt});
    if (!ok) r.exit = exit_code::mismatch;
    return r;
}

Result verify_quick(const Params& p) { return verify_level(p, VerifyLevel::Quick); }
Result verify_full(const Params& p) { return verify_level(p, VerifyLevel::Full); }

// ---- tables ----

std::vector<OptSpec> with_seed(std::vector<OptSpec> v, std::int64_t seed = 1) {
    v.push_back({"seed", Kind::Int, seed, "random seed"});
    v.push_back({"workers", Kind::Int, 1, "worker threads"});
    return v;
}

const std::vector<OptSpec> kCurveOpts{
    {"w", Kind::List, json::array(), "marked-point weights, comma separated"},
    {"points", Kind::Text, nullptr, "marked points, ';' separated (inf, x, x+yi); default inf;0 or 0;1;inf"},
};

std::vector<OptSpec> join(std::vector<OptSpec> a, const std::vector<OptSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

const std::vector<CommandDef>& commands() {
    static const std::vector<CommandDef> c{
        {"zeta",
         "closed-form partition functions: value | strip | tube | loggamma",
         "value",
         with_seed({{"family", Kind::Text, "selberg", "selberg | pn | p1_three_point | circular | gaussian"},
                    {"n", Kind::Int, 3, "N (selberg, circular) or n (pn, gaussian)"},
                    {"w", Kind::List, json::array({"1/2", "1/2", "1/2"}), "selberg weights w1,w2,w3"},
                    {"beta", Kind::Text, "1", "beta (rational or short decimal)"},
                    {"s", Kind::Text, "1", "gaussian exponent s"},
                    {"re-min", Kind::Real, -3.0, "strip lower end"},
                    {"re-max", Kind::Real, 3.0, "strip upper end"},
                    {"slope", Kind::List, nullptr, "selberg line restriction: slopes for w1,w2,w3"},
                    {"intercept", Kind::List, nullptr, "selberg line restriction: intercepts"},
                    {"domain", Kind::Text, "omega", "tube: omega | cube"},
                    {"widen", Kind::Real, nullptr, "tube: replace the bound of the first constraint"},
                    {"z", Kind::List, json::array({"1", "0"}), "loggamma argument re,im"}})},
        {"stability", "stability verdicts: classify | lct", "classify",
         with_seed({{"w", Kind::List, json::array(), "weights"},
                    {"n", Kind::Int, nullptr, "level N"},
                    {"coeffs", Kind::List, json::array({"1"}), "lct: divisor coefficients"}})},
        {"mc", "Monte Carlo estimators: selberg | sphere | circular | gaussian | gaussian-ratio", "selberg",
         with_seed(join({{"samples", Kind::Int, 100000, "sample budget"},
                         {"n", Kind::Int, 3, "number of points / matrix order n"},
                         {"beta", Kind::Real, 1.0, "inverse temperature"},
                         {"s", Kind::Real, 1.0, "gaussian exponent"},
                         {"s2", Kind::Real, 2.0, "gaussian-ratio numerator exponent"}},
                        kCurveOpts))},
        {"sample", "Metropolis sampler: chain | free-energy | energy | uniform", "chain",
         with_seed(join({{"n", Kind::Int, 16, "number of points"},
                         {"beta", Kind::Real, 1.0, "inverse temperature"},
                         {"sweeps", Kind::Int, 10000, "retained sweeps per chain"},
                         {"burn-in", Kind::Int, 1000, "burn-in sweeps"},
                         {"thinning", Kind::Int, 1, "keep every k-th sweep"},
                         {"chains", Kind::Int, 1, "independent chains"},
                         {"step", Kind::Real, 0.5, "initial proposal step"},
                         {"bins", Kind::Int, 40, "marginal histogram bins"},
                         {"beta-grid", Kind::List, nullptr, "free-energy: increasing beta values"},
                         {"f-start", Kind::Real, 0.0, "free-energy: F at the first grid point"},
                         {"input", Kind::Text, nullptr, "energy: configuration CSV x,y,z"}},
                        kCurveOpts))},
        {"oracle", "axial field solvers: meanfield | poisson | phin | calibrate | laplacian | free-energy", "meanfield",
         with_seed(join({{"beta", Kind::Real, 1.0, "inverse temperature"},
                         {"grid", Kind::Int, 2000, "grid cells M"},
                         {"c-lap", Kind::Real, kLaplacianConstant, "Laplacian constant"},
                         {"max-newton", Kind::Int, 50, "Newton iteration cap"},
                         {"tolerance", Kind::Real, 1e-8, "Newton tolerance"},
                         {"degree", Kind::Int, 64, "Legendre degree"},
                         {"target", Kind::Text, "exp", "exp | uniform | file"},
                         {"a", Kind::Real, 1.0, "exp target: density proportional to e^{a t}"},
                         {"v", Kind::Real, 2.0, "poisson: volume V"},
                         {"input", Kind::Text, nullptr, "CSV t,value on t_k = -1 + 2k/M"},
                         {"n", Kind::Int, 3, "phin: N"},
                         {"mode", Kind::Text, "quadrature", "phin: quadrature | montecarlo"},
                         {"samples", Kind::Int, 10000, "phin montecarlo samples"},
                         {"t0", Kind::Real, 0.3, "calibrate: bump centre"}},
                        kCurveOpts))},
        {"verify", "acceptance suite: quick | full", "quick",
         with_seed({{"c-lap", Kind::Real, kLaplacianConstant, "Laplacian constant (negative control)"},
                    {"budget-scale", Kind::Real, 1.0, "multiplies sample and sweep budgets"},
                    {"data-dir", Kind::Text, nullptr, "reference data directory"},
                    {"timing", Kind::Flag, false, "include wall-clock times in the report"}},
                   20240611)},
    };
    return c;
}

struct Route {
    DispatchEntry entry;
    Handler handler;
};

using Args = std::vector<std::string>;

const std::vector<Route>& routes() {
    static const std::vector<Route> r{
        {{"zeta", "value", "evaluate a closed form at a parameter point",
          {"eval", "selberg_gamma_product", "pn_minimal_Z", "p1_three_point_Z", "circular_Z", "gaussian_det_Z"},
          {Args{"zeta", "--family", "circular", "--n", "3", "--beta", "1"}, Args{"zeta", "value", "--family", "selberg", "--w", "1/2,1/2,1/2"},
           Args{"zeta", "value", "--family", "pn", "--n", "2", "--beta", "1"}, Args{"zeta", "value", "--family", "p1_three_point", "--beta", "-2/3"},
           Args{"zeta", "value", "--family", "gaussian", "--n", "1", "--s", "0.5"}}},
         zeta_value},
        {{"zeta", "strip", "zeros and poles of a one-parameter closed form",
          {"zeros_and_poles_in_strip", "restrict_to_line"},
          {Args{"zeta", "strip", "--family", "pn", "--n", "3"},
           Args{"zeta", "strip", "--family", "selberg", "--slope", "1,1,1", "--intercept", "0,0,0", "--re-min", "-1", "--re-max", "1"}}},
         zeta_strip},
        {{"zeta", "tube", "zero-free test on a tube domain", {"zero_free_in_tube"},
          {Args{"zeta", "tube", "--n", "3", "--domain", "cube", "--widen", "2"}}},
         zeta_tube},
        {{"zeta", "loggamma", "complex log-gamma", {"log_gamma"}, {Args{"zeta", "loggamma", "--z", "0.5,-3"}}}, zeta_loggamma},
        {{"stability", "classify", "Gibbs stability verdict", {"classify", "weight_condition", "gamma_threshold", "selberg_integral_converges"},
          {Args{"stability", "--w", "0.5,0.5,0.5"}, Args{"stability", "classify", "--w", "0.5,0.5,0.5", "--n", "4"}}},
         stability_classify},
        {{"stability", "lct", "log canonical threshold of a point divisor", {"lct_point_divisor"},
          {Args{"stability", "lct", "--coeffs", "0.5,1.5"}}},
         stability_lct},
        {{"mc", "selberg", "complex Selberg integral", {"mc_selberg"}, {Args{"mc", "selberg", "--n", "3", "--samples", "2000"}}}, mc_selberg_op},
        {{"mc", "sphere", "sphere partition function", {"mc_sphere_partition"},
          {Args{"mc", "sphere", "--n", "3", "--beta", "0.5", "--samples", "2000"}}},
         mc_sphere_op},
        {{"mc", "circular", "circular ensemble", {"mc_circular"}, {Args{"mc", "circular", "--n", "3", "--samples", "2000"}}}, mc_circular_op},
        {{"mc", "gaussian", "Gaussian determinant moment", {"mc_gaussian_det"}, {Args{"mc", "gaussian", "--n", "1", "--samples", "2000"}}},
         mc_gaussian_op},
        {{"mc", "gaussian-ratio", "ratio of Gaussian determinant moments", {"mc_gaussian_det_ratio"},
          {Args{"mc", "gaussian-ratio", "--n", "1", "--s", "0", "--s2", "1", "--samples", "2000"}}},
         mc_gaussian_ratio_op},
        {{"sample", "chain", "Metropolis chain with marginals", {"run_chain", "mean_energy_estimate", "marginal_histogram", "ks_against"},
          {Args{"sample", "--n", "4", "--sweeps", "200", "--burn-in", "50"}}},
         sample_chain},
        {{"sample", "free-energy", "thermodynamic integration", {"free_energy_curve"},
          {Args{"sample", "free-energy", "--n", "3", "--beta-grid", "0,0.5,1", "--sweeps", "200", "--burn-in", "50"}}},
         sample_free_energy},
        {{"sample", "energy", "energy and log target of a configuration", {"config_energy", "log_target", "chordal", "green"},
          {Args{"sample", "energy", "--n", "5", "--w", "0.5", "--beta", "1"}}},
         sample_energy},
        {{"sample", "uniform", "uniform points on the sphere", {"sample_uniform", "sphere_to_stereo", "stereo_to_sphere"},
          {Args{"sample", "uniform", "--n", "10"}}},
         sample_uniform_op},
        {{"oracle", "meanfield", "mean-field equation", {"solve_mean_field", "free_energy_functional"},
          {Args{"oracle", "--w", "0.5", "--beta", "1", "--grid", "400"}}},
         oracle_meanfield},
        {{"oracle", "poisson", "Poisson equation for an axial target", {"solve_poisson"}, {Args{"oracle", "poisson", "--grid", "400"}}},
         oracle_poisson},
        {{"oracle", "phin", "finite-N potential approximant", {"phi_N_approximant"}, {Args{"oracle", "phin", "--n", "3", "--grid", "400"}}}, oracle_phin},
        {{"oracle", "calibrate", "Laplacian constant calibration", {"calibrate_laplacian"}, {Args{"oracle", "calibrate"}}}, oracle_calibrate},
        {{"oracle", "laplacian", "reduced Laplacian of a potential CSV", {"reduced_laplacian"}, {}}, oracle_laplacian},
        {{"oracle", "free-energy", "free energy of a density CSV", {"free_energy_functional"}, {}}, oracle_free_energy},
        {{"verify", "quick", "exact acceptance criteria", {"verify"}, {Args{"verify", "quick"}}}, verify_quick},
        {{"verify", "full", "all acceptance criteria", {"verify"}, {}}, verify_full},
    };
    return r;
}

const CommandDef& command_def(const std::string& name) {
    for (auto& c : commands())
        if (c.name == name) return c;
    throw ValidationError("unknown command " + name);
}

const Route& route(const std::string& cmd, const std::string& op) {
    for (auto& r : routes())
        if (r.entry.command == cmd && r.entry.op == op) return r;
    std::string ops;
    for (auto& r : routes())
        if (r.entry.command == cmd) ops += (ops.empty() ? "" : ", ") + r.entry.op;
    throw ValidationError("unknown operation '" + op + "' for " + cmd + " (expected " + ops + ")");
}

json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("config '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw ValidationError("config '" + path + "' must be a JSON object");
    return j;
}

int code_for(const Error& e) {
    if (dynamic_cast<const StabilityError*>(&e)) return exit_code::stability;
    if (dynamic_cast<const ConvergenceError*>(&e)) return exit_code::convergence;
    if (dynamic_cast<const OracleMismatchError*>(&e)) return exit_code::mismatch;
    return exit_code::validation;
}

void write_outputs(const std::filesystem::path& dir, const Result& r, const json& manifest) {
    std::filesystem::create_directories(dir);
    for (auto& [name, text] : r.files) {
        std::ofstream f(dir / name, std::ios::binary);
        f << text;
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    }
    std::ofstream m(dir / "manifest.jsonl", std::ios::app | std::ios::binary);
    m << manifest.dump() << "\n";
}

}  // namespace

const std::vector<DispatchEntry>& dispatch_table() {
    static const std::vector<DispatchEntry> t = [] {
        std::vector<DispatchEntry> v;
        for (auto& r : routes()) v.push_back(r.entry);
        return v;
    }();
    return t;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ke-zeta: partition functions, samplers and field oracles on log Fano curves", "ke-zeta"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kArtifactVersion);

    struct Bound {
        std::string op, config, out_dir;
        std::map<std::string, std::string> raw;
        std::map<std::string, CLI::Option*> opts;
    };
    std::map<std::string, Bound> bound;
    for (auto& cmd : commands()) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help);
        Bound& b = bound[cmd.name];
        sub->add_option("op", b.op, "operation (default " + cmd.default_op + ")");
        sub->add_option("--config", b.config, "JSON config; flags override its fields");
        sub->add_option("--out", b.out_dir, "output directory for manifest.jsonl and CSV payloads");
        for (auto& o : cmd.options) {
            if (o.kind == Kind::Flag) b.opts[o.name] = sub->add_flag("--" + o.name, o.help);
            else b.opts[o.name] = sub->add_option("--" + o.name, b.raw[o.name], o.help);
        }
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? exit_code::ok : exit_code::validation;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    Bound& b = bound[cmd];
    const CommandDef& def = command_def(cmd);
    try {
        json cfg = json::object();
        if (!b.config.empty()) cfg = read_config(b.config);
        if (cfg.contains("command") && cfg["command"] != cmd) throw ValidationError("config is for command " + cfg["command"].dump());
        std::string op = b.op;
        if (op.empty() && cfg.contains("op")) op = cfg["op"].get<std::string>();
        if (op.empty()) op = def.default_op;
        const Route& rt = route(cmd, op);

        json params = json::object();
        for (auto& o : def.options) {
            json v = o.def;
            if (cfg.contains(o.name)) v = cfg[o.name].is_null() ? json() : normalize(o, cfg[o.name]);
            if (b.opts[o.name]->count() > 0) v = o.kind == Kind::Flag ? json(true) : normalize(o, json(b.raw[o.name]));
            else if (!v.is_null()) v = normalize(o, v);
            params[o.name] = v;
        }
        for (auto& [k, v] : cfg.items()) {
            if (k == "command" || k == "op") continue;
            bool known = false;
            for (auto& o : def.options) known = known || o.name == k;
            if (!known) throw ValidationError("config field '" + k + "' is not an option of " + cmd);
        }

        const Params p(params);
        const auto t0 = std::chrono::steady_clock::now();
        Result r = rt.handler(p);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        json files = json::array();
        for (auto& f : r.files) files.push_back(f.first);
        json manifest{{"schema", kManifestSchema},
                      {"artifact_version", kArtifactVersion},
                      {"command", cmd},
                      {"op", op},
                      {"config", params},
                      {"config_file", b.config.empty() ? json() : json(b.config)},
                      {"wall_clock_seconds", secs},
                      {"result", r.result},
                      {"outcome", {{"status", r.exit == exit_code::ok ? "ok" : "mismatch"}, {"exit_code", r.exit}}},
                      {"outputs", b.out_dir.empty() ? json::array() : files}};
        if (!b.out_dir.empty()) write_outputs(b.out_dir, r, manifest);
        if (r.lines.empty()) out << manifest.dump(2) << "\n";
        else
            for (auto& l : r.lines) out << l << "\n";
        return r.exit;
    } catch (const Error& e) {
        const int rc = code_for(e);
        err << json{{"error", e.what()}, {"exit_code", rc}}.dump() << "\n";
        return rc;
    } catch (const std::exception& e) {
        err << json{{"error", e.what()}, {"exit_code", exit_code::internal}}.dump() << "\n";
        return exit_code::internal;
    }
}

}  // namespace kez
