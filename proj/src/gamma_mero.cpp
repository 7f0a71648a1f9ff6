#include "kez/gamma_mero.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kez/errors.hpp"

namespace kez {

namespace {

constexpr double kPi = std::numbers::pi;

// B_{2k} for k = 1..10.
constexpr double kBernoulli[] = {1.0 / 6.0,      -1.0 / 30.0,      1.0 / 42.0,         -1.0 / 30.0,
                                 5.0 / 66.0,     -691.0 / 2730.0,  7.0 / 6.0,          -3617.0 / 510.0,
                                 43867.0 / 798.0, -174611.0 / 330.0};

Complex stirling(Complex w) {
    const Complex inv = 1.0 / w;
    const Complex inv2 = inv * inv;
    Complex series = 0.0;
    Complex p = inv;
    for (int k = 1; k <= 10; ++k) {
        series += kBernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * p;
        p *= inv2;
    }
    return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * kPi) + series;
}

Complex reduce_phase(Complex lv) {
    double im = std::remainder(lv.imag(), 2.0 * kPi);
    return {lv.real(), im};
}

}  // namespace

double log_gamma_real(double x) {
    if (x <= 0 && x == std::floor(x)) throw PoleError("log_gamma: pole at " + std::to_string(x));
    return std::lgamma(x);
}

Complex log_gamma(Complex z) {
    if (z.imag() == 0.0) {
        const double x = z.real();
        const double re = log_gamma_real(x);
        if (x > 0) return {re, 0.0};
        return {re, -kPi * std::ceil(-x)};
    }
    // Shift into the Stirling region; each log(z + j) stays on one side of
    // the real axis, so the sum continues the principal branch.
    Complex w = z;
    Complex acc = 0.0;
    while (w.real() < 15.0) {
        acc += std::log(w);
        w += 1.0;
    }
    return stirling(w) - acc;
}

// ---------------------------------------------------------------- AffineArg

AffineArg::AffineArg(std::map<std::string, Rational> coeffs, Rational constant) : constant_(constant) {
    for (auto& [k, v] : coeffs)
        if (!v.is_zero()) coeffs_.emplace(k, v);
}

AffineArg AffineArg::param(const std::string& name, Rational coeff, Rational constant) {
    return AffineArg({{name, coeff}}, constant);
}

Rational AffineArg::coeff(const std::string& name) const {
    auto it = coeffs_.find(name);
    return it == coeffs_.end() ? Rational(0) : it->second;
}

AffineArg AffineArg::operator+(const AffineArg& o) const {
    auto c = coeffs_;
    for (auto& [k, v] : o.coeffs_) c[k] += v;
    return AffineArg(std::move(c), constant_ + o.constant_);
}

AffineArg AffineArg::operator-(const AffineArg& o) const { return *this + (-o); }

AffineArg AffineArg::operator-() const { return Rational(-1) * *this; }

AffineArg AffineArg::operator+(Rational c) const {
    AffineArg r = *this;
    r.constant_ += c;
    return r;
}

AffineArg AffineArg::operator-(Rational c) const { return *this + (-c); }

AffineArg operator*(Rational s, const AffineArg& a) {
    std::map<std::string, Rational> c;
    for (auto& [k, v] : a.coeffs_) c[k] = s * v;
    return AffineArg(std::move(c), s * a.constant_);
}

std::string AffineArg::str() const {
    std::ostringstream os;
    bool first = true;
    for (auto& [k, v] : coeffs_) {
        if (!first) os << (v < Rational(0) ? " - " : " + ");
        else if (v < Rational(0)) os << "-";
        const Rational a = v < Rational(0) ? -v : v;
        if (a != Rational(1)) os << a.str() << "*";
        os << k;
        first = false;
    }
    if (first) return constant_.str();
    if (!constant_.is_zero()) {
        os << (constant_ < Rational(0) ? " - " : " + ") << (constant_ < Rational(0) ? -constant_ : constant_).str();
    }
    return os.str();
}

// ------------------------------------------------------------- GammaProduct

GammaProduct::GammaProduct(Complex log_prefactor, std::vector<GammaFactor> factors, std::string note)
    : log_prefactor_(log_prefactor), factors_(std::move(factors)), note_(std::move(note)) {
    if (!std::isfinite(log_prefactor_.real()) || !std::isfinite(log_prefactor_.imag()))
        throw ValidationError("GammaProduct prefactor must be nonzero and finite");
    canonicalize();
}

GammaProduct GammaProduct::constant(double c, std::string note) {
    if (c == 0.0 || !std::isfinite(c)) throw ValidationError("GammaProduct prefactor must be nonzero and finite");
    return GammaProduct(std::log(Complex(c, 0.0)), {}, std::move(note));
}

GammaProduct GammaProduct::gamma(const AffineArg& arg, int exponent) {
    return GammaProduct({0.0, 0.0}, {GammaFactor{arg, exponent}});
}

GammaProduct GammaProduct::l_function(const AffineArg& arg, int exponent) {
    return GammaProduct({0.0, 0.0}, {GammaFactor{arg, exponent}, GammaFactor{(-arg) + Rational(1), -exponent}});
}

void GammaProduct::canonicalize() {
    std::sort(factors_.begin(), factors_.end(),
              [](const GammaFactor& a, const GammaFactor& b) { return a.arg < b.arg; });
    std::vector<GammaFactor> merged;
    for (auto& f : factors_) {
        if (!merged.empty() && merged.back().arg == f.arg) merged.back().exponent += f.exponent;
        else merged.push_back(f);
    }
    std::erase_if(merged, [](const GammaFactor& f) { return f.exponent == 0; });
    factors_ = std::move(merged);
}

std::set<std::string> GammaProduct::parameters() const {
    std::set<std::string> out;
    for (auto& f : factors_)
        for (auto& [k, v] : f.arg.coeffs()) out.insert(k);
    return out;
}

GammaProduct GammaProduct::operator*(const GammaProduct& o) const {
    auto f = factors_;
    f.insert(f.end(), o.factors_.begin(), o.factors_.end());
    std::string note = note_;
    if (!o.note_.empty()) note = note.empty() ? o.note_ : note + "; " + o.note_;
    return GammaProduct(log_prefactor_ + o.log_prefactor_, std::move(f), std::move(note));
}

GammaProduct GammaProduct::pow(int k) const {
    auto f = factors_;
    for (auto& x : f) x.exponent *= k;
    return GammaProduct(static_cast<double>(k) * log_prefactor_, std::move(f), note_);
}

GammaProduct GammaProduct::scaled_by_log(Complex log_c) const {
    GammaProduct r = *this;
    r.log_prefactor_ += log_c;
    return r;
}

nlohmann::json GammaProduct::to_json() const {
    nlohmann::json j;
    j["prefactor_log"] = {log_prefactor_.real(), log_prefactor_.imag()};
    if (!note_.empty()) j["prefactor_sign_note"] = note_;
    auto arr = nlohmann::json::array();
    for (auto& f : factors_) {
        nlohmann::json c = nlohmann::json::object();
        for (auto& [k, v] : f.arg.coeffs()) c[k] = v.str();
        arr.push_back({{"coeffs", c}, {"constant", f.arg.constant().str()}, {"exponent", f.exponent}});
    }
    j["factors"] = arr;
    return j;
}

GammaProduct GammaProduct::from_json(const nlohmann::json& j) {
    try {
        const auto& pl = j.at("prefactor_log");
        if (!pl.is_array() || pl.size() != 2) throw ValidationError("prefactor_log must be [re, im]");
        std::vector<GammaFactor> factors;
        for (const auto& f : j.at("factors")) {
            std::map<std::string, Rational> coeffs;
            for (auto& [k, v] : f.at("coeffs").items()) coeffs[k] = Rational::parse(v.get<std::string>());
            const int e = f.at("exponent").get<int>();
            if (e == 0) throw ValidationError("factor exponent must be nonzero");
            factors.push_back({AffineArg(coeffs, Rational::parse(f.at("constant").get<std::string>())), e});
        }
        std::string note = j.contains("prefactor_sign_note") ? j["prefactor_sign_note"].get<std::string>() : "";
        return GammaProduct({pl[0].get<double>(), pl[1].get<double>()}, std::move(factors), std::move(note));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed GammaProduct JSON: ") + e.what());
    }
}

std::string GammaProduct::str() const {
    std::ostringstream os;
    os.precision(17);
    os << "exp(" << log_prefactor_.real();
    if (log_prefactor_.imag() != 0.0) os << (log_prefactor_.imag() < 0 ? " - " : " + ") << std::abs(log_prefactor_.imag()) << "i";
    os << ")";
    for (auto& f : factors_) {
        os << " * Gamma(" << f.arg.str() << ")";
        if (f.exponent != 1) os << "^" << f.exponent;
    }
    return os.str();
}

// ---------------------------------------------------------------- MeroValue

MeroValue MeroValue::regular(Complex log_value) {
    MeroValue v;
    v.kind_ = Kind::Regular;
    v.log_value_ = reduce_phase(log_value);
    return v;
}

MeroValue MeroValue::pole(int order) {
    MeroValue v;
    v.kind_ = Kind::Pole;
    v.order_ = order;
    v.has_log_value_ = false;
    return v;
}

MeroValue MeroValue::zero(int order, std::optional<Complex> log_scaled_limit) {
    MeroValue v;
    v.kind_ = Kind::Zero;
    v.order_ = order;
    v.has_log_value_ = log_scaled_limit.has_value();
    if (log_scaled_limit) v.log_value_ = reduce_phase(*log_scaled_limit);
    return v;
}

Complex MeroValue::value() const {
    switch (kind_) {
        case Kind::Regular: return std::exp(log_value_);
        case Kind::Zero: return {0.0, 0.0};
        case Kind::Pole: break;
    }
    return {std::numeric_limits<double>::infinity(), 0.0};
}

double MeroValue::log_modulus() const {
    if (kind_ != Kind::Regular) throw UnsupportedError("log_modulus of a non-regular value");
    return log_value_.real();
}

double MeroValue::phase() const {
    if (kind_ != Kind::Regular) throw UnsupportedError("phase of a non-regular value");
    return log_value_.imag();
}

std::optional<Complex> MeroValue::scaled_limit() const {
    if (kind_ != Kind::Zero || !has_log_value_) return std::nullopt;
    return std::exp(log_value_);
}

std::string MeroValue::str() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::Regular: os << "Regular(" << value() << ")"; break;
        case Kind::Pole: os << "Pole(" << order_ << ")"; break;
        case Kind::Zero: os << "Zero(" << order_ << ")"; break;
    }
    return os.str();
}

// --------------------------------------------------------------------- eval

ParamPoint exact_point(const std::map<std::string, Rational>& values) {
    ParamPoint p;
    for (auto& [k, v] : values) p[k] = v;
    return p;
}

ParamPoint complex_point(const std::map<std::string, Complex>& values) {
    ParamPoint p;
    for (auto& [k, v] : values) p[k] = v;
    return p;
}

namespace {

struct ArgValue {
    bool exact = false;
    Rational q;
    Complex z;
};

ArgValue evaluate_arg(const AffineArg& a, const ParamPoint& params) {
    bool exact = true;
    for (auto& [k, c] : a.coeffs()) {
        auto it = params.find(k);
        if (it == params.end()) throw ValidationError("parameter '" + k + "' missing from evaluation point");
        if (!std::holds_alternative<Rational>(it->second)) exact = false;
    }
    ArgValue out;
    out.exact = exact;
    if (exact) {
        Rational q = a.constant();
        for (auto& [k, c] : a.coeffs()) q += c * std::get<Rational>(params.at(k));
        out.q = q;
        out.z = q.to_double();
    } else {
        Complex z = a.constant().to_double();
        for (auto& [k, c] : a.coeffs()) {
            const auto& v = params.at(k);
            const Complex pv = std::holds_alternative<Rational>(v) ? Complex(std::get<Rational>(v).to_double())
                                                                   : std::get<Complex>(v);
            z += c.to_double() * pv;
        }
        out.z = z;
    }
    return out;
}

struct Singular {
    long n = 0;  // argument = -n
    int exponent = 0;
    const AffineArg* arg = nullptr;
};

// Slope of an argument along a parameter-space direction.
Rational directional_slope(const AffineArg& a, const std::vector<std::string>& names,
                           const std::vector<Rational>& dir) {
    Rational s = 0;
    for (std::size_t i = 0; i < names.size(); ++i) s += a.coeff(names[i]) * dir[i];
    return s;
}

std::vector<std::vector<Rational>> candidate_directions(std::size_t dim) {
    std::vector<std::vector<Rational>> out;
    const std::int64_t bases[] = {1, 2, 3, 5, 7, 11};
    for (std::int64_t b : bases) {
        std::vector<Rational> d(dim);
        std::int64_t v = 1;
        for (std::size_t i = 0; i < dim; ++i) {
            d[i] = Rational(v);
            v = (b == 1) ? 1 : v * b;
            if (v > 1000000) v = 1;
        }
        out.push_back(std::move(d));
    }
    // alternating-sign directions for arguments that cancel along the above
    for (std::int64_t b : {2, 3}) {
        std::vector<Rational> d(dim);
        std::int64_t v = 1;
        for (std::size_t i = 0; i < dim; ++i) {
            d[i] = Rational(i % 2 ? -v : v);
            v *= b;
        }
        out.push_back(std::move(d));
    }
    return out;
}

// log of prod_i [(-1)^n_i / (n_i! * slope_i)]^{e_i}
std::optional<Complex> residue_log(const std::vector<Singular>& sing, const std::vector<std::string>& names,
                                   const std::vector<Rational>& dir) {
    Complex acc = 0.0;
    for (auto& s : sing) {
        const Rational lam = directional_slope(*s.arg, names, dir);
        if (lam.is_zero()) return std::nullopt;
        Complex term = -std::lgamma(static_cast<double>(s.n) + 1.0);
        if (s.n % 2) term += Complex(0.0, kPi);
        term -= std::log(Complex(lam.to_double(), 0.0));
        acc += static_cast<double>(s.exponent) * term;
    }
    return acc;
}

}  // namespace

MeroValue eval(const GammaProduct& gp, const ParamPoint& params) {
    Complex log_regular = gp.log_prefactor();
    std::vector<Singular> singular;
    std::vector<std::string> warnings;
    int net = 0;
    bool constant_singular = false;

    for (const auto& f : gp.factors()) {
        const ArgValue v = evaluate_arg(f.arg, params);
        bool hit = false;
        long n = 0;
        if (v.exact) {
            if (v.q.is_nonpositive_integer()) {
                hit = true;
                n = static_cast<long>(-v.q.num());
            }
        } else {
            const double re = v.z.real();
            const double nearest = std::round(re);
            if (std::abs(v.z.imag()) <= kNearSingularTol && nearest <= 0.0 && std::abs(re - nearest) <= kNearSingularTol) {
                hit = true;
                n = static_cast<long>(-nearest);
                if (v.z != Complex(nearest, 0.0))
                    warnings.push_back("argument " + f.arg.str() + " within proximity tolerance of pole at " +
                                       std::to_string(static_cast<long>(nearest)));
            }
        }
        if (hit) {
            net += f.exponent;
            singular.push_back({n, f.exponent, &f.arg});
            if (f.arg.is_constant()) constant_singular = true;
        } else {
            log_regular += static_cast<double>(f.exponent) * log_gamma(v.z);
        }
    }

    auto attach = [&](MeroValue m) {
        for (auto& w : warnings) m.add_warning(w);
        return m;
    };

    if (net > 0) return attach(MeroValue::pole(net));
    if (singular.empty()) return attach(MeroValue::regular(log_regular));
    if (constant_singular) {
        if (net < 0) return attach(MeroValue::zero(-net));
        throw UnsupportedError("product has a constant factor sitting on a pole; removable limit undefined");
    }

    const auto names_set = gp.parameters();
    const std::vector<std::string> names(names_set.begin(), names_set.end());
    std::optional<Complex> first;
    std::vector<Rational> first_dir;
    bool direction_dependent = false;
    for (const auto& dir : candidate_directions(names.size())) {
        auto r = residue_log(singular, names, dir);
        if (!r) continue;
        if (!first) {
            first = r;
            first_dir = dir;
        } else if (std::abs(std::exp(*r - *first) - 1.0) > 1e-12) {
            direction_dependent = true;
            break;
        }
    }
    if (!first) throw UnsupportedError("no admissible approach direction for removable singularity");
    if (direction_dependent) {
        std::string d;
        for (std::size_t i = 0; i < names.size(); ++i) d += (i ? "," : "") + names[i] + "=" + first_dir[i].str();
        warnings.push_back("limit depends on the approach direction; reported along (" + d + ")");
    }
    if (net < 0) return attach(MeroValue::zero(-net, log_regular + *first));
    return attach(MeroValue::regular(log_regular + *first));
}

MeroValue eval(const GammaProduct& gp, const std::map<std::string, Complex>& params) {
    return eval(gp, complex_point(params));
}

MeroValue eval(const GammaProduct& gp, const std::map<std::string, Rational>& params) {
    return eval(gp, exact_point(params));
}

// ------------------------------------------------------- line restrictions

GammaProduct restrict_to_line(const GammaProduct& gp, const std::map<std::string, LineParam>& line,
                              const std::string& variable) {
    std::vector<GammaFactor> out;
    for (const auto& f : gp.factors()) {
        Rational slope = 0;
        Rational c = f.arg.constant();
        for (auto& [k, coeff] : f.arg.coeffs()) {
            auto it = line.find(k);
            if (it == line.end()) throw ValidationError("line does not cover parameter '" + k + "'");
            slope += coeff * it->second.slope;
            c += coeff * it->second.intercept;
        }
        out.push_back({AffineArg({{variable, slope}}, c), f.exponent});
    }
    return GammaProduct(gp.log_prefactor(), std::move(out), gp.note());
}

std::vector<SingularPoint> zeros_and_poles_in_strip(const GammaProduct& gp, Rational re_min, Rational re_max) {
    const auto params = gp.parameters();
    if (params.size() > 1) throw ValidationError("zeros_and_poles_in_strip needs a single-parameter product");
    if (re_max < re_min) throw ValidationError("empty strip");
    const std::string var = params.empty() ? std::string() : *params.begin();

    std::set<Rational> candidates;
    for (const auto& f : gp.factors()) {
        const Rational s = params.empty() ? Rational(0) : f.arg.coeff(var);
        const Rational c = f.arg.constant();
        if (s.is_zero()) {
            if (c.is_nonpositive_integer())
                throw UnsupportedError("constant factor Gamma(" + c.str() + ") makes the product identically singular");
            continue;
        }
        Rational a_lo = s * re_min + c;
        Rational a_hi = s * re_max + c;
        if (a_hi < a_lo) std::swap(a_lo, a_hi);
        // argument = -n for n >= 0 within [a_lo, a_hi]
        const std::int64_t n_min = std::max<std::int64_t>(0, (-a_hi).ceil());
        const std::int64_t n_max = (-a_lo).floor();
        if (n_max - n_min > 1000000) throw UnsupportedError("strip contains too many singular points");
        for (std::int64_t n = n_min; n <= n_max; ++n) candidates.insert((Rational(-n) - c) / s);
    }

    std::vector<SingularPoint> out;
    for (const Rational& t : candidates) {
        int order = 0;
        for (const auto& f : gp.factors()) {
            const Rational s = f.arg.coeff(var);
            if (s.is_zero()) continue;
            if ((s * t + f.arg.constant()).is_nonpositive_integer()) order += f.exponent;
        }
        if (order != 0) out.push_back({t, order});
    }
    return out;
}

std::vector<SingularPoint> zeros_and_poles_in_strip(const GammaProduct& gp, double re_min, double re_max) {
    return zeros_and_poles_in_strip(gp, Rational::from_double(re_min), Rational::from_double(re_max));
}

}  // namespace kez
