#pragma once

// Exact meromorphic engine for finite products c * prod Gamma(a_i(p))^{e_i}
// whose arguments a_i are affine in named parameters with rational
// coefficients. Every closed-form partition function in the library is a
// GammaProduct; evaluation, cancellation of removable singularities and
// pole/zero enumeration all live here.

#include <complex>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kez/rational.hpp"

namespace kez {

using Complex = std::complex<double>;

// Principal-branch log Gamma (analytic continuation from the positive real
// axis, cut along the negative real axis; the same convention as
// mpmath.loggamma). Throws PoleError for z in {0, -1, -2, ...}.
Complex log_gamma(Complex z);
double log_gamma_real(double x);  // log|Gamma(x)|

// a(p) = sum_k coeffs[k] * p_k + constant, exact rationals.
class AffineArg {
public:
    AffineArg() = default;
    explicit AffineArg(Rational constant) : constant_(constant) {}
    AffineArg(std::map<std::string, Rational> coeffs, Rational constant);

    static AffineArg param(const std::string& name, Rational coeff = 1, Rational constant = 0);

    const std::map<std::string, Rational>& coeffs() const { return coeffs_; }
    Rational constant() const { return constant_; }
    Rational coeff(const std::string& name) const;
    bool is_constant() const { return coeffs_.empty(); }

    AffineArg operator+(const AffineArg& o) const;
    AffineArg operator-(const AffineArg& o) const;
    AffineArg operator-() const;
    AffineArg operator+(Rational c) const;
    AffineArg operator-(Rational c) const;
    friend AffineArg operator*(Rational s, const AffineArg& a);

    std::string str() const;

    friend bool operator==(const AffineArg&, const AffineArg&) = default;
    friend auto operator<=>(const AffineArg& a, const AffineArg& b) {
        if (auto c = a.coeffs_ <=> b.coeffs_; c != 0) return c;
        return a.constant_ <=> b.constant_;
    }

private:
    std::map<std::string, Rational> coeffs_;  // no zero entries
    Rational constant_;
};

struct GammaFactor {
    AffineArg arg;
    int exponent = 1;  // never 0 inside a canonical product
};

// c * prod Gamma(arg)^exponent, prefactor kept as a complex log.
class GammaProduct {
public:
    GammaProduct() = default;
    GammaProduct(Complex log_prefactor, std::vector<GammaFactor> factors, std::string note = {});

    static GammaProduct constant(double c, std::string note = {});
    static GammaProduct gamma(const AffineArg& arg, int exponent = 1);
    // l(x) = Gamma(x) / Gamma(1 - x), always expanded into two factors.
    static GammaProduct l_function(const AffineArg& arg, int exponent = 1);

    Complex log_prefactor() const { return log_prefactor_; }
    const std::vector<GammaFactor>& factors() const { return factors_; }
    const std::string& note() const { return note_; }
    void set_note(std::string note) { note_ = std::move(note); }

    std::set<std::string> parameters() const;

    GammaProduct operator*(const GammaProduct& o) const;
    GammaProduct& operator*=(const GammaProduct& o) { return *this = *this * o; }
    GammaProduct pow(int k) const;
    GammaProduct inverse() const { return pow(-1); }
    GammaProduct scaled_by_log(Complex log_c) const;

    nlohmann::json to_json() const;
    static GammaProduct from_json(const nlohmann::json& j);

    std::string str() const;

private:
    void canonicalize();

    Complex log_prefactor_{0.0, 0.0};
    std::vector<GammaFactor> factors_;
    std::string note_;
};

// A parameter value: exact rational (pole hits decided exactly) or a
// floating complex number (pole hits decided within kNearSingularTol).
using ParamValue = std::variant<Rational, Complex>;
using ParamPoint = std::map<std::string, ParamValue>;

inline constexpr double kNearSingularTol = 1e-9;

ParamPoint exact_point(const std::map<std::string, Rational>& values);
ParamPoint complex_point(const std::map<std::string, Complex>& values);

class MeroValue {
public:
    enum class Kind { Regular, Pole, Zero };

    static MeroValue regular(Complex log_value);
    static MeroValue pole(int order);
    static MeroValue zero(int order, std::optional<Complex> log_scaled_limit = std::nullopt);

    Kind kind() const { return kind_; }
    int order() const { return order_; }
    bool is_regular() const { return kind_ == Kind::Regular; }
    bool is_pole() const { return kind_ == Kind::Pole; }
    bool is_zero() const { return kind_ == Kind::Zero; }

    // Regular: the value. Zero: 0. Pole: complex infinity.
    Complex value() const;
    // Regular only: log-modulus and phase of the value; safe for products
    // whose modulus over/underflows double.
    double log_modulus() const;
    double phase() const;
    Complex log_value() const { return log_value_; }
    // Zero only: limit of value / eps^order along the approach direction.
    std::optional<Complex> scaled_limit() const;

    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

    std::string str() const;

private:
    Kind kind_ = Kind::Regular;
    int order_ = 0;
    Complex log_value_{0.0, 0.0};
    bool has_log_value_ = true;
    std::vector<std::string> warnings_;
};

// Classifies by net singular order; removable singularities are resolved by
// pairing the residues Gamma(z) ~ (-1)^n / (n! (z + n)) near z = -n.
MeroValue eval(const GammaProduct& gp, const ParamPoint& params);
MeroValue eval(const GammaProduct& gp, const std::map<std::string, Complex>& params);
MeroValue eval(const GammaProduct& gp, const std::map<std::string, Rational>& params);

struct LineParam {
    Rational slope;
    Rational intercept;
};

// Substitutes p = slope * t + intercept for every parameter of gp.
GammaProduct restrict_to_line(const GammaProduct& gp, const std::map<std::string, LineParam>& line,
                              const std::string& variable = "t");

struct SingularPoint {
    Rational location;
    int net_order = 0;  // > 0 pole, < 0 zero
};

// All t with re_min <= t <= re_max where some factor argument hits a
// nonpositive integer and the net order there is nonzero.
std::vector<SingularPoint> zeros_and_poles_in_strip(const GammaProduct& gp, Rational re_min, Rational re_max);
std::vector<SingularPoint> zeros_and_poles_in_strip(const GammaProduct& gp, double re_min, double re_max);

}  // namespace kez
