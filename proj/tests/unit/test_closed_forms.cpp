#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kez/closed_forms.hpp"
#include "kez/errors.hpp"

using namespace kez;

namespace {

constexpr double kPi = std::numbers::pi;

MeroValue at_w(const GammaProduct& gp, Rational a, Rational b, Rational c) {
    return eval(gp, std::map<std::string, Rational>{{"w1", a}, {"w2", b}, {"w3", c}});
}

MeroValue at(const GammaProduct& gp, const std::string& name, double x) {
    return eval(gp, std::map<std::string, Complex>{{name, {x, 0.0}}});
}

const Rational half(1, 2);

}  // namespace

TEST_CASE("selberg product values") {
    // Monte Carlo oracles (independent importance sampler, 2e5 samples):
    // N=2: 380.1 +- 2.8, N=3: 5916 +- 34, N=3 at 0.4^3: 4901 +- 63.
    auto v2 = at_w(selberg_gamma_product(2), half, half, half);
    REQUIRE(v2.is_regular());
    CHECK(v2.value().real() == doctest::Approx(378.1451).epsilon(1e-5));
    CHECK(std::abs(v2.value().imag()) < 1e-9);
    auto v3 = at_w(selberg_gamma_product(3), half, half, half);
    REQUIRE(v3.is_regular());
    CHECK(v3.value().real() == doctest::Approx(5904.80).epsilon(1e-5));
    auto v4 = at_w(selberg_gamma_product(3), Rational(2, 5), Rational(2, 5), Rational(2, 5));
    CHECK(v4.value().real() == doctest::Approx(4926.83).epsilon(1e-5));
    // symmetric in the three weights
    auto a = at_w(selberg_gamma_product(4), Rational(3, 5), half, Rational(2, 5));
    auto b = at_w(selberg_gamma_product(4), Rational(2, 5), Rational(3, 5), half);
    CHECK(std::abs(a.value() - b.value()) < 1e-9 * std::abs(a.value()));

    CHECK(at_w(selberg_gamma_product(3), 0, 0, 0).is_pole());
    CHECK_THROWS_AS(selberg_gamma_product(1), ValidationError);
}

TEST_CASE("selberg restricted to the diagonal line") {
    const auto gp = selberg_gamma_product(3);
    const auto line = restrict_to_line(gp, {{"w1", {1, 0}}, {"w2", {1, 0}}, {"w3", {1, 0}}});
    CHECK(line.parameters() == std::set<std::string>{"t"});
    const auto direct = at_w(gp, half, half, half);
    const auto via = eval(line, std::map<std::string, Rational>{{"t", half}});
    CHECK(std::abs(via.value() - direct.value()) < 1e-10 * std::abs(direct.value()));
}

TEST_CASE("cell rule equals the collision conditions") {
    int agree = 0;
    for (int N = 2; N <= 7; ++N)
        for (int a = -6; a <= 11; ++a)
            for (int b = -6; b <= 11; b += 2)
                for (int c = -3; c <= 11; c += 3) {
                    const std::array<Rational, 3> w{Rational(a, 10), Rational(b, 10), Rational(c, 10)};
                    CHECK(selberg_integral_converges(N, w) == selberg_integral_converges_direct(N, w));
                    ++agree;
                }
    CHECK(agree > 1000);
    // converging points give positive regular values
    for (int N = 2; N <= 6; ++N) {
        const std::array<Rational, 3> w{Rational(3, 10), Rational(1, 2), Rational(3, 5)};
        if (!selberg_integral_converges(N, w)) continue;
        auto v = at_w(selberg_gamma_product(N), w[0], w[1], w[2]);
        REQUIRE(v.is_regular());
        CHECK(v.value().real() > 0);
        CHECK(std::abs(v.value().imag()) < 1e-9 * v.value().real());
    }
}

TEST_CASE("pn minimal partition function") {
    for (int n = 1; n <= 6; ++n) {
        const auto z = pn_minimal_Z(n);
        CHECK(std::abs(at(z, "beta", 0.0).value() - 1.0) < 1e-12);
        const auto pts = zeros_and_poles_in_strip(z, Rational(-3), Rational(10));
        REQUIRE(!pts.empty());
        const Rational first(-1, n + 1);
        for (auto& p : pts) {
            CHECK(p.net_order > 0);  // no zeros anywhere after cancellation
            CHECK(p.location <= first);
        }
        CHECK(pts.back().location == first);
    }
    // n = 1 is exactly 1/(2 beta + 1)
    for (double b : {-0.3, 0.2, 1.7}) CHECK(at(pn_minimal_Z(1), "beta", b).value().real() == doctest::Approx(1 / (2 * b + 1)));
}

TEST_CASE("three point partition function") {
    const auto z = p1_three_point_Z();
    CHECK(at(z, "beta", 0.0).value().real() == doctest::Approx(kPi * kPi * kPi));
    // beta = 1 by Andreief: 3! prod_k pi B(k+1, 3-k) = pi^3 / 9
    CHECK(at(z, "beta", 1.0).value().real() == doctest::Approx(kPi * kPi * kPi / 9).epsilon(1e-13));
    auto pts = zeros_and_poles_in_strip(z, Rational(-1), Rational(0));
    REQUIRE(!pts.empty());
    CHECK(pts.back().location == Rational(-2, 3));
    CHECK(pts.back().net_order > 0);
    CHECK(p1_three_point_sphere_log_Z(0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(p1_three_point_sphere_log_Z(-0.7), StabilityError);
}

TEST_CASE("circular ensemble") {
    for (int N = 2; N <= 6; ++N) {
        const auto z = circular_Z(N);
        CHECK(at(z, "beta", 0.0).value().real() == doctest::Approx(std::pow(2 * kPi, N)));
        auto pts = zeros_and_poles_in_strip(z, Rational(-1), Rational(0));
        REQUIRE(!pts.empty());
        CHECK(pts.back().location == Rational(-(N - 1), N));
    }
    CHECK(at(circular_Z(3), "beta", 1.0).value().real() == doctest::Approx(48 * kPi * kPi).epsilon(1e-13));
    // N = 2, beta = 1: int |e^{ia} - e^{ib}|^2 = 2 (2 pi)^2
    CHECK(at(circular_Z(2), "beta", 1.0).value().real() == doctest::Approx(8 * kPi * kPi));
}

TEST_CASE("gaussian determinant") {
    const auto z = gaussian_det_Z(1);
    CHECK(at(z, "s", 0.0).value().real() == doctest::Approx(std::pow(kPi, 4)));
    CHECK((at(z, "s", 1.0).value() / at(z, "s", 0.0).value()).real() == doctest::Approx(2.0));
    for (int n = 0; n <= 4; ++n) {
        const auto g = gaussian_det_Z(n);
        const double s = 0.5;
        double b = 1;
        for (int j = 1; j <= n + 1; ++j) b *= s + j;
        CHECK((at(g, "s", s + 1).value() / at(g, "s", s).value()).real() == doctest::Approx(b).epsilon(1e-12));
    }
    CHECK((at(z, "s", 1.5).value() / at(z, "s", 0.5).value()).real() == doctest::Approx(3.75));
}

TEST_CASE("zero-free tube analysis") {
    SUBCASE("reciprocal gamma") {
        const auto g = GammaProduct::gamma(AffineArg::param("x"), -1);
        TubeDomain d;
        d.greater({{"x", 1}}, Rational(1, 2));
        CHECK(zero_free_in_tube(g, d).zero_free);
        TubeDomain wide;
        wide.greater({{"x", 1}}, Rational(-5, 2));
        const auto r = zero_free_in_tube(g, wide);
        REQUIRE_FALSE(r.zero_free);
        CHECK(r.witness->at("x").is_nonpositive_integer());
    }
    SUBCASE("selberg on the positive cube") {
        for (int N = 2; N <= 8; ++N) {
            const auto r = zero_free_in_tube(selberg_gamma_product(N), TubeDomain::selberg_positive_cube());
            CHECK_MESSAGE(r.zero_free, "N=" << N);
            CHECK(r.hyperplanes_checked > 0);
        }
    }
    SUBCASE("selberg on the larger tube has zeros at w_i = 0") {
        for (int N = 2; N <= 8; ++N) {
            const auto r = zero_free_in_tube(selberg_gamma_product(N), TubeDomain::selberg_omega());
            REQUIRE_FALSE(r.zero_free);
            const auto& w = *r.witness;
            CHECK(TubeDomain::selberg_omega().contains(w));
            CHECK(at_w(selberg_gamma_product(N), w.at("w1"), w.at("w2"), w.at("w3")).is_zero());
        }
    }
    SUBCASE("widened cube yields a validated witness") {
        TubeDomain d = TubeDomain::selberg_positive_cube();
        d.constraints[0].bound = 2;  // Re w1 < 2
        const auto r = zero_free_in_tube(selberg_gamma_product(3), d);
        REQUIRE_FALSE(r.zero_free);
        const auto& w = *r.witness;
        CHECK(d.contains(w));
        CHECK(at_w(selberg_gamma_product(3), w.at("w1"), w.at("w2"), w.at("w3")).is_zero());
    }
    SUBCASE("diagonal segment inside the cube") {
        const auto line = restrict_to_line(selberg_gamma_product(4), {{"w1", {1, 0}}, {"w2", {1, 0}}, {"w3", {1, 0}}});
        TubeDomain d;
        d.greater({{"t", 1}}, Rational(1, 5)).less({{"t", 1}}, Rational(3, 5));
        CHECK(zero_free_in_tube(line, d).zero_free);
    }
}
