#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "kez/errors.hpp"
#include "kez/random.hpp"
#include "kez/sphere_geom.hpp"
#include "kez/stability.hpp"

using namespace kez;

namespace {

std::complex<double> random_z(Rng& rng, double scale) {
    const double r = scale * std::pow(rng.uniform(), 2.0);
    const double a = 2 * std::numbers::pi * rng.uniform();
    return std::polar(r, a);
}

// rotation from a random unit quaternion
std::array<Vec3, 3> random_rotation(Rng& rng) {
    double q[4];
    double n = 0;
    for (double& v : q) {
        v = rng.normal();
        n += v * v;
    }
    n = std::sqrt(n);
    for (double& v : q) v /= n;
    const double a = q[0], b = q[1], c = q[2], d = q[3];
    return {{{a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
             {2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)},
             {2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d}}};
}

SpherePoint rotate_point(const std::array<Vec3, 3>& m, const SpherePoint& p) {
    Vec3 o{};
    for (int i = 0; i < 3; ++i) o[i] = m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2];
    return SpherePoint(o);
}

}  // namespace

TEST_CASE("chart examples") {
    auto s = stereo_to_sphere(PlaneCoord({0.0, 0.0}));
    CHECK(s[2] == -1.0);
    CHECK(stereo_to_sphere(PlaneCoord::infinity()) == SpherePoint::north());
    CHECK(std::abs(stereo_to_sphere(PlaneCoord(std::polar(1.0, 0.7)))[2]) < 1e-15);
    CHECK(sphere_to_stereo(SpherePoint::north()).is_infinity());
    CHECK(std::abs(sphere_to_stereo(SpherePoint::south()).z()) == 0.0);
    CHECK(std::abs(std::abs(sphere_to_stereo(SpherePoint(1, 0, 0)).z()) - 1.0) < 1e-15);
    auto one = stereo_to_sphere(PlaneCoord({1.0, 0.0}));
    CHECK(one[0] == doctest::Approx(1.0));
}

TEST_CASE("chart round trip on 1e4 random points") {
    Rng rng(11);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto z = random_z(rng, 1e6);
        const auto back = sphere_to_stereo(stereo_to_sphere(PlaneCoord(z))).z();
        worst = std::max(worst, std::abs(back - z) / std::max(1.0, std::abs(z)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("chordal kappa is constant and equals the pinned value") {
    Rng rng(3);
    auto kappa = [](std::complex<double> z, std::complex<double> w) {
        const double c2 = chordal_sq(stereo_to_sphere(PlaneCoord(z)), stereo_to_sphere(PlaneCoord(w)));
        return c2 * (1 + std::norm(z)) * (1 + std::norm(w)) / std::norm(z - w);
    };
    // determined from three pairs
    const double k0 = (kappa({0.3, 0.1}, {-1.2, 0.4}) + kappa({2.0, -1.0}, {0.0, 0.5}) + kappa({5.0, 5.0}, {-0.1, 0.0})) / 3;
    CHECK(std::abs(k0 - kChordalKappa) < 1e-12);
    for (int i = 0; i < 1000; ++i) {
        const auto z = random_z(rng, 10.0), w = random_z(rng, 10.0);
        if (std::abs(z - w) < 1e-3) continue;
        CHECK(std::abs(kappa(z, w) - k0) < 1e-10);
    }
}

TEST_CASE("green values and mean value property") {
    CHECK(green(SpherePoint::north(), SpherePoint::south()) == doctest::Approx(-std::log(2.0)));
    CHECK_THROWS_AS(green(SpherePoint::north(), SpherePoint::north()), CoincidenceError);
    const SpherePoint a(1, 0, 0);
    const auto b = point_at_chordal(a, 1.0, 0.3);
    CHECK(std::abs(green(a, b)) < 1e-14);
    // In polar coordinates about any x, u = (1 - cos alpha)/2 is uniform
    // under dsigma and the chordal distance is 2 sqrt(u); with u = v^2:
    //   int green dsigma = -int_0^1 2 v log(2 v) dv = -(log 2 - 1/2).
    double s = 0;
    const int n = 2000;
    for (int k = 0; k < n; ++k)
        for (double g : {-0.5773502691896257, 0.5773502691896257}) {
            const double v = (k + 0.5 + 0.5 * g) / n;
            s += 0.5 / n * -2 * v * std::log(2 * v);
        }
    CHECK(std::abs(s + (std::log(2.0) - 0.5)) < 1e-8);
    // Monte Carlo check of constancy in x
    Rng rng(5);
    for (const SpherePoint& x : {SpherePoint::north(), SpherePoint(1, 1, 0), SpherePoint(0.2, -0.3, 0.9)}) {
        double s = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) s += green(x, sample_uniform(rng));
        CHECK(std::abs(s / n + (std::log(2.0) - 0.5)) < 5e-3);
    }
}

TEST_CASE("config energy examples and invariances") {
    const PointConfiguration two({SpherePoint::north(), SpherePoint::south()});
    CHECK(config_energy(two, 2.0) == doctest::Approx(-2.0 * std::log(2.0)));
    CHECK(config_energy(two, 1.0) == doctest::Approx(0.5 * config_energy(two, 2.0)));
    const double r3 = std::sqrt(3.0) / 2;
    const PointConfiguration tri({SpherePoint(1, 0, 0), SpherePoint(-0.5, r3, 0), SpherePoint(-0.5, -r3, 0)});
    CHECK(config_energy(tri, 1.5) == doctest::Approx(-1.5 * std::log(std::sqrt(3.0))).epsilon(1e-13));

    Rng rng(9);
    std::vector<SpherePoint> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(sample_uniform(rng));
    const PointConfiguration c(pts);
    const auto rot = random_rotation(rng);
    std::vector<SpherePoint> rp;
    for (auto& p : pts) rp.push_back(rotate_point(rot, p));
    CHECK(std::abs(config_energy(c, 2.0) - config_energy(PointConfiguration(rp), 2.0)) < 1e-12);

    const LogFanoCurve curve({PlaneCoord::infinity()}, {0.5});
    CHECK(config_energy(c, curve) == doctest::Approx(config_energy(c, 1.5)));
    CHECK_THROWS_AS(PointConfiguration({SpherePoint::north()}), ValidationError);
    CHECK_THROWS_AS(PointConfiguration({SpherePoint::north(), SpherePoint::north()}), CoincidenceError);
}

TEST_CASE("uniform sampler") {
    Rng rng(2024);
    const int n = 1000000;
    double mean = 0, c2 = 0;
    SpherePoint prev = sample_uniform(rng);
    std::vector<double> ts;
    for (int i = 0; i < n; ++i) {
        const auto p = sample_uniform(rng);
        mean += p[2];
        c2 += chordal_sq(p, prev);
        prev = p;
        if (i < 100000) ts.push_back(p[2]);
    }
    CHECK(std::abs(mean / n) < 3e-3);
    CHECK(std::abs(c2 / n - 2.0) < 1e-2);
    std::sort(ts.begin(), ts.end());
    double ks = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double f = (ts[i] + 1) / 2;
        ks = std::max({ks, std::abs(f - double(i) / ts.size()), std::abs(f - double(i + 1) / ts.size())});
    }
    CHECK(ks < 1.63 / std::sqrt(double(ts.size())));
}

TEST_CASE("configuration io") {
    const PointConfiguration c({SpherePoint::north(), SpherePoint(1, 0, 0), SpherePoint(0.1, 0.2, -0.5)});
    std::istringstream in(c.to_csv());
    const auto back = PointConfiguration::from_csv(in);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(chordal(c[i], back[i]) < 1e-15);
    const auto jb = PointConfiguration::from_json(c.to_json());
    CHECK(jb[0] == SpherePoint::north());
    CHECK(chordal(jb[2], c[2]) < 1e-14);
    CHECK(PlaneCoord::parse("1.5-2i").z() == std::complex<double>(1.5, -2));
    CHECK(PlaneCoord::parse("inf").is_infinity());
    CHECK_THROWS_AS(PlaneCoord::parse("abc"), ValidationError);
}

TEST_CASE("weight condition and classification") {
    CHECK(weight_condition({0.5, 0.5, 0.5}));
    CHECK_FALSE(weight_condition({0.9, 0.1, 0.1}));
    CHECK_FALSE(weight_condition({0.6, 0.6}));
    CHECK_FALSE(weight_condition({0.3, 0.2, 0.1}));  // borderline equality is unstable
    CHECK(weight_condition({}));  // vacuous: trivial divisor is stable
    CHECK(classify({0.5, 0.5, 0.5}).kind == StabilityClass::GibbsStable);
    CHECK(classify({0.9, 0.1, 0.1}).kind == StabilityClass::NotGibbsStable);
    CHECK(classify({1.2, 0.3}).kind == StabilityClass::NotLogFano);
    CHECK(classify({0.9, 0.9, 0.5}).kind == StabilityClass::NotLogFano);
}

TEST_CASE("gamma threshold") {
    for (int N = 2; N <= 20; ++N) CHECK(gamma_threshold({}, N) == doctest::Approx(double(N - 1) / N));
    CHECK(gamma_threshold({0.5, 0.5, 0.5}, 3) == doctest::Approx(2.0));
    CHECK(gamma_threshold({0.5, 0.5, 0.5}, 2) == doctest::Approx(2.0));
    CHECK(gamma_threshold({0.2, 0.3}, 4) == doctest::Approx(2.0 / 1.5 * 0.7));
    // permutation invariance and monotone approach to the limit
    CHECK(gamma_threshold({0.1, 0.6, 0.3}, 5) == gamma_threshold({0.6, 0.3, 0.1}, 5));
    const std::vector<double> w{0.55, 0.4, 0.3};
    double prev = 0;
    for (int N = 2; N <= 200; ++N) {
        const double g = gamma_threshold(w, N);
        CHECK(g >= prev);
        CHECK(g <= classify(w).limit_threshold + 1e-15);
        prev = g;
    }
    CHECK(prev == doctest::Approx(classify(w).limit_threshold));
    // stable curve: finite at beta = -1 for all large N
    auto v = classify(w, 50);
    CHECK(v.kind == StabilityClass::GibbsStable);
    CHECK(v.stable_at_level_N.value());
    CHECK_FALSE(classify(std::vector<double>{}, 50).stable_at_level_N.value());
}

TEST_CASE("lct of point divisors") {
    CHECK(lct_point_divisor({2.0}) == doctest::Approx(0.5));
    CHECK(lct_point_divisor({1.0}) == doctest::Approx(1.0));
    CHECK(lct_point_divisor({1.0, 3.0}) == doctest::Approx(1.0 / 3.0));
    CHECK(radial_integral_finite(0.999));
    CHECK_FALSE(radial_integral_finite(1.001));
    CHECK_THROWS_AS(lct_point_divisor({}), ValidationError);
}
