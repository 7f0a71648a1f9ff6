#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kez/errors.hpp"
#include "kez/field_oracle.hpp"
#include "kez/quadrature.hpp"
#include "kez/random.hpp"
#include "kez/sphere_geom.hpp"

using namespace kez;

namespace {

constexpr double kPi = std::numbers::pi;

double exp_target(double t) { return std::exp(t) / (std::exp(1.0) - std::exp(-1.0)); }

double sup_diff(const AxialField& a, const AxialField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s = std::max(s, std::abs(a.values[k] - b.values[k]));
    return s;
}

LogFanoCurve north_curve(double w) { return LogFanoCurve({PlaneCoord::infinity()}, {w}); }

}  // namespace

TEST_CASE("quadrature and legendre helpers") {
    CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 12) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    const auto& r = gauss_legendre(7);
    double s = 0;
    for (double w : r.weights) s += w;
    CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
    const auto p = legendre_values(3, 0.4);
    CHECK(p[2] == doctest::Approx(0.5 * (3 * 0.16 - 1)));
    CHECK(p[3] == doctest::Approx(0.5 * (5 * 0.064 - 3 * 0.4)));
}

TEST_CASE("axial kernel is the azimuthal average of 2 log chordal") {
    for (auto [t, s] : {std::pair{0.3, -0.5}, std::pair{0.9, 0.2}, std::pair{-0.7, -0.1}}) {
        const double st = std::sqrt(1 - t * t), ss = std::sqrt(1 - s * s);
        const SpherePoint x(st, 0.0, t);
        const int n = 4096;
        double avg = 0.0;
        for (int k = 0; k < n; ++k) {
            const double ph = 2 * kPi * (k + 0.5) / n;
            avg += 2.0 * std::log(chordal(x, SpherePoint(ss * std::cos(ph), ss * std::sin(ph), s)));
        }
        CHECK(axial_kernel(t, s) == doctest::Approx(avg / n).epsilon(1e-10));
        CHECK(axial_kernel(t, s) == axial_kernel(s, t));
    }
}

TEST_CASE("reduced laplacian") {
    auto phi = AxialField::on_grid(400, FieldKind::Potential);
    CHECK(sup_diff(reduced_laplacian(phi), phi) == 0.0);
    auto p1 = phi, p2 = phi;
    for (std::size_t k = 0; k < phi.t.size(); ++k) {
        p1.values[k] = phi.t[k];
        p2.values[k] = 0.5 * (3 * phi.t[k] * phi.t[k] - 1);
    }
    const auto l1 = reduced_laplacian(p1), l2 = reduced_laplacian(p2);
    for (std::size_t k = 1; k + 1 < phi.t.size(); k += 37) {
        CHECK(l1.values[k] == doctest::Approx(-2.0 * p1.values[k]).epsilon(1e-9));
        if (std::abs(p2.values[k]) > 0.1) CHECK(l2.values[k] / p2.values[k] == doctest::Approx(-6.0).epsilon(1e-3));
    }
    CHECK_THROWS_AS(reduced_laplacian(AxialField::on_grid(100, FieldKind::Potential)), ValidationError);
}

TEST_CASE("laplacian calibration") {
    const auto rep = calibrate_laplacian();
    CHECK_MESSAGE(rep.pass, "sup error " << rep.sup_error);
    FieldOptions tampered;
    tampered.c_lap = 0.5;
    CHECK_FALSE(calibrate_laplacian(tampered).pass);
}

TEST_CASE("kernel operator matches the energy double integral") {
    const int M = 300;
    auto mu = AxialField::on_grid(M, FieldKind::Density);
    for (auto& v : mu.values) v = 0.5;
    const auto p = mu.cell_masses();
    const auto Kp = apply_axial_kernel(p, M);
    double s = 0;
    for (std::size_t k = 0; k < p.size(); ++k) s += p[k] * Kp[k];
    // uniform pairs: E[log r^2] = 2 (log 2 - 1/2)
    CHECK(s == doctest::Approx(2 * (std::log(2.0) - 0.5)).epsilon(1e-12));
    // symmetry: q.K p = p.K q
    Rng rng(2);
    std::vector<double> q(p.size());
    for (auto& v : q) v = rng.uniform();
    const auto Kq = apply_axial_kernel(q, M);
    double a = 0, b = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        a += q[k] * Kp[k];
        b += p[k] * Kq[k];
    }
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
}

TEST_CASE("free energy functional") {
    const LogFanoCurve trivial;
    auto mu = AxialField::on_grid(400, FieldKind::Density);
    for (auto& v : mu.values) v = 0.5;
    for (double b : {-0.5, 0.0, 2.0}) CHECK(std::abs(free_energy_functional(mu, trivial, b).free_energy) < 1e-12);
    auto bad = mu;
    bad.values[3] = -1;
    CHECK_THROWS_AS(free_energy_functional(bad, trivial, 1.0), ValidationError);
}

TEST_CASE("mean field") {
    SUBCASE("trivial divisor solves by zero") {
        const auto s = solve_mean_field(LogFanoCurve(), 0.8);
        for (std::size_t k = 0; k < s.mu.values.size(); k += 100) {
            CHECK(std::abs(s.phi.values[k]) < 1e-9);
            CHECK(s.mu.values[k] == doctest::Approx(0.5).epsilon(1e-9));
        }
    }
    SUBCASE("north weight 1/2 at beta 1") {
        const LogFanoCurve c = north_curve(0.5);
        const auto s = solve_mean_field(c, 1.0);
        CHECK(s.residual < 1e-8);
        CHECK(s.mu.trapezoid() == doctest::Approx(1.0).epsilon(1e-10));
        for (std::size_t k = 1; k + 1 < s.mu.values.size(); ++k) CHECK(s.mu.values[k + 1] >= s.mu.values[k]);
        // minimizer versus perturbations
        const double F0 = free_energy_functional(s.mu, c, 1.0).free_energy;
        Rng rng(4);
        for (int trial = 0; trial < 20; ++trial) {
            const double a = 0.1 * rng.normal(), b = 0.1 * rng.normal(), ph = rng.uniform() * 6;
            auto test = s.mu;
            for (std::size_t k = 0; k < test.values.size(); ++k)
                test.values[k] *= 1.0 + a * test.t[k] + b * std::sin(3 * test.t[k] + ph);
            const double z = test.trapezoid();
            for (auto& v : test.values) v /= z;
            CHECK(free_energy_functional(test, c, 1.0).free_energy >= F0);
        }
        // first variation vanishes
        const auto p = s.mu.cell_masses();
        const auto m = AxialReference::from_curve(c).cell_masses(s.mu.M());
        const auto Kp = apply_axial_kernel(p, s.mu.M());
        std::vector<double> g(p.size());
        for (std::size_t k = 0; k < p.size(); ++k) g[k] = -c.d_L() * Kp[k] + std::log(p[k] / m[k]);
        for (int dir = 0; dir < 10; ++dir) {
            std::vector<double> d(p.size());
            double mean = 0, l1 = 0, der = 0;
            const double fr = 1 + rng.uniform() * 5, ph = rng.uniform() * 6;
            for (std::size_t k = 0; k < p.size(); ++k) mean += (d[k] = p[k] * std::sin(fr * s.mu.t[k] + ph));
            for (std::size_t k = 0; k < p.size(); ++k) {
                d[k] -= mean * p[k];
                l1 += std::abs(d[k]);
            }
            for (std::size_t k = 0; k < p.size(); ++k) der += d[k] * g[k];
            CHECK(std::abs(der / l1) < 1e-5);
        }
        // dF/dbeta = E at the minimizer
        const double db = 1e-3;
        const auto sp = solve_mean_field(c, 1.0 + db), sm = solve_mean_field(c, 1.0 - db);
        const double dF = (free_energy_functional(sp.mu, c, 1.0 + db).free_energy - free_energy_functional(sm.mu, c, 1.0 - db).free_energy) / (2 * db);
        CHECK(dF == doctest::Approx(free_energy_functional(s.mu, c, 1.0).energy).epsilon(1e-4));
    }
    SUBCASE("small beta linearizes to Poisson") {
        const double beta = 1e-7;
        const auto s = solve_mean_field(LogFanoCurve(), beta, {}, [](double t) { return std::exp(t); });
        const auto ps = solve_poisson(exp_target);
        // phi_beta gauged against rho; Poisson gauged against the same target
        CHECK(sup_diff(s.phi, ps.phi) < 1e-5);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(solve_mean_field(LogFanoCurve(), -1.0), ValidationError);
        const LogFanoCurve off({PlaneCoord(1.0)}, {0.5});
        CHECK_THROWS_AS(solve_mean_field(off, 1.0), UnsupportedError);
        FieldOptions o;
        o.max_newton = 1;
        CHECK_THROWS_AS(solve_mean_field(north_curve(0.5), 1.0, o), ConvergenceError);
    }
}

TEST_CASE("poisson solver") {
    const auto u = solve_poisson([](double) { return 0.5; });
    for (double v : u.phi.values) CHECK(std::abs(v) < 1e-14);
    const auto e = solve_poisson(exp_target);
    CHECK(e.residual < 1e-8);
    CHECK(e.warnings.empty());
    CHECK(e.coeffs.a[0] == 0.0);
    // gauge: mean zero against the target
    CHECK(std::abs(integrate([&](double t) { return e.phi.at(t) * exp_target(t); }, -1, 1, 64)) < 1e-6);
    // grid input: M and 2M agree to O(M^-2)
    auto grid_target = [](int M) {
        auto f = AxialField::on_grid(M, FieldKind::Density);
        for (std::size_t k = 0; k < f.t.size(); ++k) f.values[k] = exp_target(f.t[k]);
        const double z = f.trapezoid();
        for (auto& v : f.values) v /= z;
        return f;
    };
    FieldOptions o;
    o.grid = 400;
    const auto a = solve_poisson(grid_target(400), o), b = solve_poisson(grid_target(800), o);
    CHECK(sup_diff(a.phi, b.phi) < 10.0 / (400.0 * 400.0));
    // a narrow target needs more than the default degree
    const auto narrow = solve_poisson([](double t) { return std::exp(-t * t / 0.002) / std::sqrt(0.002 * kPi); });
    CHECK_FALSE(narrow.warnings.empty());
    CHECK_THROWS_AS(solve_poisson([](double) { return 1.0; }), ValidationError);
}

TEST_CASE("phi_N approximant") {
    const auto flat = phi_N_approximant([](double) { return 0.5; }, 4);
    for (double v : flat.values) CHECK(std::abs(v) < 1e-12);
    const auto a = phi_N_approximant(exp_target, 3), b = phi_N_approximant(exp_target, 8);
    CHECK(sup_diff(a, b) < 1e-10);
    CHECK(sup_diff(a, solve_poisson(exp_target).phi) < 1e-3);
    PhiOptions mc;
    mc.mode = PhiMode::MonteCarlo;
    mc.samples = 20000;
    FieldOptions o;
    o.grid = 200;
    const auto q = phi_N_approximant(exp_target, 3, {}, o);
    CHECK(sup_diff(phi_N_approximant(exp_target, 3, mc, o), q) < 0.05);
    CHECK_THROWS_AS(phi_N_approximant(exp_target, 1), ValidationError);
}
