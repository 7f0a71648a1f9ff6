#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kez/closed_forms.hpp"
#include "kez/errors.hpp"
#include "kez/mc_estimators.hpp"

using namespace kez;

namespace {

constexpr double kPi = std::numbers::pi;

McOptions opts(std::int64_t n, std::uint64_t seed = 7, int workers = 1) {
    McOptions o;
    o.n_samples = n;
    o.seed = seed;
    o.workers = workers;
    return o;
}

void check_within(const McEstimate& e, double exact, double k = 4.0) {
    CHECK_MESSAGE(std::abs(e.mean - exact) < k * e.std_error, "mean " << e.mean << " +- " << e.std_error << " vs " << exact);
    CHECK(e.std_error < 0.05 * std::abs(exact));
}

double selberg_exact(int N, double w) {
    const Rational r = Rational::from_double(w);
    return eval(selberg_gamma_product(N), std::map<std::string, Rational>{{"w1", r}, {"w2", r}, {"w3", r}}).value().real();
}

}  // namespace

TEST_CASE("summarize log weights") {
    const std::vector<double> lw{std::log(1.0), std::log(2.0), std::log(3.0), std::log(6.0)};
    const auto e = summarize_log_weights(lw, opts(4));
    CHECK(e.mean == doctest::Approx(3.0));
    CHECK(e.log_mean == doctest::Approx(std::log(3.0)));
    CHECK(e.std_error == doctest::Approx(std::sqrt(14.0 / 3.0 / 4.0)));
    // huge log weights stay finite in log space
    const auto big = summarize_log_weights({800.0, 801.0, 800.5}, opts(3));
    CHECK(big.log_mean == doctest::Approx(800.0 + std::log((1 + std::exp(1.0) + std::exp(0.5)) / 3)));
    CHECK_THROWS_AS(summarize_log_weights({0.0, std::nan("")}, opts(2)), ConvergenceError);
}

TEST_CASE("proposal mixture construction") {
    const std::vector<SpherePoint> marked{SpherePoint::south(), SpherePoint(1, 0, 0), SpherePoint::north()};
    const auto q = ProposalMixture::for_integrand(BaseKind::Uniform, marked, {1.0, 1.0, 1.0}, 0.5, 3);
    double total = 0;
    int caps = 0, clusters = 0;
    for (auto& c : q.components) {
        total += c.weight;
        caps += c.kind == ProposalComponent::Kind::MarkedPointSingular;
        clusters += c.kind == ProposalComponent::Kind::Cluster;
        if (c.kind != ProposalComponent::Kind::Base) CHECK(c.exponent < 2.0);
    }
    CHECK(total == doctest::Approx(1.0));
    CHECK(caps == 3);
    CHECK(clusters == 1);
    // repulsive pair term, exact reference base: the base alone
    const auto r = ProposalMixture::for_integrand(BaseKind::Reference, {SpherePoint::north()}, {1.0}, -0.5, 3, 0.5, 0.0);
    CHECK(r.components.size() == 1);
    ProposalMixture bad = q;
    bad.components[0].weight += 0.1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("selberg integral by importance sampling") {
    const auto e3 = mc_selberg({0.5, 0.5, 0.5}, 3, opts(100000));
    check_within(e3, 5904.80);
    const auto e2 = mc_selberg({0.5, 0.5, 0.5}, 2, opts(100000, 11));
    check_within(e2, 378.1451);
    const auto e4 = mc_selberg({0.4, 0.4, 0.4}, 3, opts(100000, 13));
    check_within(e4, selberg_exact(3, 0.4));
    CHECK_THROWS_AS(mc_selberg({0.9, 0.1, 0.1}, 3, opts(1000)), StabilityError);
    CHECK_THROWS_AS(mc_selberg({0.5, 0.5, 0.5}, 1, opts(1000)), ValidationError);
}

TEST_CASE("sphere partition function") {
    SUBCASE("beta = 0 gives weights equal to one") {
        const LogFanoCurve c({PlaneCoord(Complex{0, 0}), PlaneCoord::infinity()}, {0.3, 0.5});
        const auto e = mc_sphere_partition(c, 0.0, 4, opts(2000));
        CHECK(e.mean == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.std_error < 1e-12);
    }
    SUBCASE("trivial divisor, three points") {
        const LogFanoCurve trivial;
        for (double b : {-0.2, 0.5}) {
            const auto e = mc_sphere_partition(trivial, b, 3, opts(50000, 5));
            check_within(e, std::exp(p1_three_point_sphere_log_Z(b)));
        }
        CHECK_THROWS_AS(mc_sphere_partition(trivial, -0.7, 3, opts(100)), StabilityError);
    }
    SUBCASE("non-axial curve carries the mass error") {
        const LogFanoCurve c({PlaneCoord(Complex{0, 0}), PlaneCoord(Complex{1, 0}), PlaneCoord::infinity()}, {0.5, 0.5, 0.5});
        CHECK_FALSE(is_axial(c));
        const auto m = reference_mass(c, opts(20000));
        CHECK_FALSE(m.exact);
        const auto e = mc_sphere_partition(c, 0.0, 3, opts(20000));
        // numerator and mass are independent estimates of the same integral
        CHECK(e.std_error > 0.0);
        CHECK(std::abs(e.mean - 1.0) < 4 * e.std_error);
        // gamma_3 = 2 here
        CHECK_NOTHROW(mc_sphere_partition(c, -1.9, 3, opts(100)));
        CHECK_THROWS_AS(mc_sphere_partition(c, -2.0, 3, opts(100)), StabilityError);
    }
    SUBCASE("axial mass is exact") {
        const LogFanoCurve c({PlaneCoord::infinity()}, {0.5});
        const auto m = reference_mass(c, opts(10));
        CHECK(m.exact);
        // int (2 - 2t)^{-1/2} dt/2 over [-1, 1] = 1
        CHECK(m.value == doctest::Approx(1.0));
    }
}

TEST_CASE("circular and gaussian estimators") {
    check_within(mc_circular(3, 1.0, opts(100000)), 48 * kPi * kPi);
    const auto flat = mc_circular(4, 0.0, opts(100));
    CHECK(flat.mean == doctest::Approx(std::pow(2 * kPi, 4)));
    CHECK_THROWS_AS(mc_circular(3, -0.7, opts(100)), StabilityError);

    const auto r1 = mc_gaussian_det_ratio(1, 0.0, 1.0, opts(100000));
    CHECK(std::abs(r1.mean - 2.0) < 4 * r1.std_error);
    const auto r2 = mc_gaussian_det_ratio(1, 0.5, 1.5, opts(100000, 3));
    CHECK(std::abs(r2.mean - 3.75) < 4 * r2.std_error);
    const auto z0 = mc_gaussian_det(1, 0.0, opts(100));
    CHECK(z0.mean == doctest::Approx(std::pow(kPi, 4)));
    CHECK_THROWS_AS(mc_gaussian_det(1, -1.0, opts(100)), StabilityError);
}

TEST_CASE("reproducibility and worker splitting") {
    const auto a = mc_selberg({0.5, 0.5, 0.5}, 3, opts(20000, 42, 1));
    const auto b = mc_selberg({0.5, 0.5, 0.5}, 3, opts(20000, 42, 1));
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    const auto c = mc_selberg({0.5, 0.5, 0.5}, 3, opts(20000, 42, 3));
    const auto d = mc_selberg({0.5, 0.5, 0.5}, 3, opts(20000, 42, 3));
    CHECK(c.mean == d.mean);
    CHECK(c.worker_count == 3);
    CHECK(std::abs(a.mean - c.mean) < 5 * std::hypot(a.std_error, c.std_error));
    CHECK(a.to_json()["seed"] == 42);
}
