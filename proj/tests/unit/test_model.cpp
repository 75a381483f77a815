#include <doctest.h>

#include <cmath>

#include "adqed/model.hpp"

using namespace adqed;

TEST_SUITE("model") {

TEST_CASE("cavity array band edges and dispersion") {
    const WaveguideSpec wg = build_cavity_array(1.0, 0.2, 19);
    REQUIRE(wg.omega.size() == 19);
    CHECK(wg.omega.minCoeff() == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(wg.omega.maxCoeff() == doctest::Approx(1.2).epsilon(5e-3));
    CHECK(wg.omega.maxCoeff() <= 1.2);
    for (int i = 0; i < wg.omega.size(); ++i) {
        CHECK(wg.omega[i] == doctest::Approx(1.0 - 0.2 * std::cos(wg.k[i])).epsilon(1e-14));
        CHECK(wg.k[i] >= -M_PI);
        CHECK(wg.k[i] < M_PI);
    }
}

TEST_CASE("cavity array is symmetric under k -> -k") {
    const WaveguideSpec wg = build_cavity_array(1.0, 0.3, 11);
    for (int i = 0; i < wg.k.size(); ++i) {
        int partner = -1;
        for (int j = 0; j < wg.k.size(); ++j)
            if (std::abs(wg.k[j] + wg.k[i]) < 1e-12) partner = j;
        REQUIRE(partner >= 0);
        CHECK(wg.omega[partner] == doctest::Approx(wg.omega[i]).epsilon(1e-14));
    }
}

TEST_CASE("zero hopping gives a flat band") {
    const WaveguideSpec wg = build_cavity_array(1.0, 0.0, 3);
    for (int i = 0; i < 3; ++i) CHECK(wg.omega[i] == 1.0);
}

TEST_CASE("band bottom sits at k = 0") {
    const WaveguideSpec wg = build_cavity_array(1.0, 0.1, 19);
    bool found = false;
    for (int i = 0; i < wg.k.size(); ++i)
        if (wg.k[i] == 0.0) {
            CHECK(wg.omega[i] == doctest::Approx(0.9).epsilon(1e-15));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("cavity array preconditions") {
    CHECK_THROWS_AS(build_cavity_array(1.0, 0.1, 20), InputError);
    CHECK_THROWS_WITH_AS(build_cavity_array(1.0, 0.1, 20), doctest::Contains("odd"), InputError);
    CHECK_THROWS_AS(build_cavity_array(1.0, 1.0, 19), InputError);
    CHECK_THROWS_AS(build_cavity_array(1.0, 1.5, 19), InputError);
    CHECK_THROWS_AS(build_cavity_array(1.0, 0.1, 1), InputError);
}

TEST_CASE("power-law spectral exponents") {
    struct Row { double l, expected, tol; };
    for (const Row r : {Row{1.0, 1.0, 0.05}, Row{2.0, 0.5, 0.05}, Row{0.5, 2.0, 0.1}}) {
        CAPTURE(r.l);
        const WaveguideSpec wg = build_powerlaw(r.l, 1.0, 100);
        const CouplingProfile cp = couple_with_strength(wg, 1.0);
        CHECK(std::abs(spectral_exponent(wg, cp.g) - r.expected) < r.tol);
    }
}

TEST_CASE("point coupling strength is independent of L") {
    const WaveguideSpec a = build_cavity_array(1.0, 0.2, 19);
    const CouplingProfile ca = couple_with_strength(a, 1.0);
    CHECK(ca.g_total == doctest::Approx(1.0).epsilon(1e-14));
    const WaveguideSpec b = build_cavity_array(1.0, 0.2, 39);
    const CouplingProfile cb = couple_point(b, ca.amplitude);
    CHECK(std::abs(cb.g_total - ca.g_total) < 1e-12);
    for (int i = 0; i < a.omega.size(); ++i)
        CHECK(ca.g[i] == doctest::Approx(ca.f[i] * std::sqrt(a.omega[i])).epsilon(1e-14));
    CHECK(ca.f[0] == doctest::Approx(ca.amplitude / std::sqrt(19.0)).epsilon(1e-14));
}

TEST_CASE("double-well potential") {
    const EmitterSpec em = double_well(0.5, 0.87, 0.1);
    const Polynomial V = em.potential();
    for (double q : {-1.3, -0.2, 0.0, 0.5, 2.0}) {
        const double s = 1.0 - q * q / (0.87 * 0.87);
        CHECK(V(q) == doctest::Approx(0.5 * s * s - 0.1 * q).epsilon(1e-13));
    }
    const Polynomial sym = double_well(0.5, 0.87).potential();
    CHECK(sym.is_even());
    CHECK(sym(0.4) == sym(-0.4));
    CHECK_FALSE(V.is_even());
}

TEST_CASE("polynomial derivative and gaussian smoothing") {
    const Polynomial quartic({0.0, 0.0, 0.0, 0.0, 1.0});
    const Polynomial d2 = quartic.derivative(2);
    CHECK(d2(2.0) == doctest::Approx(48.0));
    const double xi = 0.3;
    const Polynomial sm = quartic.gaussian_smoothed(xi);
    for (double q : {0.0, 0.7, -1.1})
        CHECK(sm(q) == doctest::Approx(std::pow(q, 4) + 6 * xi * xi * q * q + 3 * std::pow(xi, 4)).epsilon(1e-13));
    const Polynomial same = quartic.gaussian_smoothed(0.0);
    CHECK(same(1.7) == doctest::Approx(quartic(1.7)));
}

TEST_CASE("tabulated potentials are projected or rejected") {
    std::vector<double> q, v, bad;
    for (int i = 0; i <= 60; ++i) {
        const double x = -2.0 + 4.0 * i / 60;
        q.push_back(x);
        v.push_back(0.3 * x * x * x * x - x * x + 0.1 * x);
        bad.push_back(std::abs(x));
    }
    const Polynomial p = fit_tabulated(q, v);
    CHECK(p(1.234) == doctest::Approx(0.3 * std::pow(1.234, 4) - 1.234 * 1.234 + 0.1234).epsilon(1e-8));
    CHECK_THROWS_AS(fit_tabulated(q, bad), InputError);
}

TEST_CASE("characteristic scales of a flat band") {
    const WaveguideSpec wg = build_cavity_array(1.0, 0.0, 5);
    const CouplingProfile cp = couple_with_strength(wg, 0.7);
    const CharacteristicScales cs = characteristic_scales(wg, cp, double_well(0.5, 0.87));
    CHECK(cs.omega == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(cs.delta) < 1e-14);
    CHECK(cs.g == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("characteristic width of a cavity band approaches J^2/2") {
    const WaveguideSpec wg = build_cavity_array(1.0, 0.2, 201);
    const CouplingProfile cp = couple_with_strength(wg, 1.0);
    const CharacteristicScales cs = characteristic_scales(wg, cp, double_well(0.5, 0.87));
    CHECK(cs.delta * cs.delta == doctest::Approx(0.02).epsilon(1e-2));
}

}
