#include <doctest.h>

#include <cmath>

#include "adqed/spectra.hpp"

using namespace adqed;

namespace {

SystemSolution harmonic_emitter(double w0, double g) {
    SystemConfig c;
    c.wg = build_cavity_array(1.0, 0.2, 19);
    c.g = g;
    c.em.shape = PotentialShape::Polynomial;
    c.em.poly = {0.0, 0.0, 0.5 * w0 * w0};
    c.Nc = 1;
    c.alpha_c = 3;
    c.method = Method::Dense;
    c.n_eigs = static_cast<int>(build_system(c).H->dim());
    return solve_system(c);
}

const StateInfo* emitter_state(const StateClassification& cl, int alpha) {
    for (const auto& st : cl.states)
        if (st.zero_photon_weight > 0.5 && st.dominant_alpha == alpha) return &st;
    return nullptr;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("bare emitter level above the band is bound") {
    const StateClassification cl = classify_excitations(harmonic_emitter(1.5, 0.0));
    CHECK(cl.band_lo == doctest::Approx(0.8));
    const StateInfo* st = emitter_state(cl, 1);
    REQUIRE(st != nullptr);
    CHECK(st->dE == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(st->label == StateLabel::Bound);
    CHECK(to_string(st->label) == "bound");
}

TEST_CASE("in-band emitter levels are labelled by parity") {
    const StateClassification cl = classify_excitations(harmonic_emitter(0.5, 0.0));
    CHECK(cl.continuum_parity == -1);
    const StateInfo* low = emitter_state(cl, 1);
    const StateInfo* mid = emitter_state(cl, 2);
    REQUIRE(low != nullptr);
    REQUIRE(mid != nullptr);
    CHECK(low->label == StateLabel::Bound);
    CHECK(mid->parity == 1);
    CHECK(mid->label == StateLabel::BIC);
    CHECK(to_string(StateLabel::QuasiBIC) == "quasi-BIC");
    int scattering = 0;
    for (const auto& st : cl.states)
        if (st.dominant_alpha == 0 && st.dominant_photons == 1 && st.dE > cl.band_lo + 1e-6 && st.dE < cl.band_hi - 1e-6) {
            CHECK(st.label == StateLabel::Scattering);
            ++scattering;
        }
    CHECK(scattering >= 8);

    const StateClassification odd = classify_excitations(harmonic_emitter(1.0, 0.0));
    const StateInfo* q = emitter_state(odd, 1);
    REQUIRE(q != nullptr);
    CHECK(q->label == StateLabel::QuasiBIC);
}

TEST_CASE("level selection by parity sector") {
    EDResult ed;
    ed.E = Eigen::VectorXd::LinSpaced(6, 0.0, 5.0);
    ed.parity = {1, -1, -1, 1, -1, 1};
    CHECK(level_energy(ed, {0, 3}) == 3.0);
    CHECK(level_energy(ed, {-1, 1}) == 2.0);
    CHECK(level_energy(ed, {1, 2}) == 5.0);
    CHECK_THROWS_AS(level_energy(ed, {1, 3}), InputError);
}

TEST_CASE("gap search on analytic gap functions") {
    const AnticrossingReport crossing = minimize_gap([](double g) { return g - 1.3; }, 1.0, 2.0, 11, 1e-8);
    CHECK(crossing.crossing_found);
    CHECK(crossing.g_star == doctest::Approx(1.3).epsilon(1e-10));
    CHECK(crossing.gap < 1e-12);

    const AnticrossingReport avoided =
        minimize_gap([](double g) { return std::sqrt((g - 1.37) * (g - 1.37) + 1e-6); }, 1.0, 2.0, 11, 1e-8);
    CHECK(avoided.crossing_found);
    CHECK(avoided.gap == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK(avoided.g_star == doctest::Approx(1.37).epsilon(1e-5));

    const AnticrossingReport mono = minimize_gap([](double g) { return 2.0 + g; }, 1.0, 2.0, 11, 1e-8);
    CHECK_FALSE(mono.crossing_found);
    CHECK(mono.gap_lo == doctest::Approx(3.0));
    CHECK(mono.gap_hi == doctest::Approx(4.0));

    CHECK_THROWS_AS(minimize_gap([](double g) { return g; }, 2.0, 1.0, 11, 1e-6), InputError);
}

TEST_CASE("quasi-BIC decay estimate scaling") {
    const double base = qbic_decay_estimate(0.1, 10.0, 0.5, 0.87, 201.0);
    CHECK(base > 0);
    CHECK(std::isfinite(base));
    CHECK(qbic_decay_estimate(0.2, 10.0, 0.5, 0.87, 201.0) == doctest::Approx(4 * base).epsilon(1e-12));
    // At fixed m_eff the rate falls as 1/g; with m_eff ~ g^2 the combined law is g^(-3/2).
    const double g2 = qbic_decay_estimate(0.1, 20.0, 0.5, 0.87, 201.0 * 4);
    CHECK(g2 / base == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
    CHECK(qbic_decay_estimate(0.0, 10.0, 0.5, 0.87, 201.0) == 0.0);
}

}
