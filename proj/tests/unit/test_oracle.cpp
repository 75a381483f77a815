#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "adqed/system.hpp"
#include "coulomb_ed.hpp"

using namespace adqed;

namespace {

// Two-mode waveguide: k = -pi and 0 with omega = 1.4 and 0.6.
WaveguideSpec two_modes() { return build_tabulated({-M_PI, 0.0}, {1.4, 0.6}); }

oracle::BruteForceSpec brute(double g, int n_max, int states) {
    SystemConfig c;
    c.wg = two_modes();
    c.g = g;
    c.em = double_well(0.5, 0.87);
    const SystemSolution f = build_frame(c);
    oracle::BruteForceSpec b;
    b.omega = f.modes.omega;
    b.g = f.modes.g;
    const Polynomial V = c.em.potential();
    b.V = [V](double q) { return V(q); };
    b.n_max = n_max;
    b.emitter_states = states;
    return b;
}

// Lowest four levels of the Coulomb-gauge brute force at n_max = 30 with 30 emitter states.
constexpr double kFrozenHalf[4] = {0.70198894, 1.24248342, 1.65578499, 1.79173006};
constexpr double kFrozenOne[4] = {0.85980412, 1.27084720, 1.73196600, 1.76785625};

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("decoupled brute force is the matter spectrum plus photon ladders") {
    oracle::BruteForceSpec b = brute(0.0, 6, 8);
    b.n_levels = 6;
    const oracle::BruteForceResult r = oracle::coulomb_ed(b);
    const oracle::EmitterBasis eb = oracle::emitter_basis(b);
    std::vector<double> ladder;
    for (int a = 0; a < eb.E.size(); ++a)
        for (int n1 = 0; n1 <= 6; ++n1)
            for (int n2 = 0; n2 <= 6; ++n2) ladder.push_back(eb.E[a] + 0.6 * n1 + 1.4 * n2);
    std::sort(ladder.begin(), ladder.end());
    for (int i = 0; i < 6; ++i) CHECK(std::abs(r.E[i] - ladder[i]) < 1e-9);
}

TEST_CASE("brute force reproduces its frozen reference levels") {
    const oracle::BruteForceResult half = oracle::coulomb_ed(brute(0.5, 20, 20));
    const oracle::BruteForceResult one = oracle::coulomb_ed(brute(1.0, 20, 20));
    CHECK(half.usable);
    CHECK(one.usable);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(half.E[i] - kFrozenHalf[i]) < 1e-5);
        CHECK(std::abs(one.E[i] - kFrozenOne[i]) < 1e-5);
    }
}

TEST_CASE("AD-frame ED approaches the frozen brute-force levels") {
    SystemConfig c;
    c.wg = two_modes();
    c.g = 0.5;
    c.em = double_well(0.5, 0.87);
    c.Nc = 8;
    c.alpha_c = 40;
    c.n_eigs = 4;
    const SystemSolution s = solve_system(c);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(s.ed.E[i] - kFrozenHalf[i]) < 2e-3);
}

TEST_CASE("Coulomb-gauge truncation converges much slower than the AD frame at strong coupling") {
    const double g = 2.0;
    const oracle::BruteForceResult coul = oracle::coulomb_ed(brute(g, 24, 10));

    SystemConfig c;
    c.wg = two_modes();
    c.g = g;
    c.em = double_well(0.5, 0.87);
    c.alpha_c = 10;
    c.n_eigs = 4;
    c.Nc = 12;
    const SystemSolution lo = solve_system(c);
    c.Nc = 24;
    const SystemSolution hi = solve_system(c, &lo.matter);
    double scale = 0, shift = 0;
    for (int i = 0; i < 4; ++i) {
        scale = std::max(scale, std::abs(hi.ed.E[i]));
        shift = std::max(shift, std::abs(hi.ed.E[i] - lo.ed.E[i]));
    }
    const double ad_shift = shift / scale;
    CAPTURE(coul.cutoff_shift);
    CAPTURE(ad_shift);
    CHECK(coul.cutoff_shift >= 10 * ad_shift);
}

}
