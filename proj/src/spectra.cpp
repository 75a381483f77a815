#include "adqed/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace adqed {

std::string to_string(StateLabel label) {
    switch (label) {
        case StateLabel::Scattering: return "scattering";
        case StateLabel::Bound: return "bound";
        case StateLabel::BIC: return "BIC";
        case StateLabel::QuasiBIC: return "quasi-BIC";
        case StateLabel::MultiPhotonContinuum: return "multi-photon-continuum";
    }
    return "unknown";
}

StateClassification classify_excitations(const SystemSolution& s, double tol) {
    StateClassification c;
    const double hbar = s.modes.hbar;
    c.band_lo = hbar * s.modes.omega.minCoeff();
    c.band_hi = hbar * s.modes.omega.maxCoeff();
    const EDResult& ed = s.ed;
    const int n = static_cast<int>(ed.E.size());
    c.band_only = ed.vectors.cols() < n || !s.basis;
    c.continuum_parity = ed.parity.empty() ? 0 : -ed.parity[0];

    for (int i = 0; i < n; ++i) {
        StateInfo st;
        st.E = ed.E[i];
        st.dE = ed.E[i] - ed.E[0];
        st.parity = ed.parity[i];
        const bool in_band = st.dE > c.band_lo + tol && st.dE < c.band_hi - tol;
        if (c.band_only) {
            st.label = in_band ? StateLabel::Scattering : StateLabel::Bound;
            c.states.push_back(st);
            continue;
        }
        const FewPhotonBasis& b = *s.basis;
        const int ac = b.alpha_c();
        const long np = static_cast<long>(b.photon_states());
        Eigen::Map<const Eigen::MatrixXd> X(ed.vectors.col(i).data(), ac, np);
        Eigen::VectorXd by_alpha = Eigen::VectorXd::Zero(ac);
        Eigen::VectorXd by_n = Eigen::VectorXd::Zero(b.cutoff() + 1);
        for (long j = 0; j < np; ++j) {
            const Eigen::VectorXd col2 = X.col(j).array().square();
            by_alpha += col2;
            by_n[b.photons(j)] += col2.sum();
        }
        st.zero_photon_weight = by_n[0];
        by_alpha.maxCoeff(&st.dominant_alpha);
        by_n.maxCoeff(&st.dominant_photons);

        if (st.zero_photon_weight >= 0.5) {
            if (!in_band)
                st.label = StateLabel::Bound;
            else if (st.parity != 0 && st.parity != c.continuum_parity)
                st.label = StateLabel::BIC;
            else
                st.label = StateLabel::QuasiBIC;
        } else if (st.dominant_photons <= 1 && st.dominant_alpha == 0) {
            st.label = in_band ? StateLabel::Scattering : StateLabel::Bound;
        } else if (st.dominant_photons <= 1 && !in_band && st.dE < c.band_lo) {
            st.label = StateLabel::Bound;
        } else {
            st.label = StateLabel::MultiPhotonContinuum;
        }
        c.states.push_back(st);
    }
    return c;
}

double level_energy(const EDResult& ed, const LevelRef& ref) {
    int seen = 0;
    for (int i = 0; i < static_cast<int>(ed.E.size()); ++i) {
        if (ref.parity != 0 && ed.parity[i] != ref.parity) continue;
        if (seen == ref.index) return ed.E[i];
        ++seen;
    }
    throw InputError("requested level is beyond the computed spectrum; raise n_eigs");
}

AnticrossingReport minimize_gap(const std::function<double(double)>& signed_gap, double g_lo,
                                double g_hi, int coarse, double rel_tol) {
    if (!(g_hi > g_lo) || coarse < 3) throw InputError("anticrossing window must be non-empty");
    AnticrossingReport r;
    std::vector<double> g(coarse), f(coarse);
    for (int i = 0; i < coarse; ++i) {
        g[i] = g_lo + (g_hi - g_lo) * i / (coarse - 1);
        f[i] = signed_gap(g[i]);
        ++r.evaluations;
    }
    r.gap_lo = std::abs(f.front());
    r.gap_hi = std::abs(f.back());

    const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(rel_tol))) + 10, 10, 26);
    for (int i = 0; i + 1 < coarse; ++i) {
        if (f[i] == 0.0) {
            r.g_star = g[i];
            r.gap = 0.0;
            r.crossing_found = true;
            return r;
        }
        if ((f[i] < 0) != (f[i + 1] < 0)) {
            std::uintmax_t iters = 200;
            auto tol = [&](double a, double b) { return std::abs(b - a) <= 1e-15 * std::abs(a); };
            const auto br = boost::math::tools::toms748_solve(
                [&](double x) {
                    ++r.evaluations;
                    return signed_gap(x);
                },
                g[i], g[i + 1], f[i], f[i + 1], tol, iters);
            const double a = std::abs(signed_gap(br.first)), b = std::abs(signed_gap(br.second));
            r.g_star = a <= b ? br.first : br.second;
            r.gap = std::min(a, b);
            r.crossing_found = true;
            return r;
        }
    }
    int imin = 0;
    for (int i = 1; i < coarse; ++i)
        if (std::abs(f[i]) < std::abs(f[imin])) imin = i;
    if (imin == 0 || imin == coarse - 1) {
        r.g_star = g[imin];
        r.gap = std::abs(f[imin]);
        r.crossing_found = false;
        return r;
    }
    std::uintmax_t iters = 200;
    const auto m = boost::math::tools::brent_find_minima(
        [&](double x) {
            ++r.evaluations;
            return std::abs(signed_gap(x));
        },
        g[imin - 1], g[imin + 1], bits, iters);
    r.g_star = m.first;
    r.gap = m.second;
    r.crossing_found = true;
    return r;
}

AnticrossingReport scan_anticrossings(const SystemConfig& base, double g_lo, double g_hi,
                                      const LevelRef& a, const LevelRef& b, int coarse,
                                      double rel_tol) {
    auto gap = [&](double g) {
        SystemConfig cfg = base;
        cfg.g = g;
        const SystemSolution s = solve_system(cfg);
        return level_energy(s.ed, b) - level_energy(s.ed, a);
    };
    return minimize_gap(gap, g_lo, g_hi, coarse, rel_tol);
}

double qbic_decay_estimate(double J, double g, double v, double d, double m_eff, double mass,
                           double omega_c, double hbar) {
    if (!(g > 0) || !(d > 0) || !(m_eff > 0)) throw InputError("qbic estimate needs g, d, m_eff > 0");
    const double Jw = J / hbar;
    return Jw * Jw / (g * std::sqrt(mass * std::pow(omega_c, 3) * std::pow(d, 3))) *
           std::pow(v * v * v / m_eff, 0.25);
}

}  // namespace adqed
