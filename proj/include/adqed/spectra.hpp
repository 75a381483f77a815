#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adqed/system.hpp"

namespace adqed {

enum class StateLabel { Scattering, Bound, BIC, QuasiBIC, MultiPhotonContinuum };
std::string to_string(StateLabel label);

struct StateInfo {
    double E{0.0};
    double dE{0.0};
    int parity{0};
    StateLabel label{StateLabel::Scattering};
    double zero_photon_weight{0.0};
    int dominant_alpha{0};   // matter level carrying the largest weight (0-based)
    int dominant_photons{0}; // photon number carrying the largest weight
};

struct StateClassification {
    double band_lo{0.0};
    double band_hi{0.0};
    int continuum_parity{0};  // parity of the single-photon continuum on the ground state
    bool band_only{false};    // set when eigenvectors were unavailable
    std::vector<StateInfo> states;
};

StateClassification classify_excitations(const SystemSolution& s, double tol = 1e-9);

// Selects one level of a spectrum: the index-th level of the given parity sector
// (parity 0 means the full spectrum).
struct LevelRef {
    int parity{0};
    int index{0};
};

double level_energy(const EDResult& ed, const LevelRef& ref);

struct AnticrossingReport {
    double g_star{0.0};
    double gap{0.0};
    bool crossing_found{false};  // false: the gap is monotone in the window
    double gap_lo{0.0};          // gap at the window edges
    double gap_hi{0.0};
    int evaluations{0};
};

// Minimum of |E_b - E_a| over g in [g_lo, g_hi]: a coarse scan followed by a root
// solve (signed crossings) or a Brent minimization to relative g-resolution rel_tol.
AnticrossingReport scan_anticrossings(const SystemConfig& base, double g_lo, double g_hi,
                                      const LevelRef& a, const LevelRef& b, int coarse = 21,
                                      double rel_tol = 1e-4);

// Same search on an arbitrary gap function of g.
AnticrossingReport minimize_gap(const std::function<double(double)>& signed_gap, double g_lo,
                                double g_hi, int coarse, double rel_tol);

// Order-of-magnitude quasi-BIC decay rate (J/hbar)^2 / (g sqrt(m w_c^3 d^3)) (v^3/m_eff)^(1/4).
double qbic_decay_estimate(double J, double g, double v, double d, double m_eff, double mass = 1.0,
                           double omega_c = 1.0, double hbar = 1.0);

}  // namespace adqed
