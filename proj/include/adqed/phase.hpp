#pragma once

#include <string>
#include <vector>

#include "adqed/fit.hpp"
#include "adqed/system.hpp"

namespace adqed {

enum class DivergenceClass { Convergent, Logarithmic, Power, Indeterminate };
std::string to_string(DivergenceClass c);

struct ThetaScan {
    double l{1.0};
    std::vector<int> L;
    std::vector<double> Theta;
    DivergenceClass cls{DivergenceClass::Indeterminate};
    LineFit power;        // log Theta against log L
    LineFit logarithmic;  // Theta against log L
    double power_rms{0.0};        // relative RMS misfit of a L^p form in Theta
    double logarithmic_rms{0.0};  // relative RMS misfit of a ln L + b in Theta
    double last_decade_change{0.0};   // Theta(L_max) / Theta(L_max / 10) - 1 when available
    double log_ratio_spread{0.0};     // (max - min) / mean of Theta / ln L
    bool infrared_flag{false};        // Theta dominated by the lowest mode at L_max
};

// Theta(L) for power-law waveguides at fixed total coupling g.
ThetaScan theta_scaling(double l, const std::vector<int>& L_list, double g = 1.0,
                        double omega_max = 1.0);

struct TunnelingEstimate {
    double gap{0.0};  // hbar Delta_g
    // Same exponent with the harmonic-fluctuation (instanton) prefactor
    // 2 hbar omega sqrt(6 S / (pi hbar)), omega the well frequency and S the barrier action.
    double instanton_gap{0.0};
    double v_eff{0.0};
    double d_eff{0.0};
    bool applicable{false};
};

// hbar Delta_g = hbar^2 / (m_eff d_eff^2) exp(-(4/3) sqrt(2 m_eff d_eff^2 v_eff) / hbar).
TunnelingEstimate tunneling_gap(const ADParameters& ad, const EmitterSpec& em);
TunnelingEstimate tunneling_gap(double m_eff, double v_eff, double d_eff, double hbar = 1.0);

struct OrderParameterRow {
    int L{0};
    double h{0.0};
    double q_loc{0.0};
    double E0{0.0};
};

struct OrderParameterScan {
    std::vector<OrderParameterRow> rows;
    std::vector<int> L;
    std::vector<double> gap;           // unbiased E_1 - E_0 per L
    std::vector<double> extrapolated;  // linear small-bias extrapolation of q_loc per L
    std::vector<double> m_eff;
    std::vector<bool> monotone;        // q_loc non-decreasing in h per L
};

// Biased ground-state displacement <Q + Xi> on the ED of each (h, L); base.wg.kind must be
// power-law and base.wg.l, base.wg.omega_max are reused for every L.
OrderParameterScan order_parameter_scan(const SystemConfig& base, const std::vector<double>& h_list,
                                        const std::vector<int>& L_list);

// Total displacement xi(g) and the indices where its discrete derivative changes sign.
struct XiProfile {
    std::vector<double> g;
    std::vector<double> xi;
    std::vector<int> turning_points;
};
XiProfile xi_profile(const SystemConfig& base, const std::vector<double>& g_list);

}  // namespace adqed
