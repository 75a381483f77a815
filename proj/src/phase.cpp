#include "adqed/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "adqed/observables.hpp"

namespace adqed {

std::string to_string(DivergenceClass c) {
    switch (c) {
        case DivergenceClass::Convergent: return "convergent";
        case DivergenceClass::Logarithmic: return "logarithmic";
        case DivergenceClass::Power: return "power";
        case DivergenceClass::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

ThetaScan theta_scaling(double l, const std::vector<int>& L_list, double g, double omega_max) {
    if (L_list.size() < 4) throw InputError("theta_scaling needs at least 4 system sizes");
    const auto [lo, hi] = std::minmax_element(L_list.begin(), L_list.end());
    if (static_cast<double>(*hi) / *lo < 100.0 - 1e-9)
        throw InputError("theta_scaling needs system sizes spanning two decades");
    ThetaScan s;
    s.l = l;
    s.L = L_list;
    std::vector<double> x, lnL;
    for (int L : L_list) {
        const WaveguideSpec wg = build_powerlaw(l, omega_max, L);
        const CouplingProfile cp = couple_with_strength(wg, g);
        const Eigen::ArrayXd t = (cp.g.array() / wg.omega.array()).square();
        s.Theta.push_back(t.sum());
        if (L == *hi) s.infrared_flag = t.maxCoeff() > 0.1 * t.sum();
        x.push_back(L);
        lnL.push_back(std::log(static_cast<double>(L)));
    }
    s.power = fit_loglog(x, s.Theta);
    s.logarithmic = fit_line(lnL, s.Theta);

    const double mean = std::accumulate(s.Theta.begin(), s.Theta.end(), 0.0) / s.Theta.size();
    double rp = 0, rl = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fp = std::exp(s.power.intercept) * std::pow(x[i], s.power.slope);
        const double fl = s.logarithmic.slope * lnL[i] + s.logarithmic.intercept;
        rp += (s.Theta[i] - fp) * (s.Theta[i] - fp);
        rl += (s.Theta[i] - fl) * (s.Theta[i] - fl);
    }
    s.power_rms = std::sqrt(rp / x.size()) / mean;
    s.logarithmic_rms = std::sqrt(rl / x.size()) / mean;

    for (std::size_t i = 0; i < L_list.size(); ++i)
        if (L_list[i] * 10 == *hi) {
            const std::size_t j = std::distance(L_list.begin(), hi);
            s.last_decade_change = s.Theta[j] / s.Theta[i] - 1.0;
        }
    std::vector<double> ratio;
    for (std::size_t i = 0; i < x.size(); ++i) ratio.push_back(s.Theta[i] / lnL[i]);
    const auto [rmin, rmax] = std::minmax_element(ratio.begin(), ratio.end());
    s.log_ratio_spread = (*rmax - *rmin) /
                         (std::accumulate(ratio.begin(), ratio.end(), 0.0) / ratio.size());

    if (std::abs(s.power.slope) < 0.05) {
        s.cls = DivergenceClass::Convergent;
    } else {
        const double a = std::max(s.power_rms, 1e-300), b = std::max(s.logarithmic_rms, 1e-300);
        if (a < b / 1.5)
            s.cls = DivergenceClass::Power;
        else if (b < a / 1.5)
            s.cls = DivergenceClass::Logarithmic;
        else
            s.cls = DivergenceClass::Indeterminate;
    }
    return s;
}

TunnelingEstimate tunneling_gap(double m_eff, double v_eff, double d_eff, double hbar) {
    TunnelingEstimate t;
    t.v_eff = v_eff;
    t.d_eff = d_eff;
    if (!(v_eff > 0) || !(d_eff > 0) || !(m_eff > 0)) return t;
    t.applicable = true;
    const double action = (4.0 / 3.0) * std::sqrt(2.0 * m_eff * d_eff * d_eff * v_eff);
    t.gap = hbar * hbar / (m_eff * d_eff * d_eff) * std::exp(-action / hbar);
    const double omega = std::sqrt(8.0 * v_eff / (m_eff * d_eff * d_eff));
    t.instanton_gap = 2.0 * hbar * omega * std::sqrt(6.0 * action / (std::numbers::pi * hbar)) *
                      std::exp(-action / hbar);
    return t;
}

TunnelingEstimate tunneling_gap(const ADParameters& ad, const EmitterSpec& em) {
    if (em.shape != PotentialShape::DoubleWell)
        throw InputError("tunneling estimate needs a double-well emitter");
    const DressedPotential dp = dressed_potential(em, ad.xi_total);
    return tunneling_gap(ad.m_eff, dp.v_eff, dp.d_eff, ad.hbar);
}

OrderParameterScan order_parameter_scan(const SystemConfig& base, const std::vector<double>& h_list,
                                        const std::vector<int>& L_list) {
    if (base.wg.kind != WaveguideKind::PowerLaw)
        throw InputError("order_parameter_scan needs a power-law waveguide");
    if (h_list.empty() || L_list.empty()) throw InputError("order_parameter_scan needs h and L values");
    for (double h : h_list)
        if (!(h > 0)) throw InputError("bias values must be positive");
    std::vector<double> hs = h_list;
    std::sort(hs.begin(), hs.end());
    OrderParameterScan scan;
    for (int L : L_list) {
        SystemConfig cfg = base;
        cfg.wg = build_powerlaw(base.wg.l, base.wg.omega_max, L, base.wg.hbar);
        cfg.em.h = 0.0;
        cfg.n_eigs = std::max(cfg.n_eigs, 2);
        const SystemSolution s0 = solve_system(cfg);
        scan.L.push_back(L);
        scan.gap.push_back(s0.ed.E[1] - s0.ed.E[0]);
        scan.m_eff.push_back(s0.ad.m_eff);
        std::vector<double> q;
        for (double h : hs) {
            SystemConfig c = cfg;
            c.em.h = h;
            c.n_eigs = 1;
            const SystemSolution s = solve_system(c);
            const Observables obs(s);
            const double ql = obs.displacement(Eigen::VectorXd(s.ed.vectors.col(0)));
            scan.rows.push_back({L, h, ql, s.ed.E[0]});
            q.push_back(ql);
        }
        bool mono = true;
        for (std::size_t i = 1; i < q.size(); ++i)
            if (q[i] < q[i - 1] - 1e-10) mono = false;
        scan.monotone.push_back(mono);
        scan.extrapolated.push_back(
            q.size() >= 2 ? (hs[1] * q[0] - hs[0] * q[1]) / (hs[1] - hs[0]) : q[0]);
    }
    return scan;
}

XiProfile xi_profile(const SystemConfig& base, const std::vector<double>& g_list) {
    XiProfile p;
    for (double g : g_list) {
        SystemConfig cfg = base;
        cfg.g = g;
        p.g.push_back(g);
        p.xi.push_back(build_frame(cfg).ad.xi_total);
    }
    for (std::size_t i = 1; i + 1 < p.xi.size(); ++i) {
        const double a = p.xi[i] - p.xi[i - 1], b = p.xi[i + 1] - p.xi[i];
        if ((a > 0 && b < 0) || (a < 0 && b > 0)) p.turning_points.push_back(static_cast<int>(i));
    }
    return p;
}

}  // namespace adqed
