#include "adqed/scaling.hpp"

#include <cmath>

#include "adqed/observables.hpp"

namespace adqed {

const ScalingQuantity& ScalingTable::at(const std::string& name) const {
    for (const auto& q : quantities)
        if (q.name == name) return q;
    throw InputError("scaling table has no quantity '" + name + "'");
}

ScalingTable scaling_table(const SystemConfig& base, const std::vector<double>& g_grid,
                           bool with_photons) {
    if (g_grid.size() < 4) throw InputError("scaling_table needs at least 4 coupling values");
    ScalingTable t;
    t.g = g_grid;
    std::vector<std::string> names = {"Omega_0", "Omega_rest", "xi_0", "xi_rest", "m_eff"};
    if (with_photons) {
        names.push_back("photons_AD");
        names.push_back("photons_C");
    }
    for (const auto& n : names) t.quantities.push_back({n, {}, {}});

    for (double g : g_grid) {
        SystemConfig cfg = base;
        cfg.g = g;
        SystemSolution s = with_photons ? solve_system(cfg) : build_frame(cfg);
        const OrthogonalFrame& f = s.frame;
        const int M = static_cast<int>(f.Omega.size());
        const double x_omega = characteristic_scales(cfg.wg, s.coupling, cfg.em).x_omega;
        double om_rest = 0, xi_rest = 0;
        for (int n = 1; n < M; ++n) {
            om_rest += f.Omega[n] * f.Omega[n];
            xi_rest += f.xi[n] * f.xi[n];
        }
        om_rest = M > 1 ? std::sqrt(om_rest / (M - 1)) : 0.0;
        xi_rest = std::sqrt(xi_rest);
        t.quantities[0].values.push_back(f.Omega[0]);
        t.quantities[1].values.push_back(om_rest);
        t.quantities[2].values.push_back(std::abs(f.xi[0]) / x_omega);
        t.quantities[3].values.push_back(xi_rest / x_omega);
        t.quantities[4].values.push_back(s.ad.m_eff / s.ad.mass);
        if (with_photons) {
            const Observables obs(s);
            const PhotonMoments m = obs.moments(Eigen::VectorXd(s.ed.vectors.col(0)));
            t.quantities[5].values.push_back(obs.ad_photon_number(m));
            t.quantities[6].values.push_back(obs.coulomb_photon_number(m));
        }
    }
    for (auto& q : t.quantities) q.fit = fit_loglog(t.g, q.values);
    return t;
}

}  // namespace adqed
