#include "adqed/system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace adqed {

Eigen::VectorXd SystemSolution::excitations(int n) const {
    const int k = std::min<int>(n, static_cast<int>(ed.E.size()) - 1);
    Eigen::VectorXd out(std::max(k, 0));
    for (int i = 0; i < k; ++i) out[i] = ed.E[i + 1] - ed.E[0];
    return out;
}

namespace {

OrthogonalFrame restrict_frame(const OrthogonalFrame& f, const std::vector<int>& keep) {
    OrthogonalFrame r;
    const int n = static_cast<int>(keep.size());
    r.O.resize(f.O.rows(), n);
    r.Omega.resize(n);
    r.r.resize(n, f.r.cols());
    r.zeta.resize(n);
    r.xi.resize(n);
    for (int i = 0; i < n; ++i) {
        r.O.col(i) = f.O.col(keep[i]);
        r.Omega[i] = f.Omega[keep[i]];
        r.r.row(i) = f.r.row(keep[i]);
        r.zeta[i] = f.zeta[keep[i]];
        r.xi[i] = f.xi[keep[i]];
    }
    r.orthogonality_residual = f.orthogonality_residual;
    r.reconstruction_residual = f.reconstruction_residual;
    return r;
}

}  // namespace

SystemSolution build_frame(const SystemConfig& cfg) {
    if (cfg.g < 0) throw InputError("coupling.g must be non-negative");
    SystemSolution s;
    s.coupling = couple_with_strength(cfg.wg, cfg.g, cfg.em.charge, cfg.em.mass);
    if (cfg.wg.kind == WaveguideKind::CavityArray && cfg.em.x == 0.0) {
        s.folded = fold_even_modes(cfg.wg, s.coupling, 0.0);
        s.modes = s.folded->modes;
    } else {
        s.modes = modes_of(cfg.wg, s.coupling);
    }
    s.frame = diagonalize_orthogonal(s.modes);
    s.ad = mass_renormalization(s.frame, s.modes);

    const int M = s.modes.size();
    std::vector<int> idx(M);
    std::iota(idx.begin(), idx.end(), 0);
    if (cfg.ed_modes > 0 && cfg.ed_modes < M) {
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
            return std::abs(s.frame.xi[a]) > std::abs(s.frame.xi[b]);
        });
        idx.resize(cfg.ed_modes);
        std::sort(idx.begin(), idx.end());
    }
    s.ed_modes = idx;
    s.ed_frame = restrict_frame(s.frame, idx);
    return s;
}

SystemSolution build_system(const SystemConfig& cfg, const MatterSpectrum* matter) {
    if (cfg.Nc < 0) throw InputError("nc must be non-negative");
    if (cfg.alpha_c < 2) throw InputError("alpha_c must be at least 2");
    SystemSolution s = build_frame(cfg);
    if (matter) {
        if (matter->alpha_c() < cfg.alpha_c)
            throw InputError("supplied matter spectrum has fewer than alpha_c states");
        if (std::abs(matter->mass - s.ad.m_eff) > 1e-12 * s.ad.m_eff)
            throw InputError("supplied matter spectrum was solved with a different effective mass");
        s.matter = truncate(*matter, cfg.alpha_c);
    } else {
        s.matter = solve_matter_eigenstates(s.ad, cfg.em, cfg.alpha_c, cfg.grid);
    }
    s.basis = std::make_shared<FewPhotonBasis>(static_cast<int>(s.ed_modes.size()), cfg.Nc,
                                               cfg.alpha_c, cfg.max_dim);
    const double zero_point = 0.5 * cfg.wg.hbar * (s.frame.Omega.sum() - s.modes.omega.sum());
    s.H = std::make_shared<ADHamiltonian>(*s.basis, s.ed_frame, s.matter, cfg.wg.hbar, zero_point);
    return s;
}

SystemSolution solve_system(const SystemConfig& cfg, const MatterSpectrum* matter) {
    SystemSolution s = build_system(cfg, matter);
    s.ed = diagonalize(*s.H, cfg.n_eigs, cfg.method, cfg.dense_limit);
    return s;
}

ConvergenceReport convergence_study(const SystemConfig& base, const std::vector<double>& g_list,
                                    const std::vector<int>& Nc_list,
                                    const std::vector<int>& alpha_list, int n_excitations) {
    if (Nc_list.size() + alpha_list.size() < 3 || Nc_list.empty() || alpha_list.empty())
        throw InputError("convergence study needs at least two values along one cutoff axis");
    ConvergenceReport rep;
    const int amax = *std::max_element(alpha_list.begin(), alpha_list.end());
    for (double g : g_list) {
        SystemConfig cfg = base;
        cfg.g = g;
        cfg.n_eigs = std::max(cfg.n_eigs, n_excitations + 1);
        const SystemSolution frame = build_frame(cfg);
        const MatterSpectrum matter = solve_matter_eigenstates(frame.ad, cfg.em, amax, cfg.grid);

        auto run = [&](int Nc, int ac) {
            SystemConfig c = cfg;
            c.Nc = Nc;
            c.alpha_c = ac;
            const SystemSolution s = solve_system(c, &matter);
            ConvergenceRow row{g, Nc, ac, s.ed.E, s.excitations(n_excitations)};
            rep.rows.push_back(row);
            return row;
        };
        auto compare = [&](const ConvergenceRow& a, const ConvergenceRow& b, const std::string& axis,
                           int from, int to) {
            double worst = 0;
            const int n = static_cast<int>(std::min(a.excitations.size(), b.excitations.size()));
            for (int i = 0; i < n; ++i)
                worst = std::max(worst, std::abs(b.excitations[i] - a.excitations[i]) /
                                            std::max(std::abs(a.excitations[i]), 1e-300));
            rep.changes.push_back({g, axis, from, to, worst, b.energies[0] - a.energies[0]});
        };

        const int a_ref = alpha_list.back();
        std::vector<ConvergenceRow> nc_rows;
        for (int Nc : Nc_list) nc_rows.push_back(run(Nc, a_ref));
        for (std::size_t i = 1; i < nc_rows.size(); ++i)
            compare(nc_rows[i - 1], nc_rows[i], "Nc", Nc_list[i - 1], Nc_list[i]);

        const int n_ref = Nc_list.back();
        std::vector<ConvergenceRow> a_rows;
        for (std::size_t i = 0; i < alpha_list.size(); ++i)
            a_rows.push_back(alpha_list[i] == a_ref ? nc_rows.back() : run(n_ref, alpha_list[i]));
        for (std::size_t i = 1; i < a_rows.size(); ++i)
            compare(a_rows[i - 1], a_rows[i], "alpha_c", alpha_list[i - 1], alpha_list[i]);
    }
    return rep;
}

}  // namespace adqed
