#include "adqed/ad_frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <lapacke.h>

namespace adqed {

DressedPotential dressed_potential(const EmitterSpec& em, double xi) {
    if (xi < 0) throw InputError("dressed_potential: xi must be >= 0");
    DressedPotential dp;
    dp.bare = em.potential();
    dp.xi = xi;
    dp.dressed = dp.bare.gaussian_smoothed(xi);
    if (em.shape == PotentialShape::DoubleWell) {
        dp.double_well = true;
        const double s = 1.0 - 3.0 * xi * xi / (em.d * em.d);
        dp.v_eff = s > 0 ? em.v * s * s : 0.0;
        dp.d_eff = em.d * std::pow(dp.v_eff / em.v, 0.25);
    }
    return dp;
}

ADParameters mass_renormalization(const OrthogonalFrame& frame, const ModeSet& modes) {
    ADParameters ad;
    ad.hbar = modes.hbar;
    ad.mass = modes.mass;
    double theta = 0, largest = 0;
    for (int k = 0; k < modes.size(); ++k) {
        const double t = std::pow(modes.g[k] / modes.omega[k], 2);
        theta += t;
        largest = std::max(largest, t);
    }
    ad.Theta = theta;
    ad.theta_divergent = theta > 0 && largest > 0.1 * theta && modes.size() > 10;
    ad.m_eff = modes.mass * (1.0 + 2.0 * theta);
    ad.xi_total = frame.xi.norm();

    // Frame identity: sum_n 2 m zeta_n^2 / (hbar Omega_n) = 2 Theta / (1 + 2 Theta).
    double s = 0;
    for (int n = 0; n < modes.size(); ++n)
        s += 2.0 * modes.mass * frame.zeta[n] * frame.zeta[n] / (modes.hbar * frame.Omega[n]);
    const double expect = 2.0 * theta / (1.0 + 2.0 * theta);
    ad.frame_check = expect > 0 ? std::abs(s - expect) / expect : std::abs(s);
    // Eigenvector accuracy of the mode diagonalization degrades with its condition number.
    const double cond = std::pow(frame.Omega.maxCoeff() / frame.Omega.minCoeff(), 2);
    if (ad.frame_check > std::max(1e-8, 1e-14 * cond))
        throw NumericalError("mass renormalization cross-check failed: relative mismatch " +
                             std::to_string(ad.frame_check));

    ad.G = Eigen::MatrixXd::Constant(1, 1, theta);
    ad.mu = Eigen::MatrixXd::Zero(1, 1);
    ad.m_eff_j = Eigen::VectorXd::Constant(1, ad.m_eff);
    ad.xi_j = Eigen::VectorXd::Constant(1, ad.xi_total);
    return ad;
}

ADParameters mass_renormalization(const SymplecticFrame& frame, const MultiCoupling& mc,
                                  const WaveguideSpec& wg, const std::vector<EmitterSite>& sites) {
    const int N = static_cast<int>(sites.size());
    const Eigen::VectorXd winv2 = wg.omega.array().square().inverse();
    ADParameters ad;
    ad.hbar = wg.hbar;
    ad.mass = sites.front().mass;
    ad.G = mc.gc.transpose() * winv2.asDiagonal() * mc.gc + mc.gs.transpose() * winv2.asDiagonal() * mc.gs;
    const Eigen::MatrixXd T =
        (Eigen::MatrixXd::Identity(N, N) + 2.0 * ad.G).inverse();
    ad.m_eff_j.resize(N);
    ad.mu.resize(N, N);
    ad.xi_j.resize(N);
    double worst = 0;
    for (int i = 0; i < N; ++i) {
        ad.m_eff_j[i] = sites[i].mass / T(i, i);
        ad.xi_j[i] = std::sqrt(frame.xi.col(i).squaredNorm());
        for (int j = 0; j < N; ++j) {
            ad.mu(i, j) = i == j ? 0.0 : T(i, j) / std::sqrt(sites[i].mass * sites[j].mass);
            // The same quantities from the frame couplings.
            double s = 0;
            for (int n = 0; n < frame.Omega.size(); ++n)
                s += 2.0 * std::real(std::conj(frame.zeta(n, i)) * frame.zeta(n, j)) /
                     (wg.hbar * frame.Omega[n]);
            double mismatch;
            if (i == j) {
                const double m_frame = sites[i].mass / (1.0 - sites[i].mass * s);
                mismatch = std::abs(m_frame - ad.m_eff_j[i]) / ad.m_eff_j[i];
            } else {
                const double scale = std::abs(T(i, i)) / sites[i].mass;
                mismatch = std::abs(-s - ad.mu(i, j)) / scale;
            }
            worst = std::max(worst, mismatch);
        }
    }
    ad.frame_check = worst;
    if (worst > 1e-8)
        throw NumericalError("multi-emitter mass renormalization cross-check failed: " +
                             std::to_string(worst));
    ad.Theta = ad.G(0, 0);
    ad.m_eff = ad.m_eff_j[0];
    ad.xi_total = ad.xi_j[0];
    return ad;
}

namespace {

struct GridSolve {
    Eigen::VectorXd Q;
    Eigen::VectorXd E;
    Eigen::MatrixXd psi;
    Eigen::VectorXd split;  // E_odd - E_even per doublet, symmetric potentials only
    double tail{0.0};
};

// Lowest k eigenpairs of a symmetric tridiagonal matrix.
void tridiagonal_lowest(std::vector<double> diag, std::vector<double> off, int k,
                        Eigen::VectorXd& E, Eigen::MatrixXd& Z) {
    const int n = static_cast<int>(diag.size());
    if (off.empty()) off.push_back(0.0);
    std::vector<double> w(n), z(static_cast<std::size_t>(n) * k);
    std::vector<lapack_int> support(2 * k);
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(),
                                           0.0, 0.0, 1, k, 0.0, &found, w.data(), z.data(), n,
                                           support.data());
    if (info != 0 || found != k)
        throw NumericalError("matter eigensolver (dstevr) failed, info=" + std::to_string(info));
    E = Eigen::Map<Eigen::VectorXd>(w.data(), k);
    Z = Eigen::Map<Eigen::MatrixXd>(z.data(), n, k);
}

GridSolve solve_grid(const Polynomial& V, double mass, double hbar, int alpha_c, double R, int n) {
    const double h = 2.0 * R / (n + 1);
    GridSolve gs;
    gs.Q.resize(n);
    const double kin = hbar * hbar / (mass * h * h);
    // Mirrored explicitly so that the grid is exactly symmetric about 0.
    for (int i = 0; i < n; ++i) gs.Q[i] = -R + (i + 1) * h;
    for (int i = 0; i < n / 2; ++i) gs.Q[n - 1 - i] = -gs.Q[i];
    if (n % 2 == 1) gs.Q[n / 2] = 0.0;

    if (V.is_even() && n % 2 == 1) {
        // Solve the even and odd sectors separately so that near-degenerate
        // tunnelling doublets keep exact parity.
        const int c = n / 2, m = n / 2;
        std::vector<double> de(m + 1), oe(m), dodd(m), oodd(std::max(m - 1, 0));
        for (int j = 0; j <= m; ++j) de[j] = kin + V(gs.Q[c + j]);
        for (int j = 0; j < m; ++j) oe[j] = -0.5 * kin;
        oe[0] *= std::sqrt(2.0);
        for (int j = 0; j < m; ++j) dodd[j] = kin + V(gs.Q[c + 1 + j]);
        for (int j = 0; j + 1 < m; ++j) oodd[j] = -0.5 * kin;
        const int ke = std::min(alpha_c, m + 1), ko = std::min(alpha_c, m);
        Eigen::VectorXd Ee, Eo;
        Eigen::MatrixXd Ze, Zo;
        tridiagonal_lowest(de, oe, ke, Ee, Ze);
        tridiagonal_lowest(dodd, oodd, ko, Eo, Zo);
        // Doublet splittings from the discrete Wronskian at Q = 0, which stays accurate
        // when the splitting is far below the resolution of the separate eigenvalues.
        gs.split.resize(std::min(ke, ko));
        for (int k = 0; k < std::min(ke, ko); ++k) {
            gs.split[k] = Eo[k] - Ee[k];
            double den = 0;
            for (int j = 1; j <= m; ++j) den += 0.5 * Ze(j, k) * Zo(j - 1, k);
            if (std::abs(den) < 0.25) continue;
            const double split = 0.5 * kin * Ze(0, k) * Zo(0, k) / std::sqrt(2.0) / den;
            gs.split[k] = split;
            const double slack = 1e-10 * std::max({kin, std::abs(Ee[k]), std::abs(Eo[k])});
            if (std::abs(split - (Eo[k] - Ee[k])) < slack) Eo[k] = Ee[k] + split;
        }
        gs.E.resize(alpha_c);
        gs.psi = Eigen::MatrixXd::Zero(n, alpha_c);
        int ie = 0, io = 0;
        for (int a = 0; a < alpha_c; ++a) {
            const bool take_even = io >= ko || (ie < ke && Ee[ie] <= Eo[io]);
            if (take_even) {
                gs.E[a] = Ee[ie];
                gs.psi(c, a) = Ze(0, ie);
                for (int j = 1; j <= m; ++j)
                    gs.psi(c + j, a) = gs.psi(c - j, a) = Ze(j, ie) / std::sqrt(2.0);
                ++ie;
            } else {
                gs.E[a] = Eo[io];
                for (int j = 1; j <= m; ++j) {
                    gs.psi(c + j, a) = Zo(j - 1, io) / std::sqrt(2.0);
                    gs.psi(c - j, a) = -gs.psi(c + j, a);
                }
                ++io;
            }
        }
    } else {
        std::vector<double> diag(n), off(std::max(n - 1, 0));
        for (int i = 0; i < n; ++i) diag[i] = kin + V(gs.Q[i]);
        for (int i = 0; i + 1 < n; ++i) off[i] = -0.5 * kin;
        tridiagonal_lowest(diag, off, alpha_c, gs.E, gs.psi);
    }

    const int edge = std::max(1, n / 10);
    for (int a = 0; a < alpha_c; ++a) {
        const double peak = gs.psi.col(a).cwiseAbs().maxCoeff();
        double t = 0;
        for (int i = 0; i < edge; ++i)
            t = std::max({t, std::abs(gs.psi(i, a)), std::abs(gs.psi(n - 1 - i, a))});
        gs.tail = std::max(gs.tail, t / peak);
    }
    return gs;
}

int odd_points(double R, double h) {
    int n = static_cast<int>(std::lround(2.0 * R / h)) - 1;
    if (n % 2 == 0) ++n;
    return n;
}

void fix_signs(MatterSpectrum& ms) {
    const int n = static_cast<int>(ms.Q.size());
    for (int a = 0; a < ms.alpha_c(); ++a) {
        auto col = ms.psi.col(a);
        const double peak = col.cwiseAbs().maxCoeff();
        for (int i = 0; i < n; ++i) {
            const double here = std::abs(col[i]);
            if (here < 1e-3 * peak) continue;
            const double next = i + 1 < n ? std::abs(col[i + 1]) : 0.0;
            if (here >= next) {
                if (col[i] < 0) col *= -1.0;
                break;
            }
        }
    }
}

void assign_parity(MatterSpectrum& ms) {
    ms.symmetric = ms.V.is_even();
    ms.parity.assign(ms.alpha_c(), 0);
    if (!ms.symmetric) return;
    const int n = static_cast<int>(ms.Q.size());
    for (int a = 0; a < ms.alpha_c(); ++a) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += ms.psi(i, a) * ms.psi(n - 1 - i, a);
        if (std::abs(std::abs(s) - 1.0) > 1e-6)
            throw NumericalError("matter eigenstate has no definite parity (overlap " +
                                 std::to_string(s) + ")");
        ms.parity[a] = s > 0 ? 1 : -1;
    }
}

double cauchy_bound(const Polynomial& p) {
    const auto& c = p.coeffs();
    const double lead = c.back();
    double m = 0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) m = std::max(m, std::abs(c[i] / lead));
    return 1.0 + m;
}

}  // namespace

MatterSpectrum solve_matter_on_grid(const Polynomial& V, double mass, double hbar, int alpha_c,
                                    double R, double h) {
    const int n = odd_points(R, h);
    if (n < alpha_c + 2) throw InputError("matter grid too coarse for the requested alpha_c");
    GridSolve gs = solve_grid(V, mass, hbar, alpha_c, R, n);
    MatterSpectrum ms;
    ms.Q = gs.Q;
    ms.h = 2.0 * R / (n + 1);
    ms.psi = gs.psi;
    ms.E = gs.E;
    ms.E_extrapolated = gs.E;
    ms.doublet_splitting = gs.split.head(std::min<Eigen::Index>(alpha_c / 2, gs.split.size()));
    ms.mass = mass;
    ms.hbar = hbar;
    ms.V = V;
    ms.tail_amplitude = gs.tail;
    fix_signs(ms);
    assign_parity(ms);
    return ms;
}

MatterSpectrum solve_matter(const Polynomial& V, double mass, double hbar, int alpha_c,
                            const GridPolicy& policy) {
    if (!(mass > 0)) throw InputError("solve_matter needs a positive mass");
    if (alpha_c < 1) throw InputError("solve_matter needs alpha_c >= 1");
    if (V.degree() < 2 || V.degree() % 2 != 0 || V.coeffs().back() <= 0)
        throw InputError("potential is not confining (needs even degree and positive leading term)");

    // Locate the global minimum on a scan covering every critical point.
    const Polynomial dV = V.derivative();
    const double span = 2.0 * cauchy_bound(dV) + 1.0;
    double vmin = V(0.0);
    const int scan = 20000;
    for (int i = 0; i <= scan; ++i) vmin = std::min(vmin, V(-span + 2.0 * span * i / scan));

    double R = policy.R > 0 ? policy.R : span;
    // Initial box and spacing from coarse solves: shrink the box towards twice the
    // classical turning radius of the highest retained level, then resolve its local
    // wavelength.
    double h = policy.h;
    if (h <= 0 || policy.R <= 0) {
        double erange = 0.0;
        for (int pass = 0; pass < 8; ++pass) {
            const int n0 = std::max(odd_points(R, R / 200.0), 2 * alpha_c + 3);
            const GridSolve probe = solve_grid(V, mass, hbar, alpha_c, R, n0);
            const double etop = probe.E[alpha_c - 1];
            erange = std::max(etop - vmin, hbar * hbar / (mass * R * R));
            if (policy.R > 0) break;
            double turn = 0.0;
            for (int i = 0; i <= scan; ++i) {
                const double q = -span + 2.0 * span * i / scan;
                if (V(q) <= etop) turn = std::max(turn, std::abs(q));
            }
            const double target = std::max(2.0 * turn, 4.0 * span / scan);
            if (target > 0.7 * R) break;
            R = target;
        }
        if (h <= 0) {
            const double lambda = 2.0 * std::numbers::pi * hbar / std::sqrt(2.0 * mass * erange);
            h = std::min(R / 200.0, lambda / 20.0);
        }
    }

    // Widen the box until every retained state has decayed at the walls.
    GridSolve coarse;
    int n = 0;
    for (int attempt = 0;; ++attempt) {
        n = odd_points(R, h);
        if (n < std::max(4, alpha_c + 2))
            throw InputError("matter grid has too few points for alpha_c = " + std::to_string(alpha_c));
        if (n > policy.max_points)
            throw NumericalError("matter grid exceeds the point budget while enlarging the box");
        coarse = solve_grid(V, mass, hbar, alpha_c, R, n);
        if (coarse.tail < policy.tail_tol || policy.R > 0) break;
        if (attempt > 40) throw NumericalError("matter box auto-sizing did not converge");
        R *= 1.3;
    }

    // Halve the spacing until successive Richardson-extrapolated energies agree; the
    // three-point stencil is second order, so the extrapolation removes the h^2 term.
    Eigen::VectorXd prev_ext;
    for (;;) {
        const int n_fine = 2 * n + 1;
        if (n_fine > policy.max_points)
            throw NumericalError("matter grid refinement exceeds the point budget");
        GridSolve fine = solve_grid(V, mass, hbar, alpha_c, R, n_fine);
        const Eigen::VectorXd ext = (4.0 * fine.E - coarse.E) / 3.0;
        double scale = std::max(std::abs(ext[alpha_c - 1] - ext[0]), 1e-300);
        for (int a = 0; a < alpha_c; ++a) scale = std::max(scale, std::abs(ext[a]));
        const double err = prev_ext.size() == 0 ? std::numeric_limits<double>::infinity()
                                                : (ext - prev_ext).cwiseAbs().maxCoeff() / scale;
        if (err < policy.richardson_tol) {
            MatterSpectrum ms;
            ms.Q = fine.Q;
            ms.h = 2.0 * R / (n_fine + 1);
            ms.psi = fine.psi;
            ms.E = ext;
            ms.E_extrapolated = ext;
            if (fine.split.size() == coarse.split.size()) {
                const Eigen::Index pairs = std::min<Eigen::Index>(alpha_c / 2, fine.split.size());
                ms.doublet_splitting = (4.0 * fine.split.head(pairs) - coarse.split.head(pairs)) / 3.0;
            }
            ms.richardson_error = err;
            ms.tail_amplitude = fine.tail;
            ms.mass = mass;
            ms.hbar = hbar;
            ms.V = V;
            fix_signs(ms);
            assign_parity(ms);
            return ms;
        }
        prev_ext = ext;
        n = n_fine;
        coarse = std::move(fine);
    }
}

MatterSpectrum solve_matter_eigenstates(const ADParameters& ad, const EmitterSpec& em, int alpha_c,
                                        const GridPolicy& policy) {
    if (alpha_c < 2) throw InputError("solve_matter_eigenstates needs alpha_c >= 2");
    const DressedPotential dp = dressed_potential(em, ad.xi_total);
    return solve_matter(dp.dressed, ad.m_eff, ad.hbar, alpha_c, policy);
}

MatterSpectrum truncate(const MatterSpectrum& ms, int n) {
    if (n > ms.alpha_c()) throw InputError("truncate: more states requested than available");
    MatterSpectrum out = ms;
    out.psi = ms.psi.leftCols(n);
    out.E = ms.E.head(n);
    out.E_extrapolated = ms.E_extrapolated.head(n);
    out.doublet_splitting = ms.doublet_splitting.head(std::min<Eigen::Index>(n / 2, ms.doublet_splitting.size()));
    out.parity.resize(n);
    return out;
}

Eigen::MatrixXd matrix_element(const MatterSpectrum& ms, const Polynomial& f) {
    Eigen::VectorXd fq(ms.Q.size());
    for (int i = 0; i < ms.Q.size(); ++i) fq[i] = f(ms.Q[i]);
    return ms.psi.transpose() * fq.asDiagonal() * ms.psi;
}

Eigen::MatrixXd derivative_matrix(const MatterSpectrum& ms) {
    const int n = static_cast<int>(ms.Q.size());
    Eigen::MatrixXd dpsi = Eigen::MatrixXd::Zero(n, ms.alpha_c());
    for (int i = 0; i < n; ++i) {
        const Eigen::RowVectorXd up = i + 1 < n ? Eigen::RowVectorXd(ms.psi.row(i + 1)) : Eigen::RowVectorXd::Zero(ms.alpha_c());
        const Eigen::RowVectorXd dn = i > 0 ? Eigen::RowVectorXd(ms.psi.row(i - 1)) : Eigen::RowVectorXd::Zero(ms.alpha_c());
        dpsi.row(i) = (up - dn) / (2.0 * ms.h);
    }
    return ms.psi.transpose() * dpsi;
}

Eigen::MatrixXd momentum_squared_matrix(const MatterSpectrum& ms) {
    const int n = static_cast<int>(ms.Q.size());
    Eigen::MatrixXd fwd(n + 1, ms.alpha_c());
    for (int i = 0; i <= n; ++i) {
        const Eigen::RowVectorXd up = i < n ? Eigen::RowVectorXd(ms.psi.row(i)) : Eigen::RowVectorXd::Zero(ms.alpha_c());
        const Eigen::RowVectorXd dn = i > 0 ? Eigen::RowVectorXd(ms.psi.row(i - 1)) : Eigen::RowVectorXd::Zero(ms.alpha_c());
        fwd.row(i) = (up - dn) / ms.h;
    }
    return ms.hbar * ms.hbar * fwd.transpose() * fwd;
}

CollectiveMode collective_reduction(const std::vector<EmitterSpec>& emitters, const ModeSet& modes) {
    if (emitters.empty()) throw InputError("collective_reduction needs at least one emitter");
    const EmitterSpec& e0 = emitters.front();
    for (const auto& e : emitters) {
        if (e.mass != e0.mass || e.charge != e0.charge || e.shape != e0.shape || e.v != e0.v ||
            e.d != e0.d || e.cubic != e0.cubic || e.h != e0.h || e.x != e0.x || e.poly != e0.poly)
            throw InputError("collective_reduction needs identical, co-located emitters");
    }
    if (e0.shape != PotentialShape::DoubleWell)
        throw InputError("collective_reduction is defined for the double-well potential");
    const int N = static_cast<int>(emitters.size());
    CollectiveMode cm;
    cm.N = N;
    cm.mapped_emitter = e0;
    cm.mapped_emitter.v = N * e0.v;
    cm.mapped_emitter.d = std::sqrt(static_cast<double>(N)) * e0.d;
    // A bias -h sum_j Q_j becomes -sqrt(N) h Q_CM.
    cm.mapped_emitter.h = std::sqrt(static_cast<double>(N)) * e0.h;
    cm.mapped_emitter.cubic = e0.cubic / std::sqrt(static_cast<double>(N));
    cm.mapped_modes = modes;
    cm.mapped_modes.g = std::sqrt(static_cast<double>(N)) * modes.g;
    cm.Theta = (modes.g.array() / modes.omega.array()).square().sum();
    cm.M_eff = e0.mass * (1.0 + 2.0 * N * cm.Theta);
    return cm;
}

}  // namespace adqed
