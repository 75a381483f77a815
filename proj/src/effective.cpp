#include "adqed/effective.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/tools/roots.hpp>

namespace adqed {

JCModel build_jc_ad(const ADParameters& ad, const MatterSpectrum& matter,
                    const OrthogonalFrame& frame, const EmitterSpec& em) {
    if (matter.alpha_c() < 2) throw InputError("JC reduction needs at least two matter levels");
    JCModel jc;
    jc.frame = JCFrame::AD;
    jc.hbar = ad.hbar;
    jc.Delta = (matter.E[1] - matter.E[0]) / ad.hbar;
    jc.Omega = frame.Omega;
    const Eigen::MatrixXd dV = matrix_element(matter, em.potential().derivative());
    jc.dipole = dV(0, 1);
    jc.gt = frame.xi * (jc.dipole / ad.hbar);
    const double scale = dV.cwiseAbs().maxCoeff();
    jc.degenerate = std::abs(jc.dipole) <= 1e-12 * std::max(scale, 1e-300);
    jc.rwa_valid = jc.gt.size() == 0 || jc.Delta >= jc.gt.cwiseAbs().maxCoeff();
    return jc;
}

JCModel build_jc_ad(const SystemSolution& s, const EmitterSpec& em) {
    return build_jc_ad(s.ad, s.matter, s.frame, em);
}

JCModel build_jc_coulomb(const WaveguideSpec& wg, double g, const EmitterSpec& em,
                         const GridPolicy& grid) {
    const MatterSpectrum bare = solve_matter(em.potential(), em.mass, wg.hbar, 2, grid);
    JCModel jc;
    jc.frame = JCFrame::Coulomb;
    jc.hbar = wg.hbar;
    jc.Delta = (bare.E[1] - bare.E[0]) / wg.hbar;
    jc.dipole = derivative_matrix(bare)(0, 1);
    double wref = wg.omega_c;
    if (wg.kind != WaveguideKind::CavityArray) wref = std::sqrt(wg.omega.squaredNorm() / wg.L);
    const double x_wc = std::sqrt(wg.hbar / (em.mass * wref));
    jc.Omega = wg.omega;
    jc.gt = Eigen::VectorXd::Constant(wg.L, g / std::sqrt(static_cast<double>(wg.L)) * x_wc * jc.dipole);
    jc.degenerate = std::abs(jc.dipole) < 1e-12;
    jc.rwa_valid = jc.Delta >= jc.gt.cwiseAbs().maxCoeff();
    return jc;
}

std::vector<ExcitationRoot> solve_single_excitation(const JCModel& jc, bool all_branches) {
    // Merge equal frequencies into one pole carrying the summed weight.
    std::map<double, double> poles;
    for (int n = 0; n < jc.Omega.size(); ++n) {
        if (jc.gt[n] == 0.0) continue;
        double key = jc.Omega[n];
        for (const auto& [w, s] : poles)
            if (std::abs(w - key) <= 1e-12 * std::max(1.0, std::abs(w))) key = w;
        poles[key] += jc.gt[n] * jc.gt[n];
    }
    std::vector<ExcitationRoot> out;
    if (poles.empty()) {
        out.push_back({jc.Delta, 0.0, 0});
        return out;
    }
    std::vector<double> w, s;
    for (const auto& [k, v] : poles) {
        w.push_back(k);
        s.push_back(v);
    }
    auto f = [&](double E) {
        double r = E - jc.Delta;
        for (std::size_t i = 0; i < w.size(); ++i) r -= s[i] / (E - w[i]);
        return r;
    };
    auto solve = [&](double lo, double hi, int branch) {
        std::uintmax_t iters = 300;
        auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
        const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
        const double E = 0.5 * (r.first + r.second);
        double scale = std::abs(E) + std::abs(jc.Delta);
        for (std::size_t i = 0; i < w.size(); ++i) scale += std::abs(s[i] / (E - w[i]));
        const double res = std::abs(f(E)) / scale;
        if (res > 1e-10)
            throw NumericalError("single-excitation root did not converge (residual " +
                                 std::to_string(res) + ")");
        out.push_back({E, res, branch});
    };
    // Points just beside a pole where f has the sign of the adjacent divergence.
    auto beside = [&](double pole, double toward, bool want_positive) {
        double eps = 1e-3 * std::abs(toward - pole);
        for (int k = 0; k < 200; ++k) {
            const double x = pole + (toward > pole ? eps : -eps);
            if ((f(x) > 0) == want_positive) return x;
            eps *= 0.5;
        }
        throw NumericalError("could not bracket a single-excitation root near a pole");
    };

    double total = 0;
    for (double v : s) total += v;
    double lo = std::min(jc.Delta, w.front()) - 1.0 - 2.0 * std::sqrt(total);
    while (f(lo) >= 0) lo -= 2.0 * (std::abs(lo) + 1.0);
    solve(lo, beside(w.front(), lo, true), 0);
    if (all_branches)
        for (std::size_t i = 0; i + 1 < w.size(); ++i)
            solve(beside(w[i], w[i + 1], false), beside(w[i + 1], w[i], true), static_cast<int>(i) + 1);
    return out;
}

double rabi_lowest_excitation(const JCModel& jc, int Nc) {
    const int M = static_cast<int>(jc.Omega.size());
    const FewPhotonBasis basis(M, Nc, 2);
    const SparseMatrix A = lowering_matrix(basis, jc.gt);
    const long np = static_cast<long>(basis.photon_states());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * np, 2 * np);
    for (long i = 0; i < np; ++i) {
        double e = 0;
        for (int m = 0; m < M; ++m) e += jc.Omega[m] * basis.occupation(i)[m];
        for (int a = 0; a < 2; ++a)
            H(basis.index(i, a), basis.index(i, a)) = jc.hbar * (e + (a == 0 ? -0.5 : 0.5) * jc.Delta);
    }
    for (long col = 0; col < A.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(A, col); it; ++it)
            for (int a = 0; a < 2; ++a) {
                const long r = basis.index(it.row(), a), c = basis.index(col, 1 - a);
                H(r, c) += jc.hbar * it.value();
                H(c, r) += jc.hbar * it.value();
            }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    return (es.eigenvalues()[1] - es.eigenvalues()[0]) / jc.hbar;
}

IsingModel build_ising(const std::vector<EmitterSpec>& emitters, const ADParameters& ad,
                       const GridPolicy& grid) {
    const int N = static_cast<int>(emitters.size());
    if (N < 1) throw InputError("Ising reduction needs at least one emitter");
    if (ad.m_eff_j.size() != N || ad.mu.rows() != N || ad.xi_j.size() != N)
        throw InputError("AD parameters do not match the emitter list");
    IsingModel m;
    m.hbar = ad.hbar;
    m.Delta.resize(N);
    m.dipole.resize(N);
    for (int j = 0; j < N; ++j) {
        const DressedPotential dp = dressed_potential(emitters[j], ad.xi_j[j]);
        const MatterSpectrum ms = solve_matter(dp.dressed, ad.m_eff_j[j], ad.hbar, 2, grid);
        m.Delta[j] = (ms.E[1] - ms.E[0]) / ad.hbar;
        m.dipole[j] = derivative_matrix(ms)(0, 1);
    }
    m.J = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (i != j) m.J(i, j) = ad.hbar * ad.hbar * ad.mu(i, j) * m.dipole[i] * m.dipole[j];
    return m;
}

LMGModel lmg_limit(const IsingModel& ising, double tol) {
    const int N = static_cast<int>(ising.Delta.size());
    if (N < 1) throw InputError("LMG limit needs at least one spin");
    LMGModel l;
    l.hbar = ising.hbar;
    l.N = N;
    l.Delta = ising.Delta[0];
    const double dscale = std::max(std::abs(l.Delta), 1e-300);
    for (int j = 1; j < N; ++j)
        if (std::abs(ising.Delta[j] - l.Delta) > tol * dscale)
            throw InputError("LMG limit needs identical transverse fields");
    if (N == 1) return l;
    const double J = ising.J(1, 0);
    double dev = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (i != j) dev = std::max(dev, std::abs(ising.J(i, j) - J));
    if (dev > tol * std::max(std::abs(J), 1e-300))
        throw InputError("LMG limit needs a constant coupling matrix (max deviation " +
                         std::to_string(dev) + ")");
    l.Jprime = 0.5 * J;
    return l;
}

IsingModel ising_of(const LMGModel& lmg) {
    IsingModel m;
    m.hbar = lmg.hbar;
    m.Delta = Eigen::VectorXd::Constant(lmg.N, lmg.Delta);
    m.J = Eigen::MatrixXd::Constant(lmg.N, lmg.N, 2.0 * lmg.Jprime);
    m.J.diagonal().setZero();
    m.dipole = Eigen::VectorXd::Zero(lmg.N);
    return m;
}

SpinSpectrum diagonalize_spins(const IsingModel& ising, double degeneracy_tol) {
    const int N = static_cast<int>(ising.Delta.size());
    if (N < 1 || N > 14) throw InputError("spin ED supports 1 to 14 spins");
    const long dim = 1L << N;
    auto zsign = [](long s, int j) { return (s >> j) & 1 ? 1.0 : -1.0; };
    SpinSpectrum out;
    std::vector<std::pair<double, int>> levels;
    Eigen::MatrixXd vec[2];
    std::vector<long> members[2];
    for (long s = 0; s < dim; ++s) members[__builtin_popcountl(s) % 2].push_back(s);
    Eigen::VectorXd evals[2];
    for (int sec = 0; sec < 2; ++sec) {
        const auto& mem = members[sec];
        const long n = static_cast<long>(mem.size());
        std::vector<long> pos(dim, -1);
        for (long i = 0; i < n; ++i) pos[mem[i]] = i;
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
        for (long i = 0; i < n; ++i) {
            const long s = mem[i];
            double d = 0;
            for (int j = 0; j < N; ++j) d += 0.5 * ising.hbar * ising.Delta[j] * zsign(s, j);
            H(i, i) = d;
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < a; ++b) {
                    const long t = s ^ (1L << a) ^ (1L << b);
                    H(pos[t], i) += ising.J(a, b);
                }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        evals[sec] = es.eigenvalues();
        vec[sec] = es.eigenvectors().col(0);
        // prod sigma^z = (-1)^N for popcount 0, flipping sign with each up spin.
        const int par = ((N + sec) % 2 == 0) ? 1 : -1;
        for (long i = 0; i < n; ++i) levels.push_back({evals[sec][i], par});
    }
    std::stable_sort(levels.begin(), levels.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    out.E.resize(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        out.E[i] = levels[i].first;
        out.parity.push_back(levels[i].second);
    }
    if (N >= 1 && members[1].size() > 0) {
        const double scale = std::max(1.0, std::abs(out.E[0]));
        out.ground_degenerate = std::abs(evals[0][0] - evals[1][0]) < degeneracy_tol * scale;
        if (out.ground_degenerate) {
            // <even| S^x |odd> between the two sector ground states.
            std::vector<long> pos(dim, -1);
            for (long i = 0; i < static_cast<long>(members[1].size()); ++i) pos[members[1][i]] = i;
            double sx = 0;
            for (long i = 0; i < static_cast<long>(members[0].size()); ++i) {
                const long s = members[0][i];
                for (int j = 0; j < N; ++j) sx += vec[0](i, 0) * vec[1](pos[s ^ (1L << j)], 0);
            }
            out.magnetization = std::abs(sx);
        }
    }
    return out;
}

SpinSpectrum diagonalize_spins(const LMGModel& lmg, double degeneracy_tol) {
    SpinSpectrum s = diagonalize_spins(ising_of(lmg), degeneracy_tol);
    // The Ising form differs from J'(S^x)^2 by the constant -J N / 2 = -J' N.
    s.E.array() += lmg.Jprime * lmg.N;
    return s;
}

nlohmann::json to_json(const JCModel& jc) {
    nlohmann::json j;
    j["frame"] = jc.frame == JCFrame::AD ? "AD" : "Coulomb";
    j["hbar"] = jc.hbar;
    j["Delta"] = jc.Delta;
    j["Omega"] = std::vector<double>(jc.Omega.data(), jc.Omega.data() + jc.Omega.size());
    j["g_tilde"] = std::vector<double>(jc.gt.data(), jc.gt.data() + jc.gt.size());
    j["dipole"] = jc.dipole;
    j["degenerate"] = jc.degenerate;
    j["rwa_valid"] = jc.rwa_valid;
    return j;
}

nlohmann::json to_json(const IsingModel& m) {
    nlohmann::json j;
    j["hbar"] = m.hbar;
    j["Delta"] = std::vector<double>(m.Delta.data(), m.Delta.data() + m.Delta.size());
    std::vector<std::vector<double>> J(m.J.rows());
    for (int r = 0; r < m.J.rows(); ++r)
        for (int c = 0; c < m.J.cols(); ++c) J[r].push_back(m.J(r, c));
    j["J"] = J;
    j["dipole"] = std::vector<double>(m.dipole.data(), m.dipole.data() + m.dipole.size());
    return j;
}

nlohmann::json to_json(const LMGModel& m) {
    return {{"hbar", m.hbar}, {"Delta", m.Delta}, {"Jprime", m.Jprime}, {"N", m.N}};
}

}  // namespace adqed
