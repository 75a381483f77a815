#include "adqed/boson_diag.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

namespace adqed {

ModeSet modes_of(const WaveguideSpec& wg, const CouplingProfile& cp) {
    if (cp.g.size() != wg.L) throw InputError("coupling profile and waveguide mode counts differ");
    return ModeSet{wg.omega, cp.g, wg.hbar, cp.mass};
}

namespace {

// Replaces the columns [begin, end) of V, which span a degenerate eigenspace,
// by the basis obtained from Gram-Schmidt on the projected unit vectors in
// ascending k order.
void canonicalize_cluster(Eigen::MatrixXd& V, int begin, int end) {
    const int r = end - begin;
    const Eigen::MatrixXd B = V.middleCols(begin, r);
    const Eigen::MatrixXd P = B * B.transpose();
    Eigen::MatrixXd out(V.rows(), r);
    int found = 0;
    for (int k = 0; k < V.rows() && found < r; ++k) {
        Eigen::VectorXd u = P.col(k);
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < found; ++j) u -= out.col(j).dot(u) * out.col(j);
        const double nrm = u.norm();
        if (nrm > 1e-6) out.col(found++) = u / nrm;
    }
    if (found != r) throw NumericalError("degenerate eigenspace canonicalization failed");
    V.middleCols(begin, r) = out;
}

}  // namespace

OrthogonalFrame diagonalize_orthogonal(const ModeSet& modes) {
    const int L = modes.size();
    if (L == 0 || modes.g.size() != L) throw InputError("diagonalize_orthogonal: bad mode set");
    for (int k = 0; k < L; ++k)
        if (!(modes.omega[k] > 0))
            throw InputError("diagonalize_orthogonal needs all omega_k > 0");

    Eigen::MatrixXd K = modes.omega.array().square().matrix().asDiagonal();
    K += 2.0 * modes.g * modes.g.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    if (es.info() != Eigen::Success) throw NumericalError("quadratic photon form eigensolve failed");

    Eigen::VectorXd lam = es.eigenvalues().reverse();
    Eigen::MatrixXd V = es.eigenvectors().rowwise().reverse();
    if (lam.minCoeff() <= 0)
        throw NumericalError("quadratic photon form has a non-positive eigenvalue (unstable input)");

    const double tol = 1e-12 * lam.cwiseAbs().maxCoeff();
    for (int i = 0; i < L;) {
        int j = i + 1;
        while (j < L && std::abs(lam[j] - lam[i]) <= tol) ++j;
        if (j - i > 1) canonicalize_cluster(V, i, j);
        i = j;
    }

    OrthogonalFrame f;
    f.O = V;
    f.Omega = lam.array().sqrt();
    f.zeta.resize(L);
    f.xi.resize(L);
    for (int n = 0; n < L; ++n) {
        double s = modes.g.dot(f.O.col(n));
        if (std::abs(s) <= 1e-14 * std::max(modes.g.norm(), 1e-300)) {
            Eigen::Index imax;
            f.O.col(n).cwiseAbs().maxCoeff(&imax);
            if (f.O(imax, n) < 0) f.O.col(n) *= -1.0;
            s = std::abs(s);
        } else if (s < 0) {
            f.O.col(n) *= -1.0;
            s = -s;
        }
        f.zeta[n] = std::sqrt(modes.hbar / (modes.mass * f.Omega[n])) * s;
        f.xi[n] = f.zeta[n] / f.Omega[n];
    }
    f.r.resize(L, L);
    for (int n = 0; n < L; ++n)
        for (int k = 0; k < L; ++k) f.r(n, k) = 0.5 * std::log(f.Omega[n] / modes.omega[k]);

    f.orthogonality_residual =
        (f.O.transpose() * f.O - Eigen::MatrixXd::Identity(L, L)).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd back = f.O * lam.asDiagonal() * f.O.transpose();
    f.reconstruction_residual = (back - K).norm() / K.norm();
    return f;
}

MultiCoupling multi_coupling(const WaveguideSpec& wg, double g, const std::vector<EmitterSite>& sites,
                             double charge) {
    if (sites.empty()) throw InputError("multi_coupling needs at least one emitter");
    const CouplingProfile ref = couple_with_strength(wg, g, charge, sites.front().mass);
    MultiCoupling mc;
    mc.gc.resize(wg.L, sites.size());
    mc.gs.resize(wg.L, sites.size());
    for (std::size_t j = 0; j < sites.size(); ++j) {
        for (int k = 0; k < wg.L; ++k) {
            const double gk = charge * ref.f[k] * std::sqrt(wg.omega[k] / (sites[j].mass * wg.hbar));
            mc.gc(k, j) = gk * std::cos(wg.k[k] * sites[j].x);
            mc.gs(k, j) = gk * std::sin(wg.k[k] * sites[j].x);
        }
    }
    return mc;
}

Eigen::MatrixXd symplectic_form(int L) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * L, 2 * L);
    s.topRightCorner(L, L).setIdentity();
    s.bottomLeftCorner(L, L) = -Eigen::MatrixXd::Identity(L, L);
    return s;
}

SymplecticFrame diagonalize_symplectic(const WaveguideSpec& wg, const MultiCoupling& mc,
                                       const std::vector<EmitterSite>& sites) {
    const int L = wg.L;
    const int N = static_cast<int>(sites.size());
    if (N == 0) throw InputError("diagonalize_symplectic needs at least one emitter");
    if (mc.gc.rows() != L || mc.gc.cols() != N) throw InputError("coupling matrix shape mismatch");
    for (int k = 0; k < L; ++k)
        if (!(wg.omega[k] > 0)) throw InputError("diagonalize_symplectic needs all omega_k > 0");

    const Eigen::VectorXd& w = wg.omega;
    const Eigen::VectorXd winv = w.cwiseInverse();
    Eigen::MatrixXd gs_w = winv.asDiagonal() * mc.gs;  // g^s_kj / omega_k

    Eigen::MatrixXd H(2 * L, 2 * L);
    Eigen::MatrixXd XX = w.array().square().matrix().asDiagonal();
    XX += 2.0 * mc.gc * mc.gc.transpose();
    Eigen::MatrixXd PP = Eigen::MatrixXd::Identity(L, L) + 2.0 * gs_w * gs_w.transpose();
    Eigen::MatrixXd XP = -2.0 * mc.gc * gs_w.transpose();
    H << XX, XP, XP.transpose(), PP;

    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success)
        throw NumericalError("quadratic photon form is not positive definite");
    const Eigen::MatrixXd Lc = llt.matrixL();
    const Eigen::MatrixXd sigma = symplectic_form(L);
    const Eigen::MatrixXd Kmat = Lc.transpose() * sigma * Lc;
    const Eigen::MatrixXcd iK = std::complex<double>(0, 1) * Kmat.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(iK);
    if (es.info() != Eigen::Success) throw NumericalError("symplectic eigensolve failed");

    // Positive eigenvalues sit in the upper half; take them in descending order.
    SymplecticFrame f;
    f.H = H;
    f.Omega.resize(L);
    Eigen::MatrixXcd U(2 * L, L);
    for (int n = 0; n < L; ++n) {
        f.Omega[n] = es.eigenvalues()[2 * L - 1 - n];
        U.col(n) = es.eigenvectors().col(2 * L - 1 - n);
    }
    if (f.Omega.minCoeff() <= 0) throw NumericalError("symplectic spectrum is not positive");

    auto build = [&](const Eigen::MatrixXcd& Uc) {
        Eigen::MatrixXd Q(2 * L, 2 * L);
        for (int n = 0; n < L; ++n) {
            Q.col(n) = std::sqrt(2.0) * Uc.col(n).imag();
            Q.col(L + n) = std::sqrt(2.0) * Uc.col(n).real();
        }
        Eigen::VectorXd scale(2 * L);
        for (int n = 0; n < L; ++n) {
            // Williamson scaling sqrt(Omega) then the (sqrt(Omega), 1/sqrt(Omega)) rescale
            // to the form 1/2 (Pt^2 + Omega^2 Xt^2).
            scale[n] = f.Omega[n];
            scale[L + n] = 1.0;
        }
        Eigen::MatrixXd Y = Lc.transpose().triangularView<Eigen::Upper>().solve(Q);
        return Eigen::MatrixXd(Y * scale.asDiagonal());
    };

    auto zeta_of = [&](const Eigen::MatrixXd& S) {
        Eigen::MatrixXcd z(L, N);
        const auto SXX = S.topLeftCorner(L, L);
        const auto SXP = S.topRightCorner(L, L);
        const auto SPX = S.bottomLeftCorner(L, L);
        const auto SPP = S.bottomRightCorner(L, L);
        for (int j = 0; j < N; ++j) {
            const Eigen::VectorXd A = SXX.transpose() * mc.gc.col(j) - SPX.transpose() * gs_w.col(j);
            const Eigen::VectorXd B = SXP.transpose() * mc.gc.col(j) - SPP.transpose() * gs_w.col(j);
            for (int n = 0; n < L; ++n) {
                const double pre = std::sqrt(wg.hbar / (sites[j].mass * f.Omega[n]));
                z(n, j) = pre * std::complex<double>(A[n], f.Omega[n] * B[n]);
            }
        }
        return z;
    };

    Eigen::MatrixXd S = build(U);
    Eigen::MatrixXcd z = zeta_of(S);
    // Fix the free phase of each mode so that the first emitter's coupling is real and >= 0.
    for (int n = 0; n < L; ++n) {
        const std::complex<double> z0 = z(n, 0);
        if (std::abs(z0) > 1e-14) U.col(n) *= z0 / std::abs(z0);
    }
    S = build(U);
    f.S = S;
    f.zeta = zeta_of(S);
    f.xi.resize(L, N);
    for (int n = 0; n < L; ++n) f.xi.row(n) = f.zeta.row(n) / f.Omega[n];

    f.symplectic_residual = (S * sigma * S.transpose() - sigma).cwiseAbs().maxCoeff();
    Eigen::VectorXd target(2 * L);
    target << f.Omega.array().square().matrix(), Eigen::VectorXd::Ones(L);
    const Eigen::MatrixXd D = S.transpose() * H * S;
    f.diagonal_residual = (D - Eigen::MatrixXd(target.asDiagonal())).cwiseAbs().maxCoeff() /
                          target.cwiseAbs().maxCoeff();
    if (f.symplectic_residual > 1e-8)
        throw NumericalError("symplectic residual too large: " + std::to_string(f.symplectic_residual));
    return f;
}

std::vector<std::string> write_frame_csv(const OrthogonalFrame& frame, const ModeSet& modes,
                                         const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string modes_file = dir + "/frame_modes.csv";
    const std::string matrix_file = dir + "/frame_O.csv";
    {
        std::ofstream out(modes_file);
        out << std::setprecision(17);
        out << "# n,omega_n (bare, input order),Omega_n,zeta_n,xi_n\n";
        for (int n = 0; n < modes.size(); ++n)
            out << n << ',' << modes.omega[n] << ',' << frame.Omega[n] << ',' << frame.zeta[n] << ','
                << frame.xi[n] << '\n';
    }
    {
        std::ofstream out(matrix_file);
        out << std::setprecision(17);
        out << "# O(k,n): row k = bare mode, column n = renormalized mode\n";
        for (int k = 0; k < frame.O.rows(); ++k) {
            for (int n = 0; n < frame.O.cols(); ++n) out << (n ? "," : "") << frame.O(k, n);
            out << '\n';
        }
    }
    return {modes_file, matrix_file};
}

}  // namespace adqed
