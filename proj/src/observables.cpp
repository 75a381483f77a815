#include "adqed/observables.hpp"

#include <cmath>

namespace adqed {

Observables::Observables(const SystemSolution& s) : s_(&s) {
    if (!s.basis) throw InputError("observables need an assembled system");
    const int Med = static_cast<int>(s.ed_modes.size());
    for (int i = 0; i < Med; ++i) {
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(Med);
        unit[i] = 1.0;
        C_.push_back(lowering_matrix(*s.basis, unit));
    }
    D_ = derivative_matrix(s.matter);
    P2_ = momentum_squared_matrix(s.matter);
    Polynomial q({0.0, 1.0});
    Qm_ = matrix_element(s.matter, q);

    const OrthogonalFrame& f = s.frame;
    const int M = static_cast<int>(f.Omega.size());
    A_.resize(M, M);
    B_.resize(M, M);
    sh_ = Eigen::VectorXd::Zero(M);
    for (int p = 0; p < M; ++p)
        for (int n = 0; n < M; ++n) {
            const double r = f.r(n, p);
            A_(p, n) = f.O(p, n) * std::cosh(r);
            B_(p, n) = f.O(p, n) * std::sinh(r);
            sh_[p] += f.O(p, n) * std::exp(-r) * f.xi[n];
        }
}

PhotonMoments Observables::moments(const Eigen::VectorXd& psi) const {
    const SystemSolution& s = *s_;
    const int ac = s.basis->alpha_c();
    const long n = static_cast<long>(s.basis->photon_states());
    if (psi.size() != ac * n) throw InputError("state dimension does not match the basis");
    const int M = static_cast<int>(s.frame.Omega.size());
    const int Med = static_cast<int>(s.ed_modes.size());
    Eigen::Map<const Eigen::MatrixXd> X(psi.data(), ac, n);

    std::vector<Eigen::MatrixXd> Y(Med), Z(Med);
    for (int i = 0; i < Med; ++i) {
        Y[i] = X * SparseMatrix(C_[i].transpose());
        Z[i] = X * C_[i];
    }
    PhotonMoments m;
    m.rho = Eigen::MatrixXd::Zero(M, M);
    m.kappa = Eigen::MatrixXd::Zero(M, M);
    m.e = Eigen::VectorXd::Zero(M);
    m.f = Eigen::VectorXd::Zero(M);
    m.c = Eigen::VectorXd::Zero(M);
    const Eigen::MatrixXd DX = D_ * X;
    for (int i = 0; i < Med; ++i) {
        const int a = s.ed_modes[i];
        for (int j = 0; j < Med; ++j) {
            const int b = s.ed_modes[j];
            m.rho(a, b) = Y[i].cwiseProduct(Y[j]).sum();
            m.kappa(a, b) = Z[i].cwiseProduct(Y[j]).sum();
        }
        // <psi| D c |psi> = -<D psi| c psi>, D antisymmetric.
        m.e[a] = -DX.cwiseProduct(Y[i]).sum();
        m.f[a] = -DX.cwiseProduct(Z[i]).sum();
        m.c[a] = X.cwiseProduct(Y[i]).sum();
    }
    m.P2 = X.cwiseProduct(P2_ * X).sum();
    m.Q = X.cwiseProduct(Qm_ * X).sum();
    m.norm = psi.squaredNorm();
    return m;
}

PhotonMoments Observables::moments(const Eigen::VectorXcd& psi) const {
    PhotonMoments a = moments(Eigen::VectorXd(psi.real()));
    const PhotonMoments b = moments(Eigen::VectorXd(psi.imag()));
    a.rho += b.rho;
    a.kappa += b.kappa;
    a.e += b.e;
    a.f += b.f;
    a.c += b.c;
    a.P2 += b.P2;
    a.Q += b.Q;
    a.norm += b.norm;
    return a;
}

double Observables::mode_occupation(const PhotonMoments& m, const Eigen::VectorXd& w) const {
    // a = i (X - s D) with X = sum_n (A_n c_n + B_n c_n^+).
    const Eigen::VectorXd A = A_.transpose() * w;
    const Eigen::VectorXd B = B_.transpose() * w;
    const double s = sh_.dot(w);
    const double hbar = s_->matter.hbar;
    double n = A.dot(m.rho * A) + 2.0 * A.dot(m.kappa * B) + B.dot(m.rho.transpose() * B) +
               B.squaredNorm() * m.norm;
    n += 2.0 * s * (A.dot(m.e) + B.dot(m.f));
    n += s * s * m.P2 / (hbar * hbar);
    return n;
}

double Observables::coulomb_photon_number(const PhotonMoments& m) const {
    double n = 0;
    const int M = static_cast<int>(sh_.size());
    for (int p = 0; p < M; ++p) n += mode_occupation(m, Eigen::VectorXd::Unit(M, p));
    return n;
}

double Observables::coulomb_photon_number(const Eigen::VectorXd& psi) const {
    return coulomb_photon_number(moments(psi));
}

double Observables::ad_photon_number(const PhotonMoments& m) const { return m.rho.trace(); }

double Observables::ad_photon_number(const Eigen::VectorXd& psi) const {
    return ad_photon_number(moments(psi));
}

double Observables::displacement(const Eigen::VectorXd& psi) const {
    const PhotonMoments m = moments(psi);
    return m.Q + 2.0 * s_->frame.xi.dot(m.c);
}

Eigen::VectorXd Observables::site_occupations(const PhotonMoments& m) const {
    if (!s_->folded) throw InputError("site occupations need a folded cavity-array system");
    const Eigen::MatrixXd& Mx = s_->folded->M;
    const int sites = static_cast<int>(Mx.rows());
    Eigen::VectorXd n(sites);
    for (int x = 0; x < sites; ++x) {
        const double e = mode_occupation(m, Mx.row(x).transpose());
        n[x] = x == 0 ? e : 0.5 * e;
    }
    return n;
}

Eigen::VectorXd Observables::site_occupations(const Eigen::VectorXd& psi) const {
    return site_occupations(moments(psi));
}

}  // namespace adqed
