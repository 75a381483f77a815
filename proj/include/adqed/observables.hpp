#pragma once

#include <vector>

#include <Eigen/Dense>

#include "adqed/system.hpp"

namespace adqed {

// Second moments of an AD-frame state, with c_n = -i b_n so that every matrix is real.
// Indices run over all modes of the frame; modes outside the ED basis are in vacuum.
struct PhotonMoments {
    Eigen::MatrixXd rho;    // <c_n^+ c_m>
    Eigen::MatrixXd kappa;  // <c_n c_m>
    Eigen::VectorXd e;      // <D c_n>, D = d/dQ
    Eigen::VectorXd f;      // <D c_n^+>
    Eigen::VectorXd c;      // <c_n>
    double P2{0.0};         // <P^2>
    double Q{0.0};          // <Q>
    double norm{0.0};       // <psi|psi>
};

// Expectation values of Coulomb-gauge photon observables for states of one system.
// Complex states are handled through their real and imaginary parts, since every
// observable here is a real symmetric operator in the basis.
class Observables {
public:
    explicit Observables(const SystemSolution& s);

    PhotonMoments moments(const Eigen::VectorXd& psi) const;

    double ad_photon_number(const Eigen::VectorXd& psi) const;
    double coulomb_photon_number(const Eigen::VectorXd& psi) const;
    // <Q + Xi>, the emitter displacement in the original frame.
    double displacement(const Eigen::VectorXd& psi) const;
    // Occupation of the physical photon mode a = sum_p w_p a_p.
    double mode_occupation(const PhotonMoments& m, const Eigen::VectorXd& w) const;
    // n_x for x = 0 .. (L-1)/2 of a cavity array; n_{-x} = n_x.
    Eigen::VectorXd site_occupations(const Eigen::VectorXd& psi) const;
    Eigen::VectorXd site_occupations(const PhotonMoments& m) const;

    PhotonMoments moments(const Eigen::VectorXcd& psi) const;
    double coulomb_photon_number(const PhotonMoments& m) const;
    double ad_photon_number(const PhotonMoments& m) const;

private:
    const SystemSolution* s_;
    std::vector<SparseMatrix> C_;  // single-mode lowering, one per ED mode
    Eigen::MatrixXd D_, P2_, Qm_;
    Eigen::MatrixXd A_, B_;  // A(p, n) = O cosh r, B(p, n) = O sinh r
    Eigen::VectorXd sh_;     // s_p = sum_n O(p, n) exp(-r_np) xi_n
};

}  // namespace adqed
