#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adqed/model.hpp"

namespace adqed {

// A set of photon modes seen by one emitter: frequencies and couplings g_k.
struct ModeSet {
    Eigen::VectorXd omega;
    Eigen::VectorXd g;
    double hbar{1.0};
    double mass{1.0};
    int size() const { return static_cast<int>(omega.size()); }
};

ModeSet modes_of(const WaveguideSpec& wg, const CouplingProfile& cp);

struct OrthogonalFrame {
    Eigen::MatrixXd O;      // O(k, n)
    Eigen::VectorXd Omega;  // descending
    Eigen::MatrixXd r;      // r(n, k), exp(r) = sqrt(Omega_n / omega_k)
    Eigen::VectorXd zeta;
    Eigen::VectorXd xi;
    double orthogonality_residual{0.0};
    double reconstruction_residual{0.0};
};

OrthogonalFrame diagonalize_orthogonal(const ModeSet& modes);

// Emitter placement for the multi-emitter frame.
struct EmitterSite {
    double x{0.0};
    double mass{1.0};
};

struct SymplecticFrame {
    Eigen::MatrixXd S;  // 2L x 2L, rows (X, P), columns (Xt, Pt)
    Eigen::VectorXd Omega;
    Eigen::MatrixXcd zeta;  // zeta(n, j)
    Eigen::MatrixXcd xi;
    Eigen::MatrixXd H;      // quadratic form 1/2 z^T H z
    double symplectic_residual{0.0};
    double diagonal_residual{0.0};
};

// Per-emitter couplings g_kj (cos and sin parts) for a waveguide.
struct MultiCoupling {
    Eigen::MatrixXd gc;  // gc(k, j)
    Eigen::MatrixXd gs;
};

MultiCoupling multi_coupling(const WaveguideSpec& wg, double g, const std::vector<EmitterSite>& sites,
                             double charge = 1.0);

Eigen::MatrixXd symplectic_form(int L);

SymplecticFrame diagonalize_symplectic(const WaveguideSpec& wg, const MultiCoupling& mc,
                                       const std::vector<EmitterSite>& sites);

// Writes omega/Omega/xi tables and the transformation matrix as CSV files
// into dir (created if missing). Returns the written file names.
std::vector<std::string> write_frame_csv(const OrthogonalFrame& frame, const ModeSet& modes,
                                         const std::string& dir);

}  // namespace adqed
