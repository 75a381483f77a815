#pragma once

#include <vector>

#include <Eigen/Dense>

#include "adqed/boson_diag.hpp"
#include "adqed/model.hpp"

namespace adqed {

struct DressedPotential {
    Polynomial bare;
    Polynomial dressed;
    double xi{0.0};
    // Closed-form double-well descriptors; v_eff = 0 once xi > d / sqrt(3).
    bool double_well{false};
    double v_eff{0.0};
    double d_eff{0.0};
};

DressedPotential dressed_potential(const EmitterSpec& em, double xi);

struct ADParameters {
    double hbar{1.0};
    double mass{1.0};
    double Theta{0.0};
    double m_eff{1.0};
    double xi_total{0.0};
    // Set when the bare Theta sum is dominated by infrared modes of a gapless grid.
    bool theta_divergent{false};
    // Multi-emitter quantities (size 1 for a single emitter).
    Eigen::MatrixXd G;
    Eigen::MatrixXd mu;
    Eigen::VectorXd m_eff_j;
    Eigen::VectorXd xi_j;
    double frame_check{0.0};  // relative mismatch between bare sums and frame identities
};

ADParameters mass_renormalization(const OrthogonalFrame& frame, const ModeSet& modes);
ADParameters mass_renormalization(const SymplecticFrame& frame, const MultiCoupling& mc,
                                  const WaveguideSpec& wg, const std::vector<EmitterSite>& sites);

struct GridPolicy {
    double R{0.0};  // half-width, 0 = automatic
    double h{0.0};  // spacing, 0 = automatic
    double tail_tol{1e-10};
    double richardson_tol{1e-6};
    int max_points{400000};
};

struct MatterSpectrum {
    Eigen::VectorXd Q;    // interior grid points, symmetric about 0
    double h{0.0};
    Eigen::MatrixXd psi;  // psi(i, alpha), sum_i psi^2 = 1
    Eigen::VectorXd E;    // eigenvalues of the finite-difference Hamiltonian on Q
    Eigen::VectorXd E_extrapolated;
    // E_odd - E_even of the k-th tunnelling doublet of a symmetric potential, from the
    // discrete Wronskian at Q = 0; resolves splittings far below the precision of E.
    Eigen::VectorXd doublet_splitting;
    std::vector<int> parity;  // +1 / -1, or 0 when the potential is not symmetric
    bool symmetric{false};
    double mass{1.0};
    double hbar{1.0};
    double richardson_error{0.0};
    double tail_amplitude{0.0};
    Polynomial V;
    int alpha_c() const { return static_cast<int>(E.size()); }
};

MatterSpectrum solve_matter(const Polynomial& V, double mass, double hbar, int alpha_c,
                            const GridPolicy& policy = {});
MatterSpectrum solve_matter_eigenstates(const ADParameters& ad, const EmitterSpec& em, int alpha_c,
                                        const GridPolicy& policy = {});
// Same solve on a prescribed grid (used to share grids across quench partners).
MatterSpectrum solve_matter_on_grid(const Polynomial& V, double mass, double hbar, int alpha_c,
                                    double R, double h);

// Truncated copy keeping the lowest n states.
MatterSpectrum truncate(const MatterSpectrum& ms, int n);

Eigen::MatrixXd matrix_element(const MatterSpectrum& ms, const Polynomial& f);
Eigen::MatrixXd derivative_matrix(const MatterSpectrum& ms);  // <a| d/dQ |b>, antisymmetric
Eigen::MatrixXd momentum_squared_matrix(const MatterSpectrum& ms);  // <a| P^2 |b>

struct CollectiveMode {
    int N{1};
    double M_eff{1.0};
    double Theta{0.0};
    EmitterSpec mapped_emitter;
    ModeSet mapped_modes;
};

CollectiveMode collective_reduction(const std::vector<EmitterSpec>& emitters, const ModeSet& modes);

}  // namespace adqed
