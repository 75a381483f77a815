#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "adqed/ad_frame.hpp"
#include "adqed/boson_diag.hpp"
#include "adqed/system.hpp"

namespace adqed {

enum class JCFrame { AD, Coulomb };

// H = hbar Delta / 2 sigma^z + sum_n hbar gt_n (sigma^- b_n^+ + h.c.) + sum_n hbar Omega_n b_n^+ b_n.
struct JCModel {
    JCFrame frame{JCFrame::AD};
    double hbar{1.0};
    double Delta{0.0};
    Eigen::VectorXd Omega;
    Eigen::VectorXd gt;
    double dipole{0.0};      // <psi_1| dV/dQ |psi_2> (AD) or <psi_1| d/dQ |psi_2> (Coulomb)
    bool degenerate{false};  // vanishing dipole element
    bool rwa_valid{true};    // false once Delta < max |gt_n|
};

// Two-level truncation of the AD frame; the coupling uses the bare potential derivative.
JCModel build_jc_ad(const ADParameters& ad, const MatterSpectrum& matter,
                    const OrthogonalFrame& frame, const EmitterSpec& em);
JCModel build_jc_ad(const SystemSolution& s, const EmitterSpec& em);

// Two-level truncation of the Coulomb gauge with bare (g = 0) emitter parameters and
// gt_k = (g / sqrt(L)) x_{omega_c} <psi_1| d/dQ |psi_2> on every waveguide mode.
JCModel build_jc_coulomb(const WaveguideSpec& wg, double g, const EmitterSpec& em,
                         const GridPolicy& grid = {});

struct ExcitationRoot {
    double E{0.0};
    double residual{0.0};
    int branch{0};  // 0 = below the lowest pole, k = between poles k-1 and k
};

// Roots of E - Delta = sum_n gt_n^2 / (E - Omega_n) (energies in units of hbar).
// Returns the root below the lowest pole, plus every inter-pole root when all_branches is set.
std::vector<ExcitationRoot> solve_single_excitation(const JCModel& jc, bool all_branches = false);

// Lowest excitation of the multimode quantum Rabi model (counter-rotating terms kept)
// with a total photon cutoff Nc.
double rabi_lowest_excitation(const JCModel& jc, int Nc);

// H = sum_j hbar Delta_j / 2 sigma^z_j + sum_{i>j} J_ij sigma^x_i sigma^x_j.
struct IsingModel {
    double hbar{1.0};
    Eigen::VectorXd Delta;
    Eigen::MatrixXd J;
    Eigen::VectorXd dipole;  // <psi_1j| d/dQ_j |psi_2j>
};

// Two-level reduction of each renormalized emitter with J_ij = hbar^2 mu_ij D_i D_j.
IsingModel build_ising(const std::vector<EmitterSpec>& emitters, const ADParameters& ad,
                       const GridPolicy& grid = {});

// H = hbar Delta / 2 S^z + J' (S^x)^2 with S = sum_j sigma_j. Matches the Ising model with
// constant J_ij = J up to the constant -J N / 2 when J' = J / 2.
struct LMGModel {
    double hbar{1.0};
    double Delta{0.0};
    double Jprime{0.0};
    int N{0};
};

LMGModel lmg_limit(const IsingModel& ising, double tol = 1e-8);
IsingModel ising_of(const LMGModel& lmg);

struct SpinSpectrum {
    Eigen::VectorXd E;
    std::vector<int> parity;  // eigenvalue of prod_j sigma^z_j
    double magnetization{0.0};  // |<S^x>| in the ground state under an infinitesimal bias
    bool ground_degenerate{false};
};

SpinSpectrum diagonalize_spins(const IsingModel& ising, double degeneracy_tol = 1e-8);
SpinSpectrum diagonalize_spins(const LMGModel& lmg, double degeneracy_tol = 1e-8);

nlohmann::json to_json(const JCModel& jc);
nlohmann::json to_json(const IsingModel& m);
nlohmann::json to_json(const LMGModel& m);

}  // namespace adqed
