#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "adqed/ad_frame.hpp"
#include "adqed/boson_diag.hpp"
#include "adqed/ed.hpp"
#include "adqed/model.hpp"

namespace adqed {

// One emitter coupled to a waveguide, with the numerical cutoffs of the few-photon ED.
struct SystemConfig {
    WaveguideSpec wg;
    double g{1.0};
    EmitterSpec em;
    int Nc{3};
    int alpha_c{8};
    int n_eigs{10};
    Method method{Method::Auto};
    std::size_t dense_limit{3000};
    std::size_t max_dim{20'000'000};
    GridPolicy grid;
    // Keep only the ed_modes modes with the largest |xi_n| in the photon basis (0 = all).
    // Discarded modes stay in their vacuum; they still dress the potential and the mass.
    int ed_modes{0};
};

struct SystemSolution {
    CouplingProfile coupling;
    std::optional<FoldedModes> folded;
    ModeSet modes;             // modes seen by the emitter (folded for a cavity array)
    OrthogonalFrame frame;     // frame of all modes
    std::vector<int> ed_modes; // indices into frame retained in the ED basis
    OrthogonalFrame ed_frame;  // frame restricted to ed_modes
    ADParameters ad;
    MatterSpectrum matter;
    std::shared_ptr<FewPhotonBasis> basis;
    std::shared_ptr<ADHamiltonian> H;
    EDResult ed;

    double ground_energy() const { return ed.E[0]; }
    // E_i - E_0 for i = 1..n.
    Eigen::VectorXd excitations(int n) const;
};

// Everything up to and including the Hamiltonian; matter may be supplied to
// reuse a grid solve (it must come from the same m_eff and dressed potential).
SystemSolution build_system(const SystemConfig& cfg, const MatterSpectrum* matter = nullptr);
SystemSolution solve_system(const SystemConfig& cfg, const MatterSpectrum* matter = nullptr);

// Frame, AD parameters and couplings only (no matter solve, no ED).
SystemSolution build_frame(const SystemConfig& cfg);

struct ConvergenceRow {
    double g{0.0};
    int Nc{0};
    int alpha_c{0};
    Eigen::VectorXd energies;
    Eigen::VectorXd excitations;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    // For each g and each successive pair of cutoffs (N_c first, then alpha_c):
    // the largest relative change of the excitation energies.
    struct Change {
        double g;
        std::string axis;
        int from;
        int to;
        double max_rel_change;
        double ground_change;
    };
    std::vector<Change> changes;
};

ConvergenceReport convergence_study(const SystemConfig& base, const std::vector<double>& g_list,
                                    const std::vector<int>& Nc_list,
                                    const std::vector<int>& alpha_list, int n_excitations = 5);

}  // namespace adqed
