#pragma once

#include <vector>

#include <Eigen/Dense>

#include "adqed/system.hpp"

namespace adqed {

// Sudden change d_i -> d_f of the double-well parameter at fixed waveguide and coupling.
struct QuenchProtocol {
    SystemConfig pre;  // emitter with d = d_i
    double d_f{1.0};
};

struct QuenchSetup {
    SystemSolution pre;
    SystemSolution post;       // full spectrum of the post-quench Hamiltonian
    Eigen::VectorXd initial;   // pre-quench ground state in the post-quench basis
    Eigen::MatrixXd overlap;   // <psi_a^(f) | psi_b^(i)> on the shared grid
    double completeness_deficit{0.0};
};

// Solves both emitters on one shared grid, diagonalizes the pre-quench system for its
// ground state and the post-quench system completely. Rejects an overlap deficit above 1%.
QuenchSetup prepare_quench(const QuenchProtocol& protocol);

// Expansion coefficients c_i of the initial state in post-quench eigenstates.
Eigen::VectorXd quench_initial_state(const QuenchSetup& setup);

struct QuenchResult {
    std::vector<double> times;
    Eigen::VectorXd E;         // post-quench eigenenergies
    Eigen::VectorXd weights;   // c_i
    Eigen::MatrixXd n_sites;   // n_x(t), rows = times, columns = x = 0..(L-1)/2
    Eigen::VectorXd n0;
    Eigen::VectorXd coulomb_total;
    Eigen::VectorXd norm;
    Eigen::VectorXd energy;    // <H_U>(t)
    double completeness_deficit{0.0};
    double norm_drift{0.0};
    double energy_drift{0.0};  // relative
};

QuenchResult evolve_observables(const QuenchSetup& setup, const Eigen::VectorXd& weights,
                                const std::vector<double>& times);

struct OscillationEstimate {
    double omega{0.0};
    double period{0.0};
    bool defined{false};
};

// omega_osc = sqrt(8 v / (d_f^2 m_eff) (1 - 3 xi^2 / d_f^2)); undefined for xi >= d_f / sqrt(3).
OscillationEstimate oscillation_estimate(double v, double d_f, double m_eff, double xi);

// Frequency of the largest peak of |sum_t (y - mean) e^{i w t}| on [w_lo, w_hi].
double dominant_frequency(const std::vector<double>& t, const Eigen::VectorXd& y, double w_lo,
                          double w_hi, int samples = 4000);

}  // namespace adqed
