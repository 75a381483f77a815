#pragma once

#include <string>
#include <vector>

#include "adqed/fit.hpp"
#include "adqed/system.hpp"

namespace adqed {

struct ScalingQuantity {
    std::string name;
    std::vector<double> values;
    LineFit fit;  // log-log slope against g
};

struct ScalingTable {
    std::vector<double> g;
    std::vector<ScalingQuantity> quantities;
    const ScalingQuantity& at(const std::string& name) const;
};

// Log-log fits of Omega_0, Omega_{n!=0} (RMS), xi_0, xi_{n!=0} (RMS), m_eff,
// and the ground-state AD-frame and Coulomb-gauge photon numbers against g.
// Photon numbers need an ED per point; set with_photons = false to skip them.
ScalingTable scaling_table(const SystemConfig& base, const std::vector<double>& g_grid,
                           bool with_photons = true);

}  // namespace adqed
