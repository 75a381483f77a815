#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace adqed {

// Thrown for inputs that violate a documented precondition.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a numerical routine cannot meet its accuracy contract.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class WaveguideKind { CavityArray, PowerLaw, Tabulated };

std::string to_string(WaveguideKind kind);

struct WaveguideSpec {
    WaveguideKind kind{WaveguideKind::CavityArray};
    int L{0};
    double omega_c{1.0};
    double J{0.0};
    double l{1.0};
    double omega_max{1.0};
    double hbar{1.0};
    Eigen::VectorXd k;
    Eigen::VectorXd omega;
};

WaveguideSpec build_cavity_array(double omega_c, double J, int L, double hbar = 1.0);
WaveguideSpec build_powerlaw(double l, double omega_max, int L, double hbar = 1.0);
WaveguideSpec build_tabulated(const std::vector<double>& k, const std::vector<double>& omega,
                              double hbar = 1.0);

// Point coupling of one emitter to every mode of a waveguide.
struct CouplingProfile {
    double amplitude{0.0};  // vector-potential amplitude A
    double charge{1.0};
    double mass{1.0};
    Eigen::VectorXd f;  // A_k at the emitter, f_k = A / sqrt(L)
    Eigen::VectorXd g;  // g_k = q f_k sqrt(omega_k / (m hbar))
    double g_total{0.0};
};

CouplingProfile couple_point(const WaveguideSpec& wg, double amplitude, double charge = 1.0,
                             double mass = 1.0);
// Chooses the amplitude so that sum_k g_k^2 = g^2.
CouplingProfile couple_with_strength(const WaveguideSpec& wg, double g, double charge = 1.0,
                                     double mass = 1.0);

// Spectral-function exponent s in J(omega) ~ omega^s, from a log-log fit of the
// local density pi * g_k^2 / (d omega / d index).
double spectral_exponent(const WaveguideSpec& wg, const Eigen::VectorXd& g);

// Polynomial potential sum_i c_i Q^i.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    double operator()(double Q) const;
    Polynomial derivative(int order = 1) const;
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<double>& coeffs() const { return c_; }
    bool is_even() const;
    // Vacuum-fluctuation dressing: sum_l xi^{2l} / (2l)!! V^{(2l)}.
    Polynomial gaussian_smoothed(double xi) const;

private:
    std::vector<double> c_;
};

enum class PotentialShape { DoubleWell, Polynomial, Tabulated };

struct EmitterSpec {
    double mass{1.0};
    double charge{1.0};
    PotentialShape shape{PotentialShape::DoubleWell};
    double v{0.5};
    double d{1.0};
    double cubic{0.0};       // optional eps Q^3 term that breaks parity
    double h{0.0};           // linear bias -h Q
    double x{0.0};           // lattice site (cavity array) or coordinate
    std::vector<double> poly;            // for PotentialShape::Polynomial
    std::vector<double> table_q;         // for PotentialShape::Tabulated
    std::vector<double> table_v;

    // Full potential including bias, as a polynomial.
    Polynomial potential() const;
};

EmitterSpec double_well(double v, double d, double h = 0.0, double mass = 1.0);

// Projects a tabulated potential onto a polynomial; rejects tables that are not
// reproduced to the requested relative accuracy.
Polynomial fit_tabulated(const std::vector<double>& q, const std::vector<double>& v,
                         int max_degree = 12, double tol = 1e-8);

struct CharacteristicScales {
    double omega{0.0};
    double g{0.0};
    double delta{0.0};
    double x_omega{0.0};
};

CharacteristicScales characteristic_scales(const WaveguideSpec& wg, const CouplingProfile& cp,
                                           const EmitterSpec& em);

}  // namespace adqed
