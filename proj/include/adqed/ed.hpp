#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "adqed/ad_frame.hpp"
#include "adqed/boson_diag.hpp"
#include "adqed/model.hpp"

namespace adqed {

// Even modes of a cavity array seen by an emitter at site 0.
struct FoldedModes {
    Eigen::VectorXd omega;  // omega_p, ascending
    Eigen::VectorXd f;      // A * M(0, p)
    Eigen::MatrixXd M;      // M(x, p): even-sector site x (0..(L-1)/2) to mode p
    ModeSet modes;          // omega_p with g_p = q f_p sqrt(omega_p / (m hbar))
};

FoldedModes fold_even_modes(const WaveguideSpec& wg, const CouplingProfile& cp, double x = 0.0);

using Occupation = std::vector<std::uint8_t>;

class FewPhotonBasis {
public:
    FewPhotonBasis(int M, int Nc, int alpha_c, std::size_t max_dim = 20'000'000);

    int modes() const { return M_; }
    int cutoff() const { return Nc_; }
    int alpha_c() const { return alpha_c_; }
    std::size_t photon_states() const { return occ_.size(); }
    std::size_t dim() const { return occ_.size() * alpha_c_; }
    const Occupation& occupation(std::size_t i) const { return occ_[i]; }
    int photons(std::size_t i) const { return total_[i]; }
    // Index of an occupation vector, or -1 when it lies outside the basis.
    long find(const Occupation& occ) const;
    std::size_t index(std::size_t photon_state, int alpha) const {
        return photon_state * alpha_c_ + alpha;
    }

    static std::size_t predicted_dim(int M, int Nc, int alpha_c);

private:
    int M_, Nc_, alpha_c_;
    std::vector<Occupation> occ_;
    std::vector<int> total_;
    std::unordered_map<std::string, long> lookup_;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, long>;

// Matrix of sum_n xi_n c_n (c_n = -i b_n) on the photon part of the basis.
SparseMatrix lowering_matrix(const FewPhotonBasis& basis, const Eigen::VectorXd& xi);

// AD-frame Hamiltonian diag(E_alpha) + sum hbar Omega_n n_n
//   + sum_{l>=1} Pi_l (x) V_eff^{(l)} / l!, Pi_l the normal-ordered l-th power,
// plus a constant offset (the photon zero-point shift, so that energies match the
// Coulomb-gauge Hamiltonian with sum hbar omega_k a_k^+ a_k).
class ADHamiltonian {
public:
    ADHamiltonian(const FewPhotonBasis& basis, const OrthogonalFrame& frame,
                  const MatterSpectrum& matter, double hbar, double offset = 0.0);

    std::size_t dim() const { return basis_->dim(); }
    const FewPhotonBasis& basis() const { return *basis_; }
    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    Eigen::MatrixXd dense(const std::vector<long>& subset = {}) const;

    // Total parity of each basis state (0 when the potential is not symmetric).
    const std::vector<int>& parity() const { return parity_; }
    bool symmetric() const { return symmetric_; }
    double hermiticity_residual() const { return herm_residual_; }
    double parity_leak() const { return parity_leak_; }
    const std::vector<SparseMatrix>& photon_terms() const { return Pi_; }
    const std::vector<Eigen::MatrixXd>& matter_terms() const { return W_; }
    const Eigen::VectorXd& photon_energy() const { return photon_energy_; }
    double offset() const { return offset_; }

private:
    const FewPhotonBasis* basis_;
    std::vector<Eigen::MatrixXd> W_;  // W_[l] = V_eff^{(l)} / l!, W_[0] = diag(E) + offset
    double offset_{0.0};
    std::vector<SparseMatrix> Pi_;    // Pi_[l], Pi_[0] unused
    Eigen::VectorXd photon_energy_;
    std::vector<int> parity_;
    bool symmetric_{false};
    double herm_residual_{0.0};
    double parity_leak_{0.0};
};

enum class Method { Auto, Dense, Iterative };
Method parse_method(const std::string& s);

struct EDResult {
    Eigen::VectorXd E;
    Eigen::MatrixXd vectors;  // dim x n
    std::vector<int> parity;
    Eigen::VectorXd residuals;
    int Nc{0};
    int alpha_c{0};
    std::string method;
};

struct LanczosOptions {
    int max_basis{0};  // 0 = automatic
    int max_restarts{400};
    double tol{1e-10};
};

struct LanczosResult {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    Eigen::VectorXd residuals;
    int restarts{0};
};

using LinearOperator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// Thick-restart Lanczos with full reorthogonalization for the k lowest eigenpairs.
LanczosResult lanczos_lowest(const LinearOperator& op, const Eigen::VectorXd& start, int k,
                             const LanczosOptions& opt = {});

EDResult diagonalize(const ADHamiltonian& h, int n_eigs, Method method = Method::Auto,
                     std::size_t dense_limit = 3000);

}  // namespace adqed
