#include "adqed/ed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace adqed {

FoldedModes fold_even_modes(const WaveguideSpec& wg, const CouplingProfile& cp, double x) {
    if (wg.kind != WaveguideKind::CavityArray)
        throw InputError("mode folding needs a cavity-array waveguide");
    if (x != 0.0)
        throw InputError("mode folding needs the emitter at site 0; use the multi-emitter frame");
    const int M = (wg.L + 1) / 2;
    const double J = wg.J / wg.hbar;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(M, M);
    for (int i = 0; i < M; ++i) h(i, i) = wg.omega_c;
    for (int i = 0; i + 1 < M; ++i) h(i, i + 1) = h(i + 1, i) = -0.5 * J;
    if (M > 1) h(0, 1) = h(1, 0) = -J / std::sqrt(2.0);
    // The two outermost sites are neighbours across the ring boundary.
    if (M > 1) h(M - 1, M - 1) -= 0.5 * J;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    FoldedModes fm;
    fm.omega = es.eigenvalues();
    fm.M = es.eigenvectors();
    for (int p = 0; p < M; ++p) {
        Eigen::Index imax;
        if (std::abs(fm.M(0, p)) > 1e-14) {
            if (fm.M(0, p) < 0) fm.M.col(p) *= -1.0;
        } else {
            fm.M.col(p).cwiseAbs().maxCoeff(&imax);
            if (fm.M(imax, p) < 0) fm.M.col(p) *= -1.0;
        }
    }
    fm.f = cp.amplitude * fm.M.row(0).transpose();
    fm.modes.omega = fm.omega;
    fm.modes.hbar = wg.hbar;
    fm.modes.mass = cp.mass;
    fm.modes.g.resize(M);
    for (int p = 0; p < M; ++p)
        fm.modes.g[p] = cp.charge * fm.f[p] * std::sqrt(fm.omega[p] / (cp.mass * wg.hbar));
    return fm;
}

namespace {

std::string key_of(const Occupation& occ) { return std::string(occ.begin(), occ.end()); }

void enumerate(int pos, int remaining, Occupation& cur, std::vector<Occupation>& out) {
    const int M = static_cast<int>(cur.size());
    if (pos == M - 1) {
        cur[pos] = static_cast<std::uint8_t>(remaining);
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        cur[pos] = static_cast<std::uint8_t>(v);
        enumerate(pos + 1, remaining - v, cur, out);
    }
    cur[pos] = 0;
}

}  // namespace

std::size_t FewPhotonBasis::predicted_dim(int M, int Nc, int alpha_c) {
    long double c = 1;
    for (int i = 1; i <= Nc; ++i) c = c * (M + i) / i;
    const long double d = c * alpha_c;
    return d > 1e18L ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(std::llround(d));
}

FewPhotonBasis::FewPhotonBasis(int M, int Nc, int alpha_c, std::size_t max_dim)
    : M_(M), Nc_(Nc), alpha_c_(alpha_c) {
    if (M < 1 || Nc < 0 || alpha_c < 1)
        throw InputError("basis needs M >= 1, N_c >= 0, alpha_c >= 1");
    if (Nc > 255) throw InputError("basis cutoff N_c above 255 is not supported");
    const std::size_t d = predicted_dim(M, Nc, alpha_c);
    if (d > max_dim) {
        const double gib = static_cast<double>(d) * 8.0 * 64.0 / (1u << 30);
        throw InputError("basis dimension " + std::to_string(d) + " exceeds the budget of " +
                         std::to_string(max_dim) + " (about " + std::to_string(gib) +
                         " GiB of Krylov vectors)");
    }
    Occupation cur(M, 0);
    for (int N = 0; N <= Nc; ++N) {
        const std::size_t before = occ_.size();
        enumerate(0, N, cur, occ_);
        total_.resize(occ_.size(), N);
        (void)before;
    }
    lookup_.reserve(occ_.size() * 2);
    for (std::size_t i = 0; i < occ_.size(); ++i) lookup_.emplace(key_of(occ_[i]), static_cast<long>(i));
}

long FewPhotonBasis::find(const Occupation& occ) const {
    auto it = lookup_.find(key_of(occ));
    return it == lookup_.end() ? -1 : it->second;
}

SparseMatrix lowering_matrix(const FewPhotonBasis& basis, const Eigen::VectorXd& xi) {
    if (xi.size() != basis.modes()) throw InputError("basis/frame mode-count mismatch");
    const long n = static_cast<long>(basis.photon_states());
    std::vector<Eigen::Triplet<double, long>> trip;
    for (long j = 0; j < n; ++j) {
        Occupation occ = basis.occupation(j);
        for (int m = 0; m < basis.modes(); ++m) {
            if (occ[m] == 0 || xi[m] == 0.0) continue;
            const double amp = xi[m] * std::sqrt(static_cast<double>(occ[m]));
            occ[m] -= 1;
            const long i = basis.find(occ);
            occ[m] += 1;
            trip.emplace_back(i, j, amp);
        }
    }
    SparseMatrix A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

ADHamiltonian::ADHamiltonian(const FewPhotonBasis& basis, const OrthogonalFrame& frame,
                             const MatterSpectrum& matter, double hbar, double offset)
    : basis_(&basis) {
    if (frame.Omega.size() != basis.modes()) throw InputError("basis/frame mode-count mismatch");
    if (matter.alpha_c() < basis.alpha_c())
        throw InputError("matter spectrum has fewer states than the basis alpha_c");
    const int ac = basis.alpha_c();
    const MatterSpectrum ms = truncate(matter, ac);
    const int deg = ms.V.degree();
    symmetric_ = ms.symmetric;

    W_.resize(deg + 1);
    offset_ = offset;
    W_[0] = (ms.E.array() + offset).matrix().asDiagonal();
    double factorial = 1.0;
    double wmax = 0;
    for (int l = 1; l <= deg; ++l) {
        factorial *= l;
        Eigen::MatrixXd w = matrix_element(ms, ms.V.derivative(l)) / factorial;
        herm_residual_ = std::max(herm_residual_, (w - w.transpose()).cwiseAbs().maxCoeff());
        W_[l] = 0.5 * (w + w.transpose());
        wmax = std::max(wmax, W_[l].cwiseAbs().maxCoeff());
    }
    if (symmetric_) {
        // V^{(l)} has parity (-1)^l; elements that violate the selection rule are roundoff.
        for (int l = 1; l <= deg; ++l)
            for (int a = 0; a < ac; ++a)
                for (int b = 0; b < ac; ++b)
                    if (ms.parity[a] * ms.parity[b] != (l % 2 ? -1 : 1)) {
                        parity_leak_ = std::max(parity_leak_, std::abs(W_[l](a, b)));
                        W_[l](a, b) = 0.0;
                    }
        if (parity_leak_ > 1e-8 * std::max(wmax, 1.0))
            throw NumericalError("matter matrix elements break parity: " + std::to_string(parity_leak_));
    }

    const SparseMatrix A = lowering_matrix(basis, frame.xi);
    std::vector<SparseMatrix> Apow(deg + 1);
    const long n = static_cast<long>(basis.photon_states());
    Apow[0].resize(n, n);
    Apow[0].setIdentity();
    for (int q = 1; q <= deg; ++q) Apow[q] = (A * Apow[q - 1]).pruned();
    Pi_.resize(deg + 1);
    for (int l = 1; l <= deg; ++l) {
        SparseMatrix P(n, n);
        double binom = 1.0;
        for (int p = 0; p <= l; ++p) {
            if (p > 0) binom = binom * (l - p + 1) / p;
            SparseMatrix term = SparseMatrix(Apow[p].transpose()) * Apow[l - p];
            P += binom * term;
        }
        SparseMatrix Pt = P.transpose();
        const SparseMatrix diff = P - Pt;
        if (diff.nonZeros() > 0)
            herm_residual_ = std::max(herm_residual_, diff.coeffs().cwiseAbs().maxCoeff());
        Pi_[l] = (0.5 * (P + Pt)).pruned();
    }

    photon_energy_.resize(n);
    for (long i = 0; i < n; ++i) {
        double e = 0;
        const Occupation& occ = basis.occupation(i);
        for (int m = 0; m < basis.modes(); ++m) e += hbar * frame.Omega[m] * occ[m];
        photon_energy_[i] = e;
    }
    parity_.assign(basis.dim(), 0);
    if (symmetric_)
        for (long i = 0; i < n; ++i)
            for (int a = 0; a < ac; ++a)
                parity_[basis.index(i, a)] = ms.parity[a] * (basis.photons(i) % 2 ? -1 : 1);
}

void ADHamiltonian::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    const int ac = basis_->alpha_c();
    const long n = static_cast<long>(basis_->photon_states());
    y.resize(x.size());
    Eigen::Map<const Eigen::MatrixXd> X(x.data(), ac, n);
    Eigen::Map<Eigen::MatrixXd> Y(y.data(), ac, n);
    Y.noalias() = W_[0].diagonal().asDiagonal() * X;
    Y.noalias() += X * photon_energy_.asDiagonal();
    Eigen::MatrixXd T(ac, n);
    for (std::size_t l = 1; l < W_.size(); ++l) {
        T.noalias() = X * Pi_[l];
        Y.noalias() += W_[l] * T;
    }
}

Eigen::MatrixXd ADHamiltonian::dense(const std::vector<long>& subset) const {
    const int ac = basis_->alpha_c();
    const long dim = static_cast<long>(basis_->dim());
    std::vector<long> pos(dim, -1);
    long s = 0;
    if (subset.empty()) {
        for (long i = 0; i < dim; ++i) pos[i] = s++;
    } else {
        for (long i : subset) pos[i] = s++;
    }
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(s, s);
    for (long i = 0; i < static_cast<long>(basis_->photon_states()); ++i)
        for (int a = 0; a < ac; ++a) {
            const long r = pos[basis_->index(i, a)];
            if (r >= 0) H(r, r) += W_[0](a, a) + photon_energy_[i];
        }
    for (std::size_t l = 1; l < W_.size(); ++l) {
        const SparseMatrix& P = Pi_[l];
        for (long col = 0; col < P.outerSize(); ++col)
            for (SparseMatrix::InnerIterator it(P, col); it; ++it) {
                const long row = it.row();
                for (int a = 0; a < ac; ++a) {
                    const long r = pos[basis_->index(row, a)];
                    if (r < 0) continue;
                    for (int b = 0; b < ac; ++b) {
                        const long c = pos[basis_->index(col, b)];
                        if (c >= 0) H(r, c) += it.value() * W_[l](a, b);
                    }
                }
            }
    }
    return H;
}

Method parse_method(const std::string& s) {
    if (s == "auto") return Method::Auto;
    if (s == "dense") return Method::Dense;
    if (s == "iterative") return Method::Iterative;
    throw InputError("unknown eigensolver method '" + s + "' (expected dense, iterative or auto)");
}

EDResult diagonalize(const ADHamiltonian& h, int n_eigs, Method method, std::size_t dense_limit) {
    const long dim = static_cast<long>(h.dim());
    if (n_eigs < 1) throw InputError("diagonalize needs n_eigs >= 1");
    std::vector<std::vector<long>> sectors;
    std::vector<int> sector_parity;
    if (h.symmetric()) {
        for (int p : {1, -1}) {
            std::vector<long> idx;
            for (long i = 0; i < dim; ++i)
                if (h.parity()[i] == p) idx.push_back(i);
            if (!idx.empty()) {
                sectors.push_back(std::move(idx));
                sector_parity.push_back(p);
            }
        }
    } else {
        std::vector<long> idx(dim);
        std::iota(idx.begin(), idx.end(), 0L);
        sectors.push_back(std::move(idx));
        sector_parity.push_back(0);
    }

    struct Pair {
        double E;
        int parity;
        Eigen::VectorXd v;
        double residual;
    };
    std::vector<Pair> all;
    std::string used;
    Eigen::VectorXd w(dim);
    for (std::size_t s = 0; s < sectors.size(); ++s) {
        const auto& idx = sectors[s];
        const long ns = static_cast<long>(idx.size());
        const int k = static_cast<int>(std::min<long>(n_eigs, ns));
        const bool dense = method == Method::Dense ||
                           (method == Method::Auto && static_cast<std::size_t>(ns) <= dense_limit) ||
                           ns <= 64;
        if (dense) {
            used = used.empty() || used == "dense" ? "dense" : "mixed";
            const Eigen::MatrixXd H = h.dense(sectors.size() > 1 ? idx : std::vector<long>{});
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
            if (es.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
            for (int i = 0; i < k; ++i) {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
                for (long r = 0; r < ns; ++r) v[idx[r]] = es.eigenvectors()(r, i);
                h.apply(v, w);
                all.push_back({es.eigenvalues()[i], sector_parity[s], v,
                               (w - es.eigenvalues()[i] * v).norm()});
            }
        } else {
            used = used.empty() || used == "iterative" ? "iterative" : "mixed";
            Eigen::VectorXd start = Eigen::VectorXd::Zero(dim);
            for (long i : idx) start[i] = 1.0;
            LanczosResult lr =
                lanczos_lowest([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { h.apply(x, y); },
                               start, k);
            for (int i = 0; i < static_cast<int>(lr.values.size()); ++i)
                all.push_back({lr.values[i], sector_parity[s], lr.vectors.col(i), lr.residuals[i]});
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const Pair& a, const Pair& b) {
        return a.E < b.E || (a.E == b.E && a.parity > b.parity);
    });
    const int keep = static_cast<int>(std::min<std::size_t>(n_eigs, all.size()));
    EDResult r;
    r.E.resize(keep);
    r.vectors.resize(dim, keep);
    r.residuals.resize(keep);
    r.parity.resize(keep);
    for (int i = 0; i < keep; ++i) {
        r.E[i] = all[i].E;
        r.vectors.col(i) = all[i].v;
        r.residuals[i] = all[i].residual;
        r.parity[i] = all[i].parity;
    }
    r.Nc = h.basis().cutoff();
    r.alpha_c = h.basis().alpha_c();
    r.method = used;
    return r;
}

}  // namespace adqed
