#include "coulomb_ed.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Sparse>

namespace oracle {

using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

EmitterBasis emitter_basis(const BruteForceSpec& spec) {
    const int n = spec.grid_points;
    const double h = 2.0 * spec.R / (n + 1);
    const double t = spec.hbar * spec.hbar / (2.0 * spec.mass * h * h);
    // Fourth-order stencil (-1, 16, -30, 16, -1) / 12 for the second derivative.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double q = -spec.R + h * (i + 1);
        H(i, i) = t * 30.0 / 12.0 + spec.V(q);
        if (i + 1 < n) H(i, i + 1) = H(i + 1, i) = -t * 16.0 / 12.0;
        if (i + 2 < n) H(i, i + 2) = H(i + 2, i) = t * 1.0 / 12.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const int m = spec.emitter_states;
    EmitterBasis b;
    b.E = es.eigenvalues().head(m);
    const Eigen::MatrixXd psi = es.eigenvectors().leftCols(m);
    // Fourth-order first derivative (1, -8, 0, 8, -1) / 12h.
    Eigen::MatrixXd dpsi = Eigen::MatrixXd::Zero(n, m);
    for (int i = 0; i < n; ++i) {
        auto at = [&](int j) -> Eigen::RowVectorXd {
            return (j < 0 || j >= n) ? Eigen::RowVectorXd::Zero(m) : Eigen::RowVectorXd(psi.row(j));
        };
        dpsi.row(i) = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
    }
    const Eigen::MatrixXd D = psi.transpose() * dpsi;
    b.D = 0.5 * (D - D.transpose());
    return b;
}

std::pair<Eigen::VectorXd, double> lanczos(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& op, long dim, int k,
    double tol, int max_steps) {
    max_steps = static_cast<int>(std::min<long>(max_steps, dim));
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd V(dim, max_steps + 1);
    Eigen::VectorXd v(dim);
    for (long i = 0; i < dim; ++i) v[i] = nd(rng);
    V.col(0) = v.normalized();
    std::vector<double> alpha, beta;
    Eigen::VectorXd w(dim);
    for (int j = 0; j < max_steps; ++j) {
        op(V.col(j), w);
        alpha.push_back(V.col(j).dot(w));
        for (int pass = 0; pass < 2; ++pass)
            w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
        const double b = w.norm();
        const int m = j + 1;
        if (m >= k && (m % 10 == 0 || b < 1e-13 || m == max_steps)) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            double res = 0;
            for (int i = 0; i < k; ++i) res = std::max(res, std::abs(b * es.eigenvectors()(m - 1, i)));
            if (res < tol * std::max(1.0, std::abs(es.eigenvalues()[0])) || b < 1e-13 || m == max_steps)
                return {es.eigenvalues().head(k), res};
        }
        beta.push_back(b);
        V.col(j + 1) = w / b;
    }
    throw std::runtime_error("oracle lanczos did not converge");
}

namespace {

Eigen::VectorXd lowest_levels(const BruteForceSpec& spec, const EmitterBasis& eb, int n_max,
                              double& residual, std::size_t& dim_out) {
    const int L = static_cast<int>(spec.omega.size());
    const int nf = n_max + 1;
    long nph = 1;
    for (int k = 0; k < L; ++k) nph *= nf;
    const long nm = eb.E.size();
    const long dim = nm * nph;
    if (static_cast<std::size_t>(dim) > spec.max_dim) throw std::runtime_error("oracle dimension over budget");
    dim_out = static_cast<std::size_t>(dim);

    // Photon operators after the phase rotation a -> -i a: a + a^+ -> i (a^+ - a).
    // F = sum_k f_k (a_k^+ - a_k) is real antisymmetric.
    std::vector<Eigen::Triplet<double>> tf;
    Eigen::VectorXd eph(nph);
    for (long s = 0; s < nph; ++s) {
        long r = s, stride = 1;
        double e = 0;
        for (int k = 0; k < L; ++k) {
            const int nk = static_cast<int>(r % nf);
            r /= nf;
            e += spec.hbar * spec.omega[k] * nk;
            const double f = spec.g[k] * std::sqrt(spec.mass * spec.hbar / spec.omega[k]) / spec.charge;
            if (nk + 1 < nf) tf.emplace_back(s + stride, s, f * std::sqrt(nk + 1.0));  // a^+
            if (nk > 0) tf.emplace_back(s - stride, s, -f * std::sqrt(static_cast<double>(nk)));  // -a
            stride *= nf;
        }
        eph[s] = e;
    }
    Sparse F(nph, nph);
    F.setFromTriplets(tf.begin(), tf.end());
    const Sparse F2 = Sparse(F.transpose()) * F;
    // P = -i hbar D and A -> i F, so -(q/m) P A -> -(q hbar / m) D (x) F and q^2 A^2 / 2m -> q^2 F^T F / 2m.
    const double c1 = -spec.charge * spec.hbar / spec.mass;
    const double c2 = spec.charge * spec.charge / (2.0 * spec.mass);
    const Eigen::MatrixXd D = eb.D;

    auto op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        // State index = alpha * nph + photon state; X(photon, alpha).
        Eigen::Map<const Eigen::MatrixXd> X(x.data(), nph, nm);
        Eigen::Map<Eigen::MatrixXd> Y(y.data(), nph, nm);
        Y = X * eb.E.asDiagonal();
        Y += eph.asDiagonal() * X;
        Y += c2 * (F2 * X);
        Y += c1 * (F * X) * D.transpose();
    };
    Eigen::VectorXd E;
    std::tie(E, residual) = lanczos(op, dim, spec.n_levels);
    return E;
}

}  // namespace

BruteForceResult coulomb_ed(const BruteForceSpec& spec) {
    if (spec.omega.size() < 1 || spec.omega.size() > 3 || spec.g.size() != spec.omega.size())
        throw std::invalid_argument("oracle supports 1 to 3 modes");
    const EmitterBasis eb = emitter_basis(spec);
    BruteForceResult r;
    double res1 = 0, res2 = 0;
    std::size_t d2 = 0;
    r.E = lowest_levels(spec, eb, spec.n_max, res1, r.dim);
    r.E_half = lowest_levels(spec, eb, spec.n_max / 2, res2, d2);
    r.max_residual = std::max(res1, res2);
    double scale = 1e-300;
    for (int i = 0; i < r.E.size(); ++i) scale = std::max(scale, std::abs(r.E[i]));
    r.cutoff_shift = (r.E - r.E_half).cwiseAbs().maxCoeff() / scale;
    r.usable = r.cutoff_shift <= 0.01;
    return r;
}

}  // namespace oracle
