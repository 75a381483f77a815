#include <algorithm>
#include <cmath>

#include "adqed/ed.hpp"

namespace adqed {

namespace {

// Deterministic replacement direction used after an invariant-subspace breakdown.
Eigen::VectorXd fresh_direction(long n, int salt) {
    Eigen::VectorXd x(n);
    for (long i = 0; i < n; ++i) x[i] = std::cos(1.0 + 0.6180339887 * (i + 1) * (salt + 2));
    return x;
}

void orthogonalize(const Eigen::MatrixXd& V, int cols, Eigen::VectorXd& w, Eigen::VectorXd* coeff) {
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd h = V.leftCols(cols).transpose() * w;
        w.noalias() -= V.leftCols(cols) * h;
        if (coeff) coeff->head(cols) += h;
    }
}

}  // namespace

LanczosResult lanczos_lowest(const LinearOperator& op, const Eigen::VectorXd& start, int k,
                             const LanczosOptions& opt) {
    const long n = start.size();
    if (n == 0) throw InputError("lanczos_lowest: empty operator");
    k = static_cast<int>(std::min<long>(k, n));
    const int m = static_cast<int>(
        std::min<long>(n, opt.max_basis > 0 ? opt.max_basis : std::max(2 * k + 30, 60)));
    const int keep_max = std::max(k, std::min(m - 10, k + std::max(k, 10)));

    Eigen::MatrixXd V(n, m);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd cur = start;
    if (cur.norm() == 0) throw InputError("lanczos_lowest: zero start vector");
    cur.normalize();
    Eigen::VectorXd w(n), f(n);
    double fnorm = 0;
    int keep = 0;
    int salt = 0;

    LanczosResult res;
    for (int restart = 0;; ++restart) {
        int filled = m;
        for (int j = keep; j < m; ++j) {
            V.col(j) = cur;
            op(cur, w);
            Eigen::VectorXd h = Eigen::VectorXd::Zero(j + 1);
            orthogonalize(V, j + 1, w, &h);
            for (int i = 0; i <= j; ++i) T(i, j) = T(j, i) = h[i];
            const double beta = w.norm();
            const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
            if (j == m - 1) {
                f = w;
                fnorm = beta;
                break;
            }
            if (beta > 1e-12 * scale) {
                cur = w / beta;
                continue;
            }
            // Invariant subspace found: continue with a fresh orthogonal direction.
            bool ok = false;
            for (int tries = 0; tries < 8 && !ok; ++tries) {
                cur = fresh_direction(n, salt++);
                orthogonalize(V, j + 1, cur, nullptr);
                const double nc = cur.norm();
                if (nc > 1e-6) {
                    cur /= nc;
                    ok = true;
                }
            }
            for (int i = 0; i <= j; ++i) T(i, j + 1) = T(j + 1, i) = 0.0;
            if (!ok) {
                filled = j + 1;
                f.setZero();
                fnorm = 0;
                break;
            }
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(filled, filled));
        const Eigen::VectorXd& theta = es.eigenvalues();
        const Eigen::MatrixXd& S = es.eigenvectors();
        const double spread =
            std::max({std::abs(theta[0]), std::abs(theta[filled - 1]), 1e-300});
        const int kk = std::min(k, filled);
        bool converged = true;
        for (int i = 0; i < kk; ++i)
            if (fnorm * std::abs(S(filled - 1, i)) > opt.tol * spread) converged = false;

        if (converged || restart >= opt.max_restarts || filled < m) {
            res.values = theta.head(kk);
            res.vectors = V.leftCols(filled) * S.leftCols(kk);
            res.residuals.resize(kk);
            for (int i = 0; i < kk; ++i) {
                Eigen::VectorXd y = res.vectors.col(i);
                const double nrm = y.norm();
                y /= nrm;
                res.vectors.col(i) = y;
                op(y, w);
                res.residuals[i] = (w - res.values[i] * y).norm();
            }
            res.restarts = restart;
            if (!converged && filled == m)
                throw NumericalError("Lanczos did not converge after " + std::to_string(restart) +
                                     " restarts; max residual " +
                                     std::to_string(res.residuals.maxCoeff()));
            return res;
        }

        keep = std::min(keep_max, filled - 1);
        const Eigen::MatrixXd Y = V.leftCols(filled) * S.leftCols(keep);
        V.leftCols(keep) = Y;
        T.setZero();
        for (int i = 0; i < keep; ++i) T(i, i) = theta[i];
        if (fnorm > 0) {
            cur = f / fnorm;
        } else {
            cur = fresh_direction(n, salt++);
            orthogonalize(V, keep, cur, nullptr);
            cur.normalize();
        }
    }
}

}  // namespace adqed
