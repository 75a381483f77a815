#include "adqed/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adqed/fit.hpp"

namespace adqed {

std::string to_string(WaveguideKind kind) {
    switch (kind) {
        case WaveguideKind::CavityArray: return "cavity-array";
        case WaveguideKind::PowerLaw: return "power-law";
        case WaveguideKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

WaveguideSpec build_cavity_array(double omega_c, double J, int L, double hbar) {
    if (L < 3 || L % 2 == 0)
        throw InputError("cavity array needs odd L >= 3 so that modes fold about site 0 (got L=" +
                         std::to_string(L) + ")");
    if (!(omega_c > 0)) throw InputError("cavity array needs omega_c > 0");
    if (J < 0 || J >= hbar * omega_c)
        throw InputError("cavity array needs 0 <= J < hbar*omega_c for a gapped band");
    WaveguideSpec wg;
    wg.kind = WaveguideKind::CavityArray;
    wg.L = L;
    wg.omega_c = omega_c;
    wg.J = J;
    wg.hbar = hbar;
    wg.k.resize(L);
    wg.omega.resize(L);
    const int half = (L - 1) / 2;
    for (int i = 0; i < L; ++i) {
        const double k = 2.0 * std::numbers::pi * (i - half) / L;
        wg.k[i] = k;
        wg.omega[i] = omega_c - (J / hbar) * std::cos(k);
    }
    return wg;
}

WaveguideSpec build_powerlaw(double l, double omega_max, int L, double hbar) {
    if (!(l > 0)) throw InputError("power-law waveguide needs exponent l > 0");
    if (!(omega_max > 0)) throw InputError("power-law waveguide needs omega_max > 0");
    if (L < 1) throw InputError("power-law waveguide needs L >= 1");
    WaveguideSpec wg;
    wg.kind = WaveguideKind::PowerLaw;
    wg.L = L;
    wg.l = l;
    wg.omega_max = omega_max;
    wg.hbar = hbar;
    wg.k.resize(L);
    wg.omega.resize(L);
    // k = 0 is excluded: the smallest mode sets the infrared cutoff.
    for (int i = 0; i < L; ++i) {
        const double frac = static_cast<double>(i + 1) / L;
        wg.k[i] = std::numbers::pi * frac;
        wg.omega[i] = omega_max * std::pow(frac, l);
    }
    return wg;
}

WaveguideSpec build_tabulated(const std::vector<double>& k, const std::vector<double>& omega,
                              double hbar) {
    if (k.size() != omega.size() || k.empty())
        throw InputError("tabulated waveguide needs matching, non-empty k and omega lists");
    WaveguideSpec wg;
    wg.kind = WaveguideKind::Tabulated;
    wg.L = static_cast<int>(k.size());
    wg.hbar = hbar;
    wg.k = Eigen::Map<const Eigen::VectorXd>(k.data(), k.size());
    wg.omega = Eigen::Map<const Eigen::VectorXd>(omega.data(), omega.size());
    for (int i = 0; i < wg.L; ++i) {
        if (wg.omega[i] < 0) throw InputError("tabulated waveguide has a negative frequency");
        if (wg.k[i] < -std::numbers::pi || wg.k[i] >= std::numbers::pi)
            throw InputError("tabulated waveguide wavevectors must lie in [-pi, pi)");
    }
    return wg;
}

CouplingProfile couple_point(const WaveguideSpec& wg, double amplitude, double charge,
                             double mass) {
    CouplingProfile cp;
    cp.amplitude = amplitude;
    cp.charge = charge;
    cp.mass = mass;
    cp.f = Eigen::VectorXd::Constant(wg.L, amplitude / std::sqrt(static_cast<double>(wg.L)));
    cp.g.resize(wg.L);
    for (int i = 0; i < wg.L; ++i)
        cp.g[i] = charge * cp.f[i] * std::sqrt(wg.omega[i] / (mass * wg.hbar));
    cp.g_total = cp.g.norm();
    return cp;
}

CouplingProfile couple_with_strength(const WaveguideSpec& wg, double g, double charge,
                                     double mass) {
    if (g < 0) throw InputError("coupling strength g must be >= 0");
    const double mean_omega = wg.omega.mean();
    if (!(mean_omega > 0)) throw InputError("waveguide has no positive frequencies");
    const double amplitude = g / (charge * std::sqrt(mean_omega / (mass * wg.hbar)));
    CouplingProfile cp = couple_point(wg, amplitude, charge, mass);
    cp.g_total = g;
    return cp;
}

double spectral_exponent(const WaveguideSpec& wg, const Eigen::VectorXd& g) {
    std::vector<int> order(wg.L);
    for (int i = 0; i < wg.L; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return wg.omega[a] < wg.omega[b]; });
    std::vector<double> w, J;
    for (int i = 0; i + 1 < wg.L; ++i) {
        const int a = order[i], b = order[i + 1];
        const double dw = wg.omega[b] - wg.omega[a];
        if (!(dw > 0) || !(wg.omega[a] > 0)) continue;
        w.push_back(0.5 * (wg.omega[a] + wg.omega[b]));
        J.push_back(std::numbers::pi * 0.5 * (g[a] * g[a] + g[b] * g[b]) / dw);
    }
    if (w.size() < 3) throw InputError("spectral_exponent: too few distinct frequencies");
    return fit_loglog(w, J).slope;
}

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    if (c_.empty()) c_.push_back(0.0);
}

double Polynomial::operator()(double Q) const {
    double r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * Q + *it;
    return r;
}

Polynomial Polynomial::derivative(int order) const {
    std::vector<double> c = c_;
    for (int o = 0; o < order; ++o) {
        if (c.size() <= 1) return Polynomial({0.0});
        std::vector<double> next(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i) next[i - 1] = c[i] * static_cast<double>(i);
        c = std::move(next);
    }
    return Polynomial(std::move(c));
}

bool Polynomial::is_even() const {
    for (std::size_t i = 1; i < c_.size(); i += 2)
        if (c_[i] != 0.0) return false;
    return true;
}

Polynomial Polynomial::gaussian_smoothed(double xi) const {
    std::vector<double> out = c_;
    double weight = 1.0;  // xi^{2l} / (2l)!!
    Polynomial deriv = *this;
    for (int l = 1; 2 * l <= degree(); ++l) {
        deriv = deriv.derivative(2);
        weight *= xi * xi / (2.0 * l);
        for (std::size_t i = 0; i < deriv.c_.size(); ++i) out[i] += weight * deriv.c_[i];
    }
    return Polynomial(std::move(out));
}

Polynomial fit_tabulated(const std::vector<double>& q, const std::vector<double>& v,
                         int max_degree, double tol) {
    const std::size_t n = q.size();
    if (n != v.size() || n < 5) throw InputError("tabulated potential needs >= 5 matching samples");
    double qmax = 0, vmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
        qmax = std::max(qmax, std::abs(q[i]));
        vmax = std::max(vmax, std::abs(v[i]));
    }
    if (qmax == 0) throw InputError("tabulated potential grid is degenerate");
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    for (int deg = 2; deg <= max_degree && deg < static_cast<int>(n); ++deg) {
        Eigen::MatrixXd A(n, deg + 1);
        for (std::size_t i = 0; i < n; ++i) {
            double t = 1.0;
            for (int j = 0; j <= deg; ++j) {
                A(i, j) = t;
                t *= q[i] / qmax;
            }
        }
        Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
        const double resid = (A * c - rhs).cwiseAbs().maxCoeff();
        if (resid <= tol * std::max(vmax, 1e-300)) {
            std::vector<double> coeffs(deg + 1);
            for (int j = 0; j <= deg; ++j) coeffs[j] = c[j] / std::pow(qmax, j);
            return Polynomial(std::move(coeffs));
        }
    }
    throw InputError("tabulated potential is not smooth enough for the dressed-potential series "
                     "(no polynomial of degree <= " + std::to_string(max_degree) +
                     " reproduces it)");
}

Polynomial EmitterSpec::potential() const {
    std::vector<double> c;
    switch (shape) {
        case PotentialShape::DoubleWell:
            if (!(v > 0) || !(d > 0)) throw InputError("double well needs v > 0 and d > 0");
            c = {v, 0.0, -2.0 * v / (d * d), 0.0, v / (d * d * d * d)};
            break;
        case PotentialShape::Polynomial:
            if (poly.empty()) throw InputError("polynomial potential has no coefficients");
            c = poly;
            break;
        case PotentialShape::Tabulated:
            c = fit_tabulated(table_q, table_v).coeffs();
            break;
    }
    if (c.size() < 4) c.resize(4, 0.0);
    c[1] -= h;
    c[3] += cubic;
    return Polynomial(std::move(c));
}

EmitterSpec double_well(double v, double d, double h, double mass) {
    EmitterSpec em;
    em.shape = PotentialShape::DoubleWell;
    em.v = v;
    em.d = d;
    em.h = h;
    em.mass = mass;
    return em;
}

CharacteristicScales characteristic_scales(const WaveguideSpec& wg, const CouplingProfile& cp,
                                           const EmitterSpec& em) {
    if (cp.g.size() != wg.L) throw InputError("coupling profile and waveguide mode counts differ");
    CharacteristicScales s;
    s.omega = std::sqrt(wg.omega.squaredNorm() / wg.L);
    s.delta = std::sqrt((wg.omega.array() - s.omega).square().sum() / wg.L);
    s.g = cp.g.norm();
    s.x_omega = std::sqrt(wg.hbar / (em.mass * s.omega));
    return s;
}

}  // namespace adqed
