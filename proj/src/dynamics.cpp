#include "adqed/dynamics.hpp"

#include <cmath>
#include <complex>

#include "adqed/observables.hpp"

namespace adqed {

QuenchSetup prepare_quench(const QuenchProtocol& protocol) {
    const SystemConfig& pre_cfg = protocol.pre;
    if (pre_cfg.em.shape != PotentialShape::DoubleWell)
        throw InputError("quench protocol needs a double-well emitter");
    SystemConfig post_cfg = pre_cfg;
    post_cfg.em.d = protocol.d_f;

    const SystemSolution frame = build_frame(pre_cfg);
    const DressedPotential dp_i = dressed_potential(pre_cfg.em, frame.ad.xi_total);
    const DressedPotential dp_f = dressed_potential(post_cfg.em, frame.ad.xi_total);
    const int ac = pre_cfg.alpha_c;
    const MatterSpectrum a = solve_matter(dp_i.dressed, frame.ad.m_eff, frame.ad.hbar, ac, pre_cfg.grid);
    const MatterSpectrum b = solve_matter(dp_f.dressed, frame.ad.m_eff, frame.ad.hbar, ac, pre_cfg.grid);
    const double R = std::max(a.Q[a.Q.size() - 1], b.Q[b.Q.size() - 1]) +
                     std::max(a.h, b.h);
    const double h = std::min(a.h, b.h);
    const MatterSpectrum mi = solve_matter_on_grid(dp_i.dressed, frame.ad.m_eff, frame.ad.hbar, ac, R, h);
    const MatterSpectrum mf = solve_matter_on_grid(dp_f.dressed, frame.ad.m_eff, frame.ad.hbar, ac, R, h);

    QuenchSetup q;
    SystemConfig pc = pre_cfg;
    pc.n_eigs = 1;
    q.pre = solve_system(pc, &mi);
    q.post = build_system(post_cfg, &mf);
    q.post.ed = diagonalize(*q.post.H, static_cast<int>(q.post.H->dim()), Method::Dense);

    q.overlap = mf.psi.transpose() * mi.psi;
    const long np = static_cast<long>(q.pre.basis->photon_states());
    Eigen::Map<const Eigen::MatrixXd> Xi(q.pre.ed.vectors.col(0).data(), ac, np);
    q.initial.resize(ac * np);
    Eigen::Map<Eigen::MatrixXd> Xf(q.initial.data(), ac, np);
    Xf = q.overlap * Xi;
    q.completeness_deficit = 1.0 - q.initial.squaredNorm();
    if (q.completeness_deficit > 0.01)
        throw NumericalError("quench overlap misses " + std::to_string(q.completeness_deficit) +
                             " of the initial state; increase alpha_c");
    q.initial.normalize();
    return q;
}

Eigen::VectorXd quench_initial_state(const QuenchSetup& setup) {
    return setup.post.ed.vectors.transpose() * setup.initial;
}

QuenchResult evolve_observables(const QuenchSetup& setup, const Eigen::VectorXd& weights,
                                const std::vector<double>& times) {
    if (times.empty()) throw InputError("quench time grid is empty");
    const SystemSolution& post = setup.post;
    const Observables obs(post);
    QuenchResult r;
    r.times = times;
    r.E = post.ed.E;
    r.weights = weights;
    r.completeness_deficit = setup.completeness_deficit;

    std::vector<int> active;
    for (int i = 0; i < weights.size(); ++i)
        if (std::abs(weights[i]) > 1e-14) active.push_back(i);
    const long dim = static_cast<long>(post.H->dim());
    Eigen::MatrixXd V(dim, active.size());
    Eigen::VectorXd c(active.size()), E(active.size());
    for (std::size_t j = 0; j < active.size(); ++j) {
        V.col(j) = post.ed.vectors.col(active[j]);
        c[j] = weights[active[j]];
        E[j] = post.ed.E[active[j]];
    }

    const int T = static_cast<int>(times.size());
    const int sites = post.folded ? static_cast<int>(post.folded->M.rows()) : 0;
    r.n_sites.resize(T, sites);
    r.n0.resize(T);
    r.coulomb_total.resize(T);
    r.norm.resize(T);
    r.energy.resize(T);
    const double hbar = post.modes.hbar;
    Eigen::VectorXd re(dim), im(dim), Hre(dim), Him(dim);
    for (int ti = 0; ti < T; ++ti) {
        const Eigen::ArrayXd phase = -E.array() * times[ti] / hbar;
        re.noalias() = V * (c.array() * phase.cos()).matrix();
        im.noalias() = V * (c.array() * phase.sin()).matrix();
        Eigen::VectorXcd psi(dim);
        psi.real() = re;
        psi.imag() = im;
        const PhotonMoments m = obs.moments(psi);
        if (sites > 0) {
            r.n_sites.row(ti) = obs.site_occupations(m).transpose();
            r.n0[ti] = r.n_sites(ti, 0);
        } else {
            r.n0[ti] = 0.0;
        }
        r.coulomb_total[ti] = obs.coulomb_photon_number(m);
        post.H->apply(re, Hre);
        post.H->apply(im, Him);
        r.norm[ti] = m.norm;
        r.energy[ti] = re.dot(Hre) + im.dot(Him);
    }
    for (int ti = 0; ti < T; ++ti) {
        r.norm_drift = std::max(r.norm_drift, std::abs(r.norm[ti] - r.norm[0]));
        r.energy_drift = std::max(r.energy_drift, std::abs(r.energy[ti] - r.energy[0]) /
                                                      std::max(std::abs(r.energy[0]), 1e-300));
    }
    return r;
}

OscillationEstimate oscillation_estimate(double v, double d_f, double m_eff, double xi) {
    OscillationEstimate o;
    const double f = 1.0 - 3.0 * xi * xi / (d_f * d_f);
    if (!(f > 0) || !(m_eff > 0) || !(d_f > 0)) return o;
    o.omega = std::sqrt(8.0 * v / (d_f * d_f * m_eff) * f);
    o.period = 2.0 * std::numbers::pi / o.omega;
    o.defined = true;
    return o;
}

double dominant_frequency(const std::vector<double>& t, const Eigen::VectorXd& y, double w_lo,
                          double w_hi, int samples) {
    const int n = static_cast<int>(t.size());
    if (n < 3 || y.size() != n) throw InputError("dominant_frequency needs matching samples");
    const double mean = y.mean();
    // Trapezoid weights allow non-uniform grids.
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        const double left = i > 0 ? t[i] - t[i - 1] : 0.0;
        const double right = i + 1 < n ? t[i + 1] - t[i] : 0.0;
        w[i] = 0.5 * (left + right) * (y[i] - mean);
    }
    auto power = [&](double om) {
        std::complex<double> s = 0;
        for (int i = 0; i < n; ++i) s += w[i] * std::polar(1.0, om * t[i]);
        return std::norm(s);
    };
    int best = 0;
    std::vector<double> p(samples);
    for (int k = 0; k < samples; ++k) {
        p[k] = power(w_lo + (w_hi - w_lo) * k / (samples - 1));
        if (p[k] > p[best]) best = k;
    }
    double om = w_lo + (w_hi - w_lo) * best / (samples - 1);
    if (best > 0 && best + 1 < samples) {
        const double denom = p[best - 1] - 2 * p[best] + p[best + 1];
        if (denom < 0) om += 0.5 * (p[best - 1] - p[best + 1]) / denom * (w_hi - w_lo) / (samples - 1);
    }
    return om;
}

}  // namespace adqed
