#include "adqed/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include <spdlog/spdlog.h>

#include "adqed/dynamics.hpp"
#include "adqed/effective.hpp"
#include "adqed/phase.hpp"
#include "adqed/scaling.hpp"
#include "adqed/spectra.hpp"

namespace adqed {

namespace {

using nlohmann::json;

struct Axis {
    std::string key;
    std::string column;
    std::vector<double> values;
};

// The sweep axis of the run, or a single point at the configured coupling.
Axis sweep_axis(const ExperimentConfig& cfg) {
    if (!cfg.sweeps.empty()) {
        const auto& s = cfg.sweeps[0];
        return {s.key, s.key.substr(s.key.find('.') + 1), s.values};
    }
    return {"coupling.g", "g", {cfg.system.g}};
}

SystemConfig at_point(const ExperimentConfig& cfg, const Axis& axis, std::size_t i) {
    SystemConfig sys = cfg.system;
    apply_sweep_value(sys, axis.key, axis.values[i]);
    return sys;
}

std::string units_of(const SystemConfig& sys) {
    return "hbar = " + cell(sys.wg.hbar) + ", m = " + cell(sys.em.mass) +
           ", omega_c = " + cell(sys.wg.omega_c) +
           "; energies in hbar omega_c, lengths in sqrt(hbar / (m omega_c)), times in 1 / omega_c";
}

json fit_json(const LineFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_stderr", f.slope_stderr},
            {"rms_residual", f.rms_residual}};
}

struct SpectrumPoint {
    StateClassification cls;
    ADParameters ad;
    double omega0{0.0};
    double matter_gap{0.0};
    double residual{0.0};
    double richardson{0.0};
    double tail{0.0};
};

json run_spectrum(const ExperimentConfig& cfg, RunWriter& w) {
    const Axis axis = sweep_axis(cfg);
    const auto points = parallel_map<SpectrumPoint>(axis.values.size(), cfg.threads, [&](std::size_t i) {
        spdlog::info("spectrum point {} = {}", axis.key, axis.values[i]);
        const SystemSolution s = solve_system(at_point(cfg, axis, i));
        SpectrumPoint p;
        p.cls = classify_excitations(s);
        p.ad = s.ad;
        p.omega0 = s.frame.Omega[0];
        p.matter_gap = s.matter.E[1] - s.matter.E[0];
        p.residual = s.ed.residuals.size() ? s.ed.residuals.maxCoeff() : 0.0;
        p.richardson = s.matter.richardson_error;
        p.tail = s.matter.tail_amplitude;
        return p;
    });
    CsvTable spec({axis.column, "level", "energy", "excitation", "parity", "label", "zero_photon_weight"});
    CsvTable ad({axis.column, "Theta", "m_eff", "xi", "Omega_0", "matter_gap", "band_lo", "band_hi"});
    double worst_res = 0, worst_rich = 0, worst_tail = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        for (std::size_t k = 0; k < p.cls.states.size(); ++k) {
            const auto& st = p.cls.states[k];
            spec.add_row({cell(axis.values[i]), cell(k), cell(st.E), cell(st.dE), cell(st.parity),
                          k == 0 ? "ground" : to_string(st.label), cell(st.zero_photon_weight)});
        }
        ad.add_row({cell(axis.values[i]), cell(p.ad.Theta), cell(p.ad.m_eff), cell(p.ad.xi_total),
                    cell(p.omega0), cell(p.matter_gap), cell(p.cls.band_lo), cell(p.cls.band_hi)});
        worst_res = std::max(worst_res, p.residual);
        worst_rich = std::max(worst_rich, p.richardson);
        worst_tail = std::max(worst_tail, p.tail);
    }
    w.write_csv("spectrum.csv", spec, {"parity is +1/-1 for a symmetric potential, 0 otherwise"});
    w.write_csv("ad_parameters.csv", ad);
    return {{"max_ed_residual", worst_res},
            {"max_matter_richardson_error", worst_rich},
            {"max_matter_tail", worst_tail},
            {"ed_converged", worst_res < 1e-6}};
}

json run_quench(const ExperimentConfig& cfg, RunWriter& w) {
    QuenchProtocol protocol{cfg.system, cfg.quench.d_f};
    const QuenchSetup setup = prepare_quench(protocol);
    const Eigen::VectorXd weights = quench_initial_state(setup);
    const ADParameters& ad = setup.post.ad;
    const OscillationEstimate osc = oscillation_estimate(cfg.system.em.v, cfg.quench.d_f, ad.m_eff, ad.xi_total);
    double period = osc.period;
    if (!osc.defined) {
        const double gap = setup.post.ed.E[1] - setup.post.ed.E[0];
        period = 2.0 * std::numbers::pi * ad.hbar / std::max(gap, 1e-300);
        spdlog::warn("oscillation estimate undefined (xi >= d_f / sqrt 3); using the first post-quench gap");
    }
    const std::vector<double> times = linspace(0.0, cfg.quench.periods * period, cfg.quench.samples);
    const QuenchResult r = evolve_observables(setup, weights, times);

    CsvTable heat({"t", "x", "n_x"});
    CsvTable trace({"t", "n0", "coulomb_photons", "norm", "energy"});
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        for (int x = 0; x < r.n_sites.cols(); ++x) heat.add_row({cell(times[ti]), cell(x), cell(r.n_sites(ti, x))});
        trace.add_row({cell(times[ti]), cell(r.n0[ti]), cell(r.coulomb_total[ti]), cell(r.norm[ti]),
                       cell(r.energy[ti])});
    }
    CsvTable wt({"index", "E", "abs_c"});
    for (int i = 0; i < r.E.size(); ++i) wt.add_row({cell(i), cell(r.E[i]), cell(std::abs(r.weights[i]))});
    w.write_csv("heatmap.csv", heat, {"n_{-x} = n_x by mirror symmetry"});
    w.write_csv("trace.csv", trace);
    w.write_csv("weights.csv", wt);
    // Blank-line separated scans for gnuplot's pm3d / splot.
    std::string dat = "# t x n_x\n";
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        for (int x = 0; x < r.n_sites.cols(); ++x)
            dat += cell(times[ti]) + " " + cell(x) + " " + cell(r.n_sites(ti, x)) + "\n";
        dat += "\n";
    }
    w.write_text("heatmap.dat", dat, times.size() * r.n_sites.cols());

    const double wref = osc.defined ? osc.omega : 2.0 * std::numbers::pi / period;
    const double peak = dominant_frequency(times, r.n0, 0.1 * wref, 4.0 * wref);
    w.write_json("quench.json", {{"d_i", cfg.system.em.d},
                                 {"d_f", cfg.quench.d_f},
                                 {"g", cfg.system.g},
                                 {"m_eff", ad.m_eff},
                                 {"xi", ad.xi_total},
                                 {"omega_osc", osc.defined ? json(osc.omega) : json(nullptr)},
                                 {"period", period},
                                 {"n0_peak_frequency", peak},
                                 {"norm_drift", r.norm_drift},
                                 {"energy_drift", r.energy_drift},
                                 {"completeness_deficit", r.completeness_deficit},
                                 {"Nc", cfg.system.Nc},
                                 {"alpha_c", cfg.system.alpha_c}});
    return {{"completeness_deficit", r.completeness_deficit},
            {"norm_drift", r.norm_drift},
            {"energy_drift", r.energy_drift},
            {"overlap_converged", r.completeness_deficit < 1e-3}};
}

json run_scaling(const ExperimentConfig& cfg, RunWriter& w) {
    const Axis axis = sweep_axis(cfg);
    const ScalingTable t = scaling_table(cfg.system, axis.values, true);
    CsvTable tab({"g", "quantity", "value"});
    json fits;
    for (const auto& q : t.quantities) {
        for (std::size_t i = 0; i < t.g.size(); ++i) tab.add_row({cell(t.g[i]), q.name, cell(q.values[i])});
        fits[q.name] = fit_json(q.fit);
    }
    w.write_csv("scaling.csv", tab);
    w.write_json("scaling_fits.json", {{"fits", fits}, {"g", t.g}});
    return {{"points", t.g.size()}};
}

json run_converge(const ExperimentConfig& cfg, RunWriter& w) {
    const Axis axis = sweep_axis(cfg);
    if (axis.key != "coupling.g") throw ConfigError("sweep." + axis.key + ": converge sweeps coupling.g only");
    const auto reports = parallel_map<ConvergenceReport>(axis.values.size(), cfg.threads, [&](std::size_t i) {
        return convergence_study(cfg.system, {axis.values[i]}, cfg.converge.Nc, cfg.converge.alpha_c,
                                 cfg.converge.levels);
    });
    CsvTable levels({"g", "Nc", "alpha_c", "level", "energy", "excitation"});
    CsvTable changes({"g", "axis", "from", "to", "max_rel_change", "ground_change"});
    double worst = 0;
    for (const auto& rep : reports) {
        for (const auto& row : rep.rows)
            for (int k = 0; k < row.energies.size(); ++k)
                levels.add_row({cell(row.g), cell(row.Nc), cell(row.alpha_c), cell(k), cell(row.energies[k]),
                                cell(k == 0 ? 0.0 : row.excitations[k - 1])});
        for (const auto& c : rep.changes) {
            changes.add_row({cell(c.g), c.axis, cell(c.from), cell(c.to), cell(c.max_rel_change), cell(c.ground_change)});
            worst = std::max(worst, c.max_rel_change);
        }
    }
    w.write_csv("converge_levels.csv", levels);
    w.write_csv("converge_changes.csv", changes);
    return {{"max_rel_change", worst}, {"within_one_percent", worst < 0.01}};
}

std::pair<ADParameters, double> emitter_pair(const SystemConfig& sys, const std::vector<double>& xs) {
    std::vector<EmitterSite> sites;
    for (double x : xs) sites.push_back({x, sys.em.mass});
    const MultiCoupling mc = multi_coupling(sys.wg, sys.g, sites, sys.em.charge);
    const SymplecticFrame sf = diagonalize_symplectic(sys.wg, mc, sites);
    return {mass_renormalization(sf, mc, sys.wg, sites), sf.symplectic_residual};
}

json run_two_emitter(const ExperimentConfig& cfg, RunWriter& w) {
    const Axis axis = sweep_axis(cfg);
    const auto& seps = cfg.two_emitter.separations;
    struct Row {
        double Theta, m1, m2, mu21, residual;
    };
    const std::size_t n = axis.values.size() * seps.size();
    const auto rows = parallel_map<Row>(n, cfg.threads, [&](std::size_t i) {
        const SystemConfig sys = at_point(cfg, axis, i / seps.size());
        const auto [ad, res] = emitter_pair(sys, {0.0, static_cast<double>(seps[i % seps.size()])});
        const CouplingProfile cp = couple_with_strength(sys.wg, sys.g, sys.em.charge, sys.em.mass);
        const double theta = (cp.g.array() / sys.wg.omega.array()).square().sum();
        return Row{theta, ad.m_eff_j[0], ad.m_eff_j[1], ad.mu(1, 0), res};
    });
    CsvTable tab({axis.column, "separation", "Theta", "m_eff_1", "m_eff_2", "mu_21", "m_collective", "m_isolated"});
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Row& r = rows[i];
        const double m = cfg.system.em.mass;
        tab.add_row({cell(axis.values[i / seps.size()]), cell(seps[i % seps.size()]), cell(r.Theta), cell(r.m1),
                     cell(r.m2), cell(r.mu21), cell(m * (1 + 4 * r.Theta) / (1 + 2 * r.Theta)),
                     cell(m * (1 + 2 * r.Theta))});
        worst = std::max(worst, r.residual);
    }
    w.write_csv("two_emitter.csv", tab, {"m_collective = m(1+4Theta)/(1+2Theta), m_isolated = m(1+2Theta)"});
    return {{"max_symplectic_residual", worst}};
}

json run_ising(const ExperimentConfig& cfg, RunWriter& w) {
    const SystemConfig& sys = cfg.system;
    std::vector<double> xs;
    std::vector<EmitterSpec> emitters;
    for (int j = 0; j < cfg.ising.N; ++j) {
        xs.push_back(static_cast<double>(j * cfg.ising.spacing));
        EmitterSpec e = sys.em;
        e.x = xs.back();
        emitters.push_back(e);
    }
    const auto [ad, res] = emitter_pair(sys, xs);
    const IsingModel ising = build_ising(emitters, ad, sys.grid);
    const SpinSpectrum spec = diagonalize_spins(ising);
    CsvTable tab({"model", "level", "energy", "parity"});
    for (int i = 0; i < spec.E.size(); ++i)
        tab.add_row({"ising", cell(i), cell(spec.E[i]), cell(spec.parity[i])});
    json doc = {{"ising", to_json(ising)},
                {"magnetization", spec.magnetization},
                {"ground_degenerate", spec.ground_degenerate},
                {"symplectic_residual", res}};
    if (cfg.ising.spacing == 0) {
        const LMGModel lmg = lmg_limit(ising);
        const SpinSpectrum ls = diagonalize_spins(lmg);
        for (int i = 0; i < ls.E.size(); ++i) tab.add_row({"lmg", cell(i), cell(ls.E[i]), cell(ls.parity[i])});
        doc["lmg"] = to_json(lmg);
        doc["lmg_magnetization"] = ls.magnetization;
    }
    w.write_csv("ising_spectrum.csv", tab, {"lmg rows differ from ising rows by the constant -J N / 2"});
    w.write_json("ising.json", doc);
    return {{"symplectic_residual", res}};
}

json run_phase(const ExperimentConfig& cfg, RunWriter& w) {
    json conv;
    const SystemConfig& sys = cfg.system;
    if (!cfg.phase.l.empty()) {
        const auto scans = parallel_map<ThetaScan>(cfg.phase.l.size(), cfg.threads, [&](std::size_t i) {
            return theta_scaling(cfg.phase.l[i], cfg.phase.theta_L, sys.g, sys.wg.omega_max);
        });
        CsvTable tab({"l", "L", "Theta"});
        json fits = json::array();
        for (const auto& s : scans) {
            for (std::size_t i = 0; i < s.L.size(); ++i) tab.add_row({cell(s.l), cell(s.L[i]), cell(s.Theta[i])});
            fits.push_back({{"l", s.l},
                            {"class", to_string(s.cls)},
                            {"power", fit_json(s.power)},
                            {"logarithmic", fit_json(s.logarithmic)},
                            {"power_rms", s.power_rms},
                            {"logarithmic_rms", s.logarithmic_rms},
                            {"last_decade_change", s.last_decade_change},
                            {"log_ratio_spread", s.log_ratio_spread},
                            {"infrared_flag", s.infrared_flag}});
        }
        w.write_csv("theta.csv", tab);
        w.write_json("theta_fits.json", {{"g", sys.g}, {"omega_max", sys.wg.omega_max}, {"scans", fits}});
    }
    if (!cfg.phase.L.empty()) {
        const Axis axis = sweep_axis(cfg);
        if (axis.key != "coupling.g") throw ConfigError("sweep." + axis.key + ": phase sweeps coupling.g only");
        const auto scans = parallel_map<OrderParameterScan>(axis.values.size(), cfg.threads, [&](std::size_t i) {
            return order_parameter_scan(at_point(cfg, axis, i), cfg.phase.h, cfg.phase.L);
        });
        CsvTable order({"g", "h", "L", "q_loc"});
        CsvTable gap({"g", "L", "Delta_g", "m_eff", "q_extrapolated"});
        bool monotone = true;
        for (std::size_t i = 0; i < scans.size(); ++i) {
            const double g = axis.values[i];
            for (const auto& r : scans[i].rows) order.add_row({cell(g), cell(r.h), cell(r.L), cell(r.q_loc)});
            for (std::size_t j = 0; j < scans[i].L.size(); ++j) {
                gap.add_row({cell(g), cell(scans[i].L[j]), cell(scans[i].gap[j]), cell(scans[i].m_eff[j]),
                             cell(scans[i].extrapolated[j])});
                monotone = monotone && scans[i].monotone[j];
            }
        }
        w.write_csv("order_parameter.csv", order, {"q_loc = <Q + Xi> in the biased ground state"});
        w.write_csv("gap.csv", gap);
        conv["order_parameter_monotone_in_h"] = monotone;
    }
    return conv;
}

}  // namespace

void configure_logging() {
    const char* env = std::getenv("ADQED_LOG");
    const std::string level = env ? env : "warn";
    spdlog::set_level(spdlog::level::from_str(level));
    spdlog::set_pattern("[adqed %l] %v");
}

RunSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    RunSummary summary;
    summary.config_hash = hex_hash(fnv1a(canonical_text(cfg)));
    RunWriter w(out_dir, to_string(cfg.kind), summary.config_hash, units_of(cfg.system));
    spdlog::info("running {} (config {}) into {}", to_string(cfg.kind), summary.config_hash, out_dir);
    switch (cfg.kind) {
        case ExperimentKind::Spectrum: summary.convergence = run_spectrum(cfg, w); break;
        case ExperimentKind::Quench: summary.convergence = run_quench(cfg, w); break;
        case ExperimentKind::Scaling: summary.convergence = run_scaling(cfg, w); break;
        case ExperimentKind::Converge: summary.convergence = run_converge(cfg, w); break;
        case ExperimentKind::TwoEmitter: summary.convergence = run_two_emitter(cfg, w); break;
        case ExperimentKind::Ising: summary.convergence = run_ising(cfg, w); break;
        case ExperimentKind::Phase: summary.convergence = run_phase(cfg, w); break;
    }
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    summary.convergence["Nc"] = cfg.system.Nc;
    summary.convergence["alpha_c"] = cfg.system.alpha_c;
    w.finish(summary.wall_seconds, summary.convergence);
    summary.files = w.files();
    return summary;
}

}  // namespace adqed
