#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "adqed/config.hpp"
#include "adqed/experiments.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kInternalError = 1;

struct Options {
    std::string config;
    std::string out_dir;
    int threads{-1};
    int nc{-1};
    int alpha_c{-1};
    int n_eigs{-1};
    std::string method;
};

void add_common(CLI::App* sub, Options& o, bool needs_out) {
    sub->add_option("--config", o.config, "key = value configuration file")->required();
    if (needs_out) sub->add_option("--out-dir", o.out_dir, "directory for CSV/JSON artifacts")->required();
    sub->add_option("--threads", o.threads, "worker threads for sweeps (default: logical cores)");
    sub->add_option("--nc", o.nc, "total photon-number cutoff N_c");
    sub->add_option("--alpha-c", o.alpha_c, "number of matter eigenstates alpha_c");
    sub->add_option("--n-eigs", o.n_eigs, "number of eigenpairs");
    sub->add_option("--method", o.method, "eigensolver: auto, dense or iterative");
}

adqed::ExperimentConfig load(const Options& o, const std::string& experiment) {
    adqed::ExperimentConfig cfg = adqed::load_config(o.config, experiment);
    if (o.nc >= 0) adqed::override_cutoff(cfg, "cutoff.Nc", o.nc);
    if (o.alpha_c >= 0) adqed::override_cutoff(cfg, "cutoff.alpha_c", o.alpha_c);
    if (o.n_eigs >= 0) adqed::override_cutoff(cfg, "cutoff.n_eigs", o.n_eigs);
    if (o.threads >= 0) adqed::override_cutoff(cfg, "run.threads", o.threads);
    if (!o.method.empty()) {
        try {
            cfg.system.method = adqed::parse_method(o.method);
        } catch (const std::exception&) {
            throw adqed::ConfigError("--method: expected auto, dense or iterative, got '" + o.method + "'");
        }
        cfg.values["cutoff.method"] = o.method;
    }
    return cfg;
}

int print_validation(const adqed::ExperimentConfig& cfg) {
    const adqed::Diagnostics d = adqed::validate(cfg);
    for (const auto& m : d.messages) std::printf("%s\n", m.c_str());
    std::printf("%-4s %-6s %-8s %-14s %-14s %-14s %s\n", "Nc", "modes", "alpha_c", "dimension",
                "dense_MiB", "sparse_MiB", "budget");
    bool ok = true;
    for (const auto& e : d.dimensions) {
        std::printf("%-4d %-6d %-8d %-14zu %-14.1f %-14.1f %s\n", e.Nc, e.modes, e.alpha_c, e.dim,
                    e.dense_bytes / (1 << 20), e.sparse_bytes / (1 << 20), e.within_budget ? "ok" : "exceeded");
        ok = ok && e.within_budget;
    }
    std::printf("config_hash %s\n", adqed::hex_hash(adqed::fnv1a(adqed::canonical_text(cfg))).c_str());
    return ok ? kOk : kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
    adqed::configure_logging();
    CLI::App app{"Asymptotically decoupled frame simulations of waveguide QED"};
    app.require_subcommand(1);
    Options opt;
    std::string chosen;
    for (const char* name : {"spectrum", "quench", "scaling", "converge", "two-emitter", "ising", "phase"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        add_common(sub, opt, true);
        sub->callback([&chosen, name] { chosen = name; });
    }
    auto* val = app.add_subcommand("validate", "check a configuration and estimate basis dimensions");
    add_common(val, opt, false);
    val->callback([&chosen] { chosen = "validate"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (chosen == "validate") return print_validation(load(opt, ""));
        const adqed::ExperimentConfig cfg = load(opt, chosen);
        const adqed::RunSummary s = adqed::run_experiment(cfg, opt.out_dir);
        for (const auto& f : s.files) std::printf("%s %zu\n", f.name.c_str(), f.rows);
        std::printf("manifest.json config_hash %s wall %.2fs\n", s.config_hash.c_str(), s.wall_seconds);
        return kOk;
    } catch (const adqed::InputError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfigError;
    } catch (const adqed::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInternalError;
    }
}
