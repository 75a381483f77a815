#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adqed/model.hpp"
#include "adqed/system.hpp"

namespace adqed {

// Configuration problem; the message names the source, line and key when known.
struct ConfigError : InputError {
    using InputError::InputError;
};

enum class ExperimentKind { Spectrum, Quench, Scaling, Converge, TwoEmitter, Ising, Phase };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

struct SweepAxis {
    std::string key;  // a sweepable schema key such as coupling.g
    std::vector<double> values;
};

struct QuenchOptions {
    double d_f{0.0};
    double periods{5.0};  // duration in units of the estimated oscillation period
    int samples{400};
};

struct ConvergeOptions {
    std::vector<int> Nc;
    std::vector<int> alpha_c;
    int levels{5};
};

struct TwoEmitterOptions {
    std::vector<int> separations;
};

struct IsingOptions {
    int N{2};
    int spacing{0};  // lattice sites between neighbouring emitters; 0 = collective
};

struct PhaseOptions {
    std::vector<double> l;
    std::vector<int> theta_L;
    std::vector<int> L;
    std::vector<double> h;
};

struct ExperimentConfig {
    ExperimentKind kind{ExperimentKind::Spectrum};
    SystemConfig system;
    std::vector<SweepAxis> sweeps;
    QuenchOptions quench;
    ConvergeOptions converge;
    TwoEmitterOptions two_emitter;
    IsingOptions ising;
    PhaseOptions phase;
    int threads{0};  // 0 = hardware concurrency
    // Every assigned key with its normalized value; the basis of the config hash.
    std::map<std::string, std::string> values;
};

// Parses key = value lines ('#' starts a comment). Unknown keys, malformed values and
// violated preconditions raise ConfigError naming the key and its line. A non-empty
// experiment selects the experiment; it must agree with an `experiment` key in the file.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>",
                              const std::string& experiment = "");
ExperimentConfig load_config(const std::string& path, const std::string& experiment = "");

// Cutoff overrides from the command line; recorded in values so they enter the hash.
void override_cutoff(ExperimentConfig& cfg, const std::string& key, int value);

// Re-checks cross-key preconditions (called by the parser and after overrides).
void check_config(const ExperimentConfig& cfg);

// Applies one sweep value to a system configuration.
void apply_sweep_value(SystemConfig& sys, const std::string& key, double value);

// Canonical "key = value" text of the configuration and its FNV-1a hash.
std::string canonical_text(const ExperimentConfig& cfg);
std::uint64_t fnv1a(const std::string& data);
std::string hex_hash(std::uint64_t h);

struct DimensionEstimate {
    int Nc{0};
    int modes{0};
    int alpha_c{0};
    std::size_t dim{0};
    double dense_bytes{0.0};   // full dense matrix plus eigenvectors
    double sparse_bytes{0.0};  // Lanczos vectors plus sparse photon operators (estimate)
    bool within_budget{true};
};

struct Diagnostics {
    std::vector<std::string> messages;
    std::vector<DimensionEstimate> dimensions;  // one per N_c = 1..cutoff
    int ed_modes{0};
};

// Schema check plus basis-dimension and memory estimates without running anything.
Diagnostics validate(const ExperimentConfig& cfg);

}  // namespace adqed
