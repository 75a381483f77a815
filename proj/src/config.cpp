#include "adqed/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "adqed/fit.hpp"

namespace adqed {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Numeric tokens in their shortest round-trip form so that "1", "1.0" and "1e0" hash alike.
std::string normalize_value(const std::string& text) {
    std::string out, token;
    auto flush = [&] {
        const std::string t = trim(token);
        char* end = nullptr;
        const double x = t.empty() ? 0.0 : std::strtod(t.c_str(), &end);
        if (!t.empty() && end == t.c_str() + t.size() && std::isfinite(x)) {
            char buf[40];
            for (int prec = 15; prec <= 17; ++prec) {
                std::snprintf(buf, sizeof buf, "%.*g", prec, x);
                if (std::strtod(buf, nullptr) == x) break;
            }
            out += buf;
        } else {
            out += t;
        }
        token.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ':') {
            flush();
            out += c;
        } else {
            token += c;
        }
    }
    flush();
    return out;
}

struct Context {
    std::string source;
    std::map<std::string, int> line_of;

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const auto it = line_of.find(key);
        std::string where = source;
        if (it != line_of.end()) where += ":" + std::to_string(it->second);
        throw ConfigError(where + ": " + key + ": " + what);
    }
};

double parse_double(const Context& ctx, const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double x = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(x)) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        ctx.fail(key, "expected a number, got '" + text + "'");
    }
}

long parse_int(const Context& ctx, const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long x = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        ctx.fail(key, "expected an integer, got '" + text + "'");
    }
}

std::vector<double> parse_list(const Context& ctx, const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) {
        if (item.empty()) ctx.fail(key, "empty entry in list '" + text + "'");
        out.push_back(parse_double(ctx, key, item));
    }
    return out;
}

std::vector<int> parse_int_list(const Context& ctx, const std::string& key, const std::string& text) {
    std::vector<int> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) {
        if (item.empty()) ctx.fail(key, "empty entry in list '" + text + "'");
        out.push_back(static_cast<int>(parse_int(ctx, key, item)));
    }
    return out;
}

// "lo:hi:count" (linear), "lo:hi:count:log", or an explicit comma list.
std::vector<double> parse_sweep(const Context& ctx, const std::string& key, const std::string& text) {
    if (text.find(':') == std::string::npos) return parse_list(ctx, key, text);
    const auto parts = split(text, ':');
    if (parts.size() != 3 && parts.size() != 4)
        ctx.fail(key, "sweep range must be lo:hi:count or lo:hi:count:log");
    const double lo = parse_double(ctx, key, parts[0]);
    const double hi = parse_double(ctx, key, parts[1]);
    const long n = parse_int(ctx, key, parts[2]);
    if (n < 0) ctx.fail(key, "sweep count must be non-negative");
    if (n == 0) return {};
    const bool log = parts.size() == 4;
    if (log && parts[3] != "log") ctx.fail(key, "unknown sweep spacing '" + parts[3] + "'");
    if (n == 1) return {lo};
    if (log) {
        if (!(lo > 0) || !(hi > 0)) ctx.fail(key, "logarithmic sweep needs positive bounds");
        return logspace(lo, hi, static_cast<int>(n));
    }
    return linspace(lo, hi, static_cast<int>(n));
}

const std::vector<std::string>& sweepable() {
    static const std::vector<std::string> keys = {"coupling.g", "emitter.v", "emitter.d",
                                                  "emitter.h", "emitter.cubic", "waveguide.J"};
    return keys;
}

struct Raw {
    std::string text;
    int line;
};

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Spectrum: return "spectrum";
        case ExperimentKind::Quench: return "quench";
        case ExperimentKind::Scaling: return "scaling";
        case ExperimentKind::Converge: return "converge";
        case ExperimentKind::TwoEmitter: return "two-emitter";
        case ExperimentKind::Ising: return "ising";
        case ExperimentKind::Phase: return "phase";
    }
    return "unknown";
}

ExperimentKind parse_experiment(const std::string& name) {
    for (auto k : {ExperimentKind::Spectrum, ExperimentKind::Quench, ExperimentKind::Scaling,
                   ExperimentKind::Converge, ExperimentKind::TwoEmitter, ExperimentKind::Ising,
                   ExperimentKind::Phase})
        if (to_string(k) == name) return k;
    throw ConfigError("experiment: unknown experiment '" + name +
                      "' (expected spectrum, quench, scaling, converge, two-emitter, ising or phase)");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const std::string& requested) {
    Context ctx{source, {}};
    std::map<std::string, Raw> raw;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(number) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError(source + ":" + std::to_string(number) + ": missing key before '='");
        if (raw.count(key))
            throw ConfigError(source + ":" + std::to_string(number) + ": " + key +
                              ": duplicate key (first set on line " +
                              std::to_string(raw[key].line) + ")");
        raw[key] = {trim(line.substr(eq + 1)), number};
        ctx.line_of[key] = number;
    }

    ExperimentConfig cfg;
    SystemConfig& sys = cfg.system;
    std::string kind = "cavity";
    double omega_c = 1.0, J = 0.1, l = 1.0, omega_max = 1.0, hbar = 1.0;
    int L = 19;
    std::vector<double> tab_k, tab_omega;
    std::string shape = "double-well";

    using Handler = std::function<void(const std::string&, const std::string&)>;
    auto num = [&](double& dst) {
        return Handler([&ctx, p = &dst](const std::string& k, const std::string& v) { *p = parse_double(ctx, k, v); });
    };
    auto integer = [&](int& dst) {
        return Handler([&ctx, p = &dst](const std::string& k, const std::string& v) {
            *p = static_cast<int>(parse_int(ctx, k, v));
        });
    };
    auto list = [&](std::vector<double>& dst) {
        return Handler([&ctx, p = &dst](const std::string& k, const std::string& v) { *p = parse_list(ctx, k, v); });
    };
    auto int_list = [&](std::vector<int>& dst) {
        return Handler([&ctx, p = &dst](const std::string& k, const std::string& v) { *p = parse_int_list(ctx, k, v); });
    };
    auto word = [&](std::string& dst) {
        return Handler([p = &dst](const std::string&, const std::string& v) { *p = v; });
    };

    std::string experiment, method = "auto";
    double ed_modes = 0, max_dim = static_cast<double>(sys.max_dim);
    const std::map<std::string, Handler> schema = {
        {"experiment", word(experiment)},
        {"waveguide.kind", word(kind)},
        {"waveguide.L", integer(L)},
        {"waveguide.omega_c", num(omega_c)},
        {"waveguide.J", num(J)},
        {"waveguide.l", num(l)},
        {"waveguide.omega_max", num(omega_max)},
        {"waveguide.k", list(tab_k)},
        {"waveguide.omega", list(tab_omega)},
        {"units.hbar", num(hbar)},
        {"coupling.g", num(sys.g)},
        {"emitter.shape", word(shape)},
        {"emitter.v", num(sys.em.v)},
        {"emitter.d", num(sys.em.d)},
        {"emitter.h", num(sys.em.h)},
        {"emitter.x", num(sys.em.x)},
        {"emitter.cubic", num(sys.em.cubic)},
        {"emitter.mass", num(sys.em.mass)},
        {"emitter.charge", num(sys.em.charge)},
        {"emitter.poly", list(sys.em.poly)},
        {"emitter.table_q", list(sys.em.table_q)},
        {"emitter.table_v", list(sys.em.table_v)},
        {"cutoff.Nc", integer(sys.Nc)},
        {"cutoff.alpha_c", integer(sys.alpha_c)},
        {"cutoff.n_eigs", integer(sys.n_eigs)},
        {"cutoff.method", word(method)},
        {"cutoff.ed_modes", num(ed_modes)},
        {"cutoff.max_dim", num(max_dim)},
        {"quench.d_f", num(cfg.quench.d_f)},
        {"quench.periods", num(cfg.quench.periods)},
        {"quench.samples", integer(cfg.quench.samples)},
        {"converge.Nc", int_list(cfg.converge.Nc)},
        {"converge.alpha_c", int_list(cfg.converge.alpha_c)},
        {"converge.levels", integer(cfg.converge.levels)},
        {"two_emitter.separations", int_list(cfg.two_emitter.separations)},
        {"ising.N", integer(cfg.ising.N)},
        {"ising.spacing", integer(cfg.ising.spacing)},
        {"phase.l", list(cfg.phase.l)},
        {"phase.theta_L", int_list(cfg.phase.theta_L)},
        {"phase.L", int_list(cfg.phase.L)},
        {"phase.h", list(cfg.phase.h)},
        {"run.threads", integer(cfg.threads)},
    };

    for (const auto& [key, r] : raw) {
        if (key.rfind("sweep.", 0) == 0) {
            const std::string target = key.substr(6);
            if (std::find(sweepable().begin(), sweepable().end(), target) == sweepable().end())
                ctx.fail(key, "unknown sweep axis '" + target + "'");
            SweepAxis axis{target, parse_sweep(ctx, key, r.text)};
            if (axis.values.empty()) ctx.fail(key, "sweep axis '" + target + "' is empty");
            cfg.sweeps.push_back(std::move(axis));
        } else {
            const auto it = schema.find(key);
            if (it == schema.end()) ctx.fail(key, "unknown key");
            it->second(key, r.text);
        }
        cfg.values[key] = normalize_value(r.text);
    }
    if (cfg.sweeps.size() > 1)
        ctx.fail("sweep." + cfg.sweeps[1].key, "only one sweep axis is supported (also sweeping " +
                                                   cfg.sweeps[0].key + ")");

    if (!experiment.empty()) {
        try {
            cfg.kind = parse_experiment(experiment);
        } catch (const ConfigError&) {
            ctx.fail("experiment", "unknown experiment '" + experiment + "'");
        }
        if (!requested.empty() && requested != experiment)
            ctx.fail("experiment", "file declares '" + experiment + "' but '" + requested + "' was requested");
    } else if (!requested.empty()) {
        cfg.kind = parse_experiment(requested);
    }
    try {
        sys.method = parse_method(method);
    } catch (const std::exception&) {
        ctx.fail("cutoff.method", "expected auto, dense or iterative, got '" + method + "'");
    }
    if (ed_modes < 0 || ed_modes != std::floor(ed_modes)) ctx.fail("cutoff.ed_modes", "must be a non-negative integer");
    sys.ed_modes = static_cast<int>(ed_modes);
    if (!(max_dim >= 1)) ctx.fail("cutoff.max_dim", "must be positive");
    sys.max_dim = static_cast<std::size_t>(max_dim);

    if (!(hbar > 0)) ctx.fail("units.hbar", "must be positive");
    if (shape == "double-well") {
        sys.em.shape = PotentialShape::DoubleWell;
    } else if (shape == "polynomial") {
        sys.em.shape = PotentialShape::Polynomial;
        if (sys.em.poly.empty()) ctx.fail("emitter.poly", "polynomial emitter needs coefficients");
    } else if (shape == "tabulated") {
        sys.em.shape = PotentialShape::Tabulated;
        if (sys.em.table_q.size() != sys.em.table_v.size() || sys.em.table_q.size() < 3)
            ctx.fail("emitter.table_v", "needs at least 3 entries matching emitter.table_q");
    } else {
        ctx.fail("emitter.shape", "expected double-well, polynomial or tabulated, got '" + shape + "'");
    }
    if (!(sys.em.mass > 0)) ctx.fail("emitter.mass", "must be positive");
    if (sys.em.shape == PotentialShape::DoubleWell) {
        if (!(sys.em.v > 0)) ctx.fail("emitter.v", "must be positive");
        if (!(sys.em.d > 0)) ctx.fail("emitter.d", "must be positive");
    }

    try {
        if (kind == "cavity") {
            if (L < 3 || L % 2 == 0)
                ctx.fail("waveguide.L", "a cavity array needs an odd L >= 3 so that the even-mode "
                                        "folding about the emitter site is defined (got " +
                                            std::to_string(L) + ")");
            if (!(J >= 0) || !(J < omega_c))
                ctx.fail("waveguide.J", "needs 0 <= J < omega_c for a positive band");
            sys.wg = build_cavity_array(omega_c, J, L, hbar);
        } else if (kind == "powerlaw") {
            if (L < 2) ctx.fail("waveguide.L", "a power-law waveguide needs L >= 2");
            if (!(l > 0)) ctx.fail("waveguide.l", "exponent must be positive");
            sys.wg = build_powerlaw(l, omega_max, L, hbar);
        } else if (kind == "tabulated") {
            if (tab_k.empty() || tab_k.size() != tab_omega.size())
                ctx.fail("waveguide.omega", "needs one frequency per entry of waveguide.k");
            sys.wg = build_tabulated(tab_k, tab_omega, hbar);
        } else {
            ctx.fail("waveguide.kind", "expected cavity, powerlaw or tabulated, got '" + kind + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InputError& e) {
        ctx.fail("waveguide.kind", e.what());
    }

    for (const auto& key : {"waveguide.k", "waveguide.omega"})
        if (raw.count(key) && kind != "tabulated") ctx.fail(key, "only valid for a tabulated waveguide");

    const std::map<std::string, int> line_of = ctx.line_of;
    try {
        check_config(cfg);
    } catch (const ConfigError& e) {
        // Attach the line of the offending key when the message starts with it.
        const std::string msg = e.what();
        for (const auto& [key, ln] : line_of)
            if (msg.rfind(key + ":", 0) == 0)
                throw ConfigError(source + ":" + std::to_string(ln) + ": " + msg);
        throw ConfigError(source + ": " + msg);
    }
    return cfg;
}

void check_config(const ExperimentConfig& cfg) {
    const SystemConfig& s = cfg.system;
    auto fail = [](const std::string& key, const std::string& what) {
        throw ConfigError(key + ": " + what);
    };
    if (s.Nc < 0) fail("cutoff.Nc", "must be non-negative");
    if (s.alpha_c < 2) fail("cutoff.alpha_c", "must be at least 2");
    if (s.n_eigs < 1) fail("cutoff.n_eigs", "must be positive");
    if (!(s.g >= 0)) fail("coupling.g", "must be non-negative");
    if (cfg.threads < 0) fail("run.threads", "must be non-negative");
    for (const auto& axis : cfg.sweeps) {
        if (axis.values.empty()) fail("sweep." + axis.key, "sweep axis '" + axis.key + "' is empty");
        for (double v : axis.values) {
            if (axis.key == "coupling.g" && !(v >= 0)) fail("sweep.coupling.g", "couplings must be non-negative");
            if ((axis.key == "emitter.v" || axis.key == "emitter.d") && !(v > 0))
                fail("sweep." + axis.key, "values must be positive");
        }
    }
    switch (cfg.kind) {
        case ExperimentKind::Quench:
            if (s.em.shape != PotentialShape::DoubleWell)
                fail("emitter.shape", "quench needs a double-well emitter");
            if (!(cfg.quench.d_f > 0)) fail("quench.d_f", "quench needs a positive final well separation");
            if (!(cfg.quench.periods > 0)) fail("quench.periods", "must be positive");
            if (cfg.quench.samples < 3) fail("quench.samples", "needs at least 3 time samples");
            if (s.wg.kind != WaveguideKind::CavityArray || s.em.x != 0.0)
                fail("waveguide.kind", "quench site occupations need a cavity array with the emitter at x = 0");
            break;
        case ExperimentKind::Converge:
            if (cfg.converge.Nc.empty()) fail("converge.Nc", "list of photon cutoffs is empty");
            if (cfg.converge.alpha_c.empty()) fail("converge.alpha_c", "list of matter cutoffs is empty");
            for (int n : cfg.converge.Nc)
                if (n < 0) fail("converge.Nc", "cutoffs must be non-negative");
            for (int a : cfg.converge.alpha_c)
                if (a < 2) fail("converge.alpha_c", "cutoffs must be at least 2");
            if (cfg.converge.levels < 1) fail("converge.levels", "must be positive");
            break;
        case ExperimentKind::TwoEmitter:
            if (cfg.two_emitter.separations.empty())
                fail("two_emitter.separations", "list of separations is empty");
            for (int d : cfg.two_emitter.separations)
                if (d < 0 || d > s.wg.L / 2)
                    fail("two_emitter.separations", "separations must lie in [0, L/2]");
            break;
        case ExperimentKind::Ising:
            if (cfg.ising.N < 2 || cfg.ising.N > 14) fail("ising.N", "needs 2 <= N <= 14");
            if (cfg.ising.spacing < 0 || cfg.ising.spacing * (cfg.ising.N - 1) >= s.wg.L)
                fail("ising.spacing", "emitters must fit on the waveguide");
            if (s.em.shape != PotentialShape::DoubleWell)
                fail("emitter.shape", "the Ising reduction needs a double-well emitter");
            break;
        case ExperimentKind::Phase:
            if (cfg.phase.l.empty() && cfg.phase.L.empty())
                fail("phase.l", "phase needs phase.l with phase.theta_L, or phase.L with phase.h");
            if (!cfg.phase.l.empty() && cfg.phase.theta_L.size() < 4)
                fail("phase.theta_L", "needs at least 4 system sizes");
            if (!cfg.phase.L.empty()) {
                if (s.wg.kind != WaveguideKind::PowerLaw)
                    fail("waveguide.kind", "the order-parameter scan needs a power-law waveguide");
                if (cfg.phase.h.empty()) fail("phase.h", "list of bias fields is empty");
                for (double h : cfg.phase.h)
                    if (!(h > 0)) fail("phase.h", "bias fields must be positive");
                if (s.em.shape != PotentialShape::DoubleWell)
                    fail("emitter.shape", "the order-parameter scan needs a double-well emitter");
            }
            break;
        case ExperimentKind::Scaling:
            if (cfg.sweeps.empty() || cfg.sweeps[0].key != "coupling.g" || cfg.sweeps[0].values.size() < 4)
                fail("sweep.coupling.g", "scaling needs a coupling sweep with at least 4 points");
            for (double g : cfg.sweeps[0].values)
                if (!(g > 0)) fail("sweep.coupling.g", "scaling fits need positive couplings");
            break;
        case ExperimentKind::Spectrum:
            break;
    }
}

void override_cutoff(ExperimentConfig& cfg, const std::string& key, int value) {
    if (key == "cutoff.Nc")
        cfg.system.Nc = value;
    else if (key == "cutoff.alpha_c")
        cfg.system.alpha_c = value;
    else if (key == "cutoff.n_eigs")
        cfg.system.n_eigs = value;
    else if (key == "run.threads")
        cfg.threads = value;
    else
        throw ConfigError(key + ": not an overridable cutoff");
    if (key != "run.threads") cfg.values[key] = std::to_string(value);
    check_config(cfg);
}

void apply_sweep_value(SystemConfig& sys, const std::string& key, double value) {
    if (key == "coupling.g") {
        sys.g = value;
    } else if (key == "emitter.v") {
        sys.em.v = value;
    } else if (key == "emitter.d") {
        sys.em.d = value;
    } else if (key == "emitter.h") {
        sys.em.h = value;
    } else if (key == "emitter.cubic") {
        sys.em.cubic = value;
    } else if (key == "waveguide.J") {
        if (sys.wg.kind != WaveguideKind::CavityArray)
            throw ConfigError("sweep.waveguide.J: only a cavity array has a hopping J");
        sys.wg = build_cavity_array(sys.wg.omega_c, value, sys.wg.L, sys.wg.hbar);
    } else {
        throw ConfigError("sweep." + key + ": not a sweepable key");
    }
}

std::string canonical_text(const ExperimentConfig& cfg) {
    std::string out = "experiment = " + to_string(cfg.kind) + "\n";
    for (const auto& [key, value] : cfg.values) {
        if (key == "experiment" || key == "run.threads") continue;
        out += key + " = " + value + "\n";
    }
    return out;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex_hash(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig load_config(const std::string& path, const std::string& experiment) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open configuration file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path, experiment);
}

Diagnostics validate(const ExperimentConfig& cfg) {
    Diagnostics d;
    const SystemConfig& s = cfg.system;
    int modes = s.wg.L;
    if (s.wg.kind == WaveguideKind::CavityArray && s.em.x == 0.0) modes = (s.wg.L + 1) / 2;
    if (s.ed_modes > 0) modes = std::min(modes, s.ed_modes);
    d.ed_modes = modes;
    d.messages.push_back("experiment " + to_string(cfg.kind) + ", waveguide " + to_string(s.wg.kind) +
                         " with L = " + std::to_string(s.wg.L) + ", " + std::to_string(modes) +
                         " modes in the photon basis");
    int top = s.Nc;
    if (cfg.kind == ExperimentKind::Converge)
        for (int n : cfg.converge.Nc) top = std::max(top, n);
    int alpha = s.alpha_c;
    if (cfg.kind == ExperimentKind::Converge)
        for (int a : cfg.converge.alpha_c) alpha = std::max(alpha, a);
    for (int nc = 1; nc <= top; ++nc) {
        DimensionEstimate e;
        e.Nc = nc;
        e.modes = modes;
        e.alpha_c = alpha;
        e.dim = FewPhotonBasis::predicted_dim(modes, nc, alpha);
        const double dim = static_cast<double>(e.dim);
        e.dense_bytes = 8.0 * dim * dim * 2.0;
        // Lanczos keeps up to ~max(2k+20, 60) vectors; each photon operator order stores
        // about one entry per basis state and mode.
        e.sparse_bytes = 8.0 * dim * std::max(2 * s.n_eigs + 20, 60) +
                         16.0 * dim / alpha * modes * 4.0;
        e.within_budget = e.dim <= s.max_dim;
        d.dimensions.push_back(e);
    }
    if (!d.dimensions.empty() && !d.dimensions.back().within_budget)
        d.messages.push_back("basis dimension " + std::to_string(d.dimensions.back().dim) +
                             " exceeds cutoff.max_dim = " + std::to_string(s.max_dim));
    for (const auto& axis : cfg.sweeps)
        d.messages.push_back("sweep " + axis.key + ": " + std::to_string(axis.values.size()) +
                             " points from " + format_double(axis.values.front()) + " to " +
                             format_double(axis.values.back()));
    return d;
}

}  // namespace adqed
