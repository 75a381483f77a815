#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "adqed/config.hpp"
#include "adqed/experiments.hpp"
#include "adqed/output.hpp"

using namespace adqed;

namespace {

const char* kSpectrum = R"(experiment = spectrum
waveguide.kind = cavity
waveguide.L = 7
waveguide.J = 0.1
coupling.g = 1
emitter.v = 0.5
emitter.d = 0.87
cutoff.Nc = 1
cutoff.alpha_c = 3
cutoff.n_eigs = 4
)";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("a complete configuration parses") {
    const ExperimentConfig cfg = parse_config(kSpectrum);
    CHECK(cfg.kind == ExperimentKind::Spectrum);
    CHECK(cfg.system.wg.L == 7);
    CHECK(cfg.system.wg.J == 0.1);
    CHECK(cfg.system.g == 1.0);
    CHECK(cfg.system.em.d == 0.87);
    CHECK(cfg.system.Nc == 1);
    CHECK(cfg.system.alpha_c == 3);
    CHECK(cfg.sweeps.empty());
}

TEST_CASE("unknown keys are named with their line") {
    const std::string text = std::string(kSpectrum) + "emitter.dd = 3\n";
    CHECK_THROWS_WITH_AS(parse_config(text, "run.conf"), doctest::Contains("emitter.dd"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(text, "run.conf"), doctest::Contains("run.conf:11"), ConfigError);
}

TEST_CASE("even cavity length is a folding error") {
    std::string text = kSpectrum;
    text.replace(text.find("waveguide.L = 7"), 15, "waveguide.L = 8");
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("waveguide.L"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("fold"), ConfigError);
}

TEST_CASE("sweep axes") {
    const ExperimentConfig lin = parse_config(std::string(kSpectrum) + "sweep.coupling.g = 1:3:5\n");
    REQUIRE(lin.sweeps.size() == 1);
    CHECK(lin.sweeps[0].key == "coupling.g");
    REQUIRE(lin.sweeps[0].values.size() == 5);
    CHECK(lin.sweeps[0].values[2] == doctest::Approx(2.0));
    const ExperimentConfig lg = parse_config(std::string(kSpectrum) + "sweep.coupling.g = 1:100:3:log\n");
    CHECK(lg.sweeps[0].values[1] == doctest::Approx(10.0).epsilon(1e-12));
    const ExperimentConfig list = parse_config(std::string(kSpectrum) + "sweep.emitter.d = 0.8, 0.9\n");
    CHECK(list.sweeps[0].values.size() == 2);

    CHECK_THROWS_WITH_AS(parse_config(std::string(kSpectrum) + "sweep.coupling.g = 1:3:0\n"),
                         doctest::Contains("sweep axis 'coupling.g' is empty"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(std::string(kSpectrum) + "sweep.coupling.g =\n"),
                         doctest::Contains("coupling.g"), ConfigError);
    CHECK_THROWS_AS(parse_config(std::string(kSpectrum) + "sweep.emitter.mass = 1,2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(std::string(kSpectrum) + "sweep.coupling.g = 1,2\nsweep.emitter.d = 1,2\n"),
                    ConfigError);
}

TEST_CASE("malformed values and experiment mismatches") {
    CHECK_THROWS_WITH_AS(parse_config(std::string(kSpectrum) + "coupling.g = strong\n"),
                         doctest::Contains("coupling.g"), ConfigError);
    CHECK_THROWS_AS(parse_config(std::string(kSpectrum) + "waveguide.J = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("waveguide.L = 7\n= 3\n"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(std::string(kSpectrum) + "coupling.g = 2\n"),
                         doctest::Contains("duplicate"), ConfigError);
    CHECK_THROWS_AS(parse_config(kSpectrum, "<config>", "quench"), ConfigError);
    CHECK_THROWS_AS(parse_experiment("nonsense"), InputError);
    CHECK(parse_experiment("two-emitter") == ExperimentKind::TwoEmitter);
}

TEST_CASE("config hash ignores comments, ordering and thread counts") {
    const ExperimentConfig a = parse_config(kSpectrum);
    const std::string shuffled = "# comment\ncutoff.n_eigs = 4\ncoupling.g = 1.0\nexperiment = spectrum\n"
                                 "waveguide.kind = cavity\nwaveguide.L = 7\nwaveguide.J = 0.1\n"
                                 "emitter.v = 0.5\nemitter.d = 0.87\ncutoff.Nc = 1\ncutoff.alpha_c = 3\n"
                                 "run.threads = 3\n";
    const ExperimentConfig b = parse_config(shuffled);
    CHECK(canonical_text(a) == canonical_text(b));
    ExperimentConfig c = a;
    override_cutoff(c, "cutoff.Nc", 2);
    CHECK(c.system.Nc == 2);
    CHECK(canonical_text(c) != canonical_text(a));
    CHECK(hex_hash(fnv1a("")) == "cbf29ce484222325");
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK_THROWS_AS(override_cutoff(c, "cutoff.alpha_c", 1), InputError);
}

TEST_CASE("validation estimates dimensions per cutoff") {
    std::string text = kSpectrum;
    text.replace(text.find("cutoff.Nc = 1"), 13, "cutoff.Nc = 3");
    const ExperimentConfig cfg = parse_config(text);
    const Diagnostics d = validate(cfg);
    REQUIRE(d.dimensions.size() == 3);
    CHECK(d.ed_modes == 4);
    CHECK(d.dimensions[1].dim == 3u * 15u);
    CHECK(d.dimensions[2].dim == 3u * 35u);
    for (const auto& e : d.dimensions) CHECK(e.within_budget);
}

TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 2.5e-300, -123456.789, 1e22, 0.0}) CHECK(std::stod(cell(x)) == x);
    CHECK(cell(0.1) == "0.1");
    CHECK(cell(3) == "3");
}

TEST_CASE("CSV rendering") {
    CsvTable t({"a", "b"});
    t.add_row({cell(1), cell(0.5)});
    t.add_row({cell(2), cell(0.25)});
    CHECK(t.render({"tool x", "note"}) == "# tool x\n# note\na,b\n1,0.5\n2,0.25\n");
    CHECK_THROWS(t.add_row({"1"}));
}

TEST_CASE("parallel map keeps order and reports the first failure") {
    const std::vector<int> sq = parallel_map<int>(20, 4, [](std::size_t i) { return int(i * i); });
    for (int i = 0; i < 20; ++i) CHECK(sq[i] == i * i);
    auto failing = [](std::size_t i) -> int {
        if (i == 7 || i == 13) throw std::runtime_error("fail " + std::to_string(i));
        return 0;
    };
    CHECK_THROWS_WITH(parallel_map<int>(20, 4, failing), "fail 7");
}

TEST_CASE("a run writes its tables and a manifest") {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "adqed_unit_run";
    std::filesystem::remove_all(dir);
    const ExperimentConfig cfg = parse_config(kSpectrum);
    const RunSummary s = run_experiment(cfg, dir.string());
    CHECK(std::filesystem::exists(dir / "spectrum.csv"));
    REQUIRE(std::filesystem::exists(dir / "manifest.json"));
    const nlohmann::json m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(m["experiment"] == "spectrum");
    CHECK(m["config_hash"] == s.config_hash);
    CHECK(m["tool_version"] == kToolVersion);
    CHECK(m["files"].size() == s.files.size());
    const std::string first = slurp(dir / "spectrum.csv");
    CHECK(first.rfind("# adqed", 0) == 0);
    CHECK(first.find("config_hash " + s.config_hash) != std::string::npos);

    run_experiment(cfg, dir.string());
    CHECK(slurp(dir / "spectrum.csv") == first);
    std::filesystem::remove_all(dir);
}

}
