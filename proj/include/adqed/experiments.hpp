#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "adqed/config.hpp"
#include "adqed/output.hpp"

namespace adqed {

struct RunSummary {
    std::string config_hash;
    std::vector<EmittedFile> files;
    nlohmann::json convergence;
    double wall_seconds{0.0};
};

// Executes the configured experiment and writes its tables plus manifest.json into out_dir.
RunSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Reads ADQED_LOG (trace, debug, info, warn, error, off; default warn).
void configure_logging();

// Evaluates f(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency)
// and returns the results in index order. The exception of the lowest failing index is
// rethrown, so failures are reported deterministically.
template <class T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& f) {
    std::vector<T> out(n);
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace adqed
