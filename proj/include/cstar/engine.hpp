#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cstar/error.hpp"

namespace cstar {

struct RunConfig {
    std::size_t threads = 0;     // 0 = hardware concurrency
    std::size_t chunk_size = 0;  // 0 = ceil(n / (8 * threads))
    uint64_t seed = 0;

    std::size_t resolved_threads() const noexcept;
    std::size_t resolved_chunk(std::size_t items) const noexcept;
};

struct StageReport {
    std::string name;
    double seconds = 0.0;
    std::size_t items = 0;
    std::size_t tasks = 0;
    std::size_t threads = 0;
    int64_t peak_rss_delta_bytes = -1;  // -1 when the platform cannot measure it
};

struct RunReport {
    std::vector<StageReport> stages;
    std::size_t threads = 0;
    int64_t peak_rss_bytes = -1;
    uint64_t dp_cells = 0;
    std::vector<std::pair<std::string, std::string>> extra;

    const StageReport* stage(const std::string& name) const;
    std::size_t total_tasks() const noexcept;
    std::string to_key_value() const;
    std::string to_json() const;
    /// Writes `path` (key=value) and `path + ".json"`.
    void write(const std::string& path) const;
};

namespace memory {
int64_t current_rss_bytes() noexcept;
int64_t peak_rss_bytes() noexcept;
/// Resets the kernel's high-water mark to the current RSS; false if the
/// platform does not allow it.
bool reset_peak() noexcept;
}  // namespace memory

/// Times a stage and records its resident-memory high-water mark relative to
/// the RSS at construction.
class StageTimer {
public:
    StageTimer(RunReport* report, std::string name);
    StageReport finish(std::size_t items, std::size_t tasks, std::size_t threads);

private:
    RunReport* report_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
    int64_t baseline_rss_ = -1;
    bool peak_reset_ = false;
};

std::size_t task_count(std::size_t items, std::size_t chunk_size) noexcept;

/// Applies `map_fn(index)` to items 0..n-1 on worker threads in chunks and
/// feeds the results to `reduce_fn(acc, index, result)` strictly in index
/// order, so the outcome matches a sequential fold for any thread count or
/// chunk size. Shared inputs captured by `map_fn` must not be mutated while
/// the stage runs. The error of the lowest-indexed failing chunk is
/// rethrown after the remaining chunks are cancelled; exceptions that are
/// not cstar::Error surface as TaskPanic.
template <class MapFn, class Acc, class ReduceFn>
Acc par_map_reduce(std::size_t n, MapFn&& map_fn, Acc init, ReduceFn&& reduce_fn, const RunConfig& cfg,
                   RunReport* report = nullptr, const std::string& stage = "map") {
    using Result = std::invoke_result_t<MapFn&, std::size_t>;

    const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.resolved_threads(), std::max<std::size_t>(n, 1)));
    const std::size_t chunk = cfg.resolved_chunk(n);
    const std::size_t tasks = task_count(n, chunk);
    StageTimer timer(report, stage);

    Acc acc = std::move(init);
    std::vector<std::optional<std::vector<Result>>> done(tasks);
    std::vector<std::exception_ptr> errors(tasks);
    std::size_t next_to_reduce = 0;
    std::mutex mu;
    std::atomic<std::size_t> next_task{0};
    std::atomic<bool> cancelled{false};

    auto drain = [&]() {
        // caller holds `mu`
        while (next_to_reduce < tasks && done[next_to_reduce]) {
            auto& results = *done[next_to_reduce];
            const std::size_t base = next_to_reduce * chunk;
            for (std::size_t k = 0; k < results.size(); ++k) reduce_fn(acc, base + k, std::move(results[k]));
            done[next_to_reduce].reset();
            ++next_to_reduce;
        }
    };

    auto worker = [&]() {
        while (!cancelled.load(std::memory_order_relaxed)) {
            const std::size_t t = next_task.fetch_add(1, std::memory_order_relaxed);
            if (t >= tasks) return;
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            std::vector<Result> results;
            results.reserve(end - begin);
            try {
                for (std::size_t i = begin; i < end; ++i) results.push_back(map_fn(i));
            } catch (...) {
                std::lock_guard lock(mu);
                errors[t] = std::current_exception();
                cancelled.store(true, std::memory_order_relaxed);
                return;
            }
            std::lock_guard lock(mu);
            done[t] = std::move(results);
            try {
                drain();
            } catch (...) {
                errors[t] = std::current_exception();
                cancelled.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    for (auto& e : errors) {
        if (!e) continue;
        try {
            std::rethrow_exception(e);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& ex) {
            throw Error(ErrorKind::TaskPanic, ex.what());
        } catch (...) {
            throw Error(ErrorKind::TaskPanic, "unknown failure in parallel task");
        }
    }
    timer.finish(n, tasks, threads);
    return acc;
}

/// Index-ordered parallel map.
template <class MapFn>
auto par_map(std::size_t n, MapFn&& map_fn, const RunConfig& cfg, RunReport* report = nullptr,
             const std::string& stage = "map") {
    using Result = std::invoke_result_t<MapFn&, std::size_t>;
    std::vector<Result> out;
    out.reserve(n);
    return par_map_reduce(
        n, std::forward<MapFn>(map_fn), std::move(out),
        [](std::vector<Result>& acc, std::size_t, Result&& r) { acc.push_back(std::move(r)); }, cfg, report, stage);
}

}  // namespace cstar
