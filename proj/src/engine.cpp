#include "cstar/engine.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cstar {

std::size_t RunConfig::resolved_threads() const noexcept {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::size_t RunConfig::resolved_chunk(std::size_t items) const noexcept {
    if (chunk_size > 0) return chunk_size;
    const std::size_t denom = 8 * resolved_threads();
    return std::max<std::size_t>(1, (items + denom - 1) / denom);
}

std::size_t task_count(std::size_t items, std::size_t chunk_size) noexcept {
    if (chunk_size == 0) return 0;
    return (items + chunk_size - 1) / chunk_size;
}

namespace memory {

namespace {

int64_t status_field_kb(const char* key) noexcept {
    std::ifstream in("/proc/self/status");
    std::string line;
    const std::string prefix = std::string(key) + ":";
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) == 0) {
            std::istringstream fields(line.substr(prefix.size()));
            int64_t kb = -1;
            fields >> kb;
            return kb;
        }
    }
    return -1;
}

}  // namespace

int64_t current_rss_bytes() noexcept {
    const int64_t kb = status_field_kb("VmRSS");
    return kb < 0 ? -1 : kb * 1024;
}

int64_t peak_rss_bytes() noexcept {
    const int64_t kb = status_field_kb("VmHWM");
    return kb < 0 ? -1 : kb * 1024;
}

bool reset_peak() noexcept {
    std::ofstream out("/proc/self/clear_refs");
    if (!out) return false;
    out << "5";
    out.flush();
    return static_cast<bool>(out);
}

}  // namespace memory

StageTimer::StageTimer(RunReport* report, std::string name)
    : report_(report), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {
    if (report_ == nullptr) return;
    peak_reset_ = memory::reset_peak();
    baseline_rss_ = memory::current_rss_bytes();
}

StageReport StageTimer::finish(std::size_t items, std::size_t tasks, std::size_t threads) {
    StageReport s;
    s.name = name_;
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    s.items = items;
    s.tasks = tasks;
    s.threads = threads;
    if (report_ == nullptr) return s;
    const int64_t peak = memory::peak_rss_bytes();
    if (peak_reset_ && peak >= 0 && baseline_rss_ >= 0) s.peak_rss_delta_bytes = std::max<int64_t>(0, peak - baseline_rss_);
    report_->peak_rss_bytes = std::max(report_->peak_rss_bytes, peak);
    report_->threads = std::max(report_->threads, threads);
    report_->stages.push_back(s);
    return s;
}

const StageReport* RunReport::stage(const std::string& name) const {
    for (const auto& s : stages) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::size_t RunReport::total_tasks() const noexcept {
    std::size_t total = 0;
    for (const auto& s : stages) total += s.tasks;
    return total;
}

std::string RunReport::to_key_value() const {
    std::ostringstream out;
    out << "threads=" << threads << '\n';
    out << "tasks=" << total_tasks() << '\n';
    out << "peak_rss_bytes=" << peak_rss_bytes << '\n';
    out << "dp_cells=" << dp_cells << '\n';
    for (const auto& s : stages) {
        out << "stage." << s.name << ".seconds=" << s.seconds << '\n';
        out << "stage." << s.name << ".items=" << s.items << '\n';
        out << "stage." << s.name << ".tasks=" << s.tasks << '\n';
        out << "stage." << s.name << ".threads=" << s.threads << '\n';
        out << "stage." << s.name << ".peak_rss_delta_bytes=" << s.peak_rss_delta_bytes << '\n';
    }
    for (const auto& [k, v] : extra) out << k << '=' << v << '\n';
    return out.str();
}

std::string RunReport::to_json() const {
    nlohmann::json j;
    j["threads"] = threads;
    j["tasks"] = total_tasks();
    j["peak_rss_bytes"] = peak_rss_bytes;
    j["dp_cells"] = dp_cells;
    j["stages"] = nlohmann::json::array();
    for (const auto& s : stages) {
        j["stages"].push_back({{"name", s.name},
                               {"seconds", s.seconds},
                               {"items", s.items},
                               {"tasks", s.tasks},
                               {"threads", s.threads},
                               {"peak_rss_delta_bytes", s.peak_rss_delta_bytes}});
    }
    for (const auto& [k, v] : extra) j["extra"][k] = v;
    return j.dump(2) + "\n";
}

void RunReport::write(const std::string& path) const {
    std::ofstream kv(path);
    std::ofstream js(path + ".json");
    if (!kv || !js) throw Error(ErrorKind::IoFailure, "cannot write report '" + path + "'");
    kv << to_key_value();
    js << to_json();
    if (!kv || !js) throw Error(ErrorKind::IoFailure, "write to report '" + path + "' failed");
}

}  // namespace cstar
