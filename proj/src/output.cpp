#include "adqed/output.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "adqed/config.hpp"

namespace adqed {

namespace fs = std::filesystem;

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size())
        throw std::logic_error("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(columns_.size()));
    rows_.push_back(std::move(cells));
}

std::string CsvTable::render(const std::vector<std::string>& header) const {
    std::string out;
    for (const auto& h : header) out += "# " + h + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
    out += "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
        out += "\n";
    }
    return out;
}

std::string cell(double x) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

std::string cell(long long x) { return std::to_string(x); }

void write_atomic(const std::string& path, const std::string& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << body;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    fs::rename(tmp, path);
}

RunWriter::RunWriter(std::string dir, std::string experiment, std::string config_hash,
                     std::string units)
    : dir_(std::move(dir)), experiment_(std::move(experiment)), hash_(std::move(config_hash)),
      units_(std::move(units)) {
    fs::create_directories(dir_);
    fs::remove(fs::path(dir_) / "manifest.json");
}

void RunWriter::write_text(const std::string& name, const std::string& body, std::size_t rows) {
    write_atomic((fs::path(dir_) / name).string(), body);
    files_.push_back({name, rows, hex_hash(fnv1a(body))});
}

void RunWriter::write_csv(const std::string& name, const CsvTable& table,
                          const std::vector<std::string>& notes) {
    std::vector<std::string> header = {std::string("adqed ") + kToolVersion + " " + experiment_,
                                       "config_hash " + hash_, "units " + units_};
    header.insert(header.end(), notes.begin(), notes.end());
    write_text(name, table.render(header), table.rows());
}

void RunWriter::write_json(const std::string& name, const nlohmann::json& value) {
    nlohmann::json doc = value;
    doc["config_hash"] = hash_;
    doc["units"] = units_;
    write_text(name, doc.dump(2) + "\n", 0);
}

void RunWriter::finish(double wall_seconds, const nlohmann::json& convergence) {
    nlohmann::json m;
    m["tool"] = "adqed";
    m["tool_version"] = kToolVersion;
    m["experiment"] = experiment_;
    m["config_hash"] = hash_;
    m["units"] = units_;
    m["wall_clock_seconds"] = wall_seconds;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    m["finished_utc"] = stamp;
    m["convergence"] = convergence;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : files_)
        files.push_back({{"name", f.name}, {"rows", f.rows}, {"fnv1a", f.fnv1a}});
    m["files"] = files;
    write_atomic((fs::path(dir_) / "manifest.json").string(), m.dump(2) + "\n");
}

}  // namespace adqed
