#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace adqed {

inline constexpr const char* kToolVersion = "1.0.0";

// Column-oriented table that renders to CSV with a '#' header block.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::vector<std::string> cells);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }

    // Header lines are written as "# line"; the body holds no run-dependent data.
    std::string render(const std::vector<std::string>& header) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// Shortest round-trippable decimal form of a double.
std::string cell(double x);
std::string cell(long long x);
inline std::string cell(int x) { return cell(static_cast<long long>(x)); }
inline std::string cell(std::size_t x) { return cell(static_cast<long long>(x)); }
inline std::string cell(const std::string& s) { return s; }
inline std::string cell(const char* s) { return s; }

struct EmittedFile {
    std::string name;
    std::size_t rows{0};
    std::string fnv1a;
};

// Writes the artifacts of one run into a directory. Opening removes any stale
// manifest, so a directory without manifest.json marks an incomplete run.
class RunWriter {
public:
    RunWriter(std::string dir, std::string experiment, std::string config_hash,
              std::string units);

    void write_csv(const std::string& name, const CsvTable& table,
                   const std::vector<std::string>& notes = {});
    void write_json(const std::string& name, const nlohmann::json& value);
    void write_text(const std::string& name, const std::string& body, std::size_t rows);

    // Writes manifest.json atomically (temporary file plus rename); call last.
    void finish(double wall_seconds, const nlohmann::json& convergence);

    const std::vector<EmittedFile>& files() const { return files_; }
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    std::string experiment_;
    std::string hash_;
    std::string units_;
    std::vector<EmittedFile> files_;
};

// Replaces path by writing a sibling temporary file and renaming it.
void write_atomic(const std::string& path, const std::string& body);

}  // namespace adqed
