#pragma once

// Shared plumbing for the experiment commands; not installed.

#include "mmgeo/experiments.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mmgeo::detail {

using Json = nlohmann::ordered_json;

Json defaults_for(const std::string& command);

// Resolved flat config with typed, checked accessors.
class Config {
public:
    Config(std::string command, Json doc) : command_(std::move(command)), doc_(std::move(doc)) {}

    const std::string& command() const noexcept { return command_; }
    const Json& doc() const noexcept { return doc_; }

    double number(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    std::uint64_t seed() const;
    bool flag(const std::string& key) const;
    std::string text(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;

private:
    const Json& at(const std::string& key) const;

    std::string command_;
    Json doc_;
};

Config resolve_config(const std::string& command, const std::string& config_text, const RunOptions& options);

// Shortest round-trip decimal (up to 17 significant digits).
std::string format_double(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    CsvTable& row(std::vector<std::string> cells);
    std::string render(const Config& cfg) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Cell helpers for CsvTable rows.
inline std::string cell(double v) { return format_double(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }
inline std::string cell(const std::string& v) { return v; }
inline std::string cell(const char* v) { return v; }
inline std::string cell(bool v) { return v ? "true" : "false"; }

Json mean_std_json(double mean, double std);

class ReportBuilder {
public:
    explicit ReportBuilder(const Config& cfg) : cfg_(cfg) {}

    Json& results() { return results_; }
    void check(const std::string& name, bool passed, const std::string& detail);
    void csv(const std::string& suffix, const CsvTable& table);
    void artifact(const std::string& name, std::string bytes);
    Report finish() const;

private:
    const Config& cfg_;
    Json results_ = Json::object();
    std::vector<Check> checks_;
    std::vector<std::pair<std::string, std::string>> csv_;
    std::vector<std::pair<std::string, std::string>> artifacts_;
};

} // namespace mmgeo::detail
