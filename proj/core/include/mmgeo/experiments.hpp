#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mmgeo {

enum class OutputFormat { json, csv, both };
OutputFormat parse_output_format(const std::string& name);

struct RunOptions {
    std::optional<std::uint64_t> seed; // overrides the config's seed
    bool long_running = false;         // full-size reproductions (hours)
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Everything one command produces. Rendering is deterministic: the same
// resolved config yields byte-identical text.
struct Report {
    std::string command;
    std::string json;
    std::vector<std::pair<std::string, std::string>> csv_files; // file name, contents
    std::vector<std::pair<std::string, std::string>> artifacts; // always written (e.g. exported embeddings)
    std::vector<Check> checks;
    bool passed = true;
};

const std::vector<std::string>& command_names();

// Default flat config document for a command, pretty-printed JSON.
std::string default_config(const std::string& command);

// config_text may be empty (defaults), a flat config object, or a previously
// written report, whose embedded config is replayed. Unknown keys and values
// of the wrong type are rejected.
Report run_experiment(const std::string& command, const std::string& config_text, const RunOptions& options);

// Command named by a config or report document, if it names one.
std::optional<std::string> command_in_config(const std::string& config_text);

// Writes <command>.json and/or the CSV files, plus any artifacts, into out_dir atomically.
std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& out_dir,
                                                OutputFormat format);

} // namespace mmgeo
