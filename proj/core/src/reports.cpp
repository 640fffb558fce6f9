#include "experiment_internal.hpp"

#include "mmgeo/embedding_io.hpp"

#include <charconv>
#include <cmath>

namespace mmgeo {

namespace detail {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::logic_error("CSV row width differs from header");
    rows_.push_back(std::move(cells));
    return *this;
}

std::string CsvTable::render(const Config& cfg) const {
    std::string out = "# command=" + cfg.command() + "\n";
    out += "# seed=" + std::to_string(cfg.seed()) + "\n";
    out += "# config=" + cfg.doc().dump() + "\n";
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

Json mean_std_json(double mean, double std) { return Json{{"mean", mean}, {"std", std}}; }

void ReportBuilder::check(const std::string& name, bool passed, const std::string& detail) {
    checks_.push_back({name, passed, detail});
}

void ReportBuilder::csv(const std::string& suffix, const CsvTable& table) {
    const std::string name = cfg_.command() + (suffix.empty() ? "" : "_" + suffix) + ".csv";
    csv_.emplace_back(name, table.render(cfg_));
}

void ReportBuilder::artifact(const std::string& name, std::string bytes) {
    artifacts_.emplace_back(name, std::move(bytes));
}

Report ReportBuilder::finish() const {
    Report r;
    r.command = cfg_.command();
    r.checks = checks_;
    r.csv_files = csv_;
    r.artifacts = artifacts_;
    Json checks = Json::array();
    for (const Check& c : checks_) {
        checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        r.passed = r.passed && c.passed;
    }
    Json doc{{"command", cfg_.command()},
             {"seed", cfg_.seed()},
             {"config", cfg_.doc()},
             {"results", results_},
             {"checks", checks},
             {"passed", r.passed}};
    r.json = doc.dump(2) + "\n";
    return r;
}

} // namespace detail

std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& out_dir,
                                                OutputFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError(IoErrorCode::write_failed, "cannot create " + out_dir.string());
    std::vector<std::filesystem::path> written;
    if (format != OutputFormat::csv) {
        written.push_back(out_dir / (report.command + ".json"));
        write_file_atomic(written.back(), report.json);
    }
    if (format != OutputFormat::json)
        for (const auto& [name, body] : report.csv_files) {
            written.push_back(out_dir / name);
            write_file_atomic(written.back(), body);
        }
    for (const auto& [name, body] : report.artifacts) {
        written.push_back(out_dir / name);
        write_file_atomic(written.back(), body);
    }
    return written;
}

} // namespace mmgeo
