#include "experiment_internal.hpp"

#include <cmath>
#include <stdexcept>

namespace mmgeo {

namespace detail {

namespace {

Json toy_defaults(double gap_norm, double sigma_align) {
    return Json{{"n", 5000},          {"d", 64},
                {"span_dim", 16},     {"classes", 10},
                {"gap_norm", gap_norm}, {"sigma_align", sigma_align},
                {"class_spread", 0.15}, {"ineffective_std", 0.01},
                {"base_offset_std", 0.1}, {"train_fraction", 0.5},
                {"ridge_lambda", 0.1}, {"seeds", 5}};
}

void merge(Json& into, const Json& from) {
    for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = it.value();
}

bool same_kind(const Json& a, const Json& b) {
    if (a.is_number() && b.is_number()) return true;
    return a.type() == b.type();
}

} // namespace

Json defaults_for(const std::string& command) {
    Json d{{"command", command}, {"seed", 0}};
    if (command == "simulate-init") {
        merge(d, Json{{"n", 1000}, {"d", 512}, {"dex", 25}, {"dey", 230}, {"seeds", 5}, {"gamma", 0.99},
                      {"rank_gamma", 0.999999999}});
    } else if (command == "train-sim") {
        merge(d, Json{{"n", 256},
                      {"d", 512},
                      {"dex", 25},
                      {"dey", 230},
                      {"tau", 0.07},
                      {"lr", 0.1},
                      {"steps", 20000},
                      {"record_every", 1000},
                      {"renormalize_each_step", true},
                      {"gradient_form", "exact"},
                      {"long_running", false},
                      {"long_n", 1000},
                      {"long_steps", 200000}});
    } else if (command == "verify-gradients") {
        merge(d, Json{{"batches", 100}, {"n_max", 8}, {"d_max", 16}, {"taus", {0.01, 0.07, 0.5}}, {"h", 1e-5}});
    } else if (command == "stable-region") {
        merge(d, Json{{"instances", 1000},
                      {"n", 8},
                      {"d", 16},
                      {"taus", {0.01, 0.07, 0.5}},
                      {"delta", 0.01},
                      {"tau_grid", {0.005, 0.01, 0.02, 0.03, 0.05, 0.07, 0.1, 0.15, 0.2, 0.3, 0.5, 0.75, 1.0}}});
    } else if (command == "mlp-collapse") {
        merge(d, Json{{"depth", 20}, {"width", 512}, {"inputs", 1000}, {"probe_stride", 5}, {"seeds", 5},
                      {"gamma", 0.99}});
    } else if (command == "gap-stats") {
        merge(d, Json{{"source", "gap_world"},
                      {"n", 10000},
                      {"d", 512},
                      {"span_dim", 64},
                      {"gap_norm", 0.83},
                      {"sigma", 0.05},
                      {"noise_support", "full"},
                      {"renormalize", false},
                      {"group_size", 100},
                      {"pair_samples", 1000},
                      {"input_x", ""},
                      {"input_y", ""},
                      {"input_format", "mmeb"},
                      {"normalize_input", true}});
    } else if (command == "c3-bench") {
        merge(d, toy_defaults(0.83, 0.05));
        merge(d, Json{{"sigma_grid", {0.01, 0.05, 0.1, 0.2}}, {"sigma_align_sweep", {0.05, 0.08, 0.12}}});
    } else if (command == "shift-sweep") {
        merge(d, toy_defaults(0.0, 0.0));
        merge(d, Json{{"shift_norms", {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 5.0}},
                      {"shift_direction", "orthogonal"}});
    } else if (command == "export") {
        merge(d, Json{{"source", "gap_world"},
                      {"n", 1000},
                      {"d", 512},
                      {"span_dim", 64},
                      {"gap_norm", 0.83},
                      {"sigma", 0.05},
                      {"input", ""},
                      {"input_format", "csv"},
                      {"export_format", "mmeb"}});
    } else {
        throw std::invalid_argument("unknown command '" + command + "'");
    }
    return d;
}

const Json& Config::at(const std::string& key) const {
    if (!doc_.contains(key)) throw std::logic_error("config key '" + key + "' is not defined for " + command_);
    return doc_.at(key);
}

double Config::number(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_number()) throw std::invalid_argument("config key '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw std::invalid_argument("config key '" + key + "' must be finite");
    return x;
}

std::size_t Config::count(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw std::invalid_argument("config key '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

std::uint64_t Config::seed() const { return count("seed"); }

bool Config::flag(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_boolean()) throw std::invalid_argument("config key '" + key + "' must be a boolean");
    return v.get<bool>();
}

std::string Config::text(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_string()) throw std::invalid_argument("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> Config::numbers(const std::string& key) const {
    const Json& v = at(key);
    std::vector<double> out;
    for (const Json& e : v) {
        if (!e.is_number()) throw std::invalid_argument("config key '" + key + "' must be a list of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

namespace {

Json parse_document(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
    // A report carries its resolved config; replaying it reproduces the report.
    if (doc.contains("config") && doc["config"].is_object() && doc.contains("results")) return doc["config"];
    return doc;
}

} // namespace

Config resolve_config(const std::string& command, const std::string& config_text, const RunOptions& options) {
    Json resolved = defaults_for(command);
    const Json user = parse_document(config_text);
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (!resolved.contains(it.key()))
            throw std::invalid_argument("unknown config key '" + it.key() + "' for command " + command);
        if (it.key() == "command") {
            if (it.value() != command)
                throw std::invalid_argument("config names command " + it.value().dump() + " but " + command +
                                            " was requested");
            continue;
        }
        if (!same_kind(resolved[it.key()], it.value()))
            throw std::invalid_argument("config key '" + it.key() + "' has the wrong type");
        resolved[it.key()] = it.value();
    }
    if (options.seed) resolved["seed"] = *options.seed;
    if (options.long_running && resolved.contains("long_running")) resolved["long_running"] = true;
    Config cfg(command, std::move(resolved));
    (void)cfg.seed(); // validates the seed type early
    return cfg;
}

} // namespace detail

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"simulate-init", "train-sim",   "verify-gradients",
                                                   "stable-region", "mlp-collapse", "gap-stats",
                                                   "c3-bench",      "shift-sweep",  "export"};
    return names;
}

std::string default_config(const std::string& command) { return detail::defaults_for(command).dump(2); }

std::optional<std::string> command_in_config(const std::string& config_text) {
    if (config_text.find_first_not_of(" \t\r\n") == std::string::npos) return std::nullopt;
    const auto doc = detail::Json::parse(config_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
    const auto& cfg = doc.contains("config") && doc["config"].is_object() ? doc["config"] : doc;
    if (cfg.contains("command") && cfg["command"].is_string()) return cfg["command"].get<std::string>();
    return std::nullopt;
}

OutputFormat parse_output_format(const std::string& name) {
    if (name == "json") return OutputFormat::json;
    if (name == "csv") return OutputFormat::csv;
    if (name == "both") return OutputFormat::both;
    throw std::invalid_argument("unknown output format '" + name + "' (expected json, csv or both)");
}

} // namespace mmgeo
