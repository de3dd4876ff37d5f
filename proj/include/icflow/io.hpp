#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "icflow/flow.hpp"
#include "icflow/generate.hpp"

namespace icflow {

/// Bad configuration: unknown key, unparsable value, or an out-of-range parameter.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat "key = value" settings. Later assignments override earlier ones; '#'
/// starts a comment. Typed getters record which keys were read so that
/// misspelled keys can be reported.
class ExperimentConfig {
public:
    static ExperimentConfig parse(std::istream& is, const std::string& source = "<config>");
    static ExperimentConfig load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma separated numbers.
    std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<long> get_int_list(const std::string& key, const std::vector<long>& fallback) const;

    /// Keys present but never read.
    std::vector<std::string> unused_keys() const;
    /// Throws ConfigError naming every unused key.
    void reject_unused() const;

    const std::map<std::string, std::string>& entries() const noexcept { return values_; }
    nlohmann::ordered_json to_json() const;

private:
    const std::string* lookup(const std::string& key) const;

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

/// Reads curve, r0, modes ("m:a:b,m:a:b"), a, b, amplitude, seed, shape.
CurveSpec curve_spec_from(const ExperimentConfig& cfg, const std::string& default_kind = "circle");
FlowConfig flow_config_from(const ExperimentConfig& cfg);

/// "m:a:b" entries separated by commas; b may be omitted.
std::vector<FourierMode> parse_modes(const std::string& text);
std::string format_modes(const std::vector<FourierMode>& modes);

nlohmann::ordered_json to_json(const CurveSpec& spec);
nlohmann::ordered_json to_json(const FlowConfig& cfg);

/// One row per recorded time: t followed by the GeometryReport fields.
void write_trace_csv(std::ostream& os, const FlowTrace& trace);

/// {status, t_final, steps, violations[], ...}
nlohmann::ordered_json trace_summary(const FlowTrace& trace);

/// Snapshot file name carrying the step and time, e.g. "curve_000120_t0.0123.csv".
std::string snapshot_file_name(const Snapshot& s);

/// trace.csv, snapshots/<name>.csv and summary.json under dir.
void export_trace(const std::filesystem::path& dir, const FlowTrace& trace, const nlohmann::ordered_json& extra = {});

/// Two-space indented dump with a trailing newline.
std::string dump_json(const nlohmann::ordered_json& j);

/// Writes bytes verbatim, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Number for JSON: finite values as is, NaN and infinities as null.
nlohmann::ordered_json json_number(double v);

}  // namespace icflow
