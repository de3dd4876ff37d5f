#include "icflow/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace icflow {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end || text.empty())
        throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
    return v;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& text)
{
    Int v = 0;
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end || text.empty())
        throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
    return v;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& is, const std::string& source)
{
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
        cfg.set(key, trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse(in, path.string());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool ExperimentConfig::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string* ExperimentConfig::lookup(const std::string& key) const
{
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const
{
    const auto* v = lookup(key);
    return v ? *v : fallback;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const
{
    const auto* v = lookup(key);
    return v ? parse_double(key, *v) : fallback;
}

long ExperimentConfig::get_int(const std::string& key, long fallback) const
{
    const auto* v = lookup(key);
    return v ? parse_integer<long>(key, *v) : fallback;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t fallback) const
{
    const auto* v = lookup(key);
    return v ? parse_integer<std::uint64_t>(key, *v) : fallback;
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const
{
    const auto* v = lookup(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + *v + "'");
}

std::vector<double> ExperimentConfig::get_double_list(const std::string& key, const std::vector<double>& fallback) const
{
    const auto* v = lookup(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : split(*v, ',')) out.push_back(parse_double(key, item));
    return out;
}

std::vector<long> ExperimentConfig::get_int_list(const std::string& key, const std::vector<long>& fallback) const
{
    const auto* v = lookup(key);
    if (!v) return fallback;
    std::vector<long> out;
    for (const auto& item : split(*v, ',')) out.push_back(parse_integer<long>(key, item));
    return out;
}

std::vector<std::string> ExperimentConfig::unused_keys() const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

void ExperimentConfig::reject_unused() const
{
    const auto keys = unused_keys();
    if (keys.empty()) return;
    std::string msg = "unknown configuration key(s):";
    for (const auto& k : keys) msg += " " + k;
    throw ConfigError(msg);
}

nlohmann::ordered_json ExperimentConfig::to_json() const
{
    auto j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
}

std::vector<FourierMode> parse_modes(const std::string& text)
{
    std::vector<FourierMode> modes;
    if (trim(text).empty()) return modes;
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() < 2 || parts.size() > 3)
            throw ConfigError("modes: expected 'm:a' or 'm:a:b', got '" + item + "'");
        FourierMode md{};
        md.m = parse_integer<int>("modes", parts[0]);
        if (md.m < 1) throw ConfigError("modes: mode index must be positive, got '" + parts[0] + "'");
        md.a = parse_double("modes", parts[1]);
        md.b = parts.size() == 3 ? parse_double("modes", parts[2]) : 0.0;
        modes.push_back(md);
    }
    return modes;
}

std::string format_modes(const std::vector<FourierMode>& modes)
{
    std::string out;
    for (const auto& md : modes) {
        if (!out.empty()) out += ',';
        out += std::to_string(md.m) + ':' + format_double(md.a) + ':' + format_double(md.b);
    }
    return out;
}

CurveSpec curve_spec_from(const ExperimentConfig& cfg, const std::string& default_kind)
{
    CurveSpec spec;
    try {
        spec.kind = parse_curve_kind(cfg.get_string("curve", default_kind));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    spec.r0 = cfg.get_double("r0", spec.r0);
    spec.modes = parse_modes(cfg.get_string("modes", ""));
    spec.a = cfg.get_double("a", spec.a);
    spec.b = cfg.get_double("b", spec.b);
    spec.amplitude = cfg.get_double("amplitude", spec.amplitude);
    spec.seed = cfg.get_u64("seed", spec.seed);
    const auto shape = cfg.get_string("shape", "convex");
    if (shape == "convex")
        spec.shape = RandomShape::Convex;
    else if (shape == "nonconvex")
        spec.shape = RandomShape::NonConvex;
    else
        throw ConfigError("shape must be 'convex' or 'nonconvex', got '" + shape + "'");
    return spec;
}

FlowConfig flow_config_from(const ExperimentConfig& cfg)
{
    FlowConfig fc;
    fc.sigma = cfg.get_double("sigma", fc.sigma);
    fc.t_end = cfg.get_double("t_end", fc.t_end);
    fc.eps_stationary = cfg.get_double("eps_stationary", fc.eps_stationary);
    fc.report_stride = cfg.get_int("report_stride", fc.report_stride);
    fc.snapshot_stride = cfg.get_int("snapshot_stride", fc.snapshot_stride);
    fc.max_steps = cfg.get_int("max_steps", fc.max_steps);
    fc.refine_on_failure = cfg.get_bool("refine_on_failure", fc.refine_on_failure);
    fc.log_snapshots = cfg.get_bool("log_snapshots", true);
    try {
        fc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return fc;
}

nlohmann::ordered_json json_number(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

nlohmann::ordered_json to_json(const CurveSpec& spec)
{
    nlohmann::ordered_json j;
    j["curve"] = std::string(to_string(spec.kind));
    j["r0"] = spec.r0;
    switch (spec.kind) {
    case CurveKind::Fourier: j["modes"] = format_modes(spec.modes); break;
    case CurveKind::Ellipse:
        j["a"] = spec.a;
        j["b"] = spec.b;
        break;
    case CurveKind::Random:
        j["seed"] = spec.seed;
        j["shape"] = spec.shape == RandomShape::Convex ? "convex" : "nonconvex";
        break;
    case CurveKind::Kink: j["amplitude"] = spec.amplitude; break;
    case CurveKind::Circle: break;
    }
    return j;
}

nlohmann::ordered_json to_json(const FlowConfig& cfg)
{
    nlohmann::ordered_json j;
    j["sigma"] = cfg.sigma;
    j["t_end"] = cfg.t_end;
    j["eps_stationary"] = cfg.eps_stationary;
    j["report_stride"] = cfg.report_stride;
    j["snapshot_stride"] = cfg.snapshot_stride;
    j["max_steps"] = cfg.max_steps;
    j["refine_on_failure"] = cfg.refine_on_failure;
    j["log_snapshots"] = cfg.log_snapshots;
    return j;
}

void write_trace_csv(std::ostream& os, const FlowTrace& trace)
{
    os << 't';
    for (const auto& name : report_field_names()) os << ',' << name;
    os << '\n';
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        os << format_double(trace.times[i]) << ',' << report_csv_row(trace.reports[i]) << '\n';
}

nlohmann::ordered_json trace_summary(const FlowTrace& trace)
{
    nlohmann::ordered_json j;
    j["status"] = std::string(to_string(trace.status));
    j["t_final"] = trace.t_final;
    j["steps"] = trace.steps;
    auto viol = nlohmann::ordered_json::array();
    for (const auto& v : trace.violations)
        viol.push_back({{"monitor", v.monitor}, {"time", v.time}, {"magnitude", json_number(v.magnitude)}});
    j["violations"] = viol;
    j["law"] = std::string(to_string(trace.law));
    j["message"] = trace.message;
    j["refined"] = trace.refined;
    const auto& c0 = trace.initial_curve();
    const auto& c1 = trace.final_curve();
    j["K"] = c0.space().K();
    j["N"] = c1.size();
    j["flow"] = to_json(trace.config);
    j["initial"] = to_json(trace.reports.front());
    j["final"] = to_json(trace.reports.back());
    j["length_drift"] = json_number(std::abs(trace.reports.back().L - trace.reports.front().L) / trace.reports.front().L);
    if (trace.limit_deviation) {
        j["rho_inf"] = c0.space().circle_radius_for_length(trace.reports.front().L);
        j["limit_deviation"] = *trace.limit_deviation;
    }
    j["support_floor"] = trace.support_floor;
    j["identities"] = {{"max_length_rate_error", trace.identities.max_length_rate_error},
                       {"max_area_rate_error", trace.identities.max_area_rate_error},
                       {"samples", trace.identities.samples}};
    return j;
}

std::string snapshot_file_name(const Snapshot& s)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "curve_%09ld_t%.6f.csv", s.step, s.time);
    return buf;
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void export_trace(const std::filesystem::path& dir, const FlowTrace& trace, const nlohmann::ordered_json& extra)
{
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    write_text_file(dir / "trace.csv", csv.str());
    for (const auto& s : trace.snapshots) {
        std::ostringstream os;
        write_curve_csv(os, s.curve);
        write_text_file(dir / "snapshots" / snapshot_file_name(s), os.str());
    }
    auto summary = trace_summary(trace);
    if (extra.is_object())
        for (const auto& [k, v] : extra.items()) summary[k] = v;
    write_text_file(dir / "summary.json", dump_json(summary));
}

}  // namespace icflow
