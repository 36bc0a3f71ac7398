#include "coorb/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "coorb/errors.hpp"

#ifndef COORB_PRESET_DIR
#define COORB_PRESET_DIR "presets"
#endif

namespace coorb {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

std::vector<Entry> parse_entries(const std::string& text) {
    std::vector<Entry> entries;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw config_error("unterminated section header", line_no);
            }
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) throw config_error("empty section name", line_no);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("expected key = value", line_no);
        }
        Entry e;
        e.section = section;
        e.key = lower(trim(line.substr(0, eq)));
        e.value = trim(line.substr(eq + 1));
        e.line = line_no;
        if (e.section.empty()) throw config_error("key outside any [section]", line_no);
        if (e.key.empty()) throw config_error("empty key", line_no);
        entries.push_back(std::move(e));
    }
    return entries;
}

double parse_double(const Entry& e) {
    const std::string& s = e.value;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw config_error(e.key + ": not a number: '" + s + "'", e.line);
    }
    return v;
}

std::int64_t parse_int(const Entry& e) {
    std::int64_t v = 0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw config_error(e.key + ": not an integer: '" + e.value + "'", e.line);
    }
    return v;
}

std::uint64_t parse_uint(const Entry& e) {
    std::uint64_t v = 0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw config_error(e.key + ": not a non-negative integer: '" + e.value + "'", e.line);
    }
    return v;
}

// Durations accept a unit suffix: s, min, h, d, yr (Julian year, 365.25 d).
double parse_duration_s(const Entry& e) {
    const std::string& s = e.value;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || !std::isfinite(v)) {
        throw config_error(e.key + ": not a duration: '" + s + "'", e.line);
    }
    const std::string unit = lower(trim(std::string(end)));
    double scale = 1.0;
    if (unit.empty() || unit == "s") scale = 1.0;
    else if (unit == "min") scale = 60.0;
    else if (unit == "h") scale = 3600.0;
    else if (unit == "d") scale = 86400.0;
    else if (unit == "yr") scale = 365.25 * 86400.0;
    else throw config_error(e.key + ": unknown time unit '" + unit + "'", e.line);
    return v * scale;
}

bool valid_preset_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
    }
    return true;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open preset file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int body_index(const std::string& section, int line) {
    if (section == "body.central") return 0;
    if (section == "body.moon1") return 1;
    if (section == "body.moon2") return 2;
    throw config_error("unknown section [" + section + "]", line);
}

void apply_body_entry(BodySpec& body, const Entry& e) {
    if (e.key == "gm_km3s2") body.gm_km3s2 = parse_double(e);
    else if (e.key == "radius_km") body.radius_km = parse_double(e);
    else if (e.key == "x_km") body.x_km = parse_double(e);
    else if (e.key == "y_km") body.y_km = parse_double(e);
    else if (e.key == "vx_kms") body.vx_kms = parse_double(e);
    else if (e.key == "vy_kms") body.vy_kms = parse_double(e);
    else throw config_error("unknown key '" + e.key + "' in [" + e.section + "]", e.line);
}

std::vector<OutputKind> parse_outputs(const Entry& e) {
    std::vector<OutputKind> kinds;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string name = lower(trim(item));
        if (name.empty()) continue;
        OutputKind kind;
        try {
            kind = output_kind_from_name(name);
        } catch (const invalid_input& err) {
            throw config_error(err.what(), e.line);
        }
        if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) kinds.push_back(kind);
    }
    if (kinds.empty()) throw config_error("outputs: empty list", e.line);
    return kinds;
}

void apply_scenario_entry(ScenarioConfig& cfg, const Entry& e) {
    if (e.key == "preset") cfg.preset = e.value;  // consumed during expansion
    else if (e.key == "duration") cfg.duration_s = parse_duration_s(e);
    else if (e.key == "outputs") cfg.outputs = parse_outputs(e);
    else if (e.key == "ref_radius_km") cfg.ref_radius_km = parse_double(e);
    else if (e.key == "seed") cfg.seed = parse_uint(e);
    else if (e.key == "perturb_kms") cfg.perturb_kms = parse_double(e);
    else if (e.key == "zeta_min_deg") cfg.zeta_min_deg = parse_double(e);
    else if (e.key == "swap_window_s") cfg.swap_window_s = parse_double(e);
    else if (e.key == "format") {
        const std::string f = lower(e.value);
        if (f != "csv" && f != "json") {
            throw config_error("format: expected csv or json, got '" + e.value + "'", e.line);
        }
        cfg.format = f;
    } else if (e.key == "threads") {
        const std::int64_t t = parse_int(e);
        if (t < 1 || t > 256) throw config_error("threads: expected 1..256", e.line);
        cfg.threads = static_cast<int>(t);
    } else {
        throw config_error("unknown key '" + e.key + "' in [scenario]", e.line);
    }
}

void apply_integrator_entry(ScenarioConfig& cfg, const Entry& e) {
    if (e.key == "scheme") {
        const std::string s = lower(e.value);
        if (s == "verlet2") cfg.scheme = Scheme::verlet2;
        else if (s == "yoshida4") cfg.scheme = Scheme::yoshida4;
        else throw config_error("scheme: expected verlet2 or yoshida4, got '" + e.value + "'", e.line);
    } else if (e.key == "step_s") {
        cfg.step_s = parse_double(e);
        if (cfg.step_s < 0.0) throw config_error("step_s: must be non-negative (0 = auto)", e.line);
    } else if (e.key == "output_stride") {
        cfg.output_stride = parse_int(e);
        if (cfg.output_stride < 0) throw config_error("output_stride: must be non-negative (0 = auto)", e.line);
    } else if (e.key == "max_steps") {
        cfg.max_steps = parse_int(e);
        if (cfg.max_steps < 1) throw config_error("max_steps: must be positive", e.line);
    } else {
        throw config_error("unknown key '" + e.key + "' in [integrator]", e.line);
    }
}

void apply_portrait_entry(ScenarioConfig& cfg, const Entry& e) {
    if (e.key == "zeta_lo_deg") cfg.portrait_zeta_lo_deg = parse_double(e);
    else if (e.key == "zeta_hi_deg") cfg.portrait_zeta_hi_deg = parse_double(e);
    else if (e.key == "n_zeta") cfg.portrait_n_zeta = static_cast<int>(parse_int(e));
    else if (e.key == "u_lo") cfg.portrait_u_lo = parse_double(e);
    else if (e.key == "u_hi") cfg.portrait_u_hi = parse_double(e);
    else if (e.key == "n_u") cfg.portrait_n_u = static_cast<int>(parse_int(e));
    else if (e.key == "mu") cfg.portrait_mu = parse_double(e);
    else throw config_error("unknown key '" + e.key + "' in [portrait]", e.line);
}

void apply_entry(ScenarioConfig& cfg, const Entry& e) {
    if (e.section == "scenario") apply_scenario_entry(cfg, e);
    else if (e.section == "integrator") apply_integrator_entry(cfg, e);
    else if (e.section == "portrait") apply_portrait_entry(cfg, e);
    else apply_body_entry(cfg.bodies[static_cast<std::size_t>(body_index(e.section, e.line))], e);
}

}  // namespace

const char* output_kind_name(OutputKind kind) {
    switch (kind) {
        case OutputKind::trajectory: return "trajectory";
        case OutputKind::resonant_series: return "resonant_series";
        case OutputKind::swaps: return "swaps";
        case OutputKind::portrait: return "portrait";
        case OutputKind::classification: return "classification";
        case OutputKind::frequencies: return "frequencies";
    }
    return "?";
}

OutputKind output_kind_from_name(const std::string& name) {
    for (OutputKind k : {OutputKind::trajectory, OutputKind::resonant_series, OutputKind::swaps,
                         OutputKind::portrait, OutputKind::classification, OutputKind::frequencies}) {
        if (name == output_kind_name(k)) return k;
    }
    throw invalid_input("unknown output kind '" + name + "'");
}

bool operator==(const BodySpec& a, const BodySpec& b) {
    return a.gm_km3s2 == b.gm_km3s2 && a.radius_km == b.radius_km && a.x_km == b.x_km &&
           a.y_km == b.y_km && a.vx_kms == b.vx_kms && a.vy_kms == b.vy_kms;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.preset == b.preset && a.bodies == b.bodies && a.scheme == b.scheme &&
           a.step_s == b.step_s && a.output_stride == b.output_stride &&
           a.max_steps == b.max_steps && a.duration_s == b.duration_s && a.outputs == b.outputs &&
           a.ref_radius_km == b.ref_radius_km && a.seed == b.seed &&
           a.perturb_kms == b.perturb_kms && a.zeta_min_deg == b.zeta_min_deg &&
           a.swap_window_s == b.swap_window_s &&
           a.portrait_zeta_lo_deg == b.portrait_zeta_lo_deg &&
           a.portrait_zeta_hi_deg == b.portrait_zeta_hi_deg &&
           a.portrait_n_zeta == b.portrait_n_zeta && a.portrait_u_lo == b.portrait_u_lo &&
           a.portrait_u_hi == b.portrait_u_hi && a.portrait_n_u == b.portrait_n_u &&
           a.portrait_mu == b.portrait_mu && a.format == b.format && a.threads == b.threads;
}

std::string preset_directory(const std::string& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("COORB_PRESET_DIR"); env != nullptr && env[0] != '\0') {
        return env;
    }
    return COORB_PRESET_DIR;
}

ScenarioConfig parse_config(const std::string& text, const std::string& preset_dir) {
    const std::vector<Entry> user = parse_entries(text);

    std::string preset_name;
    for (const Entry& e : user) {
        if (e.section == "scenario" && e.key == "preset") {
            preset_name = e.value;
            if (!valid_preset_name(preset_name)) {
                throw config_error("preset: invalid name '" + preset_name + "'", e.line);
            }
        }
    }

    ScenarioConfig cfg;
    if (!preset_name.empty()) {
        const std::string path = preset_directory(preset_dir) + "/" + preset_name + ".cfg";
        const std::vector<Entry> base = parse_entries(read_file(path));
        for (const Entry& e : base) {
            if (e.section == "scenario" && e.key == "preset") {
                throw config_error("preset file '" + preset_name + "' must not name another preset",
                                   e.line);
            }
            apply_entry(cfg, e);
        }
        cfg.preset = preset_name;
    }
    for (const Entry& e : user) apply_entry(cfg, e);

    double total_gm = 0.0;
    for (const BodySpec& b : cfg.bodies) {
        if (b.gm_km3s2 < 0.0) throw config_error("body gm_km3s2 must be non-negative");
        if (b.radius_km < 0.0) throw config_error("body radius_km must be non-negative");
        total_gm += b.gm_km3s2;
    }
    if (total_gm <= 0.0) {
        throw config_error("no bodies configured: at least one gm_km3s2 must be positive");
    }
    if (cfg.bodies[0].gm_km3s2 <= 0.0) {
        throw config_error("[body.central] gm_km3s2 must be positive");
    }
    if (cfg.zeta_min_deg <= 0.0 || cfg.zeta_min_deg >= 60.0) {
        throw config_error("zeta_min_deg: expected a cutoff in (0, 60)");
    }
    if (cfg.ref_radius_km < 0.0) throw config_error("ref_radius_km must be non-negative");
    if (cfg.perturb_kms < 0.0) throw config_error("perturb_kms must be non-negative");
    if (cfg.swap_window_s < 0.0) throw config_error("swap_window_s must be non-negative");
    if (cfg.duration_s < 0.0) throw config_error("duration must be non-negative");
    if (cfg.outputs.empty()) cfg.outputs = {OutputKind::trajectory};
    return cfg;
}

namespace {

std::string num(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "[scenario]\n";
    if (!cfg.preset.empty()) out << "preset = " << cfg.preset << "\n";
    out << "duration = " << num(cfg.duration_s) << " s\n";
    out << "outputs = ";
    const std::vector<OutputKind> kinds =
        cfg.outputs.empty() ? std::vector<OutputKind>{OutputKind::trajectory} : cfg.outputs;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (i > 0) out << ", ";
        out << output_kind_name(kinds[i]);
    }
    out << "\n";
    out << "ref_radius_km = " << num(cfg.ref_radius_km) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "perturb_kms = " << num(cfg.perturb_kms) << "\n";
    out << "zeta_min_deg = " << num(cfg.zeta_min_deg) << "\n";
    out << "swap_window_s = " << num(cfg.swap_window_s) << "\n";
    out << "format = " << cfg.format << "\n";
    out << "threads = " << cfg.threads << "\n";
    out << "\n[integrator]\n";
    out << "scheme = " << (cfg.scheme == Scheme::verlet2 ? "verlet2" : "yoshida4") << "\n";
    out << "step_s = " << num(cfg.step_s) << "\n";
    out << "output_stride = " << cfg.output_stride << "\n";
    if (cfg.max_steps != std::numeric_limits<std::int64_t>::max()) {
        out << "max_steps = " << cfg.max_steps << "\n";
    }
    static const char* kSections[3] = {"body.central", "body.moon1", "body.moon2"};
    for (int i = 0; i < 3; ++i) {
        const BodySpec& b = cfg.bodies[static_cast<std::size_t>(i)];
        out << "\n[" << kSections[i] << "]\n";
        out << "gm_km3s2 = " << num(b.gm_km3s2) << "\n";
        out << "radius_km = " << num(b.radius_km) << "\n";
        out << "x_km = " << num(b.x_km) << "\n";
        out << "y_km = " << num(b.y_km) << "\n";
        out << "vx_kms = " << num(b.vx_kms) << "\n";
        out << "vy_kms = " << num(b.vy_kms) << "\n";
    }
    out << "\n[portrait]\n";
    out << "zeta_lo_deg = " << num(cfg.portrait_zeta_lo_deg) << "\n";
    out << "zeta_hi_deg = " << num(cfg.portrait_zeta_hi_deg) << "\n";
    out << "n_zeta = " << cfg.portrait_n_zeta << "\n";
    out << "u_lo = " << num(cfg.portrait_u_lo) << "\n";
    out << "u_hi = " << num(cfg.portrait_u_hi) << "\n";
    out << "n_u = " << cfg.portrait_n_u << "\n";
    out << "mu = " << num(cfg.portrait_mu) << "\n";
    return out.str();
}

}  // namespace coorb
