#include "lgi/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lgi {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

[[noreturn]] void fail(int line, const std::string& message) {
    std::ostringstream os;
    if (line > 0) os << "config line " << line << ": ";
    os << message;
    throw std::invalid_argument(os.str());
}

double parse_number(std::string_view value, int line, const std::string& key) {
    std::string text(value);
    std::size_t used = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(text, &used);
    } catch (const std::exception&) {
        fail(line, "value '" + text + "' for '" + key + "' is not a number");
    }
    if (used != text.size()) {
        fail(line, "value '" + text + "' for '" + key + "' is not a number");
    }
    return parsed;
}

std::uint64_t parse_seed(std::string_view value, int line, const std::string& key) {
    std::string text(value);
    std::size_t used = 0;
    std::uint64_t parsed = 0;
    try {
        parsed = std::stoull(text, &used);
    } catch (const std::exception&) {
        fail(line, "value '" + text + "' for '" + key + "' is not a 64-bit integer");
    }
    if (used != text.size()) {
        fail(line, "value '" + text + "' for '" + key + "' is not a 64-bit integer");
    }
    return parsed;
}

std::size_t parse_count(std::string_view value, int line, const std::string& key) {
    double number = parse_number(value, line, key);
    if (number < 1.0 || number != std::floor(number)) {
        fail(line, "value for '" + key + "' must be a positive integer");
    }
    return static_cast<std::size_t>(number);
}

bool parse_bool(std::string_view value, int line, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(line, "value for '" + key + "' must be true/false");
}

void check_range(bool ok, int line, const std::string& key, const char* expected,
                 std::string_view got) {
    if (!ok) {
        fail(line, "value out of range for '" + key + "' (expected " + expected +
                       ", got " + std::string(got) + ")");
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

// One key applied to the config; `line` <= 0 means CLI override.
void apply_key(RunConfig& cfg, std::string_view key_view, std::string_view value,
               int line) {
    const std::string key(key_view);
    auto number = [&] { return parse_number(value, line, key); };
    auto angle = [&](bool deg) { return deg ? number() * kDegToRad : number(); };

    if (key == "theta_a" || key == "theta_a_deg") {
        double v = angle(key == "theta_a_deg");
        check_range(v >= 0.0 && v <= std::numbers::pi, line, key, "[0, pi] rad", value);
        cfg.protocol.theta_a = v;
    } else if (key == "theta_b" || key == "theta_b_deg") {
        double v = angle(key == "theta_b_deg");
        check_range(v >= 0.0 && v <= std::numbers::pi, line, key, "[0, pi] rad", value);
        cfg.protocol.theta_b = v;
    } else if (key == "chi" || key == "chi_deg") {
        cfg.protocol.chi = angle(key == "chi_deg");
    } else if (key == "absorber_t") {
        double v = number();
        check_range(v >= 0.0 && v <= 1.0, line, key, "[0, 1]", value);
        if (!cfg.protocol.absorber) cfg.protocol.absorber.emplace();
        cfg.protocol.absorber->transmission = v;
    } else if (key == "absorber_path") {
        if (value != "+" && value != "-") {
            fail(line, "value for 'absorber_path' must be '+' or '-'");
        }
        if (!cfg.protocol.absorber) cfg.protocol.absorber.emplace();
        cfg.protocol.absorber->path = value == "+" ? Path::plus : Path::minus;
    } else if (key == "visibility") {
        double v = number();
        check_range(v >= 0.0 && v <= 1.0, line, key, "[0, 1]", value);
        cfg.protocol.visibility = v;
    } else if (key == "h_offset") {
        double v = number();
        check_range(v >= 0.0, line, key, ">= 0", value);
        cfg.protocol.h_offset = v;
    } else if (key == "renormalize_probabilities") {
        cfg.protocol.renormalize = parse_bool(value, line, key);
    } else if (key == "flux_rate") {
        double v = number();
        check_range(v > 0.0, line, key, "> 0", value);
        cfg.beam.flux_rate = v;
    } else if (key == "time_interferogram_s") {
        double v = number();
        check_range(v > 0.0, line, key, "> 0", value);
        cfg.beam.interferogram_s = v;
    } else if (key == "time_transversal_s") {
        double v = number();
        check_range(v > 0.0, line, key, "> 0", value);
        cfg.beam.transversal_s = v;
    } else if (key == "time_blocker_s") {
        double v = number();
        check_range(v > 0.0, line, key, "> 0", value);
        cfg.beam.blocker_s = v;
    } else if (key == "detector_efficiency") {
        double v = number();
        check_range(v > 0.0 && v <= 1.0, line, key, "(0, 1]", value);
        cfg.beam.detector_efficiency = v;
    } else if (key == "seed") {
        cfg.beam.seed = parse_seed(value, line, key);
    } else if (key == "chi_points") {
        cfg.scan.chi_points = parse_count(value, line, key);
    } else if (key == "chi_min" || key == "chi_min_deg") {
        cfg.scan.chi_min = angle(key == "chi_min_deg");
    } else if (key == "chi_max" || key == "chi_max_deg") {
        cfg.scan.chi_max = angle(key == "chi_max_deg");
    } else if (key == "scan_points") {
        cfg.scan.scan_points = parse_count(value, line, key);
    } else if (key == "scan_min_mm") {
        cfg.scan.scan_min = number();
    } else if (key == "scan_max_mm") {
        cfg.scan.scan_max = number();
    } else if (key == "scan_center_plus_mm") {
        cfg.scan.profile.center_plus = number();
    } else if (key == "scan_center_minus_mm") {
        cfg.scan.profile.center_minus = number();
    } else if (key == "scan_width_mm") {
        double v = number();
        check_range(v > 0.0, line, key, "> 0", value);
        cfg.scan.profile.width = v;
    } else if (key == "relabel") {
        cfg.analysis.relabel = parse_bool(value, line, key);
    } else if (key == "operating_point") {
        if (value == "fitted_zero") {
            cfg.analysis.operating_point = OperatingPointMode::fitted_zero;
        } else if (value == "max_k") {
            cfg.analysis.operating_point = OperatingPointMode::max_k;
        } else {
            fail(line, "value for 'operating_point' must be fitted_zero or max_k");
        }
    } else if (key == "output_dir") {
        cfg.output_dir = std::string(value);
    } else if (key == "wavelength_angstrom") {
        double v = number();
        check_range(v > 0.0, line, key, "> 0", value);
        cfg.wavelength_angstrom = v;
    } else if (key == "delta_lambda_over_lambda") {
        double v = number();
        check_range(v > 0.0, line, key, "> 0", value);
        cfg.delta_lambda_over_lambda = v;
    } else if (key == "beam_cross_section_mm") {
        double v = number();
        check_range(v > 0.0, line, key, "> 0", value);
        cfg.beam_cross_section_mm = v;
    } else {
        fail(line, "unknown key '" + key + "'");
    }
}

// Keys that name the same setting (rad/deg variants) conflict within a file.
std::string base_key(std::string_view key) {
    std::string k(key);
    if (k.size() > 4 && k.ends_with("_deg")) k.resize(k.size() - 4);
    return k;
}

}  // namespace

void ScanConfig::validate() const {
    if (chi_points < 5) throw std::invalid_argument("chi_points must be >= 5");
    if (!(chi_max > chi_min)) throw std::invalid_argument("chi_max must exceed chi_min");
    if (!(chi_max - chi_min >= std::numbers::pi)) {
        throw std::invalid_argument("chi scan must span at least half a period");
    }
    if (scan_points < 10) throw std::invalid_argument("scan_points must be >= 10");
    if (!(scan_max > scan_min)) throw std::invalid_argument("scan_max must exceed scan_min");
    profile.validate();
    if (profile.center_plus <= profile.center_minus) {
        throw std::invalid_argument("scan_center_plus_mm must exceed scan_center_minus_mm");
    }
}

void RunConfig::validate() const {
    protocol.validate();
    beam.validate();
    scan.validate();
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(line_no, "malformed line (expected key = value)");
        }
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            fail(line_no, "malformed line (expected key = value)");
        }
        std::string base = base_key(key);
        if (!seen.insert(base).second) {
            fail(line_no, "duplicate setting for '" + base + "'");
        }
        apply_key(cfg, key, value, line_no);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void apply_config_key(RunConfig& config, std::string_view key, std::string_view value) {
    apply_key(config, key, value, 0);
}

std::vector<double> chi_grid(const ScanConfig& scan) {
    return linspace(scan.chi_min, scan.chi_max, scan.chi_points);
}

std::vector<double> position_grid(const ScanConfig& scan) {
    return linspace(scan.scan_min, scan.scan_max, scan.scan_points);
}

}  // namespace lgi
