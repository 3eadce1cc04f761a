#include "qmm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "qmm/errors.hpp"

namespace qmm {

const char* to_string(Command c) {
    switch (c) {
        case Command::scatter: return "scatter";
        case Command::bands: return "bands";
        case Command::simulate: return "simulate";
        case Command::temps: return "temps";
        case Command::permittivity: return "permittivity";
    }
    return "?";
}

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::none: return "none";
        case Scenario::breathing: return "breathing";
        case Scenario::priming: return "priming";
        case Scenario::lasing: return "lasing";
    }
    return "?";
}

namespace {

enum class Kind { number, integer, text };

struct Range {
    std::optional<double> lo, hi;
    bool lo_open = false, hi_open = false;
};

struct KeySpec {
    std::string name;
    Kind kind = Kind::number;
    ConfigValue fallback;
    Range range;
    std::vector<std::string> choices;
};

KeySpec num(std::string name, double def, Range r = {}) {
    return {std::move(name), Kind::number, def, r, {}};
}
KeySpec count(std::string name, double def, double lo) {
    return {std::move(name), Kind::integer, def, Range{lo, std::nullopt, false, false}, {}};
}
KeySpec text(std::string name, std::string def) {
    return {std::move(name), Kind::text, std::move(def), {}, {}};
}
KeySpec choice(std::string name, std::string def, std::vector<std::string> options) {
    return {std::move(name), Kind::text, std::move(def), {}, std::move(options)};
}

Range positive() { return {0.0, std::nullopt, true, false}; }
Range non_negative() { return {0.0, std::nullopt, false, false}; }
Range at_least(double v) { return {v, std::nullopt, false, false}; }
Range closed(double lo, double hi) { return {lo, hi, false, false}; }
Range unit_open_closed() { return {0.0, 1.0, true, false}; }

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<KeySpec> command_keys(Command c, Scenario s) {
    switch (c) {
        case Command::temps:
            return {choice("regime", "all",
                           {"all", "weak_disorder", "strong_disorder", "quantum_strong",
                            "quantum_weak"}),
                    num("delta0_K", 4.0, non_negative()),
                    num("m_eta2_N_K", 20.0, non_negative()),
                    count("n_qubits", 1, 1),
                    num("proportionality", 1.0, positive())};
        case Command::bands:
            return {text("segments", "1:0"),
                    num("beta", 1.0, positive()),
                    num("omega_min", 0.0, non_negative()),
                    num("omega_max", 10.0, positive()),
                    count("omega_points", 1001, 2)};
        case Command::scatter:
            return {num("qubit_epsilon", 1.0),
                    num("qubit_delta", 0.0, non_negative()),
                    num("d0", 1.0, non_negative()),
                    num("mutual_coupling", 1.0),
                    num("beta", 10.0, positive()),
                    num("omega_min", 0.5, positive()),
                    num("omega_max", 1.5, positive()),
                    count("omega_points", 11, 1),
                    num("drive_amplitude", 1e-3, positive()),
                    num("gamma_qb", 0.0, non_negative()),
                    choice("launch_side", "left", {"left", "right"}),
                    num("tolerance", 1e-5, positive()),
                    num("max_time", 4000.0, positive()),
                    count("half_length", 500, 16),
                    count("sponge_width", 200, 1),
                    num("sponge_strength", 0.05, unit_open_closed())};
        case Command::permittivity:
            return {num("eps_b", 12.25, at_least(1.0)),
                    num("pop_factor", 1.0, closed(-1.0, 1.0)),
                    num("osc_strength", 0.05, non_negative()),
                    num("omega0", 1.0, positive()),
                    num("gamma", 0.01, positive()),
                    num("omega_min", 0.8, non_negative()),
                    num("omega_max", 1.2, positive()),
                    count("omega_points", 401, 1),
                    count("stack_periods", 0, 0),
                    count("exit_periods", 2, 0),
                    choice("stack_layout", "cavity", {"cavity", "periodic"}),
                    num("eps_high", 12.25, at_least(1.0)),
                    num("eps_low", 2.25, at_least(1.0)),
                    num("ambient_eps", 1.0, at_least(1.0))};
        case Command::simulate:
            switch (s) {
                case Scenario::breathing:
                    return {num("qubit_epsilon", 0.6),
                            num("qubit_delta", 0.8, non_negative()),
                            count("period", 8, 4),
                            count("n_periods", 10, 1),
                            num("theta_mean", std::numbers::pi / 4.0),
                            num("theta_mod", 1.0),
                            num("v0", 8.0),
                            num("v_offset", 0.0),
                            num("beta", 10.0, positive()),
                            num("duration", 4.0 * kTwoPi, positive()),
                            count("samples_per_beat", 32, 4),
                            count("omega_points", 800, 16),
                            num("probe_amplitude", 0.0, non_negative()),
                            num("probe_omega", 0.0, non_negative()),
                            num("probe_ramp", 200.0, at_least(2.0)),
                            count("probe_windows_per_beat", 8, 2)};
                case Scenario::priming:
                    return {num("beta", 2.5, positive()),
                            num("coupling_g", 1.0),
                            num("d0", 0.003, non_negative()),
                            num("carrier_k", std::numbers::pi / 8.0, positive()),
                            num("qubit_omega", 0.0, non_negative()),
                            num("amplitude_left", 4.4, non_negative()),
                            num("amplitude_right", 4.4, non_negative()),
                            num("envelope_width", 300.0, at_least(2.0)),
                            choice("envelope", "raised_cosine", {"raised_cosine", "gaussian"}),
                            count("n_sites", 128, 4),
                            count("gap_cells", 40, 0),
                            count("sponge_width", 200, 1),
                            num("sponge_strength", 0.05, unit_open_closed()),
                            num("exit_tolerance", 0.01, positive())};
                case Scenario::lasing:
                    return {num("beta", 40.0, positive()),
                            num("coupling_g", 1.0),
                            num("d0", 0.5, non_negative()),
                            num("qubit_omega", 1.0, positive()),
                            count("n_sites", 32, 1),
                            count("site_stride", 1, 1),
                            text("amplitudes", "0.018,0.072,0.288"),
                            num("carrier_k", 0.0, non_negative()),
                            num("envelope_width", 12000.0, at_least(2.0)),
                            choice("envelope", "raised_cosine", {"raised_cosine", "gaussian"}),
                            choice("launch_side", "left", {"left", "right", "both"}),
                            num("duration", 100.0, positive()),
                            num("seed_sx", 1e-6, {-1.0, 1.0, true, true}),
                            choice("initial", "excited", {"excited", "ground"}),
                            num("threshold", 0.5, {0.0, 1.0, true, true}),
                            count("gap_cells", 40, 0),
                            count("sponge_width", 380, 1),
                            num("sponge_strength", 0.05, unit_open_closed()),
                            count("sample_every", 4, 1)};
                case Scenario::none: return {};
            }
    }
    return {};
}

std::vector<KeySpec> common_keys() {
    return {choice("command", "", {"scatter", "bands", "simulate", "temps", "permittivity"}),
            choice("scenario", "none", {"none", "breathing", "priming", "lasing"}),
            text("seed", "0"),
            text("output_dir", ".")};
}

struct Entry {
    std::string value;
    std::size_t line = 0;
};

[[noreturn]] void config_error(std::size_t line, const std::string& what) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    os << what;
    fail(ErrorKind::configuration, os.str());
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_number(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string nearest(const std::string& key, const std::vector<std::string>& candidates) {
    std::string best;
    std::size_t best_d = ~std::size_t{0};
    for (const std::string& c : candidates) {
        const std::size_t d = edit_distance(key, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

/// Commands (and simulate scenarios) that accept `key`.
std::vector<std::string> owners_of(const std::string& key) {
    std::vector<std::string> out;
    auto accepts = [&](Command c, Scenario sc) {
        const std::vector<KeySpec> keys = command_keys(c, sc);
        return std::any_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
    };
    for (Command c : {Command::bands, Command::permittivity, Command::scatter, Command::temps}) {
        if (accepts(c, Scenario::none)) out.push_back(std::string("command = ") + to_string(c));
    }
    for (Scenario sc : {Scenario::breathing, Scenario::lasing, Scenario::priming}) {
        if (accepts(Command::simulate, sc)) out.push_back(std::string("scenario = ") + to_string(sc));
    }
    return out;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void check_range(const KeySpec& spec, double v, std::size_t line) {
    const Range& r = spec.range;
    const bool low = r.lo && (r.lo_open ? !(v > *r.lo) : !(v >= *r.lo));
    const bool high = r.hi && (r.hi_open ? !(v < *r.hi) : !(v <= *r.hi));
    if (!low && !high) return;
    std::ostringstream os;
    os << "key '" << spec.name << "' = " << format_number(v) << " out of range; expected";
    if (r.lo) os << ' ' << (r.lo_open ? ">" : ">=") << ' ' << format_number(*r.lo);
    if (r.lo && r.hi) os << " and";
    if (r.hi) os << ' ' << (r.hi_open ? "<" : "<=") << ' ' << format_number(*r.hi);
    config_error(line, os.str());
}

std::vector<double> split_numbers(const std::string& s, const std::string& key, std::size_t line) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        const auto v = parse_number(t);
        if (!v) config_error(line, "key '" + key + "' expects comma-separated numbers, got '" + t + "'");
        out.push_back(*v);
    }
    if (out.empty()) config_error(line, "key '" + key + "' is empty");
    return out;
}

}  // namespace

std::vector<std::string> valid_keys(Command c, Scenario s) {
    std::vector<std::string> names;
    for (const KeySpec& k : common_keys()) names.push_back(k.name);
    for (const KeySpec& k : command_keys(c, s)) names.push_back(k.name);
    std::sort(names.begin(), names.end());
    return names;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

double RunConfig::number(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end() || !std::holds_alternative<double>(it->second)) {
        fail(ErrorKind::internal, "no numeric config key '" + key + "'");
    }
    return std::get<double>(it->second);
}

std::size_t RunConfig::count(const std::string& key) const {
    return static_cast<std::size_t>(number(key));
}

const std::string& RunConfig::text(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end() || !std::holds_alternative<std::string>(it->second)) {
        fail(ErrorKind::internal, "no text config key '" + key + "'");
    }
    return std::get<std::string>(it->second);
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
    return split_numbers(text(key), key, 0);
}

RunConfig parse_config(std::string_view input) {
    std::map<std::string, Entry> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= input.size()) {
        const std::size_t nl = input.find('\n', pos);
        std::string_view raw = input.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                              : nl - pos);
        pos = nl == std::string_view::npos ? input.size() + 1 : nl + 1;
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) config_error(line_no, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) config_error(line_no, "missing key before '='");
        if (entries.count(key)) {
            config_error(line_no, "duplicate key '" + key + "' (first set on line " +
                                      std::to_string(entries[key].line) + ")");
        }
        entries[key] = Entry{value, line_no};
    }

    auto cmd = entries.find("command");
    if (cmd == entries.end()) {
        config_error(0, "missing required key 'command'; required keys: command (one of scatter, "
                        "bands, simulate, temps, permittivity), scenario (when command = simulate: "
                        "breathing, priming or lasing)");
    }

    RunConfig cfg;
    const std::string& c = cmd->second.value;
    if (c == "scatter") cfg.command = Command::scatter;
    else if (c == "bands") cfg.command = Command::bands;
    else if (c == "simulate") cfg.command = Command::simulate;
    else if (c == "temps") cfg.command = Command::temps;
    else if (c == "permittivity") cfg.command = Command::permittivity;
    else {
        config_error(cmd->second.line, "unknown command '" + c +
                                           "'; expected one of scatter, bands, simulate, temps, "
                                           "permittivity (nearest: " +
                                           nearest(c, {"scatter", "bands", "simulate", "temps",
                                                       "permittivity"}) +
                                           ")");
    }

    auto sc = entries.find("scenario");
    if (cfg.command == Command::simulate) {
        if (sc == entries.end()) {
            config_error(0, "command = simulate requires key 'scenario' (breathing, priming or lasing)");
        }
        const std::string& s = sc->second.value;
        if (s == "breathing") cfg.scenario = Scenario::breathing;
        else if (s == "priming") cfg.scenario = Scenario::priming;
        else if (s == "lasing") cfg.scenario = Scenario::lasing;
        else {
            config_error(sc->second.line, "unknown scenario '" + s +
                                              "'; expected breathing, priming or lasing (nearest: " +
                                              nearest(s, {"breathing", "priming", "lasing"}) + ")");
        }
    } else if (sc != entries.end()) {
        config_error(sc->second.line, "key 'scenario' only applies to command = simulate");
    }

    const std::vector<KeySpec> specs = command_keys(cfg.command, cfg.scenario);
    const std::vector<std::string> allowed = valid_keys(cfg.command, cfg.scenario);
    for (const auto& [key, entry] : entries) {
        if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
        const std::string hint = nearest(key, allowed);
        std::string extra;
        const std::vector<std::string> owners = owners_of(key);
        if (!owners.empty()) {
            extra = " (it belongs to " + join(owners) + ")";
        }
        config_error(entry.line, "unknown key '" + key + "'" + extra + "; nearest valid key is '" +
                                     hint + "'");
    }

    if (auto it = entries.find("seed"); it != entries.end()) {
        const std::string& v = it->second.value;
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
        if (ec != std::errc{} || ptr != v.data() + v.size()) {
            config_error(it->second.line, "key 'seed' expects an unsigned 64-bit integer, got '" + v + "'");
        }
        cfg.seed = seed;
    }
    if (auto it = entries.find("output_dir"); it != entries.end()) {
        if (it->second.value.empty()) config_error(it->second.line, "key 'output_dir' is empty");
        cfg.output_dir = it->second.value;
    }

    std::map<std::string, std::size_t> lines;
    for (const KeySpec& spec : specs) {
        auto it = entries.find(spec.name);
        if (it == entries.end()) {
            cfg.params[spec.name] = spec.fallback;
            continue;
        }
        const std::size_t line = it->second.line;
        lines[spec.name] = line;
        const std::string& v = it->second.value;
        if (spec.kind == Kind::text) {
            if (!spec.choices.empty() &&
                std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
                config_error(line, "key '" + spec.name + "' must be one of " + join(spec.choices) +
                                       ", got '" + v + "'");
            }
            cfg.params[spec.name] = v;
            continue;
        }
        const auto parsed = parse_number(v);
        if (!parsed) {
            config_error(line, "key '" + spec.name + "' expects " +
                                   (spec.kind == Kind::integer ? "an integer" : "a number") +
                                   ", got '" + v + "'");
        }
        if (spec.kind == Kind::integer &&
            (std::floor(*parsed) != *parsed || std::abs(*parsed) > 1e15)) {
            config_error(line, "key '" + spec.name + "' expects an integer, got '" + v + "'");
        }
        check_range(spec, *parsed, line);
        cfg.params[spec.name] = *parsed;
    }

    auto line_of = [&](const std::string& key) {
        auto it = lines.find(key);
        return it == lines.end() ? std::size_t{0} : it->second;
    };
    auto require = [&](bool ok, const std::string& key, const std::string& what) {
        if (!ok) config_error(line_of(key), what);
    };

    switch (cfg.command) {
        case Command::bands: {
            require(cfg.number("omega_max") > cfg.number("omega_min"), "omega_max",
                    "omega_max must exceed omega_min");
            const std::string& segs = cfg.text("segments");
            std::stringstream ss(segs);
            std::string item;
            std::size_t n = 0;
            while (std::getline(ss, item, ',')) {
                const std::string t = trim(item);
                const auto colon = t.find(':');
                const auto len = colon == std::string::npos ? std::nullopt : parse_number(trim(t.substr(0, colon)));
                const auto val = colon == std::string::npos ? std::nullopt : parse_number(trim(t.substr(colon + 1)));
                require(len && val, "segments",
                        "key 'segments' expects 'length:v' pairs separated by commas, got '" + t + "'");
                require(*len > 0.0, "segments", "segment lengths must be positive");
                ++n;
            }
            require(n > 0, "segments", "key 'segments' needs at least one segment");
            break;
        }
        case Command::scatter: {
            const double wmin = cfg.number("omega_min"), wmax = cfg.number("omega_max");
            require(wmax >= wmin, "omega_max", "omega_max must be >= omega_min");
            require(cfg.number("drive_amplitude") <= 0.1 * wmin, "drive_amplitude",
                    "drive_amplitude must not exceed 0.1 * omega_min for a steady state");
            require(wmax / cfg.number("beta") < 2.0, "omega_max",
                    "omega_max must stay below 2 beta (grid cutoff)");
            require(cfg.number("qubit_epsilon") != 0.0 || cfg.number("qubit_delta") != 0.0,
                    "qubit_epsilon", "qubit splitting must be nonzero");
            require(cfg.count("sponge_width") * 4 < 2 * cfg.count("half_length") + 1,
                    "sponge_width", "sponge_width too large for half_length");
            break;
        }
        case Command::permittivity:
            require(cfg.number("omega_max") >= cfg.number("omega_min"), "omega_max",
                    "omega_max must be >= omega_min");
            break;
        case Command::simulate:
            if (cfg.scenario == Scenario::breathing) {
                const double w = std::hypot(cfg.number("qubit_epsilon"), cfg.number("qubit_delta"));
                require(w > 0.0, "qubit_epsilon", "qubit splitting must be nonzero");
                require(cfg.number("duration") >= 4.0 * kTwoPi / w * (1.0 - 1e-12), "duration",
                        "duration must cover at least 4 beat periods (2 pi / omega each)");
            } else if (cfg.scenario == Scenario::priming) {
                require(cfg.number("carrier_k") < 0.25 * std::numbers::pi, "carrier_k",
                        "carrier_k must satisfy k dxi < pi/4");
            } else if (cfg.scenario == Scenario::lasing) {
                const std::vector<double> a = split_numbers(cfg.text("amplitudes"), "amplitudes",
                                                            line_of("amplitudes"));
                for (double v : a) {
                    require(v >= 0.0, "amplitudes", "amplitudes must be >= 0");
                }
                require(cfg.number("carrier_k") < 0.25 * std::numbers::pi, "carrier_k",
                        "carrier_k must satisfy k dxi < pi/4");
            }
            break;
        case Command::temps: break;
    }
    return cfg;
}

std::string echo_config(const RunConfig& cfg) {
    std::map<std::string, std::string> all;
    all["command"] = to_string(cfg.command);
    if (cfg.command == Command::simulate) all["scenario"] = to_string(cfg.scenario);
    all["seed"] = std::to_string(cfg.seed);
    all["output_dir"] = cfg.output_dir;
    for (const auto& [k, v] : cfg.params) {
        all[k] = std::holds_alternative<double>(v) ? format_number(std::get<double>(v))
                                                   : std::get<std::string>(v);
    }
    std::string out;
    for (const auto& [k, v] : all) out += k + " = " + v + "\n";
    return out;
}

}  // namespace qmm
