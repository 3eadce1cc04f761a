#pragma once

// Flat `key = value` run configuration.
//
//     # comment
//     command = temps
//     regime  = weak_disorder
//
// Every command has a fixed key set with defaults; unknown keys, type
// mismatches and out-of-range values are rejected with the line number.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qmm {

enum class Command { scatter, bands, simulate, temps, permittivity };
enum class Scenario { none, breathing, priming, lasing };

const char* to_string(Command c);
const char* to_string(Scenario s);

using ConfigValue = std::variant<double, std::string>;

struct RunConfig {
    Command command = Command::temps;
    Scenario scenario = Scenario::none;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    /// Every key of the command, defaults filled in.
    std::map<std::string, ConfigValue> params;

    double number(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    /// Comma-separated numbers.
    std::vector<double> numbers(const std::string& key) const;
};

RunConfig parse_config(std::string_view text);

/// Canonical `key = value` listing of the full configuration, sorted by key.
std::string echo_config(const RunConfig& config);

/// Keys accepted for a command (and scenario), sorted.
std::vector<std::string> valid_keys(Command c, Scenario s);

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace qmm
