#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "enpsim/mobility.hpp"
#include "enpsim/protocol_engine.hpp"
#include "enpsim/radio_channel.hpp"
#include "enpsim/slot_hash.hpp"

namespace enpsim {

struct RunParams {
    std::uint32_t epochs = 1000;
    std::uint32_t warmup_epochs = 20;
    std::uint64_t master_seed = 1;
    std::uint32_t replications = 1;
};

struct SimConfig {
    std::string preset = "paper-fig1b";
    RoadGeometry geometry;
    RadioParams radio;
    HashParams hash;
    ReseedPolicy reseed = ReseedPolicy::per_round;
    ProbeScope probe_scope = ProbeScope::network;
    TimingParams timing;
    FleetParams fleet;
    RunParams run;
};

/// Configuration problem. `field` is the dotted key, `line` the 1-based
/// source line (0 when the value came from a default or preset).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, std::size_t line, const std::string& message);

    const std::string& field() const { return field_; }
    std::size_t line() const { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

std::vector<std::string> preset_names();

/// Throws ConfigError for an unknown name.
SimConfig make_preset(std::string_view name);

/// `section.key = value` lines, `#` comments, blank lines ignored. A
/// `preset = NAME` line replaces everything set so far with that preset.
/// The result is validated.
SimConfig parse_config(std::string_view text);

SimConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the first offending field.
void validate(const SimConfig& config);

/// Every key with its current value, one `key = value` per line, in the
/// same syntax parse_config accepts.
std::string describe(const SimConfig& config);

}  // namespace enpsim
