#pragma once

#include "eprb/model.hpp"
#include "eprb/protocols.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace eprb {

enum class ProtocolKind { p1, p2, p2_extracted, augmented };
enum class ResponseKind { model, maximal };

struct ExperimentConfig {
    std::uint64_t seed = 1;
    ProtocolKind protocol = ProtocolKind::p1;
    std::int64_t n_per_setting = 100000;
    SettingsQuadruple settings;
    ScheduleKind schedule = ScheduleKind::block;
    ModelConfig model;
    /// Coincidence windows in units of T, strictly ascending.
    std::vector<double> windows{0.00025, 0.001, 0.004, 0.016, 0.064, 0.25, 1.0};
    ResponseKind response = ResponseKind::model;
    std::filesystem::path output_dir = "out";
    unsigned threads = 1;

    void validate() const;
};

/// Parses a flat `key = value` document. `#` starts a comment. Every error
/// names the key and the 1-based line.
ExperimentConfig parse_config(std::string_view source);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses a radian angle: a plain number or a multiple of pi such as
/// `pi/8`, `3*pi/8`, `-pi`. Degree suffixes are rejected.
double parse_angle(std::string_view text);

std::string to_string(ProtocolKind p);
std::string to_string(ScheduleKind s);
std::string to_string(ResponseKind r);

} // namespace eprb
