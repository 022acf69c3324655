#pragma once

#include "eprb/config.hpp"
#include "eprb/postselect.hpp"
#include "eprb/stats.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eprb {

struct ReferenceCurves {
    Eigen::Vector4d sawtooth = Eigen::Vector4d::Zero();
    Eigen::Vector4d quantum = Eigen::Vector4d::Zero();
    ChshValue sawtooth_chsh;
    ChshValue quantum_chsh;
};

ReferenceCurves reference_curves(const SettingsQuadruple& settings);

struct RunSummary {
    ExperimentConfig config;
    std::size_t n_events = 0;
    std::vector<SweepRow> sweep;
    /// All-columns CHSH of the counterfactual spreadsheet (p2 only).
    std::optional<ChshReport> spreadsheet;
    ReferenceCurves reference;
    double wall_seconds = 0.0; ///< never written to data files
};

/// Generation, window sweep and statistics without touching the disk.
/// `events` receives the event log in its CSV form when non-null.
RunSummary compute_experiment(const ExperimentConfig& config, std::ostream* events = nullptr);

/// compute_experiment plus `events.csv`, `summary.json` and `sweep.csv`
/// under config.output_dir. I/O failures throw std::runtime_error naming
/// the path.
RunSummary run_experiment(const ExperimentConfig& config);

nlohmann::json summary_to_json(const RunSummary& summary);

inline constexpr const char* sweep_csv_header = "window_over_T,E_ab,E_abp,E_apb,E_apbp,S,retention_min,S_fixed,status";

/// Plot-ready sweep table. `S` is the largest |S| over sign placements and
/// `S_fixed` the fixed-placement value; rows without data for some setting
/// pair carry status `insufficient_data` and empty statistic fields.
std::string emit_sweep_plot_data(const RunSummary& summary);

struct SweepPoint {
    double window_over_t = 0.0;
    std::optional<std::array<double, 4>> e;
    std::optional<double> s;
    double retention_min = 0.0;
    std::optional<double> s_fixed;
    bool insufficient_data = false;
};

std::vector<SweepPoint> read_sweep_csv(std::istream& in);

} // namespace eprb
