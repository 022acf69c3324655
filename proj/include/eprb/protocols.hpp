#pragma once

#include "eprb/model.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace eprb {

/// Alice's settings (a1, a1'), Bob's settings (a2, a2').
struct SettingsQuadruple {
    double a1 = 0.0;
    double a1p = pi / 4.0;
    double a2 = pi / 8.0;
    double a2p = 3.0 * pi / 8.0;

    /// Index of Alice's setting (0 = a1, 1 = a1') for a setting pair.
    static constexpr int alice_choice(int pair_index) noexcept { return pair_index / 2; }
    /// Index of Bob's setting (0 = a2, 1 = a2') for a setting pair.
    static constexpr int bob_choice(int pair_index) noexcept { return pair_index % 2; }

    double alice(int choice) const noexcept { return choice == 0 ? a1 : a1p; }
    double bob(int choice) const noexcept { return choice == 0 ? a2 : a2p; }
};

/// Setting pairs in CHSH order: (a1,a2), (a1,a2'), (a1',a2), (a1',a2').
inline constexpr int setting_pair_count = 4;

enum class ScheduleKind { block, random };

/// Which setting pair trial `index` of `total` uses. The block schedule
/// gives pair k the k-th quarter of the trials; the random schedule draws
/// the pair from the (seed, setting, index) substream.
int scheduled_pair(ScheduleKind schedule, std::uint64_t seed, std::uint64_t index, std::uint64_t total) noexcept;

struct TrialRecord {
    std::int64_t trial_index = 0;
    int pair_index = 0;
    double setting_a = 0.0;
    double setting_b = 0.0;
    int x1 = 1;
    int x2 = 1;
    double t1 = 0.0;
    double t2 = 0.0;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// One counterfactual line: outcomes and delays for a1, a1', a2, a2'.
struct SpreadsheetRow {
    std::int64_t trial_index = 0;
    std::array<int, 4> x{1, 1, 1, 1};
    std::array<double, 4> t{};

    int x_alice(int choice) const noexcept { return x[static_cast<std::size_t>(choice)]; }
    int x_bob(int choice) const noexcept { return x[static_cast<std::size_t>(2 + choice)]; }
    double t_alice(int choice) const noexcept { return t[static_cast<std::size_t>(choice)]; }
    double t_bob(int choice) const noexcept { return t[static_cast<std::size_t>(2 + choice)]; }

    /// x_a1 x_a2 + x_a1 x_a2' + x_a1' x_a2 - x_a1' x_a2'; always +-2.
    int chsh_identity() const noexcept;

    friend bool operator==(const SpreadsheetRow&, const SpreadsheetRow&) = default;
};

/// Hidden state of the pair emitted at a given trial index under `seed`.
PairState pair_for_trial(std::uint64_t seed, std::uint64_t index, double r_min);

/// A fresh pair per trial; each side measured once at the scheduled setting.
std::vector<TrialRecord> run_protocol1(std::int64_t n_per_setting, const SettingsQuadruple& settings,
    ScheduleKind schedule, const ModelConfig& model, std::uint64_t seed, unsigned threads = 1);

/// A fresh pair per row; all four settings evaluated on it.
std::vector<SpreadsheetRow> run_protocol2(std::int64_t n_rows, const SettingsQuadruple& settings,
    const ModelConfig& model, std::uint64_t seed, unsigned threads = 1);

/// Keeps one Alice and one Bob entry per row, chosen by the schedule with
/// the same (seed, index) keys run_protocol1 uses.
std::vector<TrialRecord> extract_observed(std::span<const SpreadsheetRow> rows,
    const SettingsQuadruple& settings, ScheduleKind schedule, std::uint64_t seed);

/// All rows projected onto one setting pair, as if that pair were measured.
std::vector<TrialRecord> project_rows(std::span<const SpreadsheetRow> rows,
    const SettingsQuadruple& settings, int pair_index);

// Instrument-augmented model: x_a = f_a(pair, instrument microstate, a).

struct InstrumentState {
    double lambda_a = 0.0;
    double lambda_b = 0.0;
};

struct ResponseContext {
    PairState pair;
    InstrumentState instrument;
    int pair_index = 0;
    double angle_a = 0.0;
    double angle_b = 0.0;
    ModelConfig model;
};

struct Outcomes {
    int x1 = 1;
    int x2 = 1;
};

using Response = std::function<Outcomes(const ResponseContext&)>;

/// The emitter/polarizer model; ignores the instrument variables.
Response model_response();

/// Extension beyond the original model: instrument microstates conditioned
/// on the realized setting pair so that E = +1, +1, +1, -1 and S = 4.
Response maximal_contextual_response();

/// Lookup-table response. The table has 4 * bins * bins entries indexed by
/// (pair_index, lambda_a bin, lambda_b bin), row-major.
Response table_response(std::vector<Outcomes> table, int bins);

/// Delays always come from the model; outcomes come from `response`.
/// Throws ModelError if the response returns anything but +-1.
std::vector<TrialRecord> augmented_instrument_run(std::int64_t n_per_setting, const SettingsQuadruple& settings,
    ScheduleKind schedule, const Response& response, const ModelConfig& model, std::uint64_t seed,
    unsigned threads = 1);

} // namespace eprb
