#pragma once

#include "eprb/protocols.hpp"
#include "eprb/stats.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace eprb {

/// Maximum |t1 - t2| (exclusive) for a pair to count as a coincidence.
struct CoincidenceWindow {
    double width = 0.0; ///< time units

    static CoincidenceWindow fraction_of(double w_over_t, double time_scale) noexcept
    {
        return {w_over_t * time_scale};
    }
};

struct FilterResult {
    std::vector<TrialRecord> retained;
    std::size_t total = 0;

    double retention() const noexcept
    {
        return total == 0 ? 0.0 : static_cast<double>(retained.size()) / static_cast<double>(total);
    }
};

/// Keeps trials with |t1 - t2| < width, in input order.
FilterResult coincidence_filter(std::span<const TrialRecord> trials, CoincidenceWindow window);

bool is_coincident(const TrialRecord& trial, CoincidenceWindow window) noexcept;

enum class ToyCriterion { sum_plus_two, sum_minus_two, sum_zero };

bool satisfies(ToyCriterion criterion, int x, int y) noexcept;

struct ToyResult {
    std::vector<std::pair<int, int>> retained;
    /// Joint frequency table of the retained pairs plus E.
    CorrelationEstimate estimate;
};

/// Throws NoDataError if the input is empty or nothing survives.
ToyResult toy_postselect(std::span<const std::pair<int, int>> samples, ToyCriterion criterion);

struct SweepRow {
    double width = 0.0; ///< time units
    std::array<std::size_t, 4> retained{};
    std::array<std::size_t, 4> total{};
    /// Empty when some setting pair retained nothing.
    std::optional<ChshReport> report;

    bool insufficient_data() const noexcept { return !report.has_value(); }
    double retention(int pair_index) const noexcept;
    double retention_min() const noexcept;
};

/// One row per window; windows must be ascending. Each of the four trial
/// sequences must come from a single setting pair, in CHSH order.
std::vector<SweepRow> window_sweep(const std::array<std::span<const TrialRecord>, 4>& trials_by_setting,
    std::span<const CoincidenceWindow> windows);

/// Pr(|r1 u - r2 v| < w) for r1, r2 independent uniform on [r_min, 1].
/// u and v are the |sin|^d factors and w is the window in units of T.
/// Computed as the exact area of a diagonal band inside a rectangle.
double acceptance_probability(double u, double v, double w, double r_min);

} // namespace eprb
