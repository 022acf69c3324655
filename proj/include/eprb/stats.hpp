#pragma once

#include "eprb/model.hpp"
#include "eprb/protocols.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace eprb {

/// Joint probabilities of (x1, x2) in the order (+,+), (+,-), (-,+), (-,-).
using JointDistribution = Eigen::Array4d;

/// Joint outcome counts and the product-moment correlation they imply.
struct CorrelationEstimate {
    std::int64_t n_pp = 0;
    std::int64_t n_pm = 0;
    std::int64_t n_mp = 0;
    std::int64_t n_mm = 0;

    std::int64_t n_total() const noexcept { return n_pp + n_pm + n_mp + n_mm; }

    /// (n_pp + n_mm - n_pm - n_mp) / n_total. Throws NoDataError when empty.
    double e_value() const;

    /// Standard error of e_value, sqrt((1 - E^2) / n).
    double standard_error() const;

    JointDistribution frequencies() const;

    void add(int x1, int x2) noexcept;

    CorrelationEstimate& operator+=(const CorrelationEstimate& other) noexcept;
    friend bool operator==(const CorrelationEstimate&, const CorrelationEstimate&) = default;
};

CorrelationEstimate estimate_correlation(std::span<const std::pair<int, int>> pairs);
CorrelationEstimate estimate_correlation(std::span<const TrialRecord> trials);

/// Fixed placement S = E_ab + E_ab' + E_a'b - E_a'b' and the largest |S|
/// over the four placements of the single minus sign.
struct ChshValue {
    double s_value = 0.0;
    double s_max = 0.0;
    /// Index of the term carrying the minus sign in the maximizing placement.
    int max_placement = 3;
    /// Signed S under the maximizing placement.
    double s_max_signed = 0.0;
};

/// Throws DomainError if any correlation lies outside [-1, 1].
ChshValue chsh(double e_ab, double e_abp, double e_apb, double e_apbp);
ChshValue chsh(const Eigen::Vector4d& e);

struct ChshReport {
    std::array<CorrelationEstimate, 4> estimates;
    Eigen::Vector4d e = Eigen::Vector4d::Zero();
    ChshValue value;
    std::optional<double> window; ///< time units; empty when no window was applied
};

/// Throws NoDataError if any setting pair has no data.
ChshReport make_chsh_report(const std::array<CorrelationEstimate, 4>& estimates,
    std::optional<double> window = std::nullopt);

/// Estimates for each setting pair of a trial sequence, keyed by pair_index.
std::array<CorrelationEstimate, 4> estimates_by_pair(std::span<const TrialRecord> trials);

/// CHSH over all four columns of a counterfactual spreadsheet.
ChshReport spreadsheet_chsh(std::span<const SpreadsheetRow> rows);

enum class GillProtocol { p1, p2_extracted, p2_full };

struct GillOptions {
    std::int64_t m_runs = 100;
    std::int64_t n_per_setting = 10000;
    SettingsQuadruple settings;
    ScheduleKind schedule = ScheduleKind::block;
    GillProtocol protocol = GillProtocol::p1;
    ModelConfig model;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct GillResult {
    /// Fraction of runs with max-placement |S| > 2 (strict).
    double violation_fraction = 0.0;
    /// Fraction of runs with the fixed-placement S >= 2.
    double one_sided_fraction = 0.0;
    std::vector<double> s_values;
    std::vector<double> s_max_values;
};

/// Repeats an unfiltered experiment m_runs times with derived seeds and
/// counts finite-sample CHSH violations.
GillResult gill_conjecture_experiment(const GillOptions& options);

/// Post-selected distribution of phi on a grid over [0, pi), with the
/// deterministic outcome kernels evaluated at each bin center.
struct ContextualModel {
    double alpha = 0.0;
    double beta = 0.0;
    double window_over_t = 1.0;
    ModelConfig model;
    Eigen::ArrayXd phi;     ///< bin centers
    Eigen::ArrayXd weights; ///< P(phi | alpha, beta, W), sums to 1
    Eigen::ArrayXi x1;
    Eigen::ArrayXi x2;
};

inline constexpr int default_contextual_bins = 360;

/// Bin weights are proportional to the window acceptance probability of the
/// bin center. Throws ConfigError for a non-positive window or bin count,
/// ModelError when every weight vanishes.
ContextualModel build_contextual_model(double alpha, double beta, double window_over_t, const ModelConfig& model,
    int bins = default_contextual_bins);

JointDistribution contextual_model_predict(const ContextualModel& model);

/// E = P(+,+) + P(-,-) - P(+,-) - P(-,+).
double correlation_of(const JointDistribution& p) noexcept;

/// Half the L1 distance. Throws DomainError unless both inputs are
/// nonnegative and sum to 1 within 1e-9.
double compare_distributions(const JointDistribution& p, const JointDistribution& q);

} // namespace eprb
