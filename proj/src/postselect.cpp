#include "eprb/postselect.hpp"

#include "eprb/errors.hpp"

#include <algorithm>
#include <cmath>

namespace eprb {

bool is_coincident(const TrialRecord& trial, CoincidenceWindow window) noexcept
{
    return std::fabs(trial.t1 - trial.t2) < window.width;
}

FilterResult coincidence_filter(std::span<const TrialRecord> trials, CoincidenceWindow window)
{
    FilterResult out;
    out.total = trials.size();
    for (const auto& t : trials)
        if (is_coincident(t, window))
            out.retained.push_back(t);
    return out;
}

bool satisfies(ToyCriterion criterion, int x, int y) noexcept
{
    switch (criterion) {
    case ToyCriterion::sum_plus_two:
        return x + y == 2;
    case ToyCriterion::sum_minus_two:
        return x + y == -2;
    case ToyCriterion::sum_zero:
        return x + y == 0;
    }
    return false;
}

ToyResult toy_postselect(std::span<const std::pair<int, int>> samples, ToyCriterion criterion)
{
    if (samples.empty())
        throw NoDataError("toy_postselect: empty sample");
    ToyResult out;
    for (const auto& [x, y] : samples) {
        if ((x != 1 && x != -1) || (y != 1 && y != -1))
            throw DomainError("toy_postselect: outcomes must be +-1");
        if (satisfies(criterion, x, y)) {
            out.retained.emplace_back(x, y);
            out.estimate.add(x, y);
        }
    }
    if (out.retained.empty())
        throw NoDataError("toy_postselect: no data after post-selection");
    return out;
}

double SweepRow::retention(int pair_index) const noexcept
{
    const auto k = static_cast<std::size_t>(pair_index);
    return total[k] == 0 ? 0.0 : static_cast<double>(retained[k]) / static_cast<double>(total[k]);
}

double SweepRow::retention_min() const noexcept
{
    double m = retention(0);
    for (int k = 1; k < 4; ++k)
        m = std::min(m, retention(k));
    return m;
}

std::vector<SweepRow> window_sweep(const std::array<std::span<const TrialRecord>, 4>& trials_by_setting,
    std::span<const CoincidenceWindow> windows)
{
    for (std::size_t i = 1; i < windows.size(); ++i)
        if (windows[i].width < windows[i - 1].width)
            throw ConfigError("window_sweep: windows must be ascending");
    for (const auto& w : windows)
        if (!(w.width >= 0.0))
            throw ConfigError("window_sweep: window width must be >= 0");

    std::vector<SweepRow> rows;
    rows.reserve(windows.size());
    for (const auto& w : windows) {
        SweepRow row;
        row.width = w.width;
        std::array<CorrelationEstimate, 4> est{};
        for (std::size_t k = 0; k < 4; ++k) {
            row.total[k] = trials_by_setting[k].size();
            for (const auto& t : trials_by_setting[k])
                if (is_coincident(t, w))
                    est[k].add(t.x1, t.x2);
            row.retained[k] = static_cast<std::size_t>(est[k].n_total());
        }
        const bool enough = std::all_of(row.retained.begin(), row.retained.end(), [](auto n) { return n > 0; });
        if (enough)
            row.report = make_chsh_report(est, w.width);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

// Integral of clamp(s, 0, len) ds from -inf to t.
double clamped_ramp_integral(double t, double len) noexcept
{
    if (t <= 0.0)
        return 0.0;
    if (t <= len)
        return 0.5 * t * t;
    return 0.5 * len * len + len * (t - len);
}

// Area of {(x, y) in [x0, x1] x [y0, y1] : y - x < c}.
double area_below_diagonal(double x0, double x1, double y0, double y1, double c) noexcept
{
    const double len = y1 - y0;
    const double k = c - y0;
    return clamped_ramp_integral(x1 + k, len) - clamped_ramp_integral(x0 + k, len);
}

// Pr(|p - Y| < w) for Y uniform on [y0, y1], y1 > y0.
double point_against_interval(double p, double y0, double y1, double w) noexcept
{
    const double lo = std::max(y0, p - w);
    const double hi = std::min(y1, p + w);
    return std::clamp((hi - lo) / (y1 - y0), 0.0, 1.0);
}

} // namespace

double acceptance_probability(double u, double v, double w, double r_min)
{
    if (!(u >= 0.0 && u <= 1.0) || !(v >= 0.0 && v <= 1.0) || !(w >= 0.0) || !(r_min >= 0.0 && r_min < 1.0))
        throw DomainError("acceptance_probability: arguments out of range");

    // X = r1 u uniform on [x0, x1], Y = r2 v uniform on [y0, y1].
    const double x0 = r_min * u, x1 = u;
    const double y0 = r_min * v, y1 = v;
    const bool x_point = !(x1 > x0);
    const bool y_point = !(y1 > y0);

    if (x_point && y_point)
        return std::fabs(x0 - y0) < w ? 1.0 : 0.0;
    if (x_point)
        return point_against_interval(x0, y0, y1, w);
    if (y_point)
        return point_against_interval(y0, x0, x1, w);

    if (std::max(x1 - y0, y1 - x0) <= w)
        return 1.0;
    if (std::max(x0 - y1, y0 - x1) >= w)
        return 0.0;

    const double band = area_below_diagonal(x0, x1, y0, y1, w) - area_below_diagonal(x0, x1, y0, y1, -w);
    return std::clamp(band / ((x1 - x0) * (y1 - y0)), 0.0, 1.0);
}

} // namespace eprb
