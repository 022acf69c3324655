#include "eprb/stats.hpp"

#include "eprb/errors.hpp"
#include "eprb/parallel.hpp"
#include "eprb/postselect.hpp"

#include <cmath>
#include <string>

namespace eprb {

double CorrelationEstimate::e_value() const
{
    const auto n = n_total();
    if (n <= 0)
        throw NoDataError("correlation estimate has no data");
    return static_cast<double>((n_pp + n_mm) - (n_pm + n_mp)) / static_cast<double>(n);
}

double CorrelationEstimate::standard_error() const
{
    const double e = e_value();
    return std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(n_total()));
}

JointDistribution CorrelationEstimate::frequencies() const
{
    const auto n = n_total();
    if (n <= 0)
        throw NoDataError("correlation estimate has no data");
    JointDistribution p;
    p << static_cast<double>(n_pp), static_cast<double>(n_pm), static_cast<double>(n_mp), static_cast<double>(n_mm);
    return p / static_cast<double>(n);
}

void CorrelationEstimate::add(int x1, int x2) noexcept
{
    if (x1 > 0)
        ++(x2 > 0 ? n_pp : n_pm);
    else
        ++(x2 > 0 ? n_mp : n_mm);
}

CorrelationEstimate& CorrelationEstimate::operator+=(const CorrelationEstimate& other) noexcept
{
    n_pp += other.n_pp;
    n_pm += other.n_pm;
    n_mp += other.n_mp;
    n_mm += other.n_mm;
    return *this;
}

CorrelationEstimate estimate_correlation(std::span<const std::pair<int, int>> pairs)
{
    if (pairs.empty())
        throw NoDataError("estimate_correlation: empty sample");
    CorrelationEstimate est;
    for (const auto& [x1, x2] : pairs)
        est.add(x1, x2);
    return est;
}

CorrelationEstimate estimate_correlation(std::span<const TrialRecord> trials)
{
    if (trials.empty())
        throw NoDataError("estimate_correlation: empty sample");
    CorrelationEstimate est;
    for (const auto& t : trials)
        est.add(t.x1, t.x2);
    return est;
}

ChshValue chsh(const Eigen::Vector4d& e)
{
    if ((e.array().abs() > 1.0).any() || !e.allFinite())
        throw DomainError("chsh: correlations must lie in [-1, 1]");
    // Moving the minus sign onto term k gives sum - 2 e_k.
    const Eigen::Vector4d placements = Eigen::Vector4d::Constant(e.sum()) - 2.0 * e;
    ChshValue out;
    out.s_value = placements(3);
    Eigen::Index best = 0;
    placements.cwiseAbs().maxCoeff(&best);
    out.max_placement = static_cast<int>(best);
    out.s_max_signed = placements(best);
    out.s_max = std::fabs(out.s_max_signed);
    return out;
}

ChshValue chsh(double e_ab, double e_abp, double e_apb, double e_apbp)
{
    return chsh(Eigen::Vector4d(e_ab, e_abp, e_apb, e_apbp));
}

ChshReport make_chsh_report(const std::array<CorrelationEstimate, 4>& estimates, std::optional<double> window)
{
    ChshReport r;
    r.estimates = estimates;
    for (int k = 0; k < 4; ++k)
        r.e(k) = estimates[static_cast<std::size_t>(k)].e_value();
    r.value = chsh(r.e);
    r.window = window;
    return r;
}

std::array<CorrelationEstimate, 4> estimates_by_pair(std::span<const TrialRecord> trials)
{
    std::array<CorrelationEstimate, 4> est{};
    for (const auto& t : trials)
        est[static_cast<std::size_t>(t.pair_index)].add(t.x1, t.x2);
    return est;
}

ChshReport spreadsheet_chsh(std::span<const SpreadsheetRow> rows)
{
    if (rows.empty())
        throw NoDataError("spreadsheet_chsh: no rows");
    std::array<CorrelationEstimate, 4> est{};
    for (const auto& row : rows)
        for (int k = 0; k < 4; ++k)
            est[static_cast<std::size_t>(k)].add(row.x_alice(SettingsQuadruple::alice_choice(k)),
                row.x_bob(SettingsQuadruple::bob_choice(k)));
    return make_chsh_report(est);
}

GillResult gill_conjecture_experiment(const GillOptions& options)
{
    if (options.m_runs < 1)
        throw ConfigError("gill_conjecture_experiment: m_runs must be >= 1");
    if (options.n_per_setting < 1)
        throw ConfigError("gill_conjecture_experiment: n_per_setting must be >= 1");

    const auto runs = static_cast<std::size_t>(options.m_runs);
    GillResult out;
    out.s_values.resize(runs);
    out.s_max_values.resize(runs);
    parallel_for(runs, options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const std::uint64_t run_seed = derive_seed(options.seed, j);
            ChshReport report;
            switch (options.protocol) {
            case GillProtocol::p1: {
                const auto trials = run_protocol1(options.n_per_setting, options.settings, options.schedule,
                    options.model, run_seed);
                report = make_chsh_report(estimates_by_pair(trials));
                break;
            }
            case GillProtocol::p2_extracted: {
                const auto rows = run_protocol2(options.n_per_setting * setting_pair_count, options.settings,
                    options.model, run_seed);
                const auto trials = extract_observed(rows, options.settings, options.schedule, run_seed);
                report = make_chsh_report(estimates_by_pair(trials));
                break;
            }
            case GillProtocol::p2_full: {
                const auto rows = run_protocol2(options.n_per_setting * setting_pair_count, options.settings,
                    options.model, run_seed);
                report = spreadsheet_chsh(rows);
                break;
            }
            }
            out.s_values[j] = report.value.s_value;
            out.s_max_values[j] = report.value.s_max;
        }
    });

    std::size_t violations = 0, one_sided = 0;
    for (std::size_t j = 0; j < runs; ++j) {
        violations += out.s_max_values[j] > 2.0 ? 1 : 0;
        one_sided += out.s_values[j] >= 2.0 ? 1 : 0;
    }
    out.violation_fraction = static_cast<double>(violations) / static_cast<double>(runs);
    out.one_sided_fraction = static_cast<double>(one_sided) / static_cast<double>(runs);
    return out;
}

ContextualModel build_contextual_model(double alpha, double beta, double window_over_t, const ModelConfig& model,
    int bins)
{
    model.validate();
    if (!(window_over_t > 0.0))
        throw ConfigError("build_contextual_model: window must be positive");
    if (bins < 1)
        throw ConfigError("build_contextual_model: bins must be >= 1");

    ContextualModel m;
    m.alpha = alpha;
    m.beta = beta;
    m.window_over_t = window_over_t;
    m.model = model;
    // Outcomes and delays have period pi in phi, so [0, pi) covers the support.
    m.phi = (Eigen::ArrayXd::LinSpaced(bins, 0.0, bins - 1.0) + 0.5) * (pi / bins);
    m.weights.resize(bins);
    m.x1.resize(bins);
    m.x2.resize(bins);
    const double w = std::min(window_over_t, 1.0);
    for (int j = 0; j < bins; ++j) {
        const double phi = m.phi(j);
        const double arg_a = 2.0 * (alpha - phi);
        const double arg_b = 2.0 * (beta - phi - pi / 2.0);
        m.x1(j) = std::cos(arg_a) >= 0.0 ? 1 : -1;
        m.x2(j) = std::cos(arg_b) >= 0.0 ? 1 : -1;
        m.weights(j) = acceptance_probability(abs_pow(std::sin(arg_a), model.delay_exponent),
            abs_pow(std::sin(arg_b), model.delay_exponent), w, model.r_min);
    }
    const double total = m.weights.sum();
    if (!(total > 0.0))
        throw ModelError("build_contextual_model: window rejects every bin (degenerate model)");
    m.weights /= total;
    return m;
}

JointDistribution contextual_model_predict(const ContextualModel& model)
{
    JointDistribution p = JointDistribution::Zero();
    for (Eigen::Index j = 0; j < model.weights.size(); ++j) {
        const int cell = (model.x1(j) > 0 ? 0 : 2) + (model.x2(j) > 0 ? 0 : 1);
        p(cell) += model.weights(j);
    }
    return p;
}

double correlation_of(const JointDistribution& p) noexcept
{
    return p(0) + p(3) - p(1) - p(2);
}

double compare_distributions(const JointDistribution& p, const JointDistribution& q)
{
    const auto check = [](const JointDistribution& d, const char* name) {
        if (!d.allFinite() || (d < 0.0).any() || std::fabs(d.sum() - 1.0) > 1e-9)
            throw DomainError(std::string("compare_distributions: ") + name + " is not a distribution");
    };
    check(p, "p");
    check(q, "q");
    return 0.5 * (p - q).abs().sum();
}

} // namespace eprb
