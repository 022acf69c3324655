#include "eprb/protocols.hpp"

#include "eprb/errors.hpp"
#include "eprb/parallel.hpp"

#include <string>

namespace eprb {

int scheduled_pair(ScheduleKind schedule, std::uint64_t seed, std::uint64_t index, std::uint64_t total) noexcept
{
    if (schedule == ScheduleKind::random) {
        Substream s(seed, StreamTag::setting, index);
        return static_cast<int>(s.below(setting_pair_count));
    }
    if (total == 0)
        return 0;
    const auto k = static_cast<int>(index * setting_pair_count / total);
    return k < setting_pair_count ? k : setting_pair_count - 1;
}

int SpreadsheetRow::chsh_identity() const noexcept
{
    return x[0] * x[2] + x[0] * x[3] + x[1] * x[2] - x[1] * x[3];
}

PairState pair_for_trial(std::uint64_t seed, std::uint64_t index, double r_min)
{
    Substream s(seed, StreamTag::pair, index);
    return sample_pair(s, r_min);
}

namespace {

void require_positive(std::int64_t n, const char* what)
{
    if (n < 1)
        throw ConfigError(std::string(what) + " must be >= 1, got " + std::to_string(n));
}

TrialRecord make_trial(std::int64_t index, int pair_index, double a, double b, const DetectionEvent& alice,
    const DetectionEvent& bob)
{
    return {index, pair_index, a, b, alice.outcome, bob.outcome, alice.delay, bob.delay};
}

} // namespace

std::vector<TrialRecord> run_protocol1(std::int64_t n_per_setting, const SettingsQuadruple& settings,
    ScheduleKind schedule, const ModelConfig& model, std::uint64_t seed, unsigned threads)
{
    require_positive(n_per_setting, "n_per_setting");
    model.validate();
    const auto total = static_cast<std::size_t>(n_per_setting) * setting_pair_count;
    std::vector<TrialRecord> out(total);
    parallel_for(total, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const int k = scheduled_pair(schedule, seed, i, total);
            const double a = settings.alice(SettingsQuadruple::alice_choice(k));
            const double b = settings.bob(SettingsQuadruple::bob_choice(k));
            const PairState p = pair_for_trial(seed, i, model.r_min);
            out[i] = make_trial(static_cast<std::int64_t>(i), k, a, b,
                measure(p.phi, StationConfig::at(a, model), p.r1),
                measure(p.phi + pi / 2.0, StationConfig::at(b, model), p.r2));
        }
    });
    return out;
}

std::vector<SpreadsheetRow> run_protocol2(std::int64_t n_rows, const SettingsQuadruple& settings,
    const ModelConfig& model, std::uint64_t seed, unsigned threads)
{
    require_positive(n_rows, "n_rows");
    model.validate();
    const auto total = static_cast<std::size_t>(n_rows);
    std::vector<SpreadsheetRow> out(total);
    parallel_for(total, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const PairState p = pair_for_trial(seed, i, model.r_min);
            SpreadsheetRow& row = out[i];
            row.trial_index = static_cast<std::int64_t>(i);
            for (int c = 0; c < 2; ++c) {
                const auto alice = measure(p.phi, StationConfig::at(settings.alice(c), model), p.r1);
                const auto bob = measure(p.phi + pi / 2.0, StationConfig::at(settings.bob(c), model), p.r2);
                row.x[static_cast<std::size_t>(c)] = alice.outcome;
                row.t[static_cast<std::size_t>(c)] = alice.delay;
                row.x[static_cast<std::size_t>(2 + c)] = bob.outcome;
                row.t[static_cast<std::size_t>(2 + c)] = bob.delay;
            }
        }
    });
    return out;
}

namespace {

TrialRecord row_as_trial(const SpreadsheetRow& row, const SettingsQuadruple& settings, int k)
{
    const int ca = SettingsQuadruple::alice_choice(k);
    const int cb = SettingsQuadruple::bob_choice(k);
    return {row.trial_index, k, settings.alice(ca), settings.bob(cb), row.x_alice(ca), row.x_bob(cb),
        row.t_alice(ca), row.t_bob(cb)};
}

} // namespace

std::vector<TrialRecord> extract_observed(std::span<const SpreadsheetRow> rows,
    const SettingsQuadruple& settings, ScheduleKind schedule, std::uint64_t seed)
{
    if (rows.empty())
        throw NoDataError("extract_observed: no spreadsheet rows");
    std::vector<TrialRecord> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int k = scheduled_pair(schedule, seed, i, rows.size());
        out.push_back(row_as_trial(rows[i], settings, k));
    }
    return out;
}

std::vector<TrialRecord> project_rows(std::span<const SpreadsheetRow> rows,
    const SettingsQuadruple& settings, int pair_index)
{
    std::vector<TrialRecord> out;
    out.reserve(rows.size());
    for (const auto& row : rows)
        out.push_back(row_as_trial(row, settings, pair_index));
    return out;
}

Response model_response()
{
    return [](const ResponseContext& ctx) {
        const auto alice = measure(ctx.pair.phi, StationConfig::at(ctx.angle_a, ctx.model), ctx.pair.r1);
        const auto bob = measure(ctx.pair.phi + pi / 2.0, StationConfig::at(ctx.angle_b, ctx.model), ctx.pair.r2);
        return Outcomes{alice.outcome, bob.outcome};
    };
}

Response maximal_contextual_response()
{
    return [](const ResponseContext& ctx) {
        static constexpr std::array<int, 4> product{1, 1, 1, -1};
        const int x1 = ctx.instrument.lambda_a < 0.5 ? 1 : -1;
        return Outcomes{x1, x1 * product[static_cast<std::size_t>(ctx.pair_index)]};
    };
}

Response table_response(std::vector<Outcomes> table, int bins)
{
    if (bins < 1)
        throw ConfigError("table_response: bins must be >= 1");
    if (table.size() != static_cast<std::size_t>(setting_pair_count * bins * bins))
        throw ConfigError("table_response: table must hold 4 * bins * bins entries");
    return [table = std::move(table), bins](const ResponseContext& ctx) {
        const auto bin = [bins](double u) {
            const int b = static_cast<int>(u * bins);
            return b < bins ? b : bins - 1;
        };
        const auto idx = (ctx.pair_index * bins + bin(ctx.instrument.lambda_a)) * bins + bin(ctx.instrument.lambda_b);
        return table[static_cast<std::size_t>(idx)];
    };
}

std::vector<TrialRecord> augmented_instrument_run(std::int64_t n_per_setting, const SettingsQuadruple& settings,
    ScheduleKind schedule, const Response& response, const ModelConfig& model, std::uint64_t seed,
    unsigned threads)
{
    require_positive(n_per_setting, "n_per_setting");
    model.validate();
    if (!response)
        throw ConfigError("augmented_instrument_run: empty response");
    const auto total = static_cast<std::size_t>(n_per_setting) * setting_pair_count;
    std::vector<TrialRecord> out(total);
    parallel_for(total, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const int k = scheduled_pair(schedule, seed, i, total);
            ResponseContext ctx;
            ctx.pair = pair_for_trial(seed, i, model.r_min);
            Substream inst(seed, StreamTag::instrument, i);
            ctx.instrument.lambda_a = inst.uniform();
            ctx.instrument.lambda_b = inst.uniform();
            ctx.pair_index = k;
            ctx.angle_a = settings.alice(SettingsQuadruple::alice_choice(k));
            ctx.angle_b = settings.bob(SettingsQuadruple::bob_choice(k));
            ctx.model = model;
            const Outcomes x = response(ctx);
            if ((x.x1 != 1 && x.x1 != -1) || (x.x2 != 1 && x.x2 != -1))
                throw ModelError("response returned outcomes (" + std::to_string(x.x1) + ", "
                    + std::to_string(x.x2) + ") at trial " + std::to_string(i));
            const auto alice = measure(ctx.pair.phi, StationConfig::at(ctx.angle_a, model), ctx.pair.r1);
            const auto bob = measure(ctx.pair.phi + pi / 2.0, StationConfig::at(ctx.angle_b, model), ctx.pair.r2);
            out[i] = {static_cast<std::int64_t>(i), k, ctx.angle_a, ctx.angle_b, x.x1, x.x2, alice.delay, bob.delay};
        }
    });
    return out;
}

} // namespace eprb
