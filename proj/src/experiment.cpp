#include "eprb/experiment.hpp"

#include "eprb/errors.hpp"
#include "eprb/io.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

namespace eprb {

ReferenceCurves reference_curves(const SettingsQuadruple& settings)
{
    ReferenceCurves r;
    for (int k = 0; k < setting_pair_count; ++k) {
        const double a = settings.alice(SettingsQuadruple::alice_choice(k));
        const double b = settings.bob(SettingsQuadruple::bob_choice(k));
        r.sawtooth(k) = sawtooth_correlation(a, b);
        r.quantum(k) = quantum_correlation(a, b);
    }
    r.sawtooth_chsh = chsh(r.sawtooth);
    r.quantum_chsh = chsh(r.quantum);
    return r;
}

namespace {

std::vector<CoincidenceWindow> windows_in_time_units(const ExperimentConfig& config)
{
    std::vector<CoincidenceWindow> out;
    for (double w : config.windows)
        out.push_back(CoincidenceWindow::fraction_of(w, config.model.time_scale));
    return out;
}

std::array<std::vector<TrialRecord>, 4> split_by_pair(const std::vector<TrialRecord>& trials)
{
    std::array<std::vector<TrialRecord>, 4> out;
    for (const auto& t : trials)
        out[static_cast<std::size_t>(t.pair_index)].push_back(t);
    return out;
}

std::vector<SweepRow> sweep(const std::array<std::vector<TrialRecord>, 4>& by_pair, const ExperimentConfig& config)
{
    const auto windows = windows_in_time_units(config);
    return window_sweep({std::span<const TrialRecord>(by_pair[0]), std::span<const TrialRecord>(by_pair[1]),
                            std::span<const TrialRecord>(by_pair[2]), std::span<const TrialRecord>(by_pair[3])},
        windows);
}

} // namespace

RunSummary compute_experiment(const ExperimentConfig& config, std::ostream* events)
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    RunSummary summary;
    summary.config = config;
    summary.reference = reference_curves(config.settings);

    const auto n = config.n_per_setting;
    switch (config.protocol) {
    case ProtocolKind::p2: {
        const auto rows = run_protocol2(n * setting_pair_count, config.settings, config.model, config.seed,
            config.threads);
        if (events)
            write_spreadsheet_csv(*events, rows);
        summary.n_events = rows.size();
        summary.spreadsheet = spreadsheet_chsh(rows);
        std::array<std::vector<TrialRecord>, 4> by_pair;
        for (int k = 0; k < setting_pair_count; ++k)
            by_pair[static_cast<std::size_t>(k)] = project_rows(rows, config.settings, k);
        summary.sweep = sweep(by_pair, config);
        break;
    }
    case ProtocolKind::p1:
    case ProtocolKind::p2_extracted:
    case ProtocolKind::augmented: {
        std::vector<TrialRecord> trials;
        if (config.protocol == ProtocolKind::p1) {
            trials = run_protocol1(n, config.settings, config.schedule, config.model, config.seed, config.threads);
        } else if (config.protocol == ProtocolKind::p2_extracted) {
            const auto rows = run_protocol2(n * setting_pair_count, config.settings, config.model, config.seed,
                config.threads);
            trials = extract_observed(rows, config.settings, config.schedule, config.seed);
        } else {
            const Response response
                = config.response == ResponseKind::maximal ? maximal_contextual_response() : model_response();
            trials = augmented_instrument_run(n, config.settings, config.schedule, response, config.model,
                config.seed, config.threads);
        }
        if (events)
            write_trials_csv(*events, trials);
        summary.n_events = trials.size();
        summary.sweep = sweep(split_by_pair(trials), config);
        break;
    }
    }

    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

} // namespace

RunSummary run_experiment(const ExperimentConfig& config)
{
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + config.output_dir.string() + "': "
            + ec.message());

    std::ostringstream events;
    RunSummary summary = compute_experiment(config, &events);

    // All computation is done; files are written by this thread only.
    write_file(config.output_dir / "events.csv", events.str());
    write_file(config.output_dir / "summary.json", summary_to_json(summary).dump(2) + "\n");
    write_file(config.output_dir / "sweep.csv", emit_sweep_plot_data(summary));
    return summary;
}

namespace {

nlohmann::json estimate_json(const CorrelationEstimate& e)
{
    return {{"n_pp", e.n_pp}, {"n_pm", e.n_pm}, {"n_mp", e.n_mp}, {"n_mm", e.n_mm}, {"n_total", e.n_total()},
        {"E", e.e_value()}};
}

nlohmann::json chsh_json(const ChshValue& v)
{
    return {{"S", v.s_value}, {"S_max", v.s_max}, {"S_max_signed", v.s_max_signed},
        {"max_placement", v.max_placement}};
}

nlohmann::json report_json(const ChshReport& r)
{
    nlohmann::json j = chsh_json(r.value);
    j["correlations"] = nlohmann::json::array();
    for (const auto& e : r.estimates)
        j["correlations"].push_back(estimate_json(e));
    return j;
}

nlohmann::json vec4_json(const Eigen::Vector4d& v)
{
    return nlohmann::json::array({v(0), v(1), v(2), v(3)});
}

} // namespace

nlohmann::json summary_to_json(const RunSummary& summary)
{
    const auto& c = summary.config;
    nlohmann::json j;
    j["schema"] = "eprb-summary/1";
    // Execution details (threads, output_dir) are omitted so the file only
    // depends on the data-defining parameters.
    j["config"] = {
        {"seed", c.seed},
        {"protocol", to_string(c.protocol)},
        {"n_per_setting", c.n_per_setting},
        {"settings", {{"a1", c.settings.a1}, {"a1p", c.settings.a1p}, {"a2", c.settings.a2}, {"a2p", c.settings.a2p}}},
        {"schedule", to_string(c.schedule)},
        {"time_scale", c.model.time_scale},
        {"delay_exponent", c.model.delay_exponent},
        {"r_min", c.model.r_min},
        {"windows", c.windows},
        {"response", to_string(c.response)},
    };
    j["n_events"] = summary.n_events;
    j["reference"] = {
        {"sawtooth", {{"E", vec4_json(summary.reference.sawtooth)}, {"chsh", chsh_json(summary.reference.sawtooth_chsh)}}},
        {"quantum", {{"E", vec4_json(summary.reference.quantum)}, {"chsh", chsh_json(summary.reference.quantum_chsh)}}},
    };
    j["spreadsheet"] = summary.spreadsheet ? report_json(*summary.spreadsheet) : nlohmann::json(nullptr);
    j["sweep"] = nlohmann::json::array();
    for (const auto& row : summary.sweep) {
        nlohmann::json r;
        r["window_over_T"] = row.width / c.model.time_scale;
        r["width"] = row.width;
        r["insufficient_data"] = row.insufficient_data();
        r["retained"] = row.retained;
        r["total"] = row.total;
        r["retention"] = {row.retention(0), row.retention(1), row.retention(2), row.retention(3)};
        r["report"] = row.report ? report_json(*row.report) : nlohmann::json(nullptr);
        j["sweep"].push_back(std::move(r));
    }
    return j;
}

std::string emit_sweep_plot_data(const RunSummary& summary)
{
    std::ostringstream out;
    out << sweep_csv_header << '\n';
    for (const auto& row : summary.sweep) {
        out << format_real(row.width / summary.config.model.time_scale);
        if (row.report) {
            for (int k = 0; k < 4; ++k)
                out << ',' << format_real(row.report->e(k));
            out << ',' << format_real(row.report->value.s_max) << ',' << format_real(row.retention_min()) << ','
                << format_real(row.report->value.s_value) << ",ok\n";
        } else {
            out << ",,,,,," << format_real(row.retention_min()) << ",,insufficient_data\n";
        }
    }
    return out.str();
}

namespace {

std::optional<double> optional_real(const std::string& s, int line_no)
{
    if (s.empty())
        return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw NoDataError("sweep.csv line " + std::to_string(line_no) + ": malformed field '" + s + "'");
    return v;
}

} // namespace

std::vector<SweepPoint> read_sweep_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != sweep_csv_header)
        throw NoDataError("sweep.csv: unexpected header");
    std::vector<SweepPoint> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, ','))
            f.push_back(field);
        if (f.size() != 9)
            throw NoDataError("sweep.csv line " + std::to_string(line_no) + ": expected 9 fields");
        SweepPoint p;
        p.window_over_t = optional_real(f[0], line_no).value_or(0.0);
        p.insufficient_data = f[8] == "insufficient_data";
        if (!p.insufficient_data) {
            std::array<double, 4> e{};
            for (std::size_t k = 0; k < 4; ++k)
                e[k] = optional_real(f[1 + k], line_no).value_or(0.0);
            p.e = e;
            p.s = optional_real(f[5], line_no);
            p.s_fixed = optional_real(f[7], line_no);
        }
        p.retention_min = optional_real(f[6], line_no).value_or(0.0);
        out.push_back(p);
    }
    return out;
}

} // namespace eprb
