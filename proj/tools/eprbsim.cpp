// Command-line front end: simulate, oracle, gill, toy.
// Exit codes: 0 success, 1 usage/config error, 2 runtime/data error.

#include "eprb/config.hpp"
#include "eprb/errors.hpp"
#include "eprb/experiment.hpp"
#include "eprb/io.hpp"
#include "eprb/postselect.hpp"
#include "eprb/stats.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int exit_usage = 1;
constexpr int exit_runtime = 2;

int cmd_simulate(const std::string& config_path, const std::optional<std::string>& out_dir,
    const std::optional<std::uint64_t>& seed, const std::optional<unsigned>& threads)
{
    auto config = eprb::load_config(config_path);
    if (out_dir)
        config.output_dir = *out_dir;
    if (seed)
        config.seed = *seed;
    if (threads)
        config.threads = *threads;
    const auto summary = eprb::run_experiment(config);

    std::cout << "protocol " << eprb::to_string(config.protocol) << ", " << summary.n_events << " events, "
              << summary.wall_seconds << " s\n";
    if (summary.spreadsheet)
        std::cout << "full-spreadsheet S = " << summary.spreadsheet->value.s_value
                  << " (max |S| = " << summary.spreadsheet->value.s_max << ")\n";
    std::cout << "sawtooth max |S| = " << summary.reference.sawtooth_chsh.s_max
              << ", quantum max |S| = " << summary.reference.quantum_chsh.s_max << '\n';
    for (const auto& row : summary.sweep) {
        std::cout << "W/T = " << eprb::format_real(row.width / config.model.time_scale);
        if (row.report)
            std::cout << "  max |S| = " << eprb::format_real(row.report->value.s_max)
                      << "  retention_min = " << eprb::format_real(row.retention_min()) << '\n';
        else
            std::cout << "  insufficient data\n";
    }
    std::cout << "wrote " << (config.output_dir / "events.csv").string() << ", summary.json, sweep.csv\n";
    return 0;
}

int cmd_oracle_corr(double a, double b)
{
    nlohmann::json j{{"a", a}, {"b", b}, {"sawtooth", eprb::sawtooth_correlation(a, b)},
        {"quantum", eprb::quantum_correlation(a, b)}};
    std::cout << j.dump() << '\n';
    return 0;
}

int cmd_oracle_accept(double s1, double s2, double w, double r_min)
{
    std::cout << nlohmann::json{{"acceptance", eprb::acceptance_probability(s1, s2, w, r_min)}}.dump() << '\n';
    return 0;
}

int cmd_gill(const std::string& config_path, std::int64_t runs, bool full_spreadsheet)
{
    const auto config = eprb::load_config(config_path);
    eprb::GillOptions opt;
    opt.m_runs = runs;
    opt.n_per_setting = config.n_per_setting;
    opt.settings = config.settings;
    opt.schedule = config.schedule;
    opt.model = config.model;
    opt.seed = config.seed;
    opt.threads = config.threads;
    switch (config.protocol) {
    case eprb::ProtocolKind::p1:
        opt.protocol = eprb::GillProtocol::p1;
        break;
    case eprb::ProtocolKind::p2_extracted:
        opt.protocol = eprb::GillProtocol::p2_extracted;
        break;
    case eprb::ProtocolKind::p2:
        opt.protocol = eprb::GillProtocol::p2_full;
        break;
    case eprb::ProtocolKind::augmented:
        throw eprb::ConfigError("gill: protocol must be p1, p2 or p2-extracted");
    }
    if (full_spreadsheet)
        opt.protocol = eprb::GillProtocol::p2_full;
    const auto result = eprb::gill_conjecture_experiment(opt);
    nlohmann::json j{{"runs", runs}, {"n_per_setting", opt.n_per_setting},
        {"violation_fraction", result.violation_fraction}, {"one_sided_fraction", result.one_sided_fraction},
        {"S", result.s_values}, {"S_max", result.s_max_values}};
    std::cout << j.dump() << '\n';
    return 0;
}

int cmd_toy(const std::string& criterion_name, const std::string& pairs_path)
{
    eprb::ToyCriterion criterion{};
    if (criterion_name == "plus2")
        criterion = eprb::ToyCriterion::sum_plus_two;
    else if (criterion_name == "minus2")
        criterion = eprb::ToyCriterion::sum_minus_two;
    else if (criterion_name == "zero")
        criterion = eprb::ToyCriterion::sum_zero;
    else
        throw eprb::ConfigError("criterion must be plus2, minus2 or zero");
    std::ifstream in(pairs_path);
    if (!in)
        throw eprb::ConfigError("cannot open '" + pairs_path + "'");
    const auto pairs = eprb::read_pairs_csv(in);
    const auto result = eprb::toy_postselect(pairs, criterion);
    const auto& e = result.estimate;
    nlohmann::json j{{"input", pairs.size()}, {"retained", result.retained.size()}, {"E", e.e_value()},
        {"table", {{"pp", e.n_pp}, {"pm", e.n_pm}, {"mp", e.n_mp}, {"mm", e.n_mm}}}};
    std::cout << j.dump() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Event-by-event EPRB simulator with coincidence-window post-selection"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    auto* simulate = app.add_subcommand("simulate", "Run an experiment and write events.csv, summary.json, sweep.csv");
    simulate->add_option("config", config_path, "Config file")->required();
    simulate->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    simulate->add_option("--seed", seed, "Seed (overrides seed)");
    simulate->add_option("--threads", threads, "Worker threads (overrides threads)");

    auto* oracle = app.add_subcommand("oracle", "Analytic reference values");
    oracle->require_subcommand(1);
    double a = 0, b = 0;
    auto* corr = oracle->add_subcommand("corr", "Sawtooth and quantum correlation at settings a, b (radians)");
    corr->add_option("a", a)->required();
    corr->add_option("b", b)->required();
    double s1 = 0, s2 = 0, w = 0, r_min = 0;
    auto* accept = oracle->add_subcommand("accept", "Coincidence acceptance probability");
    accept->add_option("s1sq", s1)->required();
    accept->add_option("s2sq", s2)->required();
    accept->add_option("w", w)->required();
    accept->add_option("rmin", r_min)->required();

    std::int64_t runs = 100;
    bool full = false;
    auto* gill = app.add_subcommand("gill", "Fraction of unfiltered finite samples violating |S| <= 2");
    gill->add_option("--runs", runs, "Number of independent runs")->required()->check(CLI::PositiveNumber);
    gill->add_flag("--full-spreadsheet", full, "Use all four spreadsheet columns (Protocol 2)");
    gill->add_option("config", config_path, "Config file")->required();

    std::string criterion, pairs_path;
    auto* toy = app.add_subcommand("toy", "Post-select paired +-1 samples by x + y");
    toy->add_option("--criterion", criterion, "plus2, minus2 or zero")
        ->required()
        ->check(CLI::IsMember({"plus2", "minus2", "zero"}));
    toy->add_option("pairs", pairs_path, "CSV of x,y pairs")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(config_path, out_dir, seed, threads);
        if (corr->parsed())
            return cmd_oracle_corr(a, b);
        if (accept->parsed())
            return cmd_oracle_accept(s1, s2, w, r_min);
        if (gill->parsed())
            return cmd_gill(config_path, runs, full);
        if (toy->parsed())
            return cmd_toy(criterion, pairs_path);
    } catch (const eprb::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}
