#include "eprb/config.hpp"

#include "eprb/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace eprb {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = s.find(',');
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos)
            break;
        s.remove_prefix(pos + 1);
    }
    return out;
}

double parse_real(std::string_view text)
{
    text = trim(text);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v))
        throw ConfigError("malformed number '" + std::string(text) + "'");
    return v;
}

template <typename Int>
Int parse_integer(std::string_view text)
{
    text = trim(text);
    Int v{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end)
        throw ConfigError("malformed integer '" + std::string(text) + "'");
    return v;
}

} // namespace

double parse_angle(std::string_view text)
{
    text = trim(text);
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower.find("deg") != std::string::npos || lower.find("\xc2\xb0") != std::string::npos)
        throw ConfigError("angles are in radians; degrees are not accepted ('" + std::string(text) + "')");

    const auto pi_pos = lower.find("pi");
    if (pi_pos == std::string::npos)
        return parse_real(text);

    std::string_view coef = trim(std::string_view(lower).substr(0, pi_pos));
    std::string_view rest = trim(std::string_view(lower).substr(pi_pos + 2));
    double factor = 1.0;
    if (coef == "-") {
        factor = -1.0;
    } else if (!coef.empty()) {
        if (coef.back() != '*')
            throw ConfigError("malformed angle '" + std::string(text) + "'");
        coef.remove_suffix(1);
        factor = parse_real(coef);
    }
    double denom = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/')
            throw ConfigError("malformed angle '" + std::string(text) + "'");
        rest.remove_prefix(1);
        denom = parse_real(rest);
        if (denom == 0.0)
            throw ConfigError("malformed angle '" + std::string(text) + "': division by zero");
    }
    return factor * pi / denom;
}

std::string to_string(ProtocolKind p)
{
    switch (p) {
    case ProtocolKind::p1:
        return "p1";
    case ProtocolKind::p2:
        return "p2";
    case ProtocolKind::p2_extracted:
        return "p2-extracted";
    case ProtocolKind::augmented:
        return "augmented";
    }
    return "?";
}

std::string to_string(ScheduleKind s)
{
    return s == ScheduleKind::block ? "block" : "random";
}

std::string to_string(ResponseKind r)
{
    return r == ResponseKind::model ? "model" : "maximal";
}

void ExperimentConfig::validate() const
{
    model.validate();
    if (n_per_setting < 1)
        throw ConfigError("n_per_setting must be >= 1");
    if (threads < 1)
        throw ConfigError("threads must be >= 1");
    if (windows.empty())
        throw ConfigError("windows must not be empty");
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (!(windows[i] >= 0.0))
            throw ConfigError("windows must be >= 0");
        if (i > 0 && !(windows[i] > windows[i - 1]))
            throw ConfigError("windows must be strictly ascending");
    }
}

ExperimentConfig parse_config(std::string_view source)
{
    ExperimentConfig cfg;
    std::istringstream in{std::string(source)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        try {
            if (key == "seed") {
                cfg.seed = parse_integer<std::uint64_t>(value);
            } else if (key == "protocol") {
                if (value == "p1")
                    cfg.protocol = ProtocolKind::p1;
                else if (value == "p2")
                    cfg.protocol = ProtocolKind::p2;
                else if (value == "p2-extracted")
                    cfg.protocol = ProtocolKind::p2_extracted;
                else if (value == "augmented")
                    cfg.protocol = ProtocolKind::augmented;
                else
                    throw ConfigError("expected p1, p2, p2-extracted or augmented");
            } else if (key == "n_per_setting") {
                cfg.n_per_setting = parse_integer<std::int64_t>(value);
                if (cfg.n_per_setting < 1)
                    throw ConfigError("must be >= 1");
            } else if (key == "settings") {
                const auto parts = split_list(value);
                if (parts.size() != 4)
                    throw ConfigError("expected four angles a1, a1p, a2, a2p");
                cfg.settings = {parse_angle(parts[0]), parse_angle(parts[1]), parse_angle(parts[2]),
                    parse_angle(parts[3])};
            } else if (key == "a1") {
                cfg.settings.a1 = parse_angle(value);
            } else if (key == "a1p") {
                cfg.settings.a1p = parse_angle(value);
            } else if (key == "a2") {
                cfg.settings.a2 = parse_angle(value);
            } else if (key == "a2p") {
                cfg.settings.a2p = parse_angle(value);
            } else if (key == "schedule") {
                if (value == "block")
                    cfg.schedule = ScheduleKind::block;
                else if (value == "random")
                    cfg.schedule = ScheduleKind::random;
                else
                    throw ConfigError("expected block or random");
            } else if (key == "time_scale") {
                cfg.model.time_scale = parse_real(value);
                if (!(cfg.model.time_scale > 0.0))
                    throw ConfigError("must be positive");
            } else if (key == "delay_exponent") {
                cfg.model.delay_exponent = parse_integer<int>(value);
                if (cfg.model.delay_exponent < 2 || cfg.model.delay_exponent % 2 != 0)
                    throw ConfigError("must be an even integer >= 2");
            } else if (key == "r_min") {
                cfg.model.r_min = parse_real(value);
                if (!(cfg.model.r_min >= 0.0 && cfg.model.r_min < 1.0))
                    throw ConfigError("must lie in [0, 1)");
            } else if (key == "windows") {
                std::vector<double> w;
                for (auto part : split_list(value))
                    w.push_back(parse_real(part));
                for (std::size_t i = 0; i < w.size(); ++i) {
                    if (!(w[i] >= 0.0))
                        throw ConfigError("windows must be >= 0");
                    if (i > 0 && !(w[i] > w[i - 1]))
                        throw ConfigError("windows must be strictly ascending");
                }
                cfg.windows = std::move(w);
            } else if (key == "response") {
                if (value == "model")
                    cfg.response = ResponseKind::model;
                else if (value == "maximal")
                    cfg.response = ResponseKind::maximal;
                else
                    throw ConfigError("expected model or maximal");
            } else if (key == "output_dir") {
                if (value.empty())
                    throw ConfigError("must not be empty");
                cfg.output_dir = std::string(value);
            } else if (key == "threads") {
                cfg.threads = parse_integer<unsigned>(value);
                if (cfg.threads < 1)
                    throw ConfigError("must be >= 1");
            } else {
                throw ConfigError("unknown key");
            }
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "': " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace eprb
