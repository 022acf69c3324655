#include "eprb/io.hpp"

#include "eprb/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace eprb {

std::string format_real(double v)
{
    // glibc printf rounds the exact binary value under the current rounding
    // mode (round-to-nearest-even).
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
    return buf;
}

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> trials)
{
    out << trials_csv_header << '\n';
    for (const auto& t : trials)
        out << t.trial_index << ',' << format_real(t.setting_a) << ',' << format_real(t.setting_b) << ',' << t.x1
            << ',' << t.x2 << ',' << format_real(t.t1) << ',' << format_real(t.t2) << '\n';
}

void write_spreadsheet_csv(std::ostream& out, std::span<const SpreadsheetRow> rows)
{
    out << spreadsheet_csv_header << '\n';
    for (const auto& r : rows) {
        out << r.trial_index;
        for (int x : r.x)
            out << ',' << x;
        for (double t : r.t)
            out << ',' << format_real(t);
        out << '\n';
    }
}

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

[[noreturn]] void malformed(int line_no, const std::string& what)
{
    throw NoDataError("line " + std::to_string(line_no) + ": " + what);
}

template <typename T>
T field_as(const std::string& s, int line_no)
{
    T v{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc{} || ptr != end)
        malformed(line_no, "malformed field '" + s + "'");
    return v;
}

int outcome_field(const std::string& s, int line_no)
{
    const int x = field_as<int>(s, line_no);
    if (x != 1 && x != -1)
        malformed(line_no, "outcome must be +-1, got '" + s + "'");
    return x;
}

void strip_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
}

void expect_header(std::istream& in, const char* header)
{
    std::string line;
    if (!std::getline(in, line))
        malformed(1, "missing header");
    strip_cr(line);
    if (line != header)
        malformed(1, "unexpected header '" + line + "'");
}

bool angle_matches(double a, double b)
{
    return std::fabs(a - b) <= 1e-8 * std::max(1.0, std::fabs(b));
}

} // namespace

std::vector<TrialRecord> read_trials_csv(std::istream& in, const SettingsQuadruple* settings)
{
    expect_header(in, trials_csv_header);
    std::vector<TrialRecord> out;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty())
            continue;
        const auto f = split_fields(line);
        if (f.size() != 7)
            malformed(line_no, "expected 7 fields");
        TrialRecord t;
        t.trial_index = field_as<std::int64_t>(f[0], line_no);
        t.setting_a = field_as<double>(f[1], line_no);
        t.setting_b = field_as<double>(f[2], line_no);
        t.x1 = outcome_field(f[3], line_no);
        t.x2 = outcome_field(f[4], line_no);
        t.t1 = field_as<double>(f[5], line_no);
        t.t2 = field_as<double>(f[6], line_no);
        t.pair_index = -1;
        if (settings) {
            for (int k = 0; k < setting_pair_count; ++k) {
                if (angle_matches(t.setting_a, settings->alice(SettingsQuadruple::alice_choice(k)))
                    && angle_matches(t.setting_b, settings->bob(SettingsQuadruple::bob_choice(k)))) {
                    t.pair_index = k;
                    break;
                }
            }
            if (t.pair_index < 0)
                malformed(line_no, "settings do not match any configured setting pair");
        }
        out.push_back(t);
    }
    return out;
}

std::vector<SpreadsheetRow> read_spreadsheet_csv(std::istream& in)
{
    expect_header(in, spreadsheet_csv_header);
    std::vector<SpreadsheetRow> out;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty())
            continue;
        const auto f = split_fields(line);
        if (f.size() != 9)
            malformed(line_no, "expected 9 fields");
        SpreadsheetRow r;
        r.trial_index = field_as<std::int64_t>(f[0], line_no);
        for (std::size_t i = 0; i < 4; ++i) {
            r.x[i] = outcome_field(f[1 + i], line_no);
            r.t[i] = field_as<double>(f[5 + i], line_no);
        }
        out.push_back(r);
    }
    return out;
}

std::vector<std::pair<int, int>> read_pairs_csv(std::istream& in)
{
    std::vector<std::pair<int, int>> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty())
            continue;
        if (line_no == 1 && line == "x,y")
            continue;
        const auto f = split_fields(line);
        if (f.size() != 2)
            malformed(line_no, "expected 2 fields");
        out.emplace_back(outcome_field(f[0], line_no), outcome_field(f[1], line_no));
    }
    return out;
}

} // namespace eprb
