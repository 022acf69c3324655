#pragma once

#include "eprb/protocols.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eprb {

/// Nine significant digits, shortest of %e/%f style, round-half-even.
std::string format_real(double v);

inline constexpr const char* trials_csv_header = "trial,setting_a_rad,setting_b_rad,x1,x2,t1,t2";
inline constexpr const char* spreadsheet_csv_header = "trial,x_a1,x_a1p,x_a2,x_a2p,t_a1,t_a1p,t_a2,t_a2p";

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> trials);
void write_spreadsheet_csv(std::ostream& out, std::span<const SpreadsheetRow> rows);

/// When `settings` is given, pair_index is recovered by matching the angle
/// columns; otherwise it is left at -1. Throws NoDataError on a malformed
/// file (with the offending line number).
std::vector<TrialRecord> read_trials_csv(std::istream& in, const SettingsQuadruple* settings = nullptr);
std::vector<SpreadsheetRow> read_spreadsheet_csv(std::istream& in);

/// Two-column +-1 pairs, with an optional `x,y` header line.
std::vector<std::pair<int, int>> read_pairs_csv(std::istream& in);

} // namespace eprb
