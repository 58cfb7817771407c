#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "hashbench/protocols.hpp"

namespace hashbench {

/// Header, then for every report one row per (fold, run) and an aggregate
/// row with fold = run = "all" carrying mean, std and the config echo.
/// Numbers use fixed precision, so equal reports give identical bytes.
void write_report_csv(std::ostream& out, std::span<const ProtocolReport> reports);

/// Parses write_report_csv output back into reports (FormatError on
/// malformed input). Mean and std are taken from the aggregate rows.
std::vector<ProtocolReport> read_report_csv(std::istream& in);

/// Features | n_label | h | Method | bits | mAP, mean ± std in percent.
void write_markdown_table(std::ostream& out, std::span<const ProtocolReport> reports);

/// bytes_per_image,accuracy
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

}  // namespace hashbench
