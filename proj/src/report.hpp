#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simulator.hpp"

namespace pasim {

enum class ReportFormat { Human, Csv, JsonLines };

ReportFormat parse_format(std::string_view text);

/// Fixed CSV header (documented in docs/metrics.md), no trailing newline.
std::string csv_header();
std::string csv_row(const RunStats& stats);
std::string json_line(const RunStats& stats);
std::string human_report(const RunStats& stats);

/// Full report for a set of runs: CSV gets one header, JSON one object per line.
std::string report(std::span<const RunStats> runs, ReportFormat format);

/// Model-vs-Monte-Carlo table for the analytic subcommand.
std::string analytic_report(double p, unsigned tiers, std::uint64_t trials, std::uint64_t frames,
                            std::uint64_t seed);

}  // namespace pasim
