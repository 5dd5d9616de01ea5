#pragma once

// Per-stage bitwidth report: one row per method, one column per stage.

#include "bitwidth/analysis.hpp"
#include "bitwidth/profiler.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bw {

struct ReportRow {
  std::string method;  // interval, affine, smt, maxP, avgP
  std::vector<std::optional<Interval>> ranges;
  std::vector<int> alpha;
  std::vector<bool> fallback;
  std::vector<std::string> notes;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct BitwidthReport {
  std::string pipeline;
  std::vector<std::string> stages;
  std::vector<ReportRow> rows;
  std::optional<std::vector<int>> beta;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add(const AnalysisResult& result);
  /// Adds the maxP (with observed ranges) and avgP rows.
  void add(const ProfileStats& stats);
  void set_meta(const std::string& key, const std::string& value);
  const ReportRow* row(const std::string& method) const;

  friend bool operator==(const BitwidthReport&, const BitwidthReport&) = default;
};

BitwidthReport make_report(const Pipeline& p);

enum class ReportFormat { Text, Json, Csv };

std::string render(const BitwidthReport& r, ReportFormat format);
/// Inverse of render(r, ReportFormat::Json). Throws std::invalid_argument.
BitwidthReport parse_report(const std::string& json_text);

}  // namespace bw
