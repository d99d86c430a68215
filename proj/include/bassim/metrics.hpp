/*
 * Copyright 2026 The bassim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "bassim/sim.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bassim {

/// achieved / baseline. nullopt for a dead direct path (baseline == 0);
/// callers count those separately.
std::optional<double> gain_multiplier(double b_achieved_mbps,
                                      double b_baseline_mbps);

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;

  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

/// Empirical CDF, one point per distinct value. Throws on empty input.
std::vector<CdfPoint> cdf(std::vector<double> values);

/// One CSV/JSON row: a client's outcome in one epoch under one policy.
struct RecordRow {
  std::string policy;
  std::uint64_t epoch = 0;
  std::string client_id;
  std::string server_id;
  double b_baseline_mbps = 0.0;
  double b_achieved_mbps = 0.0;
  double gain_mbps = 0.0;
  std::optional<double> gamma;
  bool hit = false;

  friend bool operator==(const RecordRow&, const RecordRow&) = default;
};

struct MultiplierStats {
  std::size_t count = 0;
  /// Rows skipped because the direct path carried nothing.
  std::size_t dead_direct = 0;
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  std::vector<CdfPoint> cdf;

  friend bool operator==(const MultiplierStats&, const MultiplierStats&) = default;
};

struct PolicySummary {
  std::string policy;
  std::size_t records = 0;
  /// Rows with a defined hit rate (at least one feasible candidate).
  std::size_t gamma_records = 0;
  double mean_gamma = 0.0;
  double median_gamma = 0.0;
  double frac_gamma_one = 0.0;
  std::vector<CdfPoint> gamma_cdf;
  /// Over every row with a live direct path.
  MultiplierStats multiplier;
  /// Same, restricted to rows with a defined hit rate.
  MultiplierStats multiplier_feasible;
  /// Total gain of each epoch's plan.
  std::vector<double> objective_series;

  friend bool operator==(const PolicySummary&, const PolicySummary&) = default;
};

struct SummaryReport {
  std::vector<PolicySummary> policies;
  std::vector<RecordRow> rows;

  friend bool operator==(const SummaryReport&, const SummaryReport&) = default;
};

std::vector<RecordRow> to_rows(std::string_view policy,
                               const std::vector<EpochRecord>& records);

PolicySummary summarize(std::string_view policy,
                        const std::vector<EpochRecord>& records);

/// Summary plus rows for one policy run.
SummaryReport make_report(std::string_view policy,
                          const std::vector<EpochRecord>& records);

enum class ReportFormat { csv, json };

inline constexpr std::string_view kRecordsCsvHeader =
    "policy,epoch,client_id,server_id,b_baseline_mbps,b_achieved_mbps,"
    "gain_mbps,gamma";
inline constexpr std::string_view kSummaryCsvHeader =
    "policy,records,gamma_records,mean_gamma,median_gamma,frac_gamma_one,"
    "multiplier_count,dead_direct,multiplier_min,multiplier_mean,"
    "multiplier_max,feasible_multiplier_mean,mean_objective_mbps";

std::string records_csv(const SummaryReport& report);
std::string summary_csv(const SummaryReport& report);
std::string report_json(const SummaryReport& report);
SummaryReport report_from_json(std::string_view text);

/// csv writes the per-row records; json writes the whole report. Throws
/// IoError naming the path.
void emit_report(const SummaryReport& report, ReportFormat format,
                 const std::filesystem::path& path);
SummaryReport load_report_json(const std::filesystem::path& path);

/// Writes `contents` verbatim; IoError naming the path on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace bassim
