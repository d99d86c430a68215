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

#include "bassim/metrics.hpp"

#include "bassim/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bassim {

using nlohmann::json;

namespace {

MultiplierStats multiplier_stats(const std::vector<RecordRow>& rows,
                                 bool feasible_only) {
  MultiplierStats st;
  std::vector<double> values;
  for (const auto& r : rows) {
    if (feasible_only && !r.gamma) continue;
    auto m = gain_multiplier(r.b_achieved_mbps, r.b_baseline_mbps);
    if (!m) {
      ++st.dead_direct;
      continue;
    }
    values.push_back(*m);
  }
  st.count = values.size();
  if (values.empty()) return st;
  double sum = 0.0;
  for (double v : values) sum += v;
  st.mean = sum / static_cast<double>(values.size());
  st.min = *std::min_element(values.begin(), values.end());
  st.max = *std::max_element(values.begin(), values.end());
  st.cdf = cdf(std::move(values));
  return st;
}

json cdf_to_json(const std::vector<CdfPoint>& points) {
  json out = json::array();
  for (const auto& p : points) out.push_back({p.value, p.fraction});
  return out;
}

std::vector<CdfPoint> cdf_from_json(const json& j) {
  std::vector<CdfPoint> out;
  for (const auto& p : j) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

json multiplier_to_json(const MultiplierStats& m) {
  return {{"count", m.count}, {"dead_direct", m.dead_direct},
          {"min", m.min},     {"mean", m.mean},
          {"max", m.max},     {"cdf", cdf_to_json(m.cdf)}};
}

MultiplierStats multiplier_from_json(const json& j) {
  MultiplierStats m;
  m.count = j.at("count").get<std::size_t>();
  m.dead_direct = j.at("dead_direct").get<std::size_t>();
  m.min = j.at("min").get<double>();
  m.mean = j.at("mean").get<double>();
  m.max = j.at("max").get<double>();
  m.cdf = cdf_from_json(j.at("cdf"));
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::optional<double> gain_multiplier(double b_achieved_mbps,
                                      double b_baseline_mbps) {
  if (!(b_achieved_mbps >= 0.0) || !(b_baseline_mbps >= 0.0)) {
    throw ValidationError(
        fmt::format("gain_multiplier: negative bandwidth ({}, {})",
                    b_achieved_mbps, b_baseline_mbps));
  }
  if (b_baseline_mbps == 0.0) return std::nullopt;
  return b_achieved_mbps / b_baseline_mbps;
}

std::vector<CdfPoint> cdf(std::vector<double> values) {
  if (values.empty()) throw ValidationError("cdf of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::vector<CdfPoint> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

std::vector<RecordRow> to_rows(std::string_view policy,
                               const std::vector<EpochRecord>& records) {
  std::vector<RecordRow> rows;
  for (const auto& rec : records) {
    for (const auto& c : rec.clients) {
      rows.push_back({std::string(policy), rec.epoch, c.client_id, c.server_id,
                      c.b_baseline_mbps, c.b_achieved_mbps, c.gain_mbps,
                      c.gamma, c.hit});
    }
  }
  return rows;
}

PolicySummary summarize(std::string_view policy,
                        const std::vector<EpochRecord>& records) {
  const std::vector<RecordRow> rows = to_rows(policy, records);
  PolicySummary s;
  s.policy = std::string(policy);
  s.records = rows.size();

  std::vector<double> gammas;
  std::size_t hits = 0;
  for (const auto& r : rows) {
    if (!r.gamma) continue;
    gammas.push_back(*r.gamma);
    if (r.hit) ++hits;
  }
  s.gamma_records = gammas.size();
  if (!gammas.empty()) {
    double sum = 0.0;
    for (double g : gammas) sum += g;
    s.mean_gamma = sum / static_cast<double>(gammas.size());
    std::vector<double> sorted = gammas;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    s.median_gamma = sorted.size() % 2 == 1
                         ? sorted[mid]
                         : (sorted[mid - 1] + sorted[mid]) / 2.0;
    s.frac_gamma_one =
        static_cast<double>(hits) / static_cast<double>(gammas.size());
    s.gamma_cdf = cdf(std::move(gammas));
  }
  s.multiplier = multiplier_stats(rows, false);
  s.multiplier_feasible = multiplier_stats(rows, true);
  for (const auto& rec : records) {
    s.objective_series.push_back(rec.plan.objective_mbps);
  }
  return s;
}

SummaryReport make_report(std::string_view policy,
                          const std::vector<EpochRecord>& records) {
  return {{summarize(policy, records)}, to_rows(policy, records)};
}

std::string records_csv(const SummaryReport& report) {
  std::string out(kRecordsCsvHeader);
  out += '\n';
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.policy, r.epoch,
                       r.client_id, r.server_id, r.b_baseline_mbps,
                       r.b_achieved_mbps, r.gain_mbps,
                       r.gamma ? fmt::format("{}", *r.gamma) : std::string());
  }
  return out;
}

std::string summary_csv(const SummaryReport& report) {
  std::string out(kSummaryCsvHeader);
  out += '\n';
  for (const auto& p : report.policies) {
    double mean_objective = 0.0;
    for (double v : p.objective_series) mean_objective += v;
    if (!p.objective_series.empty()) {
      mean_objective /= static_cast<double>(p.objective_series.size());
    }
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", p.policy,
                       p.records, p.gamma_records, p.mean_gamma,
                       p.median_gamma, p.frac_gamma_one, p.multiplier.count,
                       p.multiplier.dead_direct, p.multiplier.min,
                       p.multiplier.mean, p.multiplier.max,
                       p.multiplier_feasible.mean, mean_objective);
  }
  return out;
}

std::string report_json(const SummaryReport& report) {
  json policies = json::array();
  for (const auto& p : report.policies) {
    policies.push_back({{"policy", p.policy},
                        {"records", p.records},
                        {"gamma_records", p.gamma_records},
                        {"mean_gamma", p.mean_gamma},
                        {"median_gamma", p.median_gamma},
                        {"frac_gamma_one", p.frac_gamma_one},
                        {"gamma_cdf", cdf_to_json(p.gamma_cdf)},
                        {"multiplier", multiplier_to_json(p.multiplier)},
                        {"multiplier_feasible",
                         multiplier_to_json(p.multiplier_feasible)},
                        {"objective_series_mbps", p.objective_series}});
  }
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"policy", r.policy},
                    {"epoch", r.epoch},
                    {"client_id", r.client_id},
                    {"server_id", r.server_id},
                    {"b_baseline_mbps", r.b_baseline_mbps},
                    {"b_achieved_mbps", r.b_achieved_mbps},
                    {"gain_mbps", r.gain_mbps},
                    {"gamma", r.gamma ? json(*r.gamma) : json(nullptr)},
                    {"hit", r.hit}});
  }
  json doc = {{"policies", std::move(policies)}, {"rows", std::move(rows)}};
  return doc.dump(2) + "\n";
}

SummaryReport report_from_json(std::string_view text) {
  SummaryReport report;
  try {
    const json doc = json::parse(text);
    for (const auto& p : doc.at("policies")) {
      PolicySummary s;
      s.policy = p.at("policy").get<std::string>();
      s.records = p.at("records").get<std::size_t>();
      s.gamma_records = p.at("gamma_records").get<std::size_t>();
      s.mean_gamma = p.at("mean_gamma").get<double>();
      s.median_gamma = p.at("median_gamma").get<double>();
      s.frac_gamma_one = p.at("frac_gamma_one").get<double>();
      s.gamma_cdf = cdf_from_json(p.at("gamma_cdf"));
      s.multiplier = multiplier_from_json(p.at("multiplier"));
      s.multiplier_feasible = multiplier_from_json(p.at("multiplier_feasible"));
      s.objective_series =
          p.at("objective_series_mbps").get<std::vector<double>>();
      report.policies.push_back(std::move(s));
    }
    for (const auto& r : doc.at("rows")) {
      RecordRow row;
      row.policy = r.at("policy").get<std::string>();
      row.epoch = r.at("epoch").get<std::uint64_t>();
      row.client_id = r.at("client_id").get<std::string>();
      row.server_id = r.at("server_id").get<std::string>();
      row.b_baseline_mbps = r.at("b_baseline_mbps").get<double>();
      row.b_achieved_mbps = r.at("b_achieved_mbps").get<double>();
      row.gain_mbps = r.at("gain_mbps").get<double>();
      if (!r.at("gamma").is_null()) row.gamma = r.at("gamma").get<double>();
      row.hit = r.at("hit").get<bool>();
      report.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("malformed report JSON: {}", e.what()));
  }
  return report;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out.flush()) {
    throw IoError(fmt::format("write to '{}' failed", path.string()));
  }
}

void emit_report(const SummaryReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  write_file(path, format == ReportFormat::csv ? records_csv(report)
                                               : report_json(report));
}

SummaryReport load_report_json(const std::filesystem::path& path) {
  try {
    return report_from_json(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace bassim
