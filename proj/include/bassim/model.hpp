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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bassim {

/// Degrees; latitude in [-90, 90], longitude in [-180, 180].
struct GeoPoint {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

void validate(const GeoPoint& p);

enum class LinkKind { wifi, cellular };

std::string_view to_string(LinkKind kind);
LinkKind link_kind_from_string(std::string_view name);

/// One wireless uplink of a broadcaster.
struct EdgeLink {
  std::string id;
  LinkKind kind = LinkKind::wifi;
  double uplink_mbps = 0.0;

  friend bool operator==(const EdgeLink&, const EdgeLink&) = default;
};

/// A broadcaster's multipath proxy box.
struct BBoxClient {
  std::string id;
  GeoPoint location;
  std::vector<EdgeLink> links;
  std::string origin_id;

  friend bool operator==(const BBoxClient&, const BBoxClient&) = default;
};

/// Cloud relay that recombines subflows. remaining <= total.
struct AggregationServer {
  std::string id;
  GeoPoint location;
  double total_capacity_mbps = 0.0;
  double remaining_capacity_mbps = 0.0;

  friend bool operator==(const AggregationServer&,
                         const AggregationServer&) = default;
};

/// Streaming platform ingest server.
struct OriginServer {
  std::string id;
  GeoPoint location;

  friend bool operator==(const OriginServer&, const OriginServer&) = default;
};

// Entity checks throw ValidationError naming the entity id and field. The
// client check does not resolve origin_id; that needs the whole scenario.
void validate(const EdgeLink& link);
void validate(const BBoxClient& client);
void validate(const AggregationServer& server);

/// One (client, server) candidate with the bandwidth terms that decide it.
/// Build through make_gain_entry so the derived fields stay consistent.
struct GainEntry {
  std::string client_id;
  std::string server_id;
  double b_client_server_mbps = 0.0;
  double b_server_origin_mbps = 0.0;
  double b_via_mbps = 0.0;
  double b_baseline_mbps = 0.0;
  double gain_mbps = 0.0;

  friend bool operator==(const GainEntry&, const GainEntry&) = default;
};

GainEntry make_gain_entry(std::string client_id, std::string server_id,
                          double b_client_server_mbps,
                          double b_server_origin_mbps, double b_baseline_mbps);

/// Throughput of a multipath session relayed through an aggregation server:
/// the subflows add up, then the relay-to-origin hop caps the total.
double aggregated_path_bandwidth(std::span<const double> subflow_mbps,
                                 double server_to_origin_mbps);

/// Best single-network upload; without aggregation only one link is usable.
double baseline_bandwidth(std::span<const double> direct_link_mbps);

/// Via-aggregation bandwidth minus baseline. Negative when the detour loses.
double bandwidth_gain(double b_via_mbps, double b_baseline_mbps);

/// remaining / total, in [0, 1].
double load_rate(double remaining_mbps, double total_mbps);

/// Measurements are snapped to a 2^-20 Mbit/s grid (about 1 bit/s). On that
/// grid sums and differences of realistic bandwidths are exact in double
/// precision, so capacity bookkeeping never drifts.
inline constexpr double kMeasurementQuantumMbps = 0x1.0p-20;
double quantize_mbps(double mbps);

}  // namespace bassim
