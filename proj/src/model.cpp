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

#include "bassim/model.hpp"

#include "bassim/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace bassim {

namespace {

void require_bandwidth(double v, std::string_view what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError(
        fmt::format("{} must be finite and >= 0, got {}", what, v));
  }
}

}  // namespace

void validate(const GeoPoint& p) {
  if (!std::isfinite(p.latitude_deg) || p.latitude_deg < -90.0 ||
      p.latitude_deg > 90.0) {
    throw ValidationError(
        fmt::format("latitude_deg out of [-90, 90]: {}", p.latitude_deg));
  }
  if (!std::isfinite(p.longitude_deg) || p.longitude_deg < -180.0 ||
      p.longitude_deg > 180.0) {
    throw ValidationError(
        fmt::format("longitude_deg out of [-180, 180]: {}", p.longitude_deg));
  }
}

std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::wifi:
      return "wifi";
    case LinkKind::cellular:
      return "cellular";
  }
  return "unknown";
}

LinkKind link_kind_from_string(std::string_view name) {
  if (name == "wifi") return LinkKind::wifi;
  if (name == "cellular") return LinkKind::cellular;
  throw ValidationError(fmt::format("unknown link kind '{}'", name));
}

void validate(const EdgeLink& link) {
  if (link.id.empty()) throw ValidationError("edge link with empty id");
  if (!std::isfinite(link.uplink_mbps) || link.uplink_mbps < 0.0) {
    throw ValidationError(fmt::format("link '{}': uplink_mbps invalid ({})",
                                      link.id, link.uplink_mbps));
  }
}

void validate(const BBoxClient& client) {
  if (client.id.empty()) throw ValidationError("client with empty id");
  try {
    validate(client.location);
  } catch (const ValidationError& e) {
    throw ValidationError(
        fmt::format("client '{}': location: {}", client.id, e.what()));
  }
  if (client.links.empty()) {
    throw ValidationError(
        fmt::format("client '{}': links must not be empty", client.id));
  }
  for (const auto& link : client.links) {
    try {
      validate(link);
    } catch (const ValidationError& e) {
      throw ValidationError(
          fmt::format("client '{}': links: {}", client.id, e.what()));
    }
  }
  if (client.origin_id.empty()) {
    throw ValidationError(
        fmt::format("client '{}': origin_id is empty", client.id));
  }
}

void validate(const AggregationServer& server) {
  if (server.id.empty()) throw ValidationError("aggregation server with empty id");
  try {
    validate(server.location);
  } catch (const ValidationError& e) {
    throw ValidationError(
        fmt::format("agg_server '{}': location: {}", server.id, e.what()));
  }
  if (!std::isfinite(server.total_capacity_mbps) ||
      server.total_capacity_mbps <= 0.0) {
    throw ValidationError(
        fmt::format("agg_server '{}': total_capacity_mbps must be > 0, got {}",
                    server.id, server.total_capacity_mbps));
  }
  if (!std::isfinite(server.remaining_capacity_mbps) ||
      server.remaining_capacity_mbps < 0.0 ||
      server.remaining_capacity_mbps > server.total_capacity_mbps) {
    throw ValidationError(fmt::format(
        "agg_server '{}': remaining_capacity_mbps must be in [0, {}], got {}",
        server.id, server.total_capacity_mbps,
        server.remaining_capacity_mbps));
  }
}

GainEntry make_gain_entry(std::string client_id, std::string server_id,
                          double b_client_server_mbps,
                          double b_server_origin_mbps, double b_baseline_mbps) {
  require_bandwidth(b_client_server_mbps, "b_client_server_mbps");
  require_bandwidth(b_server_origin_mbps, "b_server_origin_mbps");
  require_bandwidth(b_baseline_mbps, "b_baseline_mbps");
  GainEntry e;
  e.client_id = std::move(client_id);
  e.server_id = std::move(server_id);
  e.b_client_server_mbps = b_client_server_mbps;
  e.b_server_origin_mbps = b_server_origin_mbps;
  e.b_via_mbps = std::min(b_client_server_mbps, b_server_origin_mbps);
  e.b_baseline_mbps = b_baseline_mbps;
  e.gain_mbps = bandwidth_gain(e.b_via_mbps, b_baseline_mbps);
  return e;
}

double aggregated_path_bandwidth(std::span<const double> subflow_mbps,
                                 double server_to_origin_mbps) {
  require_bandwidth(server_to_origin_mbps, "server_to_origin_mbps");
  double sum = 0.0;
  for (double v : subflow_mbps) {
    require_bandwidth(v, "subflow_mbps");
    sum += v;
  }
  return std::min(sum, server_to_origin_mbps);
}

double baseline_bandwidth(std::span<const double> direct_link_mbps) {
  if (direct_link_mbps.empty()) {
    throw ValidationError("baseline_bandwidth: client has no links");
  }
  for (double v : direct_link_mbps) require_bandwidth(v, "direct_link_mbps");
  return *std::max_element(direct_link_mbps.begin(), direct_link_mbps.end());
}

double bandwidth_gain(double b_via_mbps, double b_baseline_mbps) {
  require_bandwidth(b_via_mbps, "b_via_mbps");
  require_bandwidth(b_baseline_mbps, "b_baseline_mbps");
  return b_via_mbps - b_baseline_mbps;
}

double load_rate(double remaining_mbps, double total_mbps) {
  if (!std::isfinite(total_mbps) || total_mbps <= 0.0) {
    throw ValidationError(
        fmt::format("load_rate: total_mbps must be > 0, got {}", total_mbps));
  }
  if (!std::isfinite(remaining_mbps) || remaining_mbps < 0.0 ||
      remaining_mbps > total_mbps) {
    throw ValidationError(fmt::format(
        "load_rate: remaining_mbps must be in [0, {}], got {}", total_mbps,
        remaining_mbps));
  }
  return remaining_mbps / total_mbps;
}

double quantize_mbps(double mbps) {
  return std::round(mbps / kMeasurementQuantumMbps) * kMeasurementQuantumMbps;
}

}  // namespace bassim
