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

#include "bassim/model.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bassim {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Synthetic path and access-link model.
///
/// Path bandwidth decays with great-circle distance and carries lognormal
/// noise. Wi-Fi uplinks are lognormal; the defaults put 60% of samples below
/// 1 Mbit/s with a spread of roughly 0.1 to 8 Mbit/s over the central 95%.
/// Cellular uplinks are uniform over a range.
struct NetModelParams {
  double base_path_mbps = 20.0;
  double distance_decay_per_1000km = 1.0;
  double noise_sigma = 0.3;
  // mu = -sigma * probit(0.6), so P(uplink < 1 Mbit/s) = 0.6.
  double wifi_lognormal_mu = -1.2 * 0.2533471031357997;
  double wifi_lognormal_sigma = 1.2;
  double cellular_uplink_mbps_low = 1.0;
  double cellular_uplink_mbps_high = 5.0;
  int wifi_links_per_client = 2;
  int cellular_links_per_client = 1;
  double server_capacity_mbps = 200.0;

  friend bool operator==(const NetModelParams&, const NetModelParams&) = default;
};

void validate(const NetModelParams& params);

struct Scenario {
  std::vector<BBoxClient> clients;
  std::vector<AggregationServer> agg_servers;
  std::vector<OriginServer> origins;
  NetModelParams net_params;
  std::uint64_t seed = 0;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Checks every entity, id uniqueness per class and origin references.
void validate(const Scenario& scenario);

/// Haversine great-circle distance.
double geo_distance_km(const GeoPoint& a, const GeoPoint& b);

/// Deterministic path bandwidth for one endpoint pair. The same
/// (seed, edge_tag) always draws the same noise factor.
double path_bandwidth(const GeoPoint& src, const GeoPoint& dst,
                      const NetModelParams& params, std::uint64_t seed,
                      std::string_view edge_tag);

/// The three measurements a client needs to price a candidate relay.
class PathOracle {
 public:
  virtual ~PathOracle() = default;

  /// Path capacity for the subflow carried by `link` to `server`.
  virtual double link_to_server(const BBoxClient& client, const EdgeLink& link,
                                const AggregationServer& server) const = 0;
  virtual double server_to_origin(const AggregationServer& server,
                                  const OriginServer& origin) const = 0;
  /// Path capacity from `link` straight to the origin, no relay.
  virtual double link_to_origin(const BBoxClient& client, const EdgeLink& link,
                                const OriginServer& origin) const = 0;
};

/// PathOracle backed by path_bandwidth.
class SyntheticNet final : public PathOracle {
 public:
  SyntheticNet(NetModelParams params, std::uint64_t seed);

  double link_to_server(const BBoxClient& client, const EdgeLink& link,
                        const AggregationServer& server) const override;
  double server_to_origin(const AggregationServer& server,
                          const OriginServer& origin) const override;
  double link_to_origin(const BBoxClient& client, const EdgeLink& link,
                        const OriginServer& origin) const override;

 private:
  NetModelParams params_;
  std::uint64_t seed_;
};

/// Draws `count` Wi-Fi uplink capacities from the configured lognormal.
std::vector<double> sample_wifi_uplinks(const NetModelParams& params,
                                        std::uint64_t seed, std::size_t count);

/// Random point, uniform by area between 60S and 70N.
GeoPoint sample_location(std::uint64_t seed);

/// One fresh client with seeded location, links and origin choice.
BBoxClient sample_client(std::string id, const NetModelParams& params,
                         std::uint64_t seed,
                         const std::vector<OriginServer>& origins);

/// Seeded synthetic scenario. Servers start idle (remaining == total).
Scenario generate_scenario(int n_clients, int m_servers, int k_origins,
                           const NetModelParams& params, std::uint64_t seed);

inline constexpr std::size_t kDefaultCandidates = 3;
inline constexpr double kDefaultLoadThreshold = 0.1;

/// Servers whose load rate is below `load_threshold` are dropped; of the
/// rest, the `k` nearest to the client are returned, nearest first, ties by
/// id. Fewer than `k` (or none) is a valid result.
std::vector<std::string> candidate_subset(
    const BBoxClient& client, const std::vector<AggregationServer>& servers,
    std::size_t k, double load_threshold);

// Scenario files: UTF-8 JSON, unit-suffixed keys, unknown keys rejected.
// See docs/scenario_format.md.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(std::string_view text);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace bassim
