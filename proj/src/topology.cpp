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

#include "bassim/topology.hpp"

#include "bassim/errors.hpp"
#include "bassim/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <tuple>

namespace bassim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double standard_normal(std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

std::string padded_id(char prefix, int index, int count) {
  const int width = std::max(3, static_cast<int>(std::to_string(count).size()));
  return fmt::format("{}{:0{}}", prefix, index, width);
}

template <typename Entity>
void require_unique_ids(const std::vector<Entity>& entities,
                        std::string_view entity_class) {
  std::set<std::string_view> seen;
  for (const auto& e : entities) {
    if (!seen.insert(e.id).second) {
      throw ValidationError(
          fmt::format("duplicate {} id '{}'", entity_class, e.id));
    }
  }
}

}  // namespace

void validate(const NetModelParams& p) {
  auto positive = [](double v, std::string_view name) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw ValidationError(
          fmt::format("net_params.{} must be > 0, got {}", name, v));
    }
  };
  auto non_negative = [](double v, std::string_view name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(
          fmt::format("net_params.{} must be >= 0, got {}", name, v));
    }
  };
  positive(p.base_path_mbps, "base_path_mbps");
  non_negative(p.distance_decay_per_1000km, "distance_decay_per_1000km");
  non_negative(p.noise_sigma, "noise_sigma");
  if (!std::isfinite(p.wifi_lognormal_mu)) {
    throw ValidationError("net_params.wifi_lognormal_mu must be finite");
  }
  non_negative(p.wifi_lognormal_sigma, "wifi_lognormal_sigma");
  non_negative(p.cellular_uplink_mbps_low, "cellular_uplink_mbps_range[0]");
  non_negative(p.cellular_uplink_mbps_high, "cellular_uplink_mbps_range[1]");
  if (p.cellular_uplink_mbps_low > p.cellular_uplink_mbps_high) {
    throw ValidationError(
        fmt::format("net_params.cellular_uplink_mbps_range: low {} > high {}",
                    p.cellular_uplink_mbps_low, p.cellular_uplink_mbps_high));
  }
  if (p.wifi_links_per_client < 0 || p.cellular_links_per_client < 0 ||
      p.wifi_links_per_client + p.cellular_links_per_client < 1) {
    throw ValidationError(
        "net_params: clients need at least one link "
        "(wifi_links_per_client + cellular_links_per_client >= 1)");
  }
  positive(p.server_capacity_mbps, "server_capacity_mbps");
}

void validate(const Scenario& s) {
  if (s.origins.empty()) throw ValidationError("scenario has no origins");
  if (s.agg_servers.empty()) {
    throw ValidationError("scenario has no agg_servers");
  }
  validate(s.net_params);
  require_unique_ids(s.clients, "client");
  require_unique_ids(s.agg_servers, "agg_server");
  require_unique_ids(s.origins, "origin");

  std::set<std::string_view> origin_ids;
  for (const auto& o : s.origins) {
    if (o.id.empty()) throw ValidationError("origin with empty id");
    try {
      validate(o.location);
    } catch (const ValidationError& e) {
      throw ValidationError(
          fmt::format("origin '{}': location: {}", o.id, e.what()));
    }
    origin_ids.insert(o.id);
  }
  for (const auto& srv : s.agg_servers) validate(srv);
  for (const auto& c : s.clients) {
    validate(c);
    require_unique_ids(c.links, fmt::format("link of client '{}'", c.id));
    if (!origin_ids.contains(c.origin_id)) {
      throw ValidationError(
          fmt::format("client '{}': origin_id references missing origin '{}'",
                      c.id, c.origin_id));
    }
  }
}

double geo_distance_km(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = a.latitude_deg * kDegToRad;
  const double lat2 = b.latitude_deg * kDegToRad;
  const double dlat = lat2 - lat1;
  const double dlon = (b.longitude_deg - a.longitude_deg) * kDegToRad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::min(1.0, h)));
}

double path_bandwidth(const GeoPoint& src, const GeoPoint& dst,
                      const NetModelParams& params, std::uint64_t seed,
                      std::string_view edge_tag) {
  const double distance = geo_distance_km(src, dst);
  double bw = params.base_path_mbps /
              (1.0 + distance * params.distance_decay_per_1000km / 1000.0);
  if (params.noise_sigma > 0.0) {
    const double z = standard_normal(derive_seed(seed, edge_tag));
    bw *= std::exp(params.noise_sigma * z);
  }
  return bw;
}

SyntheticNet::SyntheticNet(NetModelParams params, std::uint64_t seed)
    : params_(params), seed_(seed) {}

double SyntheticNet::link_to_server(const BBoxClient& client,
                                    const EdgeLink& link,
                                    const AggregationServer& server) const {
  return path_bandwidth(
      client.location, server.location, params_, seed_,
      fmt::format("link:{}/{}>server:{}", client.id, link.id, server.id));
}

double SyntheticNet::server_to_origin(const AggregationServer& server,
                                      const OriginServer& origin) const {
  return path_bandwidth(server.location, origin.location, params_, seed_,
                        fmt::format("server:{}>origin:{}", server.id, origin.id));
}

double SyntheticNet::link_to_origin(const BBoxClient& client,
                                    const EdgeLink& link,
                                    const OriginServer& origin) const {
  return path_bandwidth(
      client.location, origin.location, params_, seed_,
      fmt::format("link:{}/{}>origin:{}", client.id, link.id, origin.id));
}

std::vector<double> sample_wifi_uplinks(const NetModelParams& params,
                                        std::uint64_t seed, std::size_t count) {
  SplitMix64 rng(derive_seed(seed, "wifi-uplinks"));
  std::lognormal_distribution<double> dist(params.wifi_lognormal_mu,
                                           params.wifi_lognormal_sigma);
  std::vector<double> out(count);
  for (auto& v : out) v = quantize_mbps(dist(rng));
  return out;
}

GeoPoint sample_location(std::uint64_t seed) {
  SplitMix64 rng(seed);
  static const double z_lo = std::sin(-60.0 * kDegToRad);
  static const double z_hi = std::sin(70.0 * kDegToRad);
  const double z = z_lo + (z_hi - z_lo) * rng.uniform01();
  GeoPoint p;
  p.latitude_deg = std::asin(z) / kDegToRad;
  p.longitude_deg = -180.0 + 360.0 * rng.uniform01();
  return p;
}

BBoxClient sample_client(std::string id, const NetModelParams& params,
                         std::uint64_t seed,
                         const std::vector<OriginServer>& origins) {
  if (origins.empty()) throw ValidationError("sample_client: no origins");
  BBoxClient c;
  c.location = sample_location(derive_seed(seed, "location"));

  SplitMix64 rng(derive_seed(seed, "links"));
  std::lognormal_distribution<double> wifi(params.wifi_lognormal_mu,
                                           params.wifi_lognormal_sigma);
  for (int i = 0; i < params.wifi_links_per_client; ++i) {
    c.links.push_back({fmt::format("{}.w{}", id, i), LinkKind::wifi,
                       quantize_mbps(wifi(rng))});
  }
  for (int i = 0; i < params.cellular_links_per_client; ++i) {
    const double u = rng.uniform01();
    const double mbps =
        params.cellular_uplink_mbps_low +
        u * (params.cellular_uplink_mbps_high - params.cellular_uplink_mbps_low);
    c.links.push_back(
        {fmt::format("{}.c{}", id, i), LinkKind::cellular, quantize_mbps(mbps)});
  }

  SplitMix64 pick(derive_seed(seed, "origin"));
  c.origin_id = origins[pick() % origins.size()].id;
  c.id = std::move(id);
  return c;
}

Scenario generate_scenario(int n_clients, int m_servers, int k_origins,
                           const NetModelParams& params, std::uint64_t seed) {
  if (n_clients < 1 || m_servers < 1 || k_origins < 1) {
    throw ValidationError(fmt::format(
        "generate_scenario: counts must be >= 1 (clients={}, servers={}, "
        "origins={})",
        n_clients, m_servers, k_origins));
  }
  validate(params);

  Scenario s;
  s.net_params = params;
  s.seed = seed;
  const std::uint64_t origin_seed = derive_seed(seed, "origins");
  const std::uint64_t server_seed = derive_seed(seed, "servers");
  const std::uint64_t client_seed = derive_seed(seed, "clients");

  for (int i = 0; i < k_origins; ++i) {
    s.origins.push_back({padded_id('o', i, k_origins),
                         sample_location(derive_seed(origin_seed, i))});
  }
  for (int j = 0; j < m_servers; ++j) {
    AggregationServer srv;
    srv.id = padded_id('s', j, m_servers);
    srv.location = sample_location(derive_seed(server_seed, j));
    srv.total_capacity_mbps = params.server_capacity_mbps;
    srv.remaining_capacity_mbps = params.server_capacity_mbps;
    s.agg_servers.push_back(std::move(srv));
  }
  for (int i = 0; i < n_clients; ++i) {
    s.clients.push_back(sample_client(padded_id('c', i, n_clients), params,
                                      derive_seed(client_seed, i), s.origins));
  }
  return s;
}

std::vector<std::string> candidate_subset(
    const BBoxClient& client, const std::vector<AggregationServer>& servers,
    std::size_t k, double load_threshold) {
  if (k < 1) throw ValidationError("candidate_subset: k must be >= 1");
  std::vector<std::tuple<double, std::string_view>> ranked;
  for (const auto& srv : servers) {
    if (load_rate(srv.remaining_capacity_mbps, srv.total_capacity_mbps) <
        load_threshold) {
      continue;
    }
    ranked.emplace_back(geo_distance_km(client.location, srv.location), srv.id);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    out.emplace_back(std::get<1>(ranked[i]));
  }
  return out;
}

}  // namespace bassim
