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

#include "bassim/errors.hpp"
#include "bassim/topology.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace bassim {

using nlohmann::json;

namespace {

// `where` names the entity being decoded, e.g. "agg_server 's001'".
void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) {
    throw ValidationError(fmt::format("{}: expected a JSON object", where));
  }
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      throw ValidationError(fmt::format("{}: unknown field '{}'", where, key));
    }
  }
  for (auto a : allowed) {
    if (!obj.contains(a)) {
      throw ValidationError(fmt::format("{}: missing field '{}'", where, a));
    }
  }
}

double get_number(const json& obj, std::string_view key,
                  const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw ValidationError(
        fmt::format("{}: field '{}' must be a number", where, key));
  }
  return v.get<double>();
}

int get_int(const json& obj, std::string_view key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ValidationError(
        fmt::format("{}: field '{}' must be an integer", where, key));
  }
  return v.get<int>();
}

std::string get_string(const json& obj, std::string_view key,
                       const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) {
    throw ValidationError(
        fmt::format("{}: field '{}' must be a string", where, key));
  }
  return v.get<std::string>();
}

const json& get_array(const json& obj, std::string_view key,
                      const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_array()) {
    throw ValidationError(
        fmt::format("{}: field '{}' must be an array", where, key));
  }
  return v;
}

// Entities are decoded id-first so later errors can name them.
std::string peek_id(const json& obj, std::string_view entity_class,
                    std::size_t index) {
  if (obj.is_object() && obj.contains("id") && obj["id"].is_string()) {
    return obj["id"].get<std::string>();
  }
  throw ValidationError(
      fmt::format("{} #{}: missing or non-string field 'id'", entity_class,
                  index));
}

json location_to_json(const GeoPoint& p) {
  return {{"latitude_deg", p.latitude_deg}, {"longitude_deg", p.longitude_deg}};
}

GeoPoint location_from_json(const json& obj, const std::string& where) {
  const std::string ctx = where + " field 'location'";
  check_keys(obj, {"latitude_deg", "longitude_deg"}, ctx);
  return {get_number(obj, "latitude_deg", ctx),
          get_number(obj, "longitude_deg", ctx)};
}

json params_to_json(const NetModelParams& p) {
  return {
      {"base_path_mbps", p.base_path_mbps},
      {"distance_decay_per_1000km", p.distance_decay_per_1000km},
      {"noise_sigma", p.noise_sigma},
      {"wifi_lognormal_mu", p.wifi_lognormal_mu},
      {"wifi_lognormal_sigma", p.wifi_lognormal_sigma},
      {"cellular_uplink_mbps_range",
       {p.cellular_uplink_mbps_low, p.cellular_uplink_mbps_high}},
      {"wifi_links_per_client", p.wifi_links_per_client},
      {"cellular_links_per_client", p.cellular_links_per_client},
      {"server_capacity_mbps", p.server_capacity_mbps},
  };
}

NetModelParams params_from_json(const json& obj) {
  const std::string where = "net_params";
  check_keys(obj,
             {"base_path_mbps", "distance_decay_per_1000km", "noise_sigma",
              "wifi_lognormal_mu", "wifi_lognormal_sigma",
              "cellular_uplink_mbps_range", "wifi_links_per_client",
              "cellular_links_per_client", "server_capacity_mbps"},
             where);
  NetModelParams p;
  p.base_path_mbps = get_number(obj, "base_path_mbps", where);
  p.distance_decay_per_1000km =
      get_number(obj, "distance_decay_per_1000km", where);
  p.noise_sigma = get_number(obj, "noise_sigma", where);
  p.wifi_lognormal_mu = get_number(obj, "wifi_lognormal_mu", where);
  p.wifi_lognormal_sigma = get_number(obj, "wifi_lognormal_sigma", where);
  const auto& range = get_array(obj, "cellular_uplink_mbps_range", where);
  if (range.size() != 2 || !range[0].is_number() || !range[1].is_number()) {
    throw ValidationError(
        "net_params: field 'cellular_uplink_mbps_range' must be [low, high]");
  }
  p.cellular_uplink_mbps_low = range[0].get<double>();
  p.cellular_uplink_mbps_high = range[1].get<double>();
  p.wifi_links_per_client = get_int(obj, "wifi_links_per_client", where);
  p.cellular_links_per_client = get_int(obj, "cellular_links_per_client", where);
  p.server_capacity_mbps = get_number(obj, "server_capacity_mbps", where);
  return p;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json clients = json::array();
  for (const auto& c : s.clients) {
    json links = json::array();
    for (const auto& l : c.links) {
      links.push_back({{"id", l.id},
                       {"kind", std::string(to_string(l.kind))},
                       {"uplink_mbps", l.uplink_mbps}});
    }
    clients.push_back({{"id", c.id},
                       {"location", location_to_json(c.location)},
                       {"links", std::move(links)},
                       {"origin_id", c.origin_id}});
  }
  json servers = json::array();
  for (const auto& srv : s.agg_servers) {
    servers.push_back({{"id", srv.id},
                       {"location", location_to_json(srv.location)},
                       {"total_capacity_mbps", srv.total_capacity_mbps},
                       {"remaining_capacity_mbps", srv.remaining_capacity_mbps}});
  }
  json origins = json::array();
  for (const auto& o : s.origins) {
    origins.push_back({{"id", o.id}, {"location", location_to_json(o.location)}});
  }
  json doc = {{"clients", std::move(clients)},
              {"agg_servers", std::move(servers)},
              {"origins", std::move(origins)},
              {"net_params", params_to_json(s.net_params)},
              {"seed", s.seed}};
  return doc.dump(2) + "\n";
}

Scenario scenario_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("scenario: malformed JSON: {}", e.what()));
  }
  check_keys(doc, {"clients", "agg_servers", "origins", "net_params", "seed"},
             "scenario");

  Scenario s;
  const auto& seed = doc.at("seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() &&
                                      seed.get<std::int64_t>() >= 0)) {
    throw ValidationError(
        "scenario: field 'seed' must be a non-negative integer");
  }
  s.seed = seed.get<std::uint64_t>();
  s.net_params = params_from_json(doc.at("net_params"));

  const auto& origins = get_array(doc, "origins", "scenario");
  for (std::size_t i = 0; i < origins.size(); ++i) {
    const std::string id = peek_id(origins[i], "origin", i);
    const std::string where = fmt::format("origin '{}'", id);
    check_keys(origins[i], {"id", "location"}, where);
    s.origins.push_back({id, location_from_json(origins[i]["location"], where)});
  }

  const auto& servers = get_array(doc, "agg_servers", "scenario");
  for (std::size_t i = 0; i < servers.size(); ++i) {
    const std::string id = peek_id(servers[i], "agg_server", i);
    const std::string where = fmt::format("agg_server '{}'", id);
    check_keys(servers[i],
               {"id", "location", "total_capacity_mbps",
                "remaining_capacity_mbps"},
               where);
    AggregationServer srv;
    srv.id = id;
    srv.location = location_from_json(servers[i]["location"], where);
    srv.total_capacity_mbps =
        get_number(servers[i], "total_capacity_mbps", where);
    srv.remaining_capacity_mbps =
        get_number(servers[i], "remaining_capacity_mbps", where);
    s.agg_servers.push_back(std::move(srv));
  }

  const auto& clients = get_array(doc, "clients", "scenario");
  for (std::size_t i = 0; i < clients.size(); ++i) {
    const std::string id = peek_id(clients[i], "client", i);
    const std::string where = fmt::format("client '{}'", id);
    check_keys(clients[i], {"id", "location", "links", "origin_id"}, where);
    BBoxClient c;
    c.id = id;
    c.location = location_from_json(clients[i]["location"], where);
    c.origin_id = get_string(clients[i], "origin_id", where);
    const auto& links = get_array(clients[i], "links", where);
    for (std::size_t li = 0; li < links.size(); ++li) {
      const std::string link_id =
          peek_id(links[li], fmt::format("{} link", where), li);
      const std::string lwhere = fmt::format("{} link '{}'", where, link_id);
      check_keys(links[li], {"id", "kind", "uplink_mbps"}, lwhere);
      EdgeLink l;
      l.id = link_id;
      try {
        l.kind = link_kind_from_string(get_string(links[li], "kind", lwhere));
      } catch (const ValidationError& e) {
        throw ValidationError(
            fmt::format("{} field 'kind': {}", lwhere, e.what()));
      }
      l.uplink_mbps = get_number(links[li], "uplink_mbps", lwhere);
      c.links.push_back(std::move(l));
    }
    s.clients.push_back(std::move(c));
  }

  validate(s);
  return s;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  validate(scenario);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  out << scenario_to_json(scenario);
  if (!out.flush()) {
    throw IoError(fmt::format("write to '{}' failed", path.string()));
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open scenario '{}'", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return scenario_from_json(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace bassim
