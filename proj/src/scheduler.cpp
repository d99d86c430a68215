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

#include "bassim/scheduler.hpp"

#include "bassim/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace bassim {

namespace {

bool gain_order(const GainEntry& a, const GainEntry& b) {
  if (a.gain_mbps != b.gain_mbps) return a.gain_mbps > b.gain_mbps;
  return a.server_id < b.server_id;
}

struct IndexedCapacities {
  std::map<std::string, std::size_t> index;
  std::vector<double> available;  // R - reserve
};

IndexedCapacities index_capacities(const Capacities& capacities,
                                   double reserve_mbps) {
  if (!std::isfinite(reserve_mbps) || reserve_mbps < 0.0) {
    throw ValidationError(
        fmt::format("reserve_mbps must be >= 0, got {}", reserve_mbps));
  }
  IndexedCapacities out;
  for (const auto& [id, remaining] : capacities) {
    out.index.emplace(id, out.available.size());
    out.available.push_back(remaining - reserve_mbps);
  }
  return out;
}

std::size_t lookup_server(const IndexedCapacities& caps, const std::string& id) {
  auto it = caps.index.find(id);
  if (it == caps.index.end()) {
    throw NotFoundError(fmt::format("no capacity known for server '{}'", id));
  }
  return it->second;
}

}  // namespace

RequestBatch::RequestBatch(std::uint64_t epoch,
                           std::vector<ClientRequest> requests)
    : epoch_(epoch), requests_(std::move(requests)) {
  std::sort(requests_.begin(), requests_.end(),
            [](const ClientRequest& a, const ClientRequest& b) {
              return a.client_id < b.client_id;
            });
  for (std::size_t i = 0; i < requests_.size(); ++i) {
    auto& req = requests_[i];
    if (i > 0 && requests_[i - 1].client_id == req.client_id) {
      throw ValidationError(
          fmt::format("batch: duplicate client '{}'", req.client_id));
    }
    std::set<std::string_view> servers;
    for (const auto& e : req.candidates) {
      if (e.client_id != req.client_id) {
        throw ValidationError(fmt::format(
            "batch: entry for client '{}' filed under '{}'", e.client_id,
            req.client_id));
      }
      if (!servers.insert(e.server_id).second) {
        throw ValidationError(
            fmt::format("batch: client '{}' lists server '{}' twice",
                        req.client_id, e.server_id));
      }
    }
    std::sort(req.candidates.begin(), req.candidates.end(), gain_order);
  }
}

std::size_t RequestBatch::num_servers() const {
  std::set<std::string_view> servers;
  for (const auto& req : requests_) {
    for (const auto& e : req.candidates) servers.insert(e.server_id);
  }
  return servers.size();
}

const GainEntry* RequestBatch::find(const std::string& client_id,
                                    const std::string& server_id) const {
  auto it = std::lower_bound(
      requests_.begin(), requests_.end(), client_id,
      [](const ClientRequest& r, const std::string& id) {
        return r.client_id < id;
      });
  if (it == requests_.end() || it->client_id != client_id) return nullptr;
  for (const auto& e : it->candidates) {
    if (e.server_id == server_id) return &e;
  }
  return nullptr;
}

double plan_objective(const AllocationPlan& plan) {
  double sum = 0.0;
  for (const auto& [_, a] : plan.assignments) sum += a.gain_mbps;
  return sum;
}

bool is_feasible(const AllocationPlan& plan, const Capacities& capacities,
                 double reserve_mbps) {
  std::map<std::string, double> load;
  for (const auto& [_, a] : plan.assignments) {
    if (!capacities.contains(a.server_id)) return false;
    load[a.server_id] += a.b_via_mbps;
  }
  for (const auto& [server, sum] : load) {
    if (sum > capacities.at(server) - reserve_mbps) return false;
  }
  return true;
}

void check_plan(const AllocationPlan& plan, const RequestBatch& batch,
                const Capacities& capacities, double reserve_mbps) {
  for (const auto& [client, a] : plan.assignments) {
    const GainEntry* e = batch.find(client, a.server_id);
    if (e == nullptr || e->b_via_mbps != a.b_via_mbps ||
        e->gain_mbps != a.gain_mbps) {
      throw InvariantError(fmt::format(
          "plan assigns '{}' -> '{}' which is not a batch candidate", client,
          a.server_id));
    }
  }
  if (plan.objective_mbps != plan_objective(plan)) {
    throw InvariantError(
        fmt::format("plan objective {} does not match its assignments ({})",
                    plan.objective_mbps, plan_objective(plan)));
  }
  if (!is_feasible(plan, capacities, reserve_mbps)) {
    throw InvariantError("plan exceeds server capacity minus reserve");
  }
}

const OriginServer& find_origin(const BBoxClient& client,
                                const std::vector<OriginServer>& origins) {
  auto it =
      std::find_if(origins.begin(), origins.end(),
                   [&](const OriginServer& o) { return o.id == client.origin_id; });
  if (it == origins.end()) {
    throw NotFoundError(fmt::format("client '{}': unknown origin '{}'",
                                    client.id, client.origin_id));
  }
  return *it;
}

double measure_baseline(const BBoxClient& client, const OriginServer& origin,
                        const PathOracle& net) {
  std::vector<double> direct;
  direct.reserve(client.links.size());
  for (const auto& link : client.links) {
    direct.push_back(
        std::min(link.uplink_mbps,
                 quantize_mbps(net.link_to_origin(client, link, origin))));
  }
  return baseline_bandwidth(direct);
}

std::vector<GainEntry> measure_gains(
    const BBoxClient& client, const std::vector<AggregationServer>& candidates,
    const std::vector<OriginServer>& origins, const PathOracle& net) {
  validate(client);
  const OriginServer& origin = find_origin(client, origins);
  const double baseline = measure_baseline(client, origin, net);

  std::vector<GainEntry> out;
  out.reserve(candidates.size());
  std::vector<double> subflows(client.links.size());
  for (const auto& server : candidates) {
    for (std::size_t i = 0; i < client.links.size(); ++i) {
      const auto& link = client.links[i];
      subflows[i] = std::min(
          link.uplink_mbps,
          quantize_mbps(net.link_to_server(client, link, server)));
    }
    double b_client_server = 0.0;
    for (double v : subflows) b_client_server += v;
    const double b_server_origin =
        quantize_mbps(net.server_to_origin(server, origin));
    GainEntry e = make_gain_entry(client.id, server.id, b_client_server,
                                  b_server_origin, baseline);
    if (e.b_via_mbps != aggregated_path_bandwidth(subflows, b_server_origin)) {
      throw InvariantError("via-bandwidth disagrees with aggregation rule");
    }
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), gain_order);
  return out;
}

AllocationPlan solve_exact(const RequestBatch& batch,
                           const Capacities& capacities, double reserve_mbps,
                           std::size_t max_clients) {
  const std::size_t n = batch.num_clients();
  if (n > max_clients) {
    throw SizeError(fmt::format(
        "exact solver is capped at {} clients, batch has {}; use the greedy "
        "solver for larger batches",
        max_clients, n));
  }
  const IndexedCapacities caps = index_capacities(capacities, reserve_mbps);

  struct Option {
    const GainEntry* entry;
    std::size_t server;
  };
  // Only positive gains are worth branching on: a zero or negative
  // assignment never beats leaving the client unassigned, which also sorts
  // first.
  std::vector<std::vector<Option>> options(n);
  std::vector<double> best_suffix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : batch.requests()[i].candidates) {
      const std::size_t server = lookup_server(caps, e.server_id);
      if (e.gain_mbps > 0.0) options[i].push_back({&e, server});
    }
    std::sort(options[i].begin(), options[i].end(),
              [](const Option& a, const Option& b) {
                return a.entry->server_id < b.entry->server_id;
              });
  }
  for (std::size_t i = n; i-- > 0;) {
    double top = 0.0;
    for (const auto& o : options[i]) top = std::max(top, o.entry->gain_mbps);
    best_suffix[i] = best_suffix[i + 1] + top;
  }

  std::vector<double> used(caps.available.size(), 0.0);
  std::vector<int> choice(n, -1);
  std::vector<int> best_choice(n, -1);
  // Warm start from the greedy value. Until the search reaches that value
  // itself, ties must still be explored: the lexicographically smallest
  // optimal plan is the first one met in search order.
  double best = solve_greedy(batch, capacities, reserve_mbps).objective_mbps;
  bool found = false;

  auto search = [&](auto&& self, std::size_t i, double current) -> void {
    if (i == n) {
      if (current > best || (!found && current == best)) {
        best = current;
        best_choice = choice;
        found = true;
      }
      return;
    }
    const double bound = current + best_suffix[i];
    if (found ? bound <= best : bound < best) return;
    choice[i] = -1;
    self(self, i + 1, current);
    for (std::size_t k = 0; k < options[i].size(); ++k) {
      const Option& o = options[i][k];
      const double demand = o.entry->b_via_mbps;
      if (used[o.server] + demand > caps.available[o.server]) continue;
      used[o.server] += demand;
      choice[i] = static_cast<int>(k);
      self(self, i + 1, current + o.entry->gain_mbps);
      used[o.server] -= demand;
    }
    choice[i] = -1;
  };
  search(search, 0, 0.0);

  AllocationPlan plan;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_choice[i] < 0) continue;
    const GainEntry& e = *options[i][best_choice[i]].entry;
    plan.assignments.emplace(e.client_id,
                             Assignment{e.server_id, e.b_via_mbps, e.gain_mbps});
  }
  plan.objective_mbps = plan_objective(plan);
  return plan;
}

AllocationPlan solve_greedy(const RequestBatch& batch,
                            const Capacities& capacities, double reserve_mbps) {
  const IndexedCapacities caps = index_capacities(capacities, reserve_mbps);

  std::vector<const GainEntry*> pairs;
  for (const auto& req : batch.requests()) {
    for (const auto& e : req.candidates) pairs.push_back(&e);
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const GainEntry* a, const GainEntry* b) {
              return std::tie(b->gain_mbps, a->client_id, a->server_id) <
                     std::tie(a->gain_mbps, b->client_id, b->server_id);
            });

  std::vector<double> used(caps.available.size(), 0.0);
  AllocationPlan plan;
  for (const GainEntry* e : pairs) {
    if (e->gain_mbps <= 0.0) break;
    if (plan.assignments.contains(e->client_id)) continue;
    const std::size_t server = lookup_server(caps, e->server_id);
    if (used[server] + e->b_via_mbps > caps.available[server]) continue;
    used[server] += e->b_via_mbps;
    plan.assignments.emplace(
        e->client_id, Assignment{e->server_id, e->b_via_mbps, e->gain_mbps});
  }
  plan.objective_mbps = plan_objective(plan);
  return plan;
}

ServerPool::ServerPool(std::vector<AggregationServer> servers,
                       double reserve_mbps)
    : servers_(std::move(servers)), reserve_mbps_(reserve_mbps) {
  if (!std::isfinite(reserve_mbps) || reserve_mbps < 0.0) {
    throw ValidationError(
        fmt::format("reserve_mbps must be >= 0, got {}", reserve_mbps));
  }
  std::sort(servers_.begin(), servers_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t j = 0; j < servers_.size(); ++j) {
    validate(servers_[j]);
    if (!index_.emplace(servers_[j].id, j).second) {
      throw ValidationError(
          fmt::format("duplicate agg_server id '{}'", servers_[j].id));
    }
    initial_load_.push_back(servers_[j].total_capacity_mbps -
                            servers_[j].remaining_capacity_mbps);
  }
}

std::size_t ServerPool::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw NotFoundError(fmt::format("unknown aggregation server '{}'", id));
  }
  return it->second;
}

const AggregationServer& ServerPool::server(const std::string& id) const {
  return servers_[index_of(id)];
}

Capacities ServerPool::capacities() const {
  Capacities out;
  for (const auto& s : servers_) out.emplace(s.id, s.remaining_capacity_mbps);
  return out;
}

void ServerPool::apply_plan(const AllocationPlan& plan) {
  std::vector<double> demand(servers_.size(), 0.0);
  std::vector<bool> touched(servers_.size(), false);
  for (const auto& [client, a] : plan.assignments) {
    if (active_.contains(client)) {
      throw ConflictError(
          fmt::format("client '{}' already holds an assignment", client));
    }
    auto it = index_.find(a.server_id);
    if (it == index_.end()) {
      throw ConflictError(fmt::format("client '{}' assigned to unknown server '{}'",
                                      client, a.server_id));
    }
    demand[it->second] += a.b_via_mbps;
    touched[it->second] = true;
  }
  // Servers the plan leaves alone may sit below the reserve already.
  for (std::size_t j = 0; j < servers_.size(); ++j) {
    if (touched[j] && demand[j] > servers_[j].remaining_capacity_mbps - reserve_mbps_) {
      throw ConflictError(fmt::format(
          "server '{}': demand {} Mbit/s exceeds remaining {} minus reserve {}",
          servers_[j].id, demand[j], servers_[j].remaining_capacity_mbps,
          reserve_mbps_));
    }
  }
  for (const auto& [client, a] : plan.assignments) {
    servers_[index_.at(a.server_id)].remaining_capacity_mbps -= a.b_via_mbps;
    active_.emplace(client, a);
  }
}

void ServerPool::release(const std::string& client_id) {
  auto it = active_.find(client_id);
  if (it == active_.end()) {
    throw NotFoundError(
        fmt::format("client '{}' holds no assignment to release", client_id));
  }
  auto& srv = servers_[index_of(it->second.server_id)];
  const double restored = srv.remaining_capacity_mbps + it->second.b_via_mbps;
  if (restored > srv.total_capacity_mbps) {
    throw InvariantError(fmt::format(
        "release of '{}' would push server '{}' above its total capacity",
        client_id, srv.id));
  }
  srv.remaining_capacity_mbps = restored;
  active_.erase(it);
}

std::map<std::string, double> ServerPool::committed_mbps() const {
  std::map<std::string, double> out;
  for (std::size_t j = 0; j < servers_.size(); ++j) {
    out.emplace(servers_[j].id, servers_[j].total_capacity_mbps -
                                    servers_[j].remaining_capacity_mbps -
                                    initial_load_[j]);
  }
  return out;
}

}  // namespace bassim
