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
#include "bassim/topology.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bassim {

/// One client's request: its candidates sorted by gain descending, ties by
/// server id ascending.
struct ClientRequest {
  std::string client_id;
  std::vector<GainEntry> candidates;

  friend bool operator==(const ClientRequest&, const ClientRequest&) = default;
};

/// All requests of one scheduling round, ordered by client id.
class RequestBatch {
 public:
  RequestBatch() = default;

  /// Sorts candidates and requests into canonical order. Throws
  /// ValidationError on duplicate clients, duplicate servers within a
  /// client, or entries whose client_id disagrees with the request.
  RequestBatch(std::uint64_t epoch, std::vector<ClientRequest> requests);

  std::uint64_t epoch() const { return epoch_; }
  const std::vector<ClientRequest>& requests() const { return requests_; }
  std::size_t num_clients() const { return requests_.size(); }
  std::size_t num_servers() const;

  /// Candidate of `client_id` at `server_id`, or nullptr.
  const GainEntry* find(const std::string& client_id,
                        const std::string& server_id) const;

  friend bool operator==(const RequestBatch&, const RequestBatch&) = default;

 private:
  std::uint64_t epoch_ = 0;
  std::vector<ClientRequest> requests_;
};

struct Assignment {
  std::string server_id;
  double b_via_mbps = 0.0;
  double gain_mbps = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Partial client -> server map. Clients absent from `assignments` keep
/// their direct single-network path and contribute zero gain.
struct AllocationPlan {
  std::map<std::string, Assignment> assignments;
  double objective_mbps = 0.0;

  friend bool operator==(const AllocationPlan&, const AllocationPlan&) = default;
};

/// server id -> remaining capacity R (Mbit/s).
using Capacities = std::map<std::string, double>;

inline constexpr double kDefaultReserveMbps = 50.0;
inline constexpr std::size_t kDefaultExactMaxClients = 12;

/// Sum of assigned gains, accumulated in client id order.
double plan_objective(const AllocationPlan& plan);

/// True iff for every server the assigned demands (summed in client id
/// order) stay within remaining - reserve. Unknown servers are infeasible.
bool is_feasible(const AllocationPlan& plan, const Capacities& capacities,
                 double reserve_mbps);

/// Throws InvariantError unless every assignment matches a batch entry, the
/// stored objective equals plan_objective and the plan is feasible.
void check_plan(const AllocationPlan& plan, const RequestBatch& batch,
                const Capacities& capacities, double reserve_mbps);

/// Best single-link upload straight to the client's origin.
double measure_baseline(const BBoxClient& client, const OriginServer& origin,
                        const PathOracle& net);

const OriginServer& find_origin(const BBoxClient& client,
                                const std::vector<OriginServer>& origins);

/// Prices every candidate relay for `client`. Oracle outputs are snapped to
/// the measurement grid before the min/sum/max rules are applied.
std::vector<GainEntry> measure_gains(
    const BBoxClient& client, const std::vector<AggregationServer>& candidates,
    const std::vector<OriginServer>& origins, const PathOracle& net);

/// Exhaustive search for the plan with the highest total gain.
///
/// Each client is either unassigned or placed on one of its candidates;
/// branches are cut once they cannot beat the incumbent. Among plans with
/// equal objective the lexicographically smallest assignment vector wins,
/// where clients are compared in id order and "unassigned" sorts before
/// every server id. Throws SizeError above `max_clients`.
AllocationPlan solve_exact(const RequestBatch& batch,
                           const Capacities& capacities, double reserve_mbps,
                           std::size_t max_clients = kDefaultExactMaxClients);

/// Global highest-gain-first assignment. Pairs are visited by gain
/// descending, then client id, then server id; a pair is taken when its
/// client is still free, its gain is positive and its demand fits.
AllocationPlan solve_greedy(const RequestBatch& batch,
                            const Capacities& capacities, double reserve_mbps);

/// Aggregation servers plus the assignments currently holding capacity.
/// Single writer; owned by the simulation loop.
class ServerPool {
 public:
  ServerPool() = default;
  ServerPool(std::vector<AggregationServer> servers, double reserve_mbps);

  const std::vector<AggregationServer>& servers() const { return servers_; }
  const AggregationServer& server(const std::string& id) const;
  Capacities capacities() const;
  double reserve_mbps() const { return reserve_mbps_; }

  const std::map<std::string, Assignment>& active() const { return active_; }
  bool is_assigned(const std::string& client_id) const {
    return active_.contains(client_id);
  }

  /// Commits every assignment or none. ConflictError when the plan does not
  /// fit the current capacities or reassigns an active client.
  void apply_plan(const AllocationPlan& plan);

  /// Returns the client's demand to its server. NotFoundError when the
  /// client holds no assignment.
  void release(const std::string& client_id);

  /// T - R minus the load present at construction, per server. Matches the
  /// sum of active demands exactly while bookkeeping is intact.
  std::map<std::string, double> committed_mbps() const;

 private:
  std::size_t index_of(const std::string& id) const;

  std::vector<AggregationServer> servers_;
  std::vector<double> initial_load_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, Assignment> active_;
  double reserve_mbps_ = kDefaultReserveMbps;
};

}  // namespace bassim
