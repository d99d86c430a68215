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

#include "bassim/scheduler.hpp"
#include "bassim/topology.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bassim {

enum class Policy { bass_exact, bass_greedy, random };

std::string_view to_string(Policy policy);
/// Throws ValidationError listing the valid names.
Policy policy_from_string(std::string_view name);
inline constexpr std::string_view kPolicyNames = "bass_exact, bass_greedy, random";

struct SimConfig {
  int epochs = 10;
  /// Label only; one epoch is one re-allocation round.
  double epoch_minutes = 30.0;
  /// Poisson mean of new clients per epoch.
  double arrival_rate = 3.0;
  /// Geometric session length; infinity disables departures.
  double session_epochs_mean = 20.0;
  Policy policy = Policy::bass_greedy;
  std::size_t k_candidates = kDefaultCandidates;
  double load_threshold = kDefaultLoadThreshold;
  double reserve_mbps = kDefaultReserveMbps;
  std::uint64_t seed = 1;
  /// Fresh path noise every epoch instead of one draw per scenario.
  bool remeasure_noise = false;
  /// Every active client is re-allocated on epochs divisible by this.
  int realloc_period_epochs = 1;
  /// Between periodic rounds, clients whose measured throughput drops below
  /// this re-request as well. 0 disables.
  double realloc_throughput_floor_mbps = 0.0;
  std::size_t exact_max_clients = kDefaultExactMaxClients;
};

void validate(const SimConfig& config);

/// Per-client result of one epoch. `server_id` is empty when the client
/// stays on its direct path.
struct ClientOutcome {
  std::string client_id;
  std::string server_id;
  double b_baseline_mbps = 0.0;
  double b_achieved_mbps = 0.0;
  double gain_mbps = 0.0;
  /// Achieved over best option; unset when the client had no feasible
  /// candidate or no usable path at all.
  std::optional<double> gamma;
  /// Chosen option is one of the best feasible options.
  bool hit = false;

  friend bool operator==(const ClientOutcome&, const ClientOutcome&) = default;
};

struct ServerLoad {
  std::string server_id;
  double load_rate = 0.0;

  friend bool operator==(const ServerLoad&, const ServerLoad&) = default;
};

struct EpochRecord {
  std::uint64_t epoch = 0;
  AllocationPlan plan;
  std::vector<ClientOutcome> clients;
  std::vector<ServerLoad> server_loads;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// Mutable simulation state. Owned by a single simulation loop.
struct SimState {
  std::vector<OriginServer> origins;
  NetModelParams net_params;
  std::uint64_t net_seed = 0;
  ServerPool pool;
  /// Active clients by id, with the epoch they arrived in.
  std::map<std::string, BBoxClient> clients;
  std::map<std::string, std::uint64_t> arrival_epoch;
  /// Last outcome per active client; carried over when a client keeps its
  /// assignment between periodic rounds.
  std::map<std::string, ClientOutcome> last_outcome;
  std::uint64_t epoch = 0;
};

SimState init_state(const Scenario& scenario, const SimConfig& config);

/// Uniform choice among the candidates that still fit, per client in id
/// order. Always feasible.
AllocationPlan random_policy(const RequestBatch& batch,
                             const Capacities& capacities, double reserve_mbps,
                             std::uint64_t seed);

/// achieved / best in (0, 1]. nullopt when best <= 0 (no usable option).
std::optional<double> hit_rate(double b_achieved_mbps, double b_best_mbps);

/// One scheduling round: departures, arrivals, measurement, solve, commit,
/// metrics. `oracle` overrides the scenario's synthetic net model when set.
/// Throws InvariantError if bookkeeping breaks.
EpochRecord run_epoch(SimState& state, const SimConfig& config,
                      const PathOracle* oracle = nullptr);

/// Throws InvariantError unless T - R equals the active demand on every
/// server.
void check_capacity_conservation(const SimState& state);

std::vector<EpochRecord> run_simulation(const Scenario& scenario,
                                        const SimConfig& config,
                                        const PathOracle* oracle = nullptr);

}  // namespace bassim
