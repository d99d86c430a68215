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

// Test-only helpers: a seeded random batch generator and a brute-force
// enumerator that shares no plan-generation code with the solvers.

#pragma once

#include "bassim/random.hpp"
#include "bassim/scheduler.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bassim::testing {

struct RandomInstance {
  RequestBatch batch;
  Capacities capacities;
  double reserve_mbps = 0.0;
};

/// Integer-valued bandwidths so every sum is exact. Gains may be negative,
/// clients may have zero candidates, capacities may be below the reserve.
inline RandomInstance random_instance(std::uint64_t seed, int max_clients,
                                      int max_servers) {
  SplitMix64 rng(seed);
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  RandomInstance inst;
  const int n = pick(1, max_clients);
  const int m = pick(1, max_servers);
  inst.reserve_mbps = pick(0, 3);
  for (int j = 0; j < m; ++j) {
    inst.capacities[fmt::format("s{}", j)] = pick(0, 24);
  }
  std::vector<ClientRequest> requests;
  for (int i = 0; i < n; ++i) {
    ClientRequest req;
    req.client_id = fmt::format("c{:02}", i);
    const double baseline = pick(0, 8);
    for (int j = 0; j < m; ++j) {
      if (pick(0, 3) == 0) continue;
      req.candidates.push_back(make_gain_entry(req.client_id,
                                               fmt::format("s{}", j), pick(0, 14),
                                               pick(0, 14), baseline));
    }
    requests.push_back(std::move(req));
  }
  inst.batch = RequestBatch(0, std::move(requests));
  return inst;
}

struct BruteForceResult {
  double objective = 0.0;
  /// client -> server; clients left on their direct path are absent.
  std::map<std::string, std::string> assignment;
};

/// Enumerates every combination of {unassigned, candidate...} per client
/// with a mixed-radix counter. Ties go to the lexicographically smallest
/// assignment vector, "unassigned" ranking before any server.
inline BruteForceResult brute_force(const RequestBatch& batch,
                                    const Capacities& capacities,
                                    double reserve_mbps) {
  const auto& reqs = batch.requests();
  const std::size_t n = reqs.size();
  std::vector<std::size_t> digit(n, 0);

  auto vector_of = [&](const std::vector<std::size_t>& d) {
    std::vector<std::string> v(n);  // "" = unassigned
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i] > 0) v[i] = reqs[i].candidates[d[i] - 1].server_id;
    }
    return v;
  };

  bool have_best = false;
  double best = 0.0;
  std::vector<std::string> best_vec;
  while (true) {
    std::map<std::string, double> load;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (digit[i] == 0) continue;
      const GainEntry& e = reqs[i].candidates[digit[i] - 1];
      load[e.server_id] += e.b_via_mbps;
      total += e.gain_mbps;
    }
    bool feasible = true;
    for (const auto& [server, sum] : load) {
      if (sum > capacities.at(server) - reserve_mbps) feasible = false;
    }
    if (feasible) {
      auto vec = vector_of(digit);
      if (!have_best || total > best || (total == best && vec < best_vec)) {
        have_best = true;
        best = total;
        best_vec = std::move(vec);
      }
    }
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++digit[i] <= reqs[i].candidates.size()) break;
      digit[i] = 0;
    }
    if (i == n) break;
  }

  BruteForceResult r;
  r.objective = best;
  for (std::size_t i = 0; i < n; ++i) {
    if (!best_vec[i].empty()) r.assignment[reqs[i].client_id] = best_vec[i];
  }
  return r;
}

inline std::map<std::string, std::string> assignment_of(
    const AllocationPlan& plan) {
  std::map<std::string, std::string> out;
  for (const auto& [c, a] : plan.assignments) out[c] = a.server_id;
  return out;
}

}  // namespace bassim::testing
