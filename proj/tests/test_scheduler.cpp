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

#include "test_support.hpp"

#include "bassim/errors.hpp"
#include "bassim/scheduler.hpp"

#include <gtest/gtest.h>

namespace bassim {
namespace {

using testing::assignment_of;
using testing::brute_force;
using testing::random_instance;

/// Fixed per-hop capacities; 1e3 Mbit/s stands for "uncapped".
class TableOracle final : public PathOracle {
 public:
  double to_server = 1e3;
  double server_origin = 1e3;
  double direct = 1e3;

  double link_to_server(const BBoxClient&, const EdgeLink&,
                        const AggregationServer&) const override {
    return to_server;
  }
  double server_to_origin(const AggregationServer&,
                          const OriginServer&) const override {
    return server_origin;
  }
  double link_to_origin(const BBoxClient&, const EdgeLink&,
                        const OriginServer&) const override {
    return direct;
  }
};

BBoxClient two_link_client() {
  return {"c1", {0, 0}, {{"w", LinkKind::wifi, 2}, {"c", LinkKind::cellular, 3}},
          "o1"};
}

const std::vector<OriginServer> kOrigins{{"o1", {10, 10}}};
const std::vector<AggregationServer> kOneServer{{"s1", {1, 1}, 100, 100}};

TEST(MeasureGains, SubflowsAddUp) {
  TableOracle net;
  net.server_origin = 50;
  const auto entries = measure_gains(two_link_client(), kOneServer, kOrigins, net);
  ASSERT_EQ(1u, entries.size());
  EXPECT_EQ(5.0, entries[0].b_client_server_mbps);
  EXPECT_EQ(5.0, entries[0].b_via_mbps);
  EXPECT_EQ(3.0, entries[0].b_baseline_mbps);
  EXPECT_EQ(2.0, entries[0].gain_mbps);
}

TEST(MeasureGains, OriginPathBinds) {
  TableOracle net;
  net.server_origin = 4;
  const auto entries = measure_gains(two_link_client(), kOneServer, kOrigins, net);
  EXPECT_EQ(4.0, entries[0].b_via_mbps);
  EXPECT_EQ(1.0, entries[0].gain_mbps);
}

TEST(MeasureGains, EqualToDirectPathIsZeroGain) {
  TableOracle net;
  BBoxClient c{"c1", {0, 0}, {{"w", LinkKind::wifi, 3}}, "o1"};
  const auto entries = measure_gains(c, kOneServer, kOrigins, net);
  EXPECT_EQ(0.0, entries[0].gain_mbps);
}

TEST(MeasureGains, PathCapsEachLinkAndSortsByGain) {
  class PerServer final : public PathOracle {
   public:
    double link_to_server(const BBoxClient&, const EdgeLink&,
                          const AggregationServer& s) const override {
      return s.id == "s1" ? 1.0 : 2.5;
    }
    double server_to_origin(const AggregationServer&,
                            const OriginServer&) const override {
      return 100;
    }
    double link_to_origin(const BBoxClient&, const EdgeLink&,
                          const OriginServer&) const override {
      return 1.5;
    }
  } net;
  const std::vector<AggregationServer> servers{{"s1", {1, 1}, 100, 100},
                                               {"s2", {2, 2}, 100, 100}};
  const auto entries = measure_gains(two_link_client(), servers, kOrigins, net);
  ASSERT_EQ(2u, entries.size());
  // s2: min(2, 2.5) + min(3, 2.5) = 4.5; s1: 1 + 1 = 2; baseline 1.5.
  EXPECT_EQ("s2", entries[0].server_id);
  EXPECT_EQ(4.5, entries[0].b_via_mbps);
  EXPECT_EQ(3.0, entries[0].gain_mbps);
  EXPECT_EQ("s1", entries[1].server_id);
  EXPECT_EQ(0.5, entries[1].gain_mbps);
}

TEST(MeasureGains, UnknownOrigin) {
  TableOracle net;
  BBoxClient c = two_link_client();
  c.origin_id = "nope";
  EXPECT_THROW(measure_gains(c, kOneServer, kOrigins, net), NotFoundError);
}

RequestBatch capacity_conflict_batch() {
  // c1: demand 8, gain 5. c2: demand 6, gain 4.
  return RequestBatch(0, {{"c1", {make_gain_entry("c1", "s1", 8, 100, 3)}},
                          {"c2", {make_gain_entry("c2", "s1", 6, 100, 2)}}});
}

TEST(SolveExact, CapacityForcesChoice) {
  const auto batch = capacity_conflict_batch();
  const Capacities caps{{"s1", 10}};
  const AllocationPlan plan = solve_exact(batch, caps, 0);
  EXPECT_EQ((std::map<std::string, std::string>{{"c1", "s1"}}),
            assignment_of(plan));
  EXPECT_EQ(5.0, plan.objective_mbps);
  EXPECT_EQ(5.0, brute_force(batch, caps, 0).objective);
}

TEST(SolveExact, TwoByTwo) {
  const RequestBatch batch(
      0, {{"c1",
           {make_gain_entry("c1", "s1", 8, 100, 3),
            make_gain_entry("c1", "s2", 8, 100, 5)}},
          {"c2",
           {make_gain_entry("c2", "s1", 8, 100, 4),
            make_gain_entry("c2", "s2", 8, 100, 4)}}});
  const Capacities caps{{"s1", 10}, {"s2", 10}};
  const AllocationPlan plan = solve_exact(batch, caps, 0);
  EXPECT_EQ((std::map<std::string, std::string>{{"c1", "s1"}, {"c2", "s2"}}),
            assignment_of(plan));
  EXPECT_EQ(9.0, plan.objective_mbps);
  EXPECT_EQ(9.0, brute_force(batch, caps, 0).objective);
}

TEST(SolveExact, NegativeGainLeftUnassigned) {
  const RequestBatch batch(0, {{"c1", {make_gain_entry("c1", "s1", 4, 100, 5)}}});
  const AllocationPlan plan = solve_exact(batch, {{"s1", 100}}, 0);
  EXPECT_TRUE(plan.assignments.empty());
  EXPECT_EQ(0.0, plan.objective_mbps);
}

TEST(SolveExact, ReserveIsHonoured) {
  const auto batch = capacity_conflict_batch();
  // 60 - 50 leaves room for exactly one of the two demands (8 fits, 8+6 not).
  const AllocationPlan plan = solve_exact(batch, {{"s1", 60}}, 50);
  EXPECT_EQ(5.0, plan.objective_mbps);
  EXPECT_TRUE(plan.assignments.size() == 1 && plan.assignments.contains("c1"));
}

TEST(SolveExact, SizeCap) {
  std::vector<ClientRequest> reqs;
  for (int i = 0; i < 13; ++i) {
    const std::string id = "c" + std::to_string(100 + i);
    reqs.push_back({id, {make_gain_entry(id, "s1", 1, 1, 0)}});
  }
  const RequestBatch batch(0, std::move(reqs));
  EXPECT_THROW(solve_exact(batch, {{"s1", 100}}, 0), SizeError);
  EXPECT_NO_THROW(solve_exact(batch, {{"s1", 100}}, 0, 13));
}

TEST(SolveExact, UnknownServerCapacity) {
  EXPECT_THROW(solve_exact(capacity_conflict_batch(), {{"s9", 10}}, 0),
               NotFoundError);
}

TEST(SolveGreedy, MatchesExactOnCapacityConflict) {
  const auto batch = capacity_conflict_batch();
  const Capacities caps{{"s1", 10}};
  EXPECT_EQ(solve_exact(batch, caps, 0), solve_greedy(batch, caps, 0));
}

TEST(SolveGreedy, NonPositiveGainsGiveEmptyPlan) {
  const RequestBatch batch(
      0, {{"c1", {make_gain_entry("c1", "s1", 4, 100, 5)}},
          {"c2", {make_gain_entry("c2", "s1", 5, 100, 5)}}});
  const AllocationPlan plan = solve_greedy(batch, {{"s1", 100}}, 0);
  EXPECT_TRUE(plan.assignments.empty());
  EXPECT_EQ(0.0, plan.objective_mbps);
}

TEST(SolveGreedy, TieBreakByClientThenServer) {
  const RequestBatch batch(
      0, {{"c2", {make_gain_entry("c2", "s1", 6, 100, 2)}},
          {"c1",
           {make_gain_entry("c1", "s2", 6, 100, 2),
            make_gain_entry("c1", "s1", 6, 100, 2)}}});
  // s1 fits one demand; c1 goes first and takes s1 (server id order).
  const AllocationPlan plan = solve_greedy(batch, {{"s1", 6}, {"s2", 6}}, 0);
  EXPECT_EQ((std::map<std::string, std::string>{{"c1", "s1"}}),
            assignment_of(plan));
}

TEST(RequestBatch, CanonicalOrderAndValidation) {
  const RequestBatch batch(
      3, {{"b", {make_gain_entry("b", "s2", 1, 9, 0), make_gain_entry("b", "s1", 1, 9, 0),
                 make_gain_entry("b", "s3", 5, 9, 0)}},
          {"a", {}}});
  EXPECT_EQ(3u, batch.epoch());
  ASSERT_EQ(2u, batch.num_clients());
  EXPECT_EQ("a", batch.requests()[0].client_id);
  const auto& cands = batch.requests()[1].candidates;
  EXPECT_EQ("s3", cands[0].server_id);
  EXPECT_EQ("s1", cands[1].server_id);
  EXPECT_EQ("s2", cands[2].server_id);
  EXPECT_EQ(3u, batch.num_servers());

  EXPECT_THROW(RequestBatch(0, {{"a", {}}, {"a", {}}}), ValidationError);
  EXPECT_THROW(RequestBatch(0, {{"a", {make_gain_entry("b", "s1", 1, 1, 0)}}}),
               ValidationError);
  EXPECT_THROW(RequestBatch(0, {{"a",
                                 {make_gain_entry("a", "s1", 1, 1, 0),
                                  make_gain_entry("a", "s1", 2, 1, 0)}}}),
               ValidationError);
}

// Properties over seeded random instances.

TEST(SolverProperties, ExactMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto inst = random_instance(seed, 4, 4);
    const auto plan = solve_exact(inst.batch, inst.capacities, inst.reserve_mbps);
    const auto oracle = brute_force(inst.batch, inst.capacities, inst.reserve_mbps);
    ASSERT_EQ(oracle.objective, plan.objective_mbps) << "seed " << seed;
    ASSERT_EQ(oracle.assignment, assignment_of(plan)) << "seed " << seed;
  }
}

TEST(SolverProperties, GreedyBoundedByExactAndBothFeasible) {
  for (std::uint64_t seed = 1000; seed < 3000; ++seed) {
    const auto inst = random_instance(seed, 8, 5);
    const auto exact = solve_exact(inst.batch, inst.capacities, inst.reserve_mbps);
    const auto greedy =
        solve_greedy(inst.batch, inst.capacities, inst.reserve_mbps);
    ASSERT_LE(greedy.objective_mbps, exact.objective_mbps) << "seed " << seed;
    ASSERT_GE(greedy.objective_mbps, 0.0);
    EXPECT_NO_THROW(
        check_plan(exact, inst.batch, inst.capacities, inst.reserve_mbps));
    EXPECT_NO_THROW(
        check_plan(greedy, inst.batch, inst.capacities, inst.reserve_mbps));
  }
}

TEST(SolverProperties, AddingServerNeverHurtsExact) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto inst = random_instance(seed, 6, 3);
    const double before =
        solve_exact(inst.batch, inst.capacities, inst.reserve_mbps).objective_mbps;

    SplitMix64 rng(seed ^ 0xabcdef);
    std::vector<ClientRequest> reqs = inst.batch.requests();
    for (auto& r : reqs) {
      if (rng() % 2 == 0) continue;
      const double baseline = r.candidates.empty()
                                  ? static_cast<double>(rng() % 5)
                                  : r.candidates.front().b_baseline_mbps;
      r.candidates.push_back(make_gain_entry(
          r.client_id, "zz", static_cast<double>(rng() % 12),
          static_cast<double>(rng() % 12), baseline));
    }
    Capacities caps = inst.capacities;
    caps["zz"] = inst.reserve_mbps + 1 + static_cast<double>(rng() % 20);
    const double after =
        solve_exact(RequestBatch(0, reqs), caps, inst.reserve_mbps).objective_mbps;
    ASSERT_GE(after, before) << "seed " << seed;
  }
}

TEST(SolverProperties, Deterministic) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = random_instance(seed, 10, 4);
    EXPECT_EQ(solve_exact(inst.batch, inst.capacities, inst.reserve_mbps),
              solve_exact(inst.batch, inst.capacities, inst.reserve_mbps));
    EXPECT_EQ(solve_greedy(inst.batch, inst.capacities, inst.reserve_mbps),
              solve_greedy(inst.batch, inst.capacities, inst.reserve_mbps));
  }
}

AllocationPlan plan_of(std::initializer_list<std::pair<std::string, Assignment>> a) {
  AllocationPlan p;
  for (const auto& [c, as] : a) p.assignments.emplace(c, as);
  p.objective_mbps = plan_objective(p);
  return p;
}

TEST(ServerPool, ApplyDecrementsRemaining) {
  ServerPool pool({{"s1", {0, 0}, 10, 10}}, 0);
  pool.apply_plan(plan_of({{"c1", {"s1", 8, 5}}}));
  EXPECT_EQ(2.0, pool.server("s1").remaining_capacity_mbps);
  EXPECT_TRUE(pool.is_assigned("c1"));
}

TEST(ServerPool, EmptyPlanLeavesServersUnchanged) {
  const std::vector<AggregationServer> servers{{"s1", {0, 0}, 10, 7}};
  ServerPool pool(servers, 0);
  pool.apply_plan(AllocationPlan{});
  EXPECT_EQ(servers, pool.servers());
}

TEST(ServerPool, ReserveBoundaryIsInclusive) {
  // R = 70, reserve 50: demands summing to exactly 20 fit.
  ServerPool pool({{"s1", {0, 0}, 100, 70}}, 50);
  EXPECT_NO_THROW(pool.apply_plan(
      plan_of({{"c1", {"s1", 12, 1}}, {"c2", {"s1", 8, 1}}})));
  EXPECT_EQ(50.0, pool.server("s1").remaining_capacity_mbps);

  ServerPool over({{"s1", {0, 0}, 100, 70}}, 50);
  const auto before = over.servers();
  EXPECT_THROW(over.apply_plan(plan_of({{"c1", {"s1", 12, 1}},
                                        {"c2", {"s1", 8 + kMeasurementQuantumMbps, 1}}})),
               ConflictError);
  EXPECT_EQ(before, over.servers());
  EXPECT_TRUE(over.active().empty());
}

TEST(ServerPool, UntouchedServerBelowReserveDoesNotBlock) {
  ServerPool pool({{"s1", {0, 0}, 100, 100}, {"s2", {0, 0}, 100, 10}}, 50);
  EXPECT_NO_THROW(pool.apply_plan(plan_of({{"c1", {"s1", 20, 4}}})));
  EXPECT_EQ(80.0, pool.server("s1").remaining_capacity_mbps);
  EXPECT_EQ(10.0, pool.server("s2").remaining_capacity_mbps);
}

TEST(ServerPool, ConflictsOnDoubleAssignment) {
  ServerPool pool({{"s1", {0, 0}, 100, 100}}, 0);
  pool.apply_plan(plan_of({{"c1", {"s1", 1, 1}}}));
  EXPECT_THROW(pool.apply_plan(plan_of({{"c1", {"s1", 1, 1}}})), ConflictError);
  EXPECT_THROW(pool.apply_plan(plan_of({{"c2", {"s9", 1, 1}}})), ConflictError);
}

TEST(ServerPool, ReleaseRestoresExactly) {
  ServerPool pool({{"s1", {0, 0}, 10, 10}}, 0);
  pool.apply_plan(plan_of({{"c1", {"s1", 8, 5}}}));
  pool.release("c1");
  EXPECT_EQ(10.0, pool.server("s1").remaining_capacity_mbps);
  EXPECT_THROW(pool.release("c1"), NotFoundError);
  EXPECT_THROW(pool.release("never"), NotFoundError);
}

TEST(ServerPool, ApplyThenReleaseAllRestoresInitial) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SplitMix64 rng(seed);
    std::vector<AggregationServer> servers;
    for (int j = 0; j < 4; ++j) {
      const double total = 100 + static_cast<double>(rng() % 100);
      servers.push_back({"s" + std::to_string(j), {0, 0}, total,
                         quantize_mbps(total * rng.uniform01())});
    }
    ServerPool pool(servers, 0);
    AllocationPlan plan;
    std::map<std::string, double> room;
    for (const auto& s : servers) room[s.id] = s.remaining_capacity_mbps;
    for (int i = 0; i < 30; ++i) {
      const std::string sid = "s" + std::to_string(rng() % 4);
      const double d = quantize_mbps(rng.uniform01() * 10);
      if (d > room[sid]) continue;
      room[sid] -= d;
      plan.assignments.emplace("c" + std::to_string(i), Assignment{sid, d, 1});
    }
    plan.objective_mbps = plan_objective(plan);
    pool.apply_plan(plan);
    for (const auto& [c, _] : plan.assignments) pool.release(c);
    EXPECT_EQ(servers, pool.servers()) << "seed " << seed;
  }
}

}  // namespace
}  // namespace bassim
