#include <doctest.h>

#include <random>
#include <vector>

#include "robocontract/baselines.hpp"

using namespace robocontract;

TEST_CASE("max estimator") {
  CHECK(estimate_max(std::vector<double>{0.2, 0.5, 0.3}) == 2);
  CHECK(estimate_max(std::vector<double>{0.5, 0.5}) == 1);
  CHECK(estimate_max(std::vector<double>{0.0, 0.0, 1.0}) == 3);
}

TEST_CASE("sample estimator") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) CHECK(estimate_sample(std::vector<double>{1.0, 0.0, 0.0}, rng) == 1);
  for (int i = 0; i < 100; ++i) CHECK(estimate_sample(std::vector<double>{0.0, 0.0, 1.0}, rng) == 3);

  std::size_t ones = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ones += estimate_sample(std::vector<double>{0.5, 0.5}, rng) == 1;
  const double freq = static_cast<double>(ones) / draws;
  CHECK(freq > 0.49);
  CHECK(freq < 0.51);

  std::mt19937_64 a(77), b(77);
  for (int i = 0; i < 20; ++i)
    CHECK(estimate_sample(std::vector<double>{0.3, 0.7}, a) == estimate_sample(std::vector<double>{0.3, 0.7}, b));
}

TEST_CASE("mismatch counting") {
  CHECK(count_mismatches(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3}) == 0);
  CHECK(count_mismatches(std::vector<int>{1, 3}, std::vector<int>{3, 1}) == 1);
  CHECK_THROWS_AS(count_mismatches(std::vector<int>{1}, std::vector<int>{1, 2}), std::invalid_argument);
}

TEST_CASE("method names") {
  CHECK(parse_methods("robust,max,samp") == std::vector<Method>{Method::Robust, Method::Max, Method::Sample});
  CHECK(parse_methods("max,max") == std::vector<Method>{Method::Max});
  CHECK(parse_methods("").empty());
  CHECK(to_string(Method::Sample) == "samp");
  CHECK_THROWS_AS(parse_method("oracle"), std::invalid_argument);
}

TEST_CASE("type estimates") {
  std::vector<UserProfile> users(2);
  users[0].belief = {0.7, 0.3};
  users[1].belief = {0.1, 0.9};
  std::mt19937_64 rng(1);
  CHECK(estimate_types(Method::Max, users, rng).types == std::vector<int>{1, 2});
  CHECK(estimate_types(Method::Robust, users, rng).types.empty());
  CHECK(estimate_types(Method::Robust, users, rng).distributional());
  CHECK_THROWS_AS(estimate_types(Method::Contract, users, rng), std::invalid_argument);
  users[0].reported_type = 2;
  users[1].reported_type = 1;
  CHECK(estimate_types(Method::Contract, users, rng).types == std::vector<int>{2, 1});
}

TEST_CASE("energy differences") {
  const std::vector<double> c{1, 2, 3};
  const auto same = energy_difference_report(c, c);
  CHECK(same.mean == 0.0);
  CHECK(same.stddev == 0.0);
  for (double d : same.differences) CHECK(d == 0.0);
  const auto d = energy_difference_report(c, std::vector<double>{2, 4, 6});
  CHECK(d.differences == std::vector<double>{1, 2, 3});
  CHECK(d.mean == doctest::Approx(2.0));
  CHECK(d.stddev == doctest::Approx(1.0));
  CHECK_THROWS_AS(energy_difference_report(c, std::vector<double>{1}), std::invalid_argument);
}

namespace {

std::vector<UserProfile> sample_users(std::mt19937_64& rng, int count, int K) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<UserProfile> users(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto& user = users[static_cast<std::size_t>(i)];
    user.id = i;
    user.position = {u(rng), u(rng)};
    user.true_type = 1 + i % K;
    user.belief.assign(static_cast<std::size_t>(K), 0.0);
    user.belief[static_cast<std::size_t>(user.true_type - 1)] = 1.0;
  }
  return users;
}

std::vector<RobotProfile> sample_robots(std::mt19937_64& rng, int per_type, int K) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<RobotProfile> robots;
  for (int k = 1; k <= K; ++k)
    for (int j = 0; j < per_type; ++j)
      robots.push_back({static_cast<int>(robots.size()), k, {u(rng), u(rng)}});
  return robots;
}

}  // namespace

TEST_CASE("robust allocation with point-mass beliefs equals the known-type run") {
  std::mt19937_64 rng(8);
  const int K = 3;
  const auto users = sample_users(rng, 24, K);
  const auto robots = sample_robots(rng, 2, K);
  PhysicsParams params;
  std::vector<int> truth;
  for (const auto& u : users) truth.push_back(u.true_type);
  const auto known = run_allocation(groups_by_type(users, truth, robots, K), params);
  const auto robust = run_robust(users, robots, K, params);
  CHECK(robust.expected_energy == doctest::Approx(known.total_energy()).epsilon(1e-9));
}

TEST_CASE("uniform beliefs send a lone robot to the mean position") {
  std::mt19937_64 rng(9);
  const int K = 2;
  auto users = sample_users(rng, 10, K);
  Vec2 mean{0, 0};
  for (auto& u : users) {
    u.belief = {0.5, 0.5};
    mean += u.position * 0.1;
  }
  const auto robots = sample_robots(rng, 1, K);
  PhysicsParams params;
  params.beta = 0.0;
  params.epsilon = 1e-10;
  params.t_max = 2000;
  const auto out = run_robust(users, robots, K, params);
  for (const auto& tr : out.allocation.traces) CHECK(distance(tr.positions.back()[0], mean) < 1e-4);
}

TEST_CASE("robust energy ignores the true types") {
  std::mt19937_64 rng(10);
  const int K = 3;
  auto users = sample_users(rng, 15, K);
  for (auto& u : users) u.belief = {0.2, 0.5, 0.3};
  const auto robots = sample_robots(rng, 2, K);
  PhysicsParams params;
  const double before = run_robust(users, robots, K, params).expected_energy;
  for (auto& u : users) u.true_type = K + 1 - u.true_type;
  CHECK(run_robust(users, robots, K, params).expected_energy == before);
}

TEST_CASE("realized energy uses the nearest robot of the true type") {
  AllocationResult alloc;
  alloc.traces.resize(2);
  alloc.traces[0].positions = {{{0, 0}}};
  alloc.traces[1].positions = {{{5, 0}, {9, 0}}};
  std::vector<UserProfile> users(2);
  users[0].position = {1, 0};
  users[0].true_type = 1;
  users[1].position = {8, 0};
  users[1].true_type = 2;
  CHECK(realized_energy(alloc, users, 2) == doctest::Approx(2.0));
}
