#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "robocontract/allocation.hpp"

using namespace robocontract;

namespace {

std::vector<Vec2> random_points(std::mt19937_64& rng, std::size_t n, double lo = 0.0, double hi = 10.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<Vec2> out(n);
  for (auto& p : out) p = {d(rng), d(rng)};
  return out;
}

double assigned_energy(const Vec2& x, const std::vector<Vec2>& users, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) s += w[i] * squared_distance(x, users[i]);
  return s;
}

double barrier_potential(const Vec2& x, const std::vector<Vec2>& neighbors, double beta, double r_safe) {
  double phi = 0.0;
  for (const auto& n : neighbors) {
    const double d = distance(x, n);
    if (d < r_safe) phi += -beta * std::log(d / r_safe);
  }
  return phi;
}

}  // namespace

TEST_CASE("assignment examples") {
  const std::vector<Vec2> one{{5, 5}};
  const std::vector<Vec2> users{{0, 0}, {4, 0}, {9, 9}};
  CHECK(assign_users(users, one) == Assignment{0, 0, 0});

  const std::vector<Vec2> robots{{1, 0}, {3, 0}};
  CHECK(assign_users(std::vector<Vec2>{{0, 0}, {4, 0}}, robots) == Assignment{0, 1});
  CHECK(assign_users(std::vector<Vec2>{{2, 0}}, robots) == Assignment{0});
  CHECK_THROWS_AS(assign_users(users, std::vector<Vec2>{}), std::invalid_argument);
}

TEST_CASE("assignment picks a nearest robot") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto users = random_points(rng, 37);
    const auto robots = random_points(rng, 1 + trial % 9);
    const auto a = assign_users(users, robots);
    REQUIRE(a.size() == users.size());
    for (std::size_t i = 0; i < users.size(); ++i)
      for (const auto& r : robots) CHECK(squared_distance(users[i], robots[a[i]]) <= squared_distance(users[i], r));
  }
}

TEST_CASE("locational energy examples") {
  const std::vector<Vec2> robots{{1, 0}};
  const std::vector<Vec2> users{{0, 0}, {2, 0}};
  const Assignment a{0, 0};
  CHECK(locational_energy(a, users, std::vector<double>{1, 1}, robots) == 2.0);
  CHECK(locational_energy(a, users, std::vector<double>{0, 0}, robots) == 0.0);
  CHECK(locational_energy(a, std::vector<Vec2>{{1, 0}, {1, 0}}, std::vector<double>{1, 1}, robots) == 0.0);
  CHECK_THROWS_AS(locational_energy(a, users, std::vector<double>{1}, robots), std::invalid_argument);
}

TEST_CASE("attraction control examples") {
  CHECK(attraction_control({3, 4}, {}, {}, 0.1) == Vec2{0, 0});
  const Vec2 u = attraction_control({0, 0}, std::vector<Vec2>{{1, 0}}, std::vector<double>{1}, 0.1);
  CHECK(u.x == doctest::Approx(0.2));
  CHECK(u.y == 0.0);
  const std::vector<Vec2> users{{1, 1}, {3, 1}, {2, 4}};
  const Vec2 c = attraction_control({2, 2}, users, std::vector<double>{1, 1, 1}, 0.1);
  CHECK(std::abs(c.x) < 1e-12);
  CHECK(std::abs(c.y) < 1e-12);
}

TEST_CASE("barrier control examples") {
  const double beta = 10, r_safe = 0.5;
  CHECK(barrier_control({0, 0}, std::vector<Vec2>{{0.5, 0}}, beta, r_safe) == Vec2{0, 0});
  const double d = 0.25;
  const Vec2 u = barrier_control({0, 0}, std::vector<Vec2>{{d, 0}}, beta, r_safe);
  CHECK(u.x == doctest::Approx(-10 / d));
  CHECK(u.y == 0.0);
  const Vec2 s = barrier_control({0, 0}, std::vector<Vec2>{{d, 0}, {-d, 0}}, beta, r_safe);
  CHECK(std::abs(s.x) < 1e-12);
  CHECK(std::abs(s.y) < 1e-12);
}

TEST_CASE("coincident robots get a deterministic unit push") {
  std::size_t events = 0;
  const std::vector<Neighbor> other{{{2, 2}, 7}};
  const Vec2 low = barrier_control({2, 2}, 3, other, 10, 0.5, &events);
  const std::vector<Neighbor> mirror{{{2, 2}, 3}};
  const Vec2 high = barrier_control({2, 2}, 7, mirror, 10, 0.5, &events);
  CHECK(low == Vec2{-1, 0});
  CHECK(high == Vec2{1, 0});
  CHECK(events == 2);
}

TEST_CASE("attraction matches finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const auto users = random_points(rng, 1 + trial % 12);
    std::vector<double> weights(users.size());
    for (auto& x : weights) x = w(rng);
    const Vec2 x = random_points(rng, 1).front();
    const Vec2 u = attraction_control(x, users, weights, 1.0);
    const double gx = (assigned_energy(x + Vec2{h, 0}, users, weights) - assigned_energy(x - Vec2{h, 0}, users, weights)) / (2 * h);
    const double gy = (assigned_energy(x + Vec2{0, h}, users, weights) - assigned_energy(x - Vec2{0, h}, users, weights)) / (2 * h);
    const double err = norm(u + Vec2{gx, gy}) / std::max(norm(u), 1e-12);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("barrier matches finite differences away from the boundary") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> radius(0.05, 0.45), angle(0.0, 2 * M_PI);
  const double beta = 10, r_safe = 0.5, h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 x{5, 5};
    std::vector<Vec2> nb;
    for (int n = 0; n < 1 + trial % 4; ++n) {
      const double r = radius(rng), a = angle(rng);
      nb.push_back(x + Vec2{r * std::cos(a), r * std::sin(a)});
    }
    const Vec2 u = barrier_control(x, nb, beta, r_safe);
    const double gx = (barrier_potential(x + Vec2{h, 0}, nb, beta, r_safe) - barrier_potential(x - Vec2{h, 0}, nb, beta, r_safe)) / (2 * h);
    const double gy = (barrier_potential(x + Vec2{0, h}, nb, beta, r_safe) - barrier_potential(x - Vec2{0, h}, nb, beta, r_safe)) / (2 * h);
    const Vec2 g{gx, gy};
    const double err = norm(u + g) / std::max(norm(u), 1e-3);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("physics validation") {
  PhysicsParams p;
  CHECK_NOTHROW(p.validate());
  p.d_coll = 0.6;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.alpha = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.t_max = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("step world") {
  PhysicsParams params;
  SUBCASE("robots at their centroids stay put") {
    const std::vector<TypeGroup> groups{{{{1, 1}, {3, 1}}, {1, 1}, {{2, 1}}},
                                        {{{7, 7}, {7, 9}}, {1, 1}, {{7, 8}}}};
    const auto s0 = init_world(groups, params);
    const auto s1 = step_world(s0, groups, params);
    CHECK(s1.positions == s0.positions);
    CHECK(s1.t == 1);
  }
  SUBCASE("large controls are clipped to unit length") {
    const std::vector<TypeGroup> groups{{{{9, 9}, {9, 9}, {9, 9}}, {10, 10, 10}, {{1, 1}}}};
    const auto s1 = step_world(init_world(groups, params), groups, params);
    CHECK(distance(s1.positions[0], {1, 1}) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("a single robot heads straight for its user") {
    const std::vector<TypeGroup> groups{{{{8, 2}}, {1}, {{2, 5}}}};
    auto s = init_world(groups, params);
    for (int t = 0; t < 5; ++t) {
      s = step_world(s, groups, params);
      const Vec2 d = s.positions[0] - Vec2{2, 5};
      const double cross = d.x * -3.0 - d.y * 6.0;  // collinear with (6, -3)
      CHECK(std::abs(cross) < 1e-12);
      CHECK(s.positions[0].x > 2.0);
    }
  }
}

TEST_CASE("control norm never exceeds one") {
  std::mt19937_64 rng(21);
  PhysicsParams params;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TypeGroup> groups(2);
    for (auto& g : groups) {
      g.users = random_points(rng, 15);
      g.weights.assign(g.users.size(), 1.0);
      g.robots = random_points(rng, 4, 4.0, 6.0);
    }
    auto s = init_world(groups, params);
    for (int t = 0; t < 30; ++t) {
      const auto next = step_world(s, groups, params);
      for (std::size_t j = 0; j < s.positions.size(); ++j)
        CHECK(distance(next.positions[j], s.positions[j]) <= 1.0 + 1e-12);
      s = next;
    }
  }
}

TEST_CASE("run allocation") {
  PhysicsParams params;
  SUBCASE("two users pull one robot to their midpoint") {
    params.epsilon = 1e-5;
    const std::vector<TypeGroup> groups{{{{0, 0}, {2, 0}}, {1, 1}, {{0, 1}}}};
    const auto result = run_allocation(groups, params);
    const Vec2 end = result.traces[0].positions.back()[0];
    CHECK(distance(end, {1, 0}) < 1e-2);
    CHECK(result.traces[0].converged);
  }
  SUBCASE("a type without users stops after one step with zero energy") {
    const std::vector<TypeGroup> groups{{{}, {}, {{3, 3}}}, {{{1, 1}}, {1}, {{8, 8}}}};
    const auto result = run_allocation(groups, params);
    CHECK(result.traces[0].steps == 1);
    CHECK(result.traces[0].final_energy() == 0.0);
    CHECK(result.traces[0].converged);
  }
  SUBCASE("users without robots are infeasible") {
    const std::vector<TypeGroup> groups{{{{1, 1}}, {1}, {}}};
    CHECK_THROWS_AS(run_allocation(groups, params), InfeasibleAllocation);
  }
  SUBCASE("robots outside the workspace are rejected") {
    const std::vector<TypeGroup> groups{{{{1, 1}}, {1}, {{11, 1}}}};
    CHECK_THROWS_AS(run_allocation(groups, params), std::invalid_argument);
  }
}

TEST_CASE("trace bookkeeping and determinism") {
  std::mt19937_64 rng(31);
  PhysicsParams params;
  std::vector<TypeGroup> groups(3);
  for (auto& g : groups) {
    g.users = random_points(rng, 12);
    g.weights.assign(g.users.size(), 1.0);
    g.robots = random_points(rng, 3);
  }
  const auto a = run_allocation(groups, params);
  const auto b = run_allocation(groups, params);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const auto& tr = a.traces[k];
    CHECK(tr.energies.size() == tr.steps);
    CHECK(tr.positions.size() == tr.steps + 1);
    CHECK(tr.steps <= static_cast<std::size_t>(params.t_max));
    CHECK(tr.positions == b.traces[k].positions);
    CHECK(tr.energies == b.traces[k].energies);
    for (const auto& row : tr.positions)
      for (const auto& p : row) CHECK(params.workspace.contains(p));
    if (tr.converged && tr.steps >= 1) {
      const double prev = tr.steps >= 2 ? tr.energies[tr.steps - 2] : tr.initial_energy;
      CHECK(std::abs(tr.energies.back() - prev) < params.epsilon);
    }
  }
  CHECK(a.min_distance == b.min_distance);
}

TEST_CASE("energy descends without the barrier") {
  std::mt19937_64 rng(41);
  PhysicsParams params;
  params.beta = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    TypeGroup g;
    g.users = random_points(rng, 1 + trial % 30);
    g.weights.assign(g.users.size(), 10.0 / static_cast<double>(g.users.size()));
    g.robots = random_points(rng, 1 + trial % 10);
    const std::vector<TypeGroup> groups{g};
    const auto tr = run_allocation(groups, params).traces[0];
    double prev = tr.initial_energy;
    for (double e : tr.energies) {
      CHECK(e <= prev + 1e-9);
      prev = e;
    }
  }
}
