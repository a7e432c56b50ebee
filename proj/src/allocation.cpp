#include "robocontract/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robocontract/kernels.hpp"

namespace robocontract {

Vec2 Workspace::clamp(const Vec2& p) const {
  return {std::clamp(p.x, min_x, max_x), std::clamp(p.y, min_y, max_y)};
}

void PhysicsParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("physics: " + msg); };
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (!(beta >= 0.0)) fail("beta must be non-negative");
  if (!(r_safe > 0.0)) fail("r_safe must be positive");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (t_max < 1) fail("t_max must be at least 1");
  if (!(d_coll > 0.0) || !(d_coll < r_safe)) fail("d_coll must satisfy 0 < d_coll < r_safe");
  if (!(workspace.max_x > workspace.min_x) || !(workspace.max_y > workspace.min_y))
    fail("workspace must have positive extent");
}

namespace {

struct PointColumns {
  std::vector<double> x;
  std::vector<double> y;

  explicit PointColumns(std::span<const Vec2> points) {
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& p : points) {
      x.push_back(p.x);
      y.push_back(p.y);
    }
  }
};

double energy_from_d2(std::span<const double> d2, std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < d2.size(); ++i) total += weights[i] * d2[i];
  return total;
}

// Per-run scratch: user columns per group plus reusable buffers.
class EngineContext {
 public:
  EngineContext(std::span<const TypeGroup> groups, const PhysicsParams& params)
      : groups_(groups), params_(params), kernels_(kernels::active_kernels()) {
    users_.reserve(groups.size());
    for (const auto& g : groups) users_.emplace_back(g.users);
  }

  void refresh(WorldState& state, std::size_t type) const {
    const auto& users = users_[type];
    auto& ts = state.types[type];
    const std::size_t m = users.x.size();
    ts.assignment.assign(m, 0);
    if (m == 0) {
      ts.energy = 0.0;
      return;
    }
    const auto robots = state.robots_of(type);
    robot_x_.resize(robots.size());
    robot_y_.resize(robots.size());
    for (std::size_t j = 0; j < robots.size(); ++j) {
      robot_x_[j] = robots[j].x;
      robot_y_[j] = robots[j].y;
    }
    index_.resize(m);
    d2_.resize(m);
    kernels_.nearest_site(users.x, users.y, robot_x_, robot_y_, index_, d2_);
    for (std::size_t i = 0; i < m; ++i) ts.assignment[i] = index_[i];
    ts.energy = energy_from_d2(d2_, groups_[type].weights);
  }

  void advance(WorldState& state) const {
    const std::size_t n = state.positions.size();
    all_x_.resize(n);
    all_y_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      all_x_[j] = state.positions[j].x;
      all_y_[j] = state.positions[j].y;
    }

    std::vector<Vec2> next = state.positions;
    for (std::size_t type = 0; type < state.types.size(); ++type) {
      const auto& ts = state.types[type];
      if (!ts.active) continue;
      const std::size_t first = state.type_offset[type];
      const std::size_t count = state.type_offset[type + 1] - first;

      // sum_i 2 w_i (x_j - q_i) accumulated in user order per robot.
      grad_.assign(count, Vec2{});
      const auto& group = groups_[type];
      for (std::size_t i = 0; i < group.users.size(); ++i) {
        const std::size_t j = ts.assignment[i];
        grad_[j] += (state.positions[first + j] - group.users[i]) * (2.0 * group.weights[i]);
      }

      for (std::size_t local = 0; local < count; ++local) {
        const std::size_t id = first + local;
        const Vec2& x = state.positions[id];
        Vec2 u = grad_[local] * (-params_.alpha);
        if (params_.beta > 0.0) u += barrier(state, id, x);
        const double len = norm(u);
        if (len > 1.0) u = Vec2{u.x / len, u.y / len};
        next[id] = params_.workspace.clamp(x + u);
      }
    }
    state.positions = std::move(next);
    ++state.t;
    for (std::size_t type = 0; type < state.types.size(); ++type)
      if (state.types[type].active) refresh(state, type);
  }

  std::size_t degeneracies() const { return degeneracies_; }

  // Closest distance per robot to any other robot at the current positions.
  void nearest_other(const WorldState& state, std::vector<double>& out) const {
    const std::size_t n = state.positions.size();
    all_x_.resize(n);
    all_y_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      all_x_[j] = state.positions[j].x;
      all_y_[j] = state.positions[j].y;
    }
    d2_all_.resize(n);
    out.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < n; ++j) {
      kernels_.squared_distances(all_x_[j], all_y_[j], all_x_, all_y_, d2_all_);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < n; ++l)
        if (l != j) best = std::min(best, d2_all_[l]);
      out[j] = std::sqrt(best);
    }
  }

 private:
  Vec2 barrier(const WorldState& state, std::size_t id, const Vec2& x) const {
    d2_all_.resize(state.positions.size());
    kernels_.squared_distances(x.x, x.y, all_x_, all_y_, d2_all_);
    const double r2 = params_.r_safe * params_.r_safe;
    neighbors_.clear();
    for (std::size_t l = 0; l < state.positions.size(); ++l)
      if (l != id && d2_all_[l] < r2) neighbors_.push_back({state.positions[l], l});
    if (neighbors_.empty()) return {};
    std::size_t degenerate = 0;
    const Vec2 u = barrier_control(x, id, neighbors_, params_.beta, params_.r_safe, &degenerate);
    degeneracies_ += degenerate;
    return u;
  }

  std::span<const TypeGroup> groups_;
  const PhysicsParams& params_;
  const kernels::KernelTable& kernels_;
  std::vector<PointColumns> users_;
  mutable std::size_t degeneracies_ = 0;
  mutable std::vector<double> robot_x_, robot_y_, all_x_, all_y_, d2_, d2_all_;
  mutable std::vector<std::uint32_t> index_;
  mutable std::vector<Vec2> grad_;
  mutable std::vector<Neighbor> neighbors_;
};

void check_groups(std::span<const TypeGroup> groups, const PhysicsParams& params) {
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const auto& g = groups[k];
    if (g.weights.size() != g.users.size())
      throw std::invalid_argument("type " + std::to_string(k + 1) + ": " +
                                  std::to_string(g.weights.size()) + " weights for " +
                                  std::to_string(g.users.size()) + " users");
    for (double w : g.weights)
      if (!(w >= 0.0)) throw std::invalid_argument("user weights must be non-negative");
    if (!g.users.empty() && g.robots.empty())
      throw InfeasibleAllocation(k, "type " + std::to_string(k + 1) + " has " +
                                        std::to_string(g.users.size()) + " users but no robots");
    for (const auto& r : g.robots)
      if (!params.workspace.contains(r))
        throw std::invalid_argument("type " + std::to_string(k + 1) +
                                    ": robot starts outside the workspace");
  }
}

}  // namespace

Assignment assign_users(std::span<const Vec2> users, std::span<const Vec2> robots) {
  if (robots.empty()) throw std::invalid_argument("assign_users: no robots");
  const PointColumns q(users), s(robots);
  std::vector<std::uint32_t> index(users.size());
  std::vector<double> d2(users.size());
  kernels::active_kernels().nearest_site(q.x, q.y, s.x, s.y, index, d2);
  return Assignment(index.begin(), index.end());
}

double locational_energy(const Assignment& assignment, std::span<const Vec2> users,
                         std::span<const double> weights, std::span<const Vec2> robots) {
  if (assignment.size() != users.size() || weights.size() != users.size())
    throw std::invalid_argument("locational_energy: assignment, users and weights differ in size");
  double total = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (assignment[i] >= robots.size())
      throw std::invalid_argument("locational_energy: assignment refers to a missing robot");
    total += weights[i] * squared_distance(users[i], robots[assignment[i]]);
  }
  return total;
}

Vec2 attraction_control(const Vec2& robot, std::span<const Vec2> assigned_users,
                        std::span<const double> weights, double alpha) {
  if (weights.size() != assigned_users.size())
    throw std::invalid_argument("attraction_control: weights and users differ in size");
  Vec2 grad;
  for (std::size_t i = 0; i < assigned_users.size(); ++i)
    grad += (robot - assigned_users[i]) * (2.0 * weights[i]);
  return grad * (-alpha);
}

Vec2 barrier_control(const Vec2& robot, std::size_t robot_id, std::span<const Neighbor> neighbors,
                     double beta, double r_safe, std::size_t* degeneracies) {
  Vec2 u;
  for (const auto& nb : neighbors) {
    if (nb.id == robot_id) continue;
    const double d2 = squared_distance(robot, nb.position);
    const double d = std::sqrt(d2);
    if (d < 1e-9) {
      u += Vec2{robot_id < nb.id ? -1.0 : 1.0, 0.0};
      if (degeneracies) ++*degeneracies;
      continue;
    }
    if (d < r_safe) u += (robot - nb.position) * (beta / d2);
  }
  return u;
}

Vec2 barrier_control(const Vec2& robot, std::span<const Vec2> neighbors, double beta,
                     double r_safe) {
  std::vector<Neighbor> tagged;
  tagged.reserve(neighbors.size());
  for (std::size_t l = 0; l < neighbors.size(); ++l) tagged.push_back({neighbors[l], l + 1});
  return barrier_control(robot, 0, tagged, beta, r_safe);
}

WorldState init_world(std::span<const TypeGroup> groups, const PhysicsParams& params) {
  params.validate();
  check_groups(groups, params);
  WorldState state;
  state.type_offset.push_back(0);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    for (const auto& r : groups[k].robots) {
      state.positions.push_back(r);
      state.robot_type.push_back(k);
    }
    state.type_offset.push_back(state.positions.size());
  }
  state.types.resize(groups.size());
  const EngineContext ctx(groups, params);
  for (std::size_t k = 0; k < groups.size(); ++k) ctx.refresh(state, k);
  return state;
}

WorldState step_world(const WorldState& state, std::span<const TypeGroup> groups,
                      const PhysicsParams& params) {
  if (state.types.size() != groups.size())
    throw std::invalid_argument("step_world: state and groups disagree on the number of types");
  WorldState next = state;
  const EngineContext ctx(groups, params);
  ctx.advance(next);
  next.degeneracies += ctx.degeneracies();
  for (auto& ts : next.types)
    if (ts.active) ++ts.steps;
  return next;
}

double AllocationResult::total_energy() const {
  double total = 0.0;
  for (const auto& t : traces) total += t.final_energy();
  return total;
}

std::size_t AllocationResult::max_steps() const {
  std::size_t m = 0;
  for (const auto& t : traces) m = std::max(m, t.steps);
  return m;
}

bool AllocationResult::all_converged() const {
  return std::all_of(traces.begin(), traces.end(), [](const AllocationTrace& t) { return t.converged; });
}

AllocationResult run_allocation(std::span<const TypeGroup> groups, const PhysicsParams& params) {
  WorldState state = init_world(groups, params);
  const EngineContext ctx(groups, params);
  const std::size_t types = groups.size();

  AllocationResult result;
  result.traces.resize(types);
  result.min_distance = std::numeric_limits<double>::infinity();
  for (auto& trace : result.traces) trace.min_distance = std::numeric_limits<double>::infinity();

  std::vector<double> nearest;
  auto observe = [&]() {
    ctx.nearest_other(state, nearest);
    double step_min = std::numeric_limits<double>::infinity();
    for (std::size_t id = 0; id < nearest.size(); ++id) {
      auto& trace = result.traces[state.robot_type[id]];
      trace.min_distance = std::min(trace.min_distance, nearest[id]);
      step_min = std::min(step_min, nearest[id]);
    }
    result.min_distance = std::min(result.min_distance, step_min);
    if (step_min < params.d_coll) ++result.collisions;
  };
  auto snapshot = [&](std::size_t type) {
    const auto robots = state.robots_of(type);
    result.traces[type].positions.emplace_back(robots.begin(), robots.end());
  };

  for (std::size_t k = 0; k < types; ++k) {
    result.traces[k].initial_energy = state.types[k].energy;
    snapshot(k);
  }
  observe();

  const auto any_active = [&] {
    return std::any_of(state.types.begin(), state.types.end(), [](const TypeState& t) { return t.active; });
  };
  while (any_active()) {
    std::vector<double> before(types);
    for (std::size_t k = 0; k < types; ++k) before[k] = state.types[k].energy;

    ctx.advance(state);
    ++result.global_steps;

    for (std::size_t k = 0; k < types; ++k) {
      auto& ts = state.types[k];
      if (!ts.active) continue;
      ++ts.steps;
      auto& trace = result.traces[k];
      trace.energies.push_back(ts.energy);
      snapshot(k);
      if (std::abs(ts.energy - before[k]) < params.epsilon) {
        ts.active = false;
        ts.converged = true;
      } else if (ts.steps >= static_cast<std::size_t>(params.t_max)) {
        ts.active = false;
      }
    }
    observe();
  }

  for (std::size_t k = 0; k < types; ++k) {
    auto& trace = result.traces[k];
    trace.steps = state.types[k].steps;
    trace.converged = state.types[k].converged;
    trace.final_assignment = state.types[k].assignment;
  }
  result.degeneracies = ctx.degeneracies();
  return result;
}

}  // namespace robocontract
