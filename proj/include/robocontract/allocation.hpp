#pragma once

// Distributed allocation: Voronoi assignment of users to robots, per-robot
// gradient control with a logarithmic collision barrier, and the
// synchronous multi-type loop that drives every type to convergence.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "robocontract/vec2.hpp"

namespace robocontract {

/// A type has users to serve but no robot to serve them.
class InfeasibleAllocation : public std::runtime_error {
 public:
  InfeasibleAllocation(std::size_t type_index, const std::string& what)
      : std::runtime_error(what), type_index_(type_index) {}
  std::size_t type_index() const { return type_index_; }

 private:
  std::size_t type_index_;
};

struct Workspace {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 10.0;
  double max_y = 10.0;

  bool contains(const Vec2& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  Vec2 clamp(const Vec2& p) const;
};

struct PhysicsParams {
  double alpha = 0.1;      // gradient step
  double beta = 10.0;      // barrier weight; 0 disables collision avoidance
  double r_safe = 0.5;     // barrier activation radius
  double epsilon = 1e-3;   // energy-change convergence tolerance
  int t_max = 200;         // step cap per type
  double d_coll = 0.1;     // closer than this counts as a collision
  Workspace workspace;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

/// assignment[i] is the robot serving user i: the single 1 in row i of b.
using Assignment = std::vector<std::size_t>;

/// Nearest robot per user under f(d) = d^2, lowest index on ties.
Assignment assign_users(std::span<const Vec2> users, std::span<const Vec2> robots);

/// Sum of weight_i · f(|q_i - x_assigned(i)|).
double locational_energy(const Assignment& assignment, std::span<const Vec2> users,
                         std::span<const double> weights, std::span<const Vec2> robots);

/// u1 = -alpha · grad sum_i w_i |q_i - x|^2 = -alpha · sum_i 2 w_i (x - q_i).
Vec2 attraction_control(const Vec2& robot, std::span<const Vec2> assigned_users,
                        std::span<const double> weights, double alpha);

struct Neighbor {
  Vec2 position;
  std::size_t id = 0;
};

/// u2 = -grad Phi, with Phi = sum over neighbors inside r_safe of
/// -beta·log(|x - x_l| / r_safe). Coincident neighbors (closer than 1e-9)
/// contribute a unit push along x whose sign follows the id order; each
/// such event increments *degeneracies when given.
Vec2 barrier_control(const Vec2& robot, std::size_t robot_id, std::span<const Neighbor> neighbors,
                     double beta, double r_safe, std::size_t* degeneracies = nullptr);

/// Convenience overload: neighbors carry ids 1.. so coincidences push along -x.
Vec2 barrier_control(const Vec2& robot, std::span<const Vec2> neighbors, double beta,
                     double r_safe);

/// Users, weights and initial robots of one service type.
struct TypeGroup {
  std::vector<Vec2> users;
  std::vector<double> weights;  // 1 for known types, p_i^k for the robust baseline
  std::vector<Vec2> robots;
};

struct TypeState {
  Assignment assignment;  // re-optimized at the current positions
  double energy = 0.0;
  bool active = true;
  bool converged = false;
  std::size_t steps = 0;
};

/// All robots of all types in group order; robot ids are indices into
/// `positions`.
struct WorldState {
  std::size_t t = 0;
  std::vector<Vec2> positions;
  std::vector<std::size_t> robot_type;  // group index of each robot
  std::vector<std::size_t> type_offset; // first robot of each group, plus end
  std::vector<TypeState> types;
  std::size_t degeneracies = 0;

  std::span<const Vec2> robots_of(std::size_t type) const {
    return std::span<const Vec2>(positions).subspan(type_offset[type],
                                                    type_offset[type + 1] - type_offset[type]);
  }
};

/// Initial state at t = 0. Throws InfeasibleAllocation when a group has
/// users and no robots, std::invalid_argument on bad shapes or robots
/// outside the workspace.
WorldState init_world(std::span<const TypeGroup> groups, const PhysicsParams& params);

/// One synchronous tick: every robot of an active type computes its control
/// from the same snapshot, controls are clipped to norm 1, all positions
/// advance together and are clamped to the workspace; then assignments and
/// energies of active types are refreshed at the new positions.
WorldState step_world(const WorldState& state, std::span<const TypeGroup> groups,
                      const PhysicsParams& params);

struct AllocationTrace {
  std::vector<std::vector<Vec2>> positions;  // [t][robot within type], t = 0..steps
  std::vector<double> energies;              // energy after each step, length == steps
  double initial_energy = 0.0;
  Assignment final_assignment;
  std::size_t steps = 0;
  bool converged = false;        // stopped by the energy test rather than t_max
  double min_distance = 0.0;     // closest approach of this type's robots to any robot

  double final_energy() const { return energies.empty() ? initial_energy : energies.back(); }
};

struct AllocationResult {
  std::vector<AllocationTrace> traces;  // one per group
  double min_distance = 0.0;            // over all robot pairs and recorded steps
  std::size_t collisions = 0;           // steps at which some pair was closer than d_coll
  std::size_t degeneracies = 0;
  std::size_t global_steps = 0;

  double total_energy() const;
  std::size_t max_steps() const;
  bool all_converged() const;
};

/// Runs every type on a shared clock until each has stopped. A type stops
/// when its energy changes by less than epsilon or after t_max steps;
/// stopped robots stay in place as obstacles for the others.
AllocationResult run_allocation(std::span<const TypeGroup> groups, const PhysicsParams& params);

}  // namespace robocontract
