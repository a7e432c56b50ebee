#pragma once

// Comparison strategies for resolving user-type uncertainty without a
// contract, plus mismatch and energy-difference accounting.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "robocontract/allocation.hpp"
#include "robocontract/contract.hpp"

namespace robocontract {

enum class Method { Contract, Max, Sample, Robust };

std::string_view to_string(Method method);
/// Accepts contract, max, samp/sample and robust.
Method parse_method(std::string_view text);
/// Comma-separated list, e.g. "robust,max,samp".
std::vector<Method> parse_methods(std::string_view text);

/// Point estimates of user types (1-based). Robust carries no estimate.
struct TypeEstimate {
  Method method = Method::Contract;
  std::vector<int> types;

  bool distributional() const { return method == Method::Robust; }
};

/// Most probable type, lowest on ties.
int estimate_max(std::span<const double> belief);

/// Inverse-CDF draw from the belief using one 53-bit uniform from `rng`.
int estimate_sample(std::span<const double> belief, std::mt19937_64& rng);

TypeEstimate estimate_types(Method method, std::span<const UserProfile> users,
                            std::mt19937_64& rng);

/// Users whose estimated type is strictly below their true type.
std::size_t count_mismatches(std::span<const int> estimated, std::span<const int> true_types);

/// One group per type: users whose `types` entry equals k, weight 1.
std::vector<TypeGroup> groups_by_type(std::span<const UserProfile> users, std::span<const int> types,
                                      std::span<const RobotProfile> robots, int type_count);

/// One group per type over all users, weighted by belief[k].
std::vector<TypeGroup> groups_by_belief(std::span<const UserProfile> users,
                                        std::span<const RobotProfile> robots, int type_count);

struct RobustOutcome {
  AllocationResult allocation;
  double expected_energy = 0.0;  // sum_k sum_i p_i^k f(|q_i - x_assigned|) at convergence
};

/// Deploys each type's robots against every user weighted by p_i^k.
RobustOutcome run_robust(std::span<const UserProfile> users, std::span<const RobotProfile> robots,
                         int type_count, const PhysicsParams& params);

/// Energy of the final deployment measured against true demand: each user
/// is served by the nearest robot of its true type. Analysis column only.
double realized_energy(const AllocationResult& allocation, std::span<const UserProfile> users,
                       int type_count);

struct DifferenceStats {
  std::vector<double> differences;  // method minus contract, per case
  double mean = 0.0;
  double stddev = 0.0;               // sample standard deviation
};

/// Case-wise method-minus-contract differences. Throws on length mismatch.
DifferenceStats energy_difference_report(std::span<const double> contract,
                                         std::span<const double> method);

}  // namespace robocontract
