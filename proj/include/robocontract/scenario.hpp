#pragma once

// Scenario generation with matched seeds, the contract and baseline
// pipelines for a single case, and batch aggregation.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robocontract/allocation.hpp"
#include "robocontract/baselines.hpp"
#include "robocontract/contract.hpp"
#include "robocontract/stats.hpp"

namespace robocontract {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioSpec {
  int id = 0;
  std::vector<int> user_type_counts;
  std::vector<int> robot_type_counts;
  double gain = 10.0;
  GainMode gain_mode = GainMode::TablePlusOne;
  double gamma = 0.0;
  PhysicsParams physics;
  // Expected belief mass on a user's own type. Calibration knob, > 1/K.
  double belief_mass = 0.4;
  std::uint64_t seed = 1;
  int batch_size = 50;

  int types() const { return static_cast<int>(user_type_counts.size()); }
  int user_count() const;
  int robot_count() const;
  EconomicParams economics() const { return {types(), gain, gain_mode, gamma}; }

  /// Throws std::invalid_argument (or AssumptionViolation) when invalid.
  void validate() const;
};

/// One of the eight reference scenarios (ids 1..8).
ScenarioSpec table_scenario(int id);
std::vector<ScenarioSpec> table_scenarios();

/// Per-case seeds. Users are keyed by the user tally, robots by the robot
/// tally, so scenarios sharing a tally share draws for the same case index.
struct CaseSeedPlan {
  int case_index = 1;
  std::uint64_t user_seed = 0;
  std::uint64_t robot_seed = 0;

  static CaseSeedPlan make(const ScenarioSpec& spec, int case_index);
};

struct CaseData {
  std::vector<UserProfile> users;
  std::vector<RobotProfile> robots;

  std::vector<int> true_types() const;
};

/// Uniform user positions with Dirichlet beliefs centred on the tally type,
/// and uniform robot starts at least d_coll apart.
CaseData generate_case(const ScenarioSpec& spec, const CaseSeedPlan& plan);

/// Payment, best response and per-type allocation for one case.
struct ContractRun {
  PaymentMenu menu;
  std::vector<int> reported;
  std::vector<TypeGroup> groups;
  AllocationResult allocation;
};

ContractRun run_contract(const ScenarioSpec& spec, CaseData& data);

struct MethodOutcome {
  Method method = Method::Contract;
  double energy = 0.0;           // paper accounting (expected energy for robust)
  double realized_energy = 0.0;  // deployment scored against true types
  std::optional<std::size_t> mismatches;  // absent for robust
  std::size_t steps = 0;
  bool converged = false;
  double min_distance = 0.0;
  std::size_t collisions = 0;
};

struct CaseRecord {
  int scenario = 0;
  int case_index = 0;
  CaseSeedPlan plan;
  std::vector<MethodOutcome> outcomes;  // contract first, then baselines in request order

  const MethodOutcome* find(Method method) const;
};

/// Contract pipeline plus the requested baselines on matched draws.
CaseRecord run_case(const ScenarioSpec& spec, int case_index, const std::vector<Method>& baselines);

struct MethodStats {
  Method method = Method::Contract;
  MeanStd steps;
  MeanStd energy;
  MeanStd realized_energy;
  std::optional<MeanStd> mismatches;
  double converged_fraction = 0.0;
  double min_distance = 0.0;
  std::size_t runs_with_collision = 0;
  std::size_t cases = 0;
};

struct BatchStats {
  std::vector<MethodStats> methods;  // contract first
  std::vector<std::pair<Method, DifferenceStats>> differences;  // baseline minus contract

  const MethodStats* find(Method method) const;
  const DifferenceStats* difference(Method method) const;
};

BatchStats compute_stats(const std::vector<CaseRecord>& records, const std::vector<Method>& baselines);

struct CaseFailure {
  int case_index = 0;
  std::string message;
};

struct BatchResult {
  ScenarioSpec spec;
  std::vector<Method> baselines;
  std::vector<CaseRecord> records;  // successful cases, ascending case index
  std::vector<CaseFailure> failures;
  BatchStats stats;
};

/// Runs cases 1..batch_size (spec.batch_size when batch_size <= 0) on up to
/// `threads` workers. Failing cases are reported with their index and the
/// batch continues; aggregation follows case order.
BatchResult run_batch(const ScenarioSpec& spec, const std::vector<Method>& baselines,
                      int batch_size = 0, unsigned threads = 0);

}  // namespace robocontract
