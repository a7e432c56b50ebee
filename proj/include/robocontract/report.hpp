#pragma once

// File formats: scenario spec JSON, trajectory and record CSVs, run and
// batch summaries. Column orders and field names are part of the public
// interface; see README.md.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "robocontract/scenario.hpp"

namespace robocontract {

using Json = nlohmann::ordered_json;

/// "%.12g" formatting; non-finite values print as inf, -inf or nan.
std::string format_number(double value);

/// JSON number, or null for non-finite values.
Json json_number(double value);

Json to_json(const PhysicsParams& physics);
Json to_json(const ScenarioSpec& spec);
Json to_json(const PaymentMenu& menu);
Json to_json(const ConstraintReport& report);

/// Reads a scenario spec. Missing keys fall back to the defaults of
/// table_scenario(id) when id is 1..8, otherwise to ScenarioSpec{}.
ScenarioSpec scenario_from_json(const Json& j);
ScenarioSpec load_scenario_file(const std::filesystem::path& path);
PhysicsParams physics_from_json(const Json& j, PhysicsParams base = {});

/// Rows "t,type,robot_id,x,y" for one type; robot_id is the global index.
void write_trajectory_csv(std::ostream& out, const AllocationTrace& trace, int type,
                          std::size_t first_robot_id, bool header = true);

/// Final user-robot pairs "type,user_id,robot_id,user_x,user_y,robot_x,robot_y".
void write_assignment_csv(std::ostream& out, const ContractRun& run, const CaseData& data);

/// Summary of a single contract run: steps, energies, min distance, assignments.
Json run_summary(const ScenarioSpec& spec, const CaseSeedPlan& plan, const CaseData& data,
                 const ContractRun& run);

/// Flat per-case CSV: scenario,case,method,energy,mismatches,difference,
/// realized_energy,steps,converged,min_distance.
void write_records_csv(std::ostream& out, const std::vector<BatchResult>& batches);

/// Table-shaped datasets built from batch results.
struct SummaryTables {
  struct PaymentSteps {  // contract menu, steps and energy per scenario
    int scenario;
    PaymentMenu menu;
    MeanStd steps;
    MeanStd energy;
    double converged_fraction;
    double min_distance;
  };
  struct MethodCell {
    int scenario;
    Method method;
    MeanStd value;
  };
  std::vector<PaymentSteps> contract;
  std::vector<MethodCell> baseline_energy;  // robust/max/samp final energies
  std::vector<MethodCell> mismatches;       // max/samp (and contract) mismatch counts
  std::vector<MethodCell> differences;      // baseline minus contract per case
};

SummaryTables summarize(const std::vector<BatchResult>& batches);

Json to_json(const SummaryTables& tables);
void write_contract_table_csv(std::ostream& out, const SummaryTables& tables);
void write_method_table_csv(std::ostream& out, const std::vector<SummaryTables::MethodCell>& cells,
                            const std::string& value_name);

}  // namespace robocontract
