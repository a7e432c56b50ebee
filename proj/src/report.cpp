#include "robocontract/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace robocontract {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

Json json_number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

Json to_json(const PhysicsParams& p) {
  return Json{{"alpha", p.alpha},
              {"beta", p.beta},
              {"r_safe", p.r_safe},
              {"epsilon", p.epsilon},
              {"t_max", p.t_max},
              {"d_coll", p.d_coll},
              {"workspace", {p.workspace.min_x, p.workspace.min_y, p.workspace.max_x, p.workspace.max_y}}};
}

Json to_json(const ScenarioSpec& s) {
  return Json{{"id", s.id},
              {"user_type_counts", s.user_type_counts},
              {"robot_type_counts", s.robot_type_counts},
              {"economics", {{"r", s.gain}, {"gain_mode", std::string(to_string(s.gain_mode))}, {"gamma", s.gamma}}},
              {"physics", to_json(s.physics)},
              {"belief_mass", s.belief_mass},
              {"seed", s.seed},
              {"batch_size", s.batch_size}};
}

Json to_json(const PaymentMenu& menu) { return Json(menu.prices); }

Json to_json(const ConstraintReport& report) {
  Json rows = Json::array();
  for (const auto& c : report.residuals)
    rows.push_back({{"kind", std::string(to_string(c.kind))}, {"type", c.type}, {"alt_type", c.alt_type},
                    {"residual", c.residual}});
  return Json{{"passed", report.passed()}, {"min_residual", json_number(report.min_residual())},
              {"residuals", rows}};
}

PhysicsParams physics_from_json(const Json& j, PhysicsParams p) {
  p.alpha = j.value("alpha", p.alpha);
  p.beta = j.value("beta", p.beta);
  p.r_safe = j.value("r_safe", p.r_safe);
  p.epsilon = j.value("epsilon", p.epsilon);
  p.t_max = j.value("t_max", p.t_max);
  p.d_coll = j.value("d_coll", p.d_coll);
  if (j.contains("workspace")) {
    const auto& w = j.at("workspace");
    if (!w.is_array() || w.size() != 4)
      throw std::invalid_argument("physics.workspace must be [min_x, min_y, max_x, max_y]");
    p.workspace = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>(), w[3].get<double>()};
  }
  return p;
}

ScenarioSpec scenario_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario spec must be a JSON object");
  ScenarioSpec s;
  const int id = j.value("id", 0);
  if (id >= 1 && id <= 8) s = table_scenario(id);
  s.id = id;
  try {
    if (j.contains("user_type_counts")) s.user_type_counts = j.at("user_type_counts").get<std::vector<int>>();
    if (j.contains("robot_type_counts")) s.robot_type_counts = j.at("robot_type_counts").get<std::vector<int>>();
    if (j.contains("economics")) {
      const auto& e = j.at("economics");
      s.gain = e.value("r", s.gain);
      if (e.contains("gain_mode")) s.gain_mode = parse_gain_mode(e.at("gain_mode").get<std::string>());
      s.gamma = e.value("gamma", s.gamma);
    }
    if (j.contains("physics")) s.physics = physics_from_json(j.at("physics"), s.physics);
    s.belief_mass = j.value("belief_mass", s.belief_mass);
    s.seed = j.value("seed", s.seed);
    s.batch_size = j.value("batch_size", s.batch_size);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("scenario spec: ") + e.what());
  }
  s.validate();
  return s;
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("scenario file " + path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

void write_trajectory_csv(std::ostream& out, const AllocationTrace& trace, int type,
                          std::size_t first_robot_id, bool header) {
  if (header) out << "t,type,robot_id,x,y\n";
  for (std::size_t t = 0; t < trace.positions.size(); ++t) {
    const auto& row = trace.positions[t];
    for (std::size_t j = 0; j < row.size(); ++j)
      out << t << ',' << type << ',' << first_robot_id + j << ',' << format_number(row[j].x) << ','
          << format_number(row[j].y) << '\n';
  }
}

void write_assignment_csv(std::ostream& out, const ContractRun& run, const CaseData& data) {
  out << "type,user_id,robot_id,user_x,user_y,robot_x,robot_y\n";
  std::size_t first_robot = 0;
  for (std::size_t k = 0; k < run.groups.size(); ++k) {
    const auto& trace = run.allocation.traces[k];
    const auto& final_positions = trace.positions.back();
    std::size_t local_user = 0;
    for (const auto& u : data.users) {
      if (run.reported[static_cast<std::size_t>(u.id)] != static_cast<int>(k) + 1) continue;
      const std::size_t j = trace.final_assignment[local_user++];
      out << k + 1 << ',' << u.id << ',' << first_robot + j << ',' << format_number(u.position.x) << ','
          << format_number(u.position.y) << ',' << format_number(final_positions[j].x) << ','
          << format_number(final_positions[j].y) << '\n';
    }
    first_robot += run.groups[k].robots.size();
  }
}

Json run_summary(const ScenarioSpec& spec, const CaseSeedPlan& plan, const CaseData& data,
                 const ContractRun& run) {
  const auto& alloc = run.allocation;
  Json types = Json::array();
  Json assignment = Json::array();
  std::size_t first_robot = 0;
  for (std::size_t k = 0; k < alloc.traces.size(); ++k) {
    const auto& tr = alloc.traces[k];
    types.push_back({{"type", k + 1},
                     {"users", run.groups[k].users.size()},
                     {"robots", run.groups[k].robots.size()},
                     {"steps", tr.steps},
                     {"converged", tr.converged},
                     {"initial_energy", tr.initial_energy},
                     {"final_energy", tr.final_energy()},
                     {"min_distance", json_number(tr.min_distance)}});
    std::size_t local_user = 0;
    for (const auto& u : data.users) {
      if (run.reported[static_cast<std::size_t>(u.id)] != static_cast<int>(k) + 1) continue;
      assignment.push_back({{"user_id", u.id}, {"type", k + 1},
                            {"robot_id", first_robot + tr.final_assignment[local_user++]}});
    }
    first_robot += run.groups[k].robots.size();
  }
  std::size_t mismatches = 0;
  for (const auto& u : data.users)
    if (run.reported[static_cast<std::size_t>(u.id)] < u.true_type) ++mismatches;
  return Json{{"scenario", spec.id},
              {"case", plan.case_index},
              {"user_seed", plan.user_seed},
              {"robot_seed", plan.robot_seed},
              {"menu", to_json(run.menu)},
              {"steps", alloc.max_steps()},
              {"global_steps", alloc.global_steps},
              {"converged", alloc.all_converged()},
              {"total_energy", alloc.total_energy()},
              {"min_distance", json_number(alloc.min_distance)},
              {"d_coll", spec.physics.d_coll},
              {"collision_steps", alloc.collisions},
              {"degeneracies", alloc.degeneracies},
              {"mismatches", mismatches},
              {"types", types},
              {"assignment", assignment}};
}

void write_records_csv(std::ostream& out, const std::vector<BatchResult>& batches) {
  out << "scenario,case,method,energy,mismatches,difference,realized_energy,steps,converged,min_distance\n";
  for (const auto& b : batches) {
    for (const auto& rec : b.records) {
      const auto* contract = rec.find(Method::Contract);
      for (const auto& o : rec.outcomes) {
        out << rec.scenario << ',' << rec.case_index << ',' << to_string(o.method) << ','
            << format_number(o.energy) << ',';
        if (o.mismatches) out << *o.mismatches;
        out << ',';
        if (o.method != Method::Contract && contract) out << format_number(o.energy - contract->energy);
        out << ',' << format_number(o.realized_energy) << ',' << o.steps << ',' << (o.converged ? 1 : 0) << ',' << format_number(o.min_distance) << '\n';
      }
    }
  }
}

SummaryTables summarize(const std::vector<BatchResult>& batches) {
  SummaryTables t;
  for (const auto& b : batches) {
    const auto* c = b.stats.find(Method::Contract);
    if (!c) continue;
    t.contract.push_back({b.spec.id, optimal_payment(b.spec.economics()), c->steps, c->energy,
                          c->converged_fraction, c->min_distance});
    for (Method m : b.baselines) {
      const auto* ms = b.stats.find(m);
      if (!ms) continue;
      t.baseline_energy.push_back({b.spec.id, m, ms->energy});
      if (ms->mismatches) t.mismatches.push_back({b.spec.id, m, *ms->mismatches});
      if (const auto* d = b.stats.difference(m)) t.differences.push_back({b.spec.id, m, {d->mean, d->stddev}});
    }
  }
  return t;
}

namespace {

Json cells_json(const std::vector<SummaryTables::MethodCell>& cells) {
  Json rows = Json::array();
  for (const auto& c : cells)
    rows.push_back({{"scenario", c.scenario}, {"method", std::string(to_string(c.method))},
                    {"mean", c.value.mean}, {"std", c.value.stddev}});
  return rows;
}

}  // namespace

Json to_json(const SummaryTables& t) {
  Json contract = Json::array();
  for (const auto& row : t.contract)
    contract.push_back({{"scenario", row.scenario},
                        {"menu", to_json(row.menu)},
                        {"steps_mean", row.steps.mean},
                        {"steps_std", row.steps.stddev},
                        {"energy_mean", row.energy.mean},
                        {"energy_std", row.energy.stddev},
                        {"converged_fraction", row.converged_fraction},
                        {"min_distance", json_number(row.min_distance)}});
  return Json{{"contract", contract},
              {"baseline_energy", cells_json(t.baseline_energy)},
              {"mismatches", cells_json(t.mismatches)},
              {"energy_differences", cells_json(t.differences)}};
}

void write_contract_table_csv(std::ostream& out, const SummaryTables& t) {
  out << "scenario,menu,steps_mean,steps_std,energy_mean,energy_std,converged_fraction,min_distance\n";
  for (const auto& row : t.contract) {
    std::string menu = "\"(";
    for (std::size_t k = 0; k < row.menu.prices.size(); ++k) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%s%.2f", k ? "," : "", row.menu.prices[k]);
      menu += buf;
    }
    menu += ")\"";
    out << row.scenario << ',' << menu << ',' << format_number(row.steps.mean) << ','
        << format_number(row.steps.stddev) << ',' << format_number(row.energy.mean) << ','
        << format_number(row.energy.stddev) << ',' << format_number(row.converged_fraction) << ','
        << format_number(row.min_distance) << '\n';
  }
}

void write_method_table_csv(std::ostream& out, const std::vector<SummaryTables::MethodCell>& cells,
                            const std::string& value_name) {
  out << "scenario,method," << value_name << "_mean," << value_name << "_std\n";
  for (const auto& c : cells)
    out << c.scenario << ',' << to_string(c.method) << ',' << format_number(c.value.mean) << ','
        << format_number(c.value.stddev) << '\n';
}

}  // namespace robocontract
