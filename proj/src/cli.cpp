#include "robocontract/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "robocontract/report.hpp"

namespace robocontract::cli {

namespace fs = std::filesystem;

std::string format_menu(const std::vector<double>& prices) {
  std::string out = "(";
  for (std::size_t k = 0; k < prices.size(); ++k) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", prices[k]);
    std::string s = buf;
    if (s.size() > 1 && s.back() == '0') s.pop_back();
    if (k) out += ", ";
    out += s;
  }
  return out + ")";
}

namespace {

// Thrown for bad flag combinations detected after parsing.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, beta, epsilon, r_safe, d_coll, belief_mass;
  std::optional<int> t_max, batch_size;
  std::optional<std::string> gain_mode;

  bool any() const {
    return seed || alpha || beta || epsilon || r_safe || d_coll || belief_mass || t_max || batch_size ||
           gain_mode;
  }

  void apply(ScenarioSpec& s) const {
    if (seed) s.seed = *seed;
    if (alpha) s.physics.alpha = *alpha;
    if (beta) s.physics.beta = *beta;
    if (epsilon) s.physics.epsilon = *epsilon;
    if (r_safe) s.physics.r_safe = *r_safe;
    if (d_coll) s.physics.d_coll = *d_coll;
    if (t_max) s.physics.t_max = *t_max;
    if (belief_mass) s.belief_mass = *belief_mass;
    if (batch_size) s.batch_size = *batch_size;
    if (gain_mode) s.gain_mode = parse_gain_mode(*gain_mode);
    s.validate();
  }
};

struct Options {
  std::string command;
  // payment
  int K = 3;
  double r = 10.0;
  std::string payment_gain_mode = "table-k-plus-1";
  // run / batch / compare
  std::string scenario;
  std::string spec_path;
  std::string manifest_path;
  std::string out_dir;
  std::string methods;
  int case_index = 1;
  unsigned threads = 0;
  Overrides overrides;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--scenario", o.scenario, "Scenario id 1..8, a comma list, or 'all'");
  sub->add_option("--spec", o.spec_path, "Scenario spec JSON file");
  sub->add_option("--manifest", o.manifest_path, "Replay the parameters recorded in a manifest.json");
  sub->add_option("--out", o.out_dir, "Output directory (default: timestamped under $ROBOCONTRACT_OUT or ./runs)");
  sub->add_option("--seed", o.overrides.seed, "Master seed");
  sub->add_option("--alpha", o.overrides.alpha, "Attraction gain");
  sub->add_option("--beta", o.overrides.beta, "Barrier gain");
  sub->add_option("--epsilon", o.overrides.epsilon, "Energy-change stop threshold");
  sub->add_option("--t-max", o.overrides.t_max, "Step cap");
  sub->add_option("--r-safe", o.overrides.r_safe, "Barrier activation radius");
  sub->add_option("--d-coll", o.overrides.d_coll, "Collision distance");
  sub->add_option("--gain-mode", o.overrides.gain_mode, "text-k or table-k-plus-1");
  sub->add_option("--batch-size", o.overrides.batch_size, "Cases per scenario");
  sub->add_option("--belief-mass", o.overrides.belief_mass, "Expected belief mass on the true type");
  sub->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

fs::path output_dir(const Options& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  const char* root = std::getenv(kOutputRootEnv);
  return fs::path(root && *root ? root : "runs") / (o.command + "-" + timestamp());
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

std::vector<int> parse_ids(const std::string& text) {
  if (text == "all") return {1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || id < 1 || id > 8)
      throw ConfigError("--scenario expects ids 1..8, a comma list, or 'all'; got '" + item + "'");
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  if (ids.empty()) throw ConfigError("--scenario is empty");
  return ids;
}

// A fully resolved invocation; this is what the manifest records.
struct Plan {
  std::string command;
  std::vector<ScenarioSpec> scenarios;
  std::vector<Method> methods;
  int case_index = 1;
};

std::vector<Method> default_methods(const std::string& command) {
  if (command == "compare") return {Method::Robust, Method::Max, Method::Sample};
  return {};
}

Plan plan_from_manifest(const Options& o) {
  if (!o.scenario.empty() || !o.spec_path.empty() || !o.methods.empty() || o.overrides.any())
    throw ConfigError("--manifest cannot be combined with scenario, spec, method or parameter flags");
  std::ifstream in(o.manifest_path);
  if (!in) throw ConfigError("cannot open manifest " + o.manifest_path);
  Json m;
  try {
    m = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("manifest " + o.manifest_path + ": " + e.what());
  }
  Plan p;
  p.command = m.value("command", std::string());
  if (p.command != o.command)
    throw ConfigError("manifest was written by '" + p.command + "', not '" + o.command + "'");
  if (!m.contains("scenarios") || !m.at("scenarios").is_array() || m.at("scenarios").empty())
    throw ConfigError("manifest has no scenarios");
  for (const auto& s : m.at("scenarios")) p.scenarios.push_back(scenario_from_json(s));
  for (const auto& name : m.value("methods", std::vector<std::string>{})) p.methods.push_back(parse_method(name));
  p.case_index = m.value("case", 1);
  return p;
}

Plan make_plan(const Options& o) {
  if (!o.manifest_path.empty()) return plan_from_manifest(o);
  Plan p;
  p.command = o.command;
  p.case_index = o.case_index;
  if (!o.spec_path.empty() && !o.scenario.empty()) throw ConfigError("use either --scenario or --spec");
  if (!o.spec_path.empty()) {
    p.scenarios.push_back(load_scenario_file(o.spec_path));
  } else {
    const std::string sel = o.scenario.empty() ? (o.command == "run" ? "1" : "all") : o.scenario;
    for (int id : parse_ids(sel)) p.scenarios.push_back(table_scenario(id));
  }
  if (o.command == "run" && p.scenarios.size() != 1) throw ConfigError("run takes a single scenario");
  for (auto& s : p.scenarios) o.overrides.apply(s);
  p.methods = o.methods.empty() ? default_methods(o.command) : parse_methods(o.methods);
  if (o.command == "run" && p.case_index < 1) throw ConfigError("--case must be >= 1");
  return p;
}

Json seed_plan_json(const ScenarioSpec& spec, int first_case, int cases) {
  Json rows = Json::array();
  for (int c = first_case; c < first_case + cases; ++c) {
    const auto plan = CaseSeedPlan::make(spec, c);
    rows.push_back({{"case", c}, {"user_seed", plan.user_seed}, {"robot_seed", plan.robot_seed}});
  }
  return rows;
}

Json manifest_json(const Plan& p) {
  Json scenarios = Json::array();
  Json seeds = Json::array();
  for (const auto& s : p.scenarios) {
    scenarios.push_back(to_json(s));
    const bool single = p.command == "run";
    seeds.push_back({{"scenario", s.id},
                     {"cases", seed_plan_json(s, single ? p.case_index : 1, single ? 1 : s.batch_size)}});
  }
  Json methods = Json::array();
  for (Method m : p.methods) methods.push_back(std::string(to_string(m)));
  Json j{{"tool", "robocontract"}, {"format_version", 1}, {"command", p.command}};
  if (p.command == "run") j["case"] = p.case_index;
  j["methods"] = methods;
  j["scenarios"] = scenarios;
  j["seed_plan"] = seeds;
  return j;
}

Json mean_std_json(const MeanStd& ms) { return {{"mean", ms.mean}, {"std", ms.stddev}}; }

Json stats_json(const BatchResult& b) {
  Json methods = Json::array();
  for (const auto& m : b.stats.methods) {
    Json row{{"method", std::string(to_string(m.method))},
             {"cases", m.cases},
             {"steps", mean_std_json(m.steps)},
             {"energy", mean_std_json(m.energy)},
             {"realized_energy", mean_std_json(m.realized_energy)},
             {"mismatches", m.mismatches ? mean_std_json(*m.mismatches) : Json(nullptr)},
             {"converged_fraction", m.converged_fraction},
             {"min_distance", json_number(m.min_distance)},
             {"runs_with_collision", m.runs_with_collision}};
    methods.push_back(row);
  }
  Json diffs = Json::array();
  for (const auto& [m, d] : b.stats.differences)
    diffs.push_back({{"method", std::string(to_string(m))}, {"mean", d.mean}, {"std", d.stddev}});
  Json failures = Json::array();
  for (const auto& f : b.failures) failures.push_back({{"case", f.case_index}, {"message", f.message}});
  return Json{{"scenario", b.spec.id},
              {"menu", to_json(optimal_payment(b.spec.economics()))},
              {"cases", b.records.size()},
              {"failures", failures},
              {"methods", methods},
              {"energy_differences", diffs}};
}

int cmd_payment(const Options& o, std::ostream& out, std::ostream& err) {
  const EconomicParams econ(o.K, o.r, parse_gain_mode(o.payment_gain_mode));
  const PaymentMenu menu = optimal_payment(econ);
  out << "K=" << o.K << " r=" << format_number(o.r) << " gain_mode=" << to_string(econ.mode()) << "\n";
  out << "menu " << format_menu(menu.prices) << "\n";
  const ConstraintReport report = verify_ic_ir(menu, econ);
  out << "constraint type alt residual\n";
  for (const auto& c : report.residuals)
    out << to_string(c.kind) << ' ' << c.type << ' ' << c.alt_type << ' ' << format_number(c.residual) << "\n";
  bool ok = report.passed();
  out << "verifier " << (ok ? "PASS" : "FAIL") << " (min residual " << format_number(report.min_residual())
      << ")\n";
  if (o.K <= 4) {
    const PaymentMenu oracle = payment_oracle(econ);
    double worst = 0.0;
    for (std::size_t k = 0; k < menu.types(); ++k)
      worst = std::max(worst, std::abs(oracle.prices[k] - menu.prices[k]));
    const bool agree = worst <= 1e-9 * o.r;
    out << "oracle " << format_menu(oracle.prices) << " max_abs_diff " << format_number(worst) << ' '
        << (agree ? "PASS" : "FAIL") << "\n";
    ok = ok && agree;
  }
  if (!ok) err << "payment menu failed verification\n";
  return ok ? kOk : kVerifierFailure;
}

int cmd_run(const Plan& p, const fs::path& dir, std::ostream& out, std::ostream& err) {
  const ScenarioSpec& spec = p.scenarios.front();
  const auto plan = CaseSeedPlan::make(spec, p.case_index);
  CaseData data;
  ContractRun run;
  try {
    data = generate_case(spec, plan);
    run = run_contract(spec, data);
  } catch (const InfeasibleAllocation& e) {
    err << "infeasible: scenario " << spec.id << ", case " << p.case_index << ": " << e.what() << "\n";
    return kInfeasible;
  } catch (const GenerationError& e) {
    err << "infeasible: scenario " << spec.id << ", case " << p.case_index << ": " << e.what() << "\n";
    return kInfeasible;
  }

  std::size_t first_robot = 0;
  for (std::size_t k = 0; k < run.allocation.traces.size(); ++k) {
    std::ostringstream csv;
    write_trajectory_csv(csv, run.allocation.traces[k], static_cast<int>(k) + 1, first_robot);
    write_file(dir / "trajectories" / ("type_" + std::to_string(k + 1) + ".csv"), csv.str());
    first_robot += run.groups[k].robots.size();
  }
  std::ostringstream assignments;
  write_assignment_csv(assignments, run, data);
  write_file(dir / "assignments.csv", assignments.str());
  write_json(dir / "summary.json", run_summary(spec, plan, data, run));
  write_json(dir / "manifest.json", manifest_json(p));

  const auto& a = run.allocation;
  out << "scenario " << spec.id << " case " << p.case_index << ": menu " << format_menu(run.menu.prices)
      << ", steps " << a.max_steps() << (a.all_converged() ? "" : " (not converged)") << ", energy "
      << format_number(a.total_energy()) << ", min distance " << format_number(a.min_distance) << "\n";
  out << "wrote " << dir.string() << "\n";
  return kOk;
}

int cmd_batch(const Plan& p, const fs::path& dir, unsigned threads, std::ostream& out, std::ostream& err) {
  std::vector<BatchResult> batches;
  std::size_t failures = 0;
  for (const auto& spec : p.scenarios) {
    batches.push_back(run_batch(spec, p.methods, spec.batch_size, threads));
    const auto& b = batches.back();
    for (const auto& f : b.failures) err << "failed: " << f.message << "\n";
    failures += b.failures.size();
    write_json(dir / ("scenario_" + std::to_string(spec.id)) / "summary.json", stats_json(b));

    const auto* c = b.stats.find(Method::Contract);
    out << "scenario " << spec.id << ": menu " << format_menu(optimal_payment(spec.economics()).prices)
        << ", cases " << b.records.size() << "/" << spec.batch_size;
    if (c && c->cases)
      out << ", steps " << format_number(c->steps.mean) << " (" << format_number(c->steps.stddev) << ")"
          << ", energy " << format_number(c->energy.mean) << " (" << format_number(c->energy.stddev) << ")";
    for (const auto& [m, d] : b.stats.differences)
      out << ", " << to_string(m) << "-contract " << format_number(d.mean);
    out << "\n";
  }

  const SummaryTables tables = summarize(batches);
  std::ostringstream t2, records;
  write_contract_table_csv(t2, tables);
  write_file(dir / "table2.csv", t2.str());
  write_records_csv(records, batches);
  write_file(dir / "records.csv", records.str());
  if (p.command == "compare") {
    std::ostringstream t3, t4, f5;
    write_method_table_csv(t3, tables.baseline_energy, "energy");
    write_method_table_csv(t4, tables.mismatches, "mismatches");
    write_method_table_csv(f5, tables.differences, "difference");
    write_file(dir / "table3.csv", t3.str());
    write_file(dir / "table4.csv", t4.str());
    write_file(dir / "fig5.csv", f5.str());
  }
  Json per_scenario = Json::array();
  for (const auto& b : batches) per_scenario.push_back(stats_json(b));
  write_json(dir / "summary.json", Json{{"scenarios", per_scenario}, {"tables", to_json(tables)}});
  write_json(dir / "manifest.json", manifest_json(p));
  out << "wrote " << dir.string() << "\n";
  return failures ? kInfeasible : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Contract-based multi-robot service allocation", "robocontract"};
  app.require_subcommand(1);

  auto* payment = app.add_subcommand("payment", "Print the optimal payment menu and verify it");
  payment->add_option("--K", o.K, "Number of service types")->check(CLI::Range(1, 1000));
  payment->add_option("--r", o.r, "Base gain r");
  payment->add_option("--gain-mode", o.payment_gain_mode, "text-k or table-k-plus-1");

  auto* run_cmd = app.add_subcommand("run", "Run one case and write trajectories");
  add_common(run_cmd, o);
  run_cmd->add_option("--case", o.case_index, "Case index (seeds the draws)");

  auto* batch = app.add_subcommand("batch", "Run matched-seed batches for the contract pipeline");
  add_common(batch, o);
  batch->add_option("--methods", o.methods, "Baselines to run alongside the contract");

  auto* compare = app.add_subcommand("compare", "Run batches with baselines and write comparison tables");
  add_common(compare, o);
  compare->add_option("--methods", o.methods, "Comma list of robust,max,samp");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    if (o.command == "payment") return cmd_payment(o, out, err);
    const Plan plan = make_plan(o);
    const fs::path dir = output_dir(o);
    if (o.command == "run") return cmd_run(plan, dir, out, err);
    return cmd_batch(plan, dir, o.threads, out, err);
  } catch (const AssumptionViolation& e) {
    err << "assumption violated: " << e.what() << "\n";
    return kConfigError;
  } catch (const InfeasibleAllocation& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const GenerationError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace robocontract::cli
