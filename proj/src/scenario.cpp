#include "robocontract/scenario.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string_view>
#include <thread>

namespace robocontract {

int ScenarioSpec::user_count() const {
  return std::accumulate(user_type_counts.begin(), user_type_counts.end(), 0);
}

int ScenarioSpec::robot_count() const {
  return std::accumulate(robot_type_counts.begin(), robot_type_counts.end(), 0);
}

void ScenarioSpec::validate() const {
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("scenario " + std::to_string(id) + ": " + msg);
  };
  if (user_type_counts.empty()) fail("user_type_counts must list at least one type");
  if (robot_type_counts.size() != user_type_counts.size())
    fail("user_type_counts and robot_type_counts must have the same length");
  for (std::size_t k = 0; k < user_type_counts.size(); ++k) {
    if (user_type_counts[k] < 0 || robot_type_counts[k] < 0) fail("counts must be non-negative");
    if (user_type_counts[k] > 0 && robot_type_counts[k] == 0)
      fail("type " + std::to_string(k + 1) + " has users but no robots");
  }
  if (types() > 1 && !(belief_mass > 1.0 / types() && belief_mass < 1.0))
    fail("belief_mass must lie in (1/K, 1)");
  if (batch_size < 1) fail("batch_size must be >= 1");
  physics.validate();
  (void)economics();  // validates K, r and the payment assumption
}

ScenarioSpec table_scenario(int id) {
  struct Row {
    std::vector<int> users, robots;
  };
  static const std::array<Row, 8> rows{{
      {{5, 11, 4}, {3, 4, 2}},
      {{5, 11, 4}, {4, 6, 2}},
      {{12, 11, 7}, {4, 6, 2}},
      {{7, 9, 10, 4}, {3, 5, 4, 3}},
      {{15, 14, 11, 10}, {3, 5, 4, 3}},
      {{15, 14, 11, 10}, {12, 8, 13, 7}},
      {{30, 25, 28, 17}, {12, 8, 13, 7}},
      {{18, 22, 33, 20, 7}, {8, 10, 10, 9, 3}},
  }};
  if (id < 1 || id > 8) throw std::invalid_argument("scenario id must be in 1..8");
  ScenarioSpec spec;
  spec.id = id;
  spec.user_type_counts = rows[static_cast<std::size_t>(id - 1)].users;
  spec.robot_type_counts = rows[static_cast<std::size_t>(id - 1)].robots;
  return spec;
}

std::vector<ScenarioSpec> table_scenarios() {
  std::vector<ScenarioSpec> out;
  for (int id = 1; id <= 8; ++id) out.push_back(table_scenario(id));
  return out;
}

namespace {

std::uint64_t derive_seed(std::string_view tag, std::uint64_t master, int case_index,
                          const std::vector<int>& counts) {
  std::vector<std::uint32_t> words;
  for (char c : tag) words.push_back(static_cast<unsigned char>(c));
  words.push_back(static_cast<std::uint32_t>(master));
  words.push_back(static_cast<std::uint32_t>(master >> 32));
  words.push_back(static_cast<std::uint32_t>(case_index));
  words.push_back(static_cast<std::uint32_t>(counts.size()));
  for (int c : counts) words.push_back(static_cast<std::uint32_t>(c));
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vec2 uniform_point(std::mt19937_64& rng, const Workspace& ws) {
  const double x = ws.min_x + (ws.max_x - ws.min_x) * uniform01(rng);
  const double y = ws.min_y + (ws.max_y - ws.min_y) * uniform01(rng);
  return {x, y};
}

std::vector<double> centred_belief(std::mt19937_64& rng, int types, int own_type, double mass) {
  std::vector<double> p(static_cast<std::size_t>(types), 0.0);
  if (types == 1) {
    p[0] = 1.0;
    return p;
  }
  // Dirichlet(1 + c·e_own); E[p_own] = (1 + c) / (K + c) = mass.
  const double K = static_cast<double>(types);
  const double boost = (mass * K - 1.0) / (1.0 - mass);
  double total = 0.0;
  for (int k = 0; k < types; ++k) {
    const double shape = 1.0 + (k == own_type - 1 ? boost : 0.0);
    std::gamma_distribution<double> gamma(shape, 1.0);
    p[static_cast<std::size_t>(k)] = gamma(rng);
    total += p[static_cast<std::size_t>(k)];
  }
  if (!(total > 0.0)) {
    std::fill(p.begin(), p.end(), 0.0);
    p[static_cast<std::size_t>(own_type - 1)] = 1.0;
    return p;
  }
  for (auto& v : p) v /= total;
  // Renormalize the last entry so the vector sums to one within rounding.
  const double head = std::accumulate(p.begin(), p.end() - 1, 0.0);
  p.back() = std::max(0.0, 1.0 - head);
  return p;
}

}  // namespace

CaseSeedPlan CaseSeedPlan::make(const ScenarioSpec& spec, int case_index) {
  CaseSeedPlan plan;
  plan.case_index = case_index;
  plan.user_seed = derive_seed("users", spec.seed, case_index, spec.user_type_counts);
  plan.robot_seed = derive_seed("robots", spec.seed, case_index, spec.robot_type_counts);
  return plan;
}

std::vector<int> CaseData::true_types() const {
  std::vector<int> out;
  out.reserve(users.size());
  for (const auto& u : users) out.push_back(u.true_type);
  return out;
}

CaseData generate_case(const ScenarioSpec& spec, const CaseSeedPlan& plan) {
  spec.validate();
  const auto& ws = spec.physics.workspace;
  CaseData data;

  std::mt19937_64 user_rng(plan.user_seed);
  int id = 0;
  for (int k = 1; k <= spec.types(); ++k) {
    for (int n = 0; n < spec.user_type_counts[static_cast<std::size_t>(k - 1)]; ++n) {
      UserProfile u;
      u.id = id++;
      u.position = uniform_point(user_rng, ws);
      u.true_type = k;
      u.belief = centred_belief(user_rng, spec.types(), k, spec.belief_mass);
      data.users.push_back(std::move(u));
    }
  }

  std::mt19937_64 robot_rng(plan.robot_seed);
  constexpr int kMaxTries = 10000;
  const double min_sep2 = spec.physics.d_coll * spec.physics.d_coll;
  id = 0;
  for (int k = 1; k <= spec.types(); ++k) {
    for (int n = 0; n < spec.robot_type_counts[static_cast<std::size_t>(k - 1)]; ++n) {
      bool placed = false;
      for (int attempt = 0; attempt < kMaxTries && !placed; ++attempt) {
        const Vec2 p = uniform_point(robot_rng, ws);
        const bool clear = std::none_of(data.robots.begin(), data.robots.end(), [&](const RobotProfile& r) {
          return squared_distance(r.start, p) < min_sep2;
        });
        if (clear) {
          data.robots.push_back({id++, k, p});
          placed = true;
        }
      }
      if (!placed)
        throw GenerationError("could not place robot " + std::to_string(id) + " at least d_coll from the others after " +
                              std::to_string(kMaxTries) + " draws; workspace is overcrowded");
    }
  }
  return data;
}

ContractRun run_contract(const ScenarioSpec& spec, CaseData& data) {
  const EconomicParams econ = spec.economics();
  ContractRun run;
  run.menu = optimal_payment(econ);
  run.reported.reserve(data.users.size());
  for (auto& u : data.users) {
    u.reported_type = user_best_response(u, run.menu, econ);
    run.reported.push_back(*u.reported_type);
  }
  run.groups = groups_by_type(data.users, run.reported, data.robots, spec.types());
  run.allocation = run_allocation(run.groups, spec.physics);
  return run;
}

namespace {

MethodOutcome outcome_from(Method method, const AllocationResult& alloc, double energy,
                           const CaseData& data, int types) {
  MethodOutcome out;
  out.method = method;
  out.energy = energy;
  out.realized_energy = realized_energy(alloc, data.users, types);
  out.steps = alloc.max_steps();
  out.converged = alloc.all_converged();
  out.min_distance = alloc.min_distance;
  out.collisions = alloc.collisions;
  return out;
}

}  // namespace

const MethodOutcome* CaseRecord::find(Method method) const {
  for (const auto& o : outcomes)
    if (o.method == method) return &o;
  return nullptr;
}

CaseRecord run_case(const ScenarioSpec& spec, int case_index, const std::vector<Method>& baselines) {
  CaseRecord record;
  record.scenario = spec.id;
  record.case_index = case_index;
  record.plan = CaseSeedPlan::make(spec, case_index);
  CaseData data = generate_case(spec, record.plan);
  const int K = spec.types();
  const auto truth = data.true_types();

  const ContractRun contract = run_contract(spec, data);
  auto contract_outcome =
      outcome_from(Method::Contract, contract.allocation, contract.allocation.total_energy(), data, K);
  contract_outcome.mismatches = count_mismatches(contract.reported, truth);
  record.outcomes.push_back(contract_outcome);

  for (Method m : baselines) {
    if (m == Method::Contract) continue;
    if (m == Method::Robust) {
      const auto robust = run_robust(data.users, data.robots, K, spec.physics);
      record.outcomes.push_back(outcome_from(m, robust.allocation, robust.expected_energy, data, K));
      continue;
    }
    // Sample draws are keyed to the user set so matched scenarios share them.
    std::mt19937_64 rng(record.plan.user_seed ^ 0x5deece66dULL);
    const auto estimate = estimate_types(m, data.users, rng);
    const auto groups = groups_by_type(data.users, estimate.types, data.robots, K);
    const auto alloc = run_allocation(groups, spec.physics);
    auto out = outcome_from(m, alloc, alloc.total_energy(), data, K);
    out.mismatches = count_mismatches(estimate.types, truth);
    record.outcomes.push_back(out);
  }
  return record;
}

const MethodStats* BatchStats::find(Method method) const {
  for (const auto& m : methods)
    if (m.method == method) return &m;
  return nullptr;
}

const DifferenceStats* BatchStats::difference(Method method) const {
  for (const auto& [m, d] : differences)
    if (m == method) return &d;
  return nullptr;
}

BatchStats compute_stats(const std::vector<CaseRecord>& records, const std::vector<Method>& baselines) {
  BatchStats stats;
  std::vector<Method> methods{Method::Contract};
  for (Method m : baselines)
    if (m != Method::Contract && std::find(methods.begin(), methods.end(), m) == methods.end())
      methods.push_back(m);

  std::vector<double> contract_energy;
  for (Method m : methods) {
    std::vector<double> steps, energy, realized, mismatches;
    MethodStats ms;
    ms.method = m;
    ms.min_distance = std::numeric_limits<double>::infinity();
    std::size_t converged = 0;
    for (const auto& rec : records) {
      const auto* o = rec.find(m);
      if (!o) throw std::invalid_argument("compute_stats: case " + std::to_string(rec.case_index) +
                                          " lacks method " + std::string(to_string(m)));
      steps.push_back(static_cast<double>(o->steps));
      energy.push_back(o->energy);
      realized.push_back(o->realized_energy);
      if (o->mismatches) mismatches.push_back(static_cast<double>(*o->mismatches));
      if (o->converged) ++converged;
      if (o->collisions > 0) ++ms.runs_with_collision;
      ms.min_distance = std::min(ms.min_distance, o->min_distance);
    }
    ms.cases = records.size();
    ms.steps = mean_std(steps);
    ms.energy = mean_std(energy);
    ms.realized_energy = mean_std(realized);
    if (!mismatches.empty()) ms.mismatches = mean_std(mismatches);
    ms.converged_fraction =
        records.empty() ? 0.0 : static_cast<double>(converged) / static_cast<double>(records.size());
    stats.methods.push_back(ms);
    if (m == Method::Contract)
      contract_energy = energy;
    else
      stats.differences.emplace_back(m, energy_difference_report(contract_energy, energy));
  }
  return stats;
}

BatchResult run_batch(const ScenarioSpec& spec, const std::vector<Method>& baselines, int batch_size,
                      unsigned threads) {
  spec.validate();
  const int cases = batch_size > 0 ? batch_size : spec.batch_size;
  BatchResult result;
  result.spec = spec;
  for (Method m : baselines)
    if (m != Method::Contract && std::find(result.baselines.begin(), result.baselines.end(), m) ==
                                     result.baselines.end())
      result.baselines.push_back(m);

  std::vector<std::optional<CaseRecord>> slots(static_cast<std::size_t>(cases));
  std::vector<std::optional<std::string>> errors(static_cast<std::size_t>(cases));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < cases; i = next++) {
      try {
        slots[static_cast<std::size_t>(i)] = run_case(spec, i + 1, result.baselines);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cases));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  for (int i = 0; i < cases; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (slots[idx]) result.records.push_back(std::move(*slots[idx]));
    else result.failures.push_back({i + 1, "scenario " + std::to_string(spec.id) + ", case " +
                                               std::to_string(i + 1) + ": " + errors[idx].value_or("unknown error")});
  }
  result.stats = compute_stats(result.records, result.baselines);
  return result;
}

}  // namespace robocontract
