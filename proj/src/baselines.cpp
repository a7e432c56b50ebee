#include "robocontract/baselines.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "robocontract/stats.hpp"

namespace robocontract {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Contract: return "contract";
    case Method::Max: return "max";
    case Method::Sample: return "samp";
    case Method::Robust: return "robust";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "contract") return Method::Contract;
  if (text == "max") return Method::Max;
  if (text == "samp" || text == "sample") return Method::Sample;
  if (text == "robust") return Method::Robust;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

std::vector<Method> parse_methods(std::string_view text) {
  std::vector<Method> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    if (!item.empty()) {
      const Method m = parse_method(item);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

int estimate_max(std::span<const double> belief) {
  if (belief.empty()) throw std::invalid_argument("estimate_max: empty belief");
  const auto it = std::max_element(belief.begin(), belief.end());  // first maximum
  return static_cast<int>(it - belief.begin()) + 1;
}

int estimate_sample(std::span<const double> belief, std::mt19937_64& rng) {
  if (belief.empty()) throw std::invalid_argument("estimate_sample: empty belief");
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  int last_positive = 1;
  for (std::size_t k = 0; k < belief.size(); ++k) {
    if (belief[k] > 0.0) last_positive = static_cast<int>(k) + 1;
    cumulative += belief[k];
    if (u < cumulative && belief[k] > 0.0) return static_cast<int>(k) + 1;
  }
  return last_positive;  // u landed in the rounding gap above the final partial sum
}

TypeEstimate estimate_types(Method method, std::span<const UserProfile> users,
                            std::mt19937_64& rng) {
  TypeEstimate est{method, {}};
  if (method == Method::Robust) return est;
  est.types.reserve(users.size());
  for (const auto& u : users) {
    switch (method) {
      case Method::Contract:
        if (!u.reported_type)
          throw std::invalid_argument("user " + std::to_string(u.id) + " has not reported a type");
        est.types.push_back(*u.reported_type);
        break;
      case Method::Max: est.types.push_back(estimate_max(u.belief)); break;
      case Method::Sample: est.types.push_back(estimate_sample(u.belief, rng)); break;
      case Method::Robust: break;
    }
  }
  return est;
}

std::size_t count_mismatches(std::span<const int> estimated, std::span<const int> true_types) {
  if (estimated.size() != true_types.size())
    throw std::invalid_argument("count_mismatches: user sets differ in size");
  std::size_t n = 0;
  for (std::size_t i = 0; i < estimated.size(); ++i)
    if (estimated[i] < true_types[i]) ++n;
  return n;
}

namespace {

std::vector<TypeGroup> robot_groups(std::span<const RobotProfile> robots, int type_count) {
  std::vector<TypeGroup> groups(static_cast<std::size_t>(type_count));
  for (const auto& r : robots) {
    if (r.service_type < 1 || r.service_type > type_count)
      throw std::invalid_argument("robot " + std::to_string(r.id) + " has type " +
                                  std::to_string(r.service_type) + " outside 1.." +
                                  std::to_string(type_count));
    groups[static_cast<std::size_t>(r.service_type - 1)].robots.push_back(r.start);
  }
  return groups;
}

}  // namespace

std::vector<TypeGroup> groups_by_type(std::span<const UserProfile> users, std::span<const int> types,
                                      std::span<const RobotProfile> robots, int type_count) {
  if (types.size() != users.size())
    throw std::invalid_argument("groups_by_type: one type per user required");
  auto groups = robot_groups(robots, type_count);
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (types[i] < 1 || types[i] > type_count)
      throw std::invalid_argument("user type outside 1..K");
    auto& g = groups[static_cast<std::size_t>(types[i] - 1)];
    g.users.push_back(users[i].position);
    g.weights.push_back(1.0);
  }
  return groups;
}

std::vector<TypeGroup> groups_by_belief(std::span<const UserProfile> users,
                                        std::span<const RobotProfile> robots, int type_count) {
  auto groups = robot_groups(robots, type_count);
  for (const auto& u : users) {
    validate_belief(u.belief, type_count);
    for (std::size_t k = 0; k < groups.size(); ++k) {
      groups[k].users.push_back(u.position);
      groups[k].weights.push_back(u.belief[k]);
    }
  }
  return groups;
}

RobustOutcome run_robust(std::span<const UserProfile> users, std::span<const RobotProfile> robots,
                         int type_count, const PhysicsParams& params) {
  const auto groups = groups_by_belief(users, robots, type_count);
  RobustOutcome out;
  out.allocation = run_allocation(groups, params);
  out.expected_energy = out.allocation.total_energy();
  return out;
}

double realized_energy(const AllocationResult& allocation, std::span<const UserProfile> users,
                       int type_count) {
  if (allocation.traces.size() != static_cast<std::size_t>(type_count))
    throw std::invalid_argument("realized_energy: allocation has the wrong number of types");
  double total = 0.0;
  for (const auto& u : users) {
    const auto& trace = allocation.traces.at(static_cast<std::size_t>(u.true_type - 1));
    const auto& final_positions = trace.positions.back();
    if (final_positions.empty())
      throw std::invalid_argument("realized_energy: no robot of type " + std::to_string(u.true_type));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : final_positions) best = std::min(best, squared_distance(u.position, x));
    total += best;
  }
  return total;
}

DifferenceStats energy_difference_report(std::span<const double> contract,
                                         std::span<const double> method) {
  if (contract.size() != method.size())
    throw std::invalid_argument("energy_difference_report: " + std::to_string(method.size()) +
                                " method cases vs " + std::to_string(contract.size()) +
                                " contract cases");
  DifferenceStats out;
  out.differences.reserve(contract.size());
  for (std::size_t c = 0; c < contract.size(); ++c) out.differences.push_back(method[c] - contract[c]);
  const auto ms = mean_std(out.differences);
  out.mean = ms.mean;
  out.stddev = ms.stddev;
  return out;
}

}  // namespace robocontract
