#include "robocontract/contract.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace robocontract {

std::string_view to_string(GainMode mode) {
  return mode == GainMode::TextK ? "text-k" : "table-k-plus-1";
}

GainMode parse_gain_mode(std::string_view text) {
  if (text == "text-k" || text == "text") return GainMode::TextK;
  if (text == "table-k-plus-1" || text == "table") return GainMode::TablePlusOne;
  throw std::invalid_argument("unknown gain mode '" + std::string(text) +
                              "' (expected text-k or table-k-plus-1)");
}

EconomicParams::EconomicParams(int types, double gain, GainMode mode, double gamma)
    : types_(types), gain_(gain), mode_(mode), gamma_(gamma) {
  if (types < 1) throw std::invalid_argument("number of service types must be >= 1");
  if (!(gain > 0.0) || !std::isfinite(gain))
    throw std::invalid_argument("service gain r must be positive and finite");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  if (types >= 2) {
    const double g1 = gain_g(1, types, mode);
    const double bound = static_cast<double>(types) / static_cast<double>(types - 1);
    // Equality (K=7 in table mode) counts as a violation regardless of log rounding.
    if (g1 >= bound - 1e-12) {
      throw AssumptionViolation("g(1) = " + std::to_string(g1) + " violates g(1) < K/(K-1) = " +
                                std::to_string(bound) + " for K = " + std::to_string(types));
    }
  }
}

double gain_g(int type_gap, int types, GainMode mode) {
  if (type_gap < 0) return 0.0;
  if (type_gap == 0) return 1.0;
  int denominator = mode == GainMode::TextK ? types : types + 1;
  // K = 1 never produces a positive gap; keep the formula finite anyway.
  denominator = std::max(denominator, 2);
  return std::log(static_cast<double>(type_gap) + 1.0) /
             (2.0 * std::log(static_cast<double>(denominator))) +
         1.0;
}

double energy_f(double distance) {
  if (distance < 0.0 || std::isnan(distance))
    throw std::invalid_argument("energy_f: distance must be non-negative");
  return distance * distance;
}

PaymentMenu optimal_payment(const EconomicParams& params) {
  const int K = params.types();
  const double r = params.gain();
  const double g1 = gain_g(1, params);
  PaymentMenu menu;
  menu.prices.resize(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const double above = static_cast<double>(K - k);
    menu.prices[static_cast<std::size_t>(k - 1)] = (above + 1.0) * r - above * g1 * r;
  }
  return menu;
}

namespace {

// One row of A·rho <= b.
struct Halfspace {
  std::vector<double> a;
  double b;
};

std::vector<Halfspace> payment_constraints(const EconomicParams& params) {
  const int K = params.types();
  const double r = params.gain();
  const auto K_sz = static_cast<std::size_t>(K);
  std::vector<Halfspace> rows;
  auto unit = [&](std::size_t i, double v) {
    std::vector<double> a(K_sz, 0.0);
    a[i] = v;
    return a;
  };
  for (std::size_t k = 0; k < K_sz; ++k) {
    rows.push_back({unit(k, -1.0), 0.0});  // rho_k >= 0
    rows.push_back({unit(k, 1.0), r});     // rho_k <= r
  }
  for (int k = 1; k <= K; ++k) {
    for (int l = 1; l <= K; ++l) {
      if (l == k) continue;
      std::vector<double> a(K_sz, 0.0);
      a[static_cast<std::size_t>(k - 1)] = 1.0;
      a[static_cast<std::size_t>(l - 1)] = -1.0;
      // l < k: rho_k - rho_l <= r.  l > k: rho_l - rho_k >= g(l-k)r - r.
      const double b = l < k ? r : r - gain_g(l - k, params) * r;
      rows.push_back({std::move(a), b});
    }
  }
  return rows;
}

// Solves the square system in place; false when (numerically) singular.
bool solve_dense(std::vector<double>& m, std::vector<double>& rhs, std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::abs(m[row * n + col]) > std::abs(m[pivot * n + col])) pivot = row;
    if (std::abs(m[pivot * n + col]) < 1e-12) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m[pivot * n + c], m[col * n + c]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      const double factor = m[row * n + col] / m[col * n + col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m[row * n + c] -= factor * m[col * n + c];
      rhs[row] -= factor * rhs[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= m[i * n + c] * rhs[c];
    rhs[i] = acc / m[i * n + i];
  }
  return true;
}

}  // namespace

PaymentMenu payment_oracle(const EconomicParams& params) {
  const int K = params.types();
  if (K > 6) throw std::invalid_argument("payment_oracle is limited to K <= 6");
  const auto n = static_cast<std::size_t>(K);
  const auto rows = payment_constraints(params);
  const double feas_tol = 1e-9 * std::max(1.0, params.gain());

  std::vector<std::size_t> pick(n);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  std::vector<double> best;
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<double> m(n * n), rhs(n);

  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(rows[pick[i]].a.begin(), rows[pick[i]].a.end(), m.begin() + static_cast<std::ptrdiff_t>(i * n));
      rhs[i] = rows[pick[i]].b;
    }
    if (solve_dense(m, rhs, n)) {
      const bool feasible = std::all_of(rows.begin(), rows.end(), [&](const Halfspace& h) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < n; ++i) lhs += h.a[i] * rhs[i];
        return lhs <= h.b + feas_tol;
      });
      if (feasible) {
        const double value = std::accumulate(rhs.begin(), rhs.end(), 0.0);
        if (value > best_value + feas_tol) {
          best_value = value;
          best = rhs;
        }
      }
    }
    // Next combination in lexicographic order.
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == rows.size() - n + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }

  if (best.empty()) throw std::runtime_error("payment_oracle: constraint set is infeasible");
  return PaymentMenu{std::move(best)};
}

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::IndividualRationality: return "IR";
    case ConstraintKind::IcDown: return "IC-down";
    case ConstraintKind::IcUp: return "IC-up";
    case ConstraintKind::NonNegative: return "non-negative";
  }
  return "?";
}

bool ConstraintReport::passed() const {
  return std::all_of(residuals.begin(), residuals.end(),
                     [](const ConstraintResidual& c) { return c.residual >= -kTolerance; });
}

double ConstraintReport::min_residual() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& c : residuals) lo = std::min(lo, c.residual);
  return lo;
}

std::optional<double> ConstraintReport::find(ConstraintKind kind, int type, int alt_type) const {
  for (const auto& c : residuals)
    if (c.kind == kind && c.type == type && c.alt_type == alt_type) return c.residual;
  return std::nullopt;
}

ConstraintReport verify_ic_ir(const PaymentMenu& menu, const EconomicParams& params) {
  const int K = params.types();
  if (menu.types() != static_cast<std::size_t>(K))
    throw std::invalid_argument("verify_ic_ir: menu has " + std::to_string(menu.types()) +
                                " prices for K = " + std::to_string(K));
  const double r = params.gain();
  ConstraintReport report;
  for (int k = 1; k <= K; ++k) {
    const double truthful = r - menu.price(k);
    report.residuals.push_back({ConstraintKind::IndividualRationality, k, k, truthful});
    report.residuals.push_back({ConstraintKind::NonNegative, k, k, menu.price(k)});
    for (int l = 1; l < k; ++l)
      report.residuals.push_back({ConstraintKind::IcDown, k, l, truthful - (0.0 - menu.price(l))});
    for (int l = k + 1; l <= K; ++l)
      report.residuals.push_back(
          {ConstraintKind::IcUp, k, l, truthful - (gain_g(l - k, params) * r - menu.price(l))});
  }
  return report;
}

void validate_belief(std::span<const double> belief, int types) {
  if (belief.size() != static_cast<std::size_t>(types))
    throw std::invalid_argument("belief has " + std::to_string(belief.size()) +
                                " entries, expected " + std::to_string(types));
  double total = 0.0;
  for (double p : belief) {
    if (!(p >= 0.0)) throw std::invalid_argument("belief entries must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("belief must sum to 1");
}

int user_best_response(int true_type, const PaymentMenu& menu, const EconomicParams& params) {
  const int K = params.types();
  if (true_type < 1 || true_type > K)
    throw std::invalid_argument("true type " + std::to_string(true_type) + " outside 1.." +
                                std::to_string(K));
  if (menu.types() != static_cast<std::size_t>(K))
    throw std::invalid_argument("user_best_response: menu size does not match K");
  const double r = params.gain();
  std::vector<double> utility(static_cast<std::size_t>(K));
  double best = -std::numeric_limits<double>::infinity();
  for (int phi = 1; phi <= K; ++phi) {
    const double u = gain_g(phi - true_type, params) * r - menu.price(phi);
    utility[static_cast<std::size_t>(phi - 1)] = u;
    best = std::max(best, u);
  }
  const double tie = 1e-9 * r;
  for (int phi = 1; phi <= K; ++phi)
    if (utility[static_cast<std::size_t>(phi - 1)] >= best - tie) return phi;
  return true_type;  // unreachable
}

}  // namespace robocontract
