#pragma once

// Economic model of the service provider: service types, the user gain
// function, optimal prices and the incentive constraints they must satisfy.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "robocontract/vec2.hpp"

namespace robocontract {

/// Raised when g(1) >= K/(K-1), where the closed-form menu stops being valid.
class AssumptionViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Denominator used by the gain function: 2·log(K) or 2·log(K+1).
enum class GainMode { TextK, TablePlusOne };

std::string_view to_string(GainMode mode);
/// Accepts "text-k" and "table-k-plus-1" (also "table").
GainMode parse_gain_mode(std::string_view text);

class EconomicParams {
 public:
  /// Throws std::invalid_argument for K < 1 or r <= 0, and
  /// AssumptionViolation when K >= 2 and g(1) >= K/(K-1).
  EconomicParams(int types, double gain, GainMode mode = GainMode::TablePlusOne,
                 double gamma = 0.0);

  int types() const { return types_; }
  double gain() const { return gain_; }
  GainMode mode() const { return mode_; }
  // Carried for completeness; the joint objective is never optimized.
  double gamma() const { return gamma_; }

 private:
  int types_;
  double gain_;
  GainMode mode_;
  double gamma_;
};

/// Gain multiplier for receiving `type_gap` levels above the true type.
/// Zero for under-provision, one for an exact match.
double gain_g(int type_gap, int types, GainMode mode);
inline double gain_g(int type_gap, const EconomicParams& params) {
  return gain_g(type_gap, params.types(), params.mode());
}

/// Locational energy of a single user-robot distance, f(d) = d^2.
double energy_f(double distance);

/// Per-type service prices; index 0 holds type 1.
struct PaymentMenu {
  std::vector<double> prices;

  std::size_t types() const { return prices.size(); }
  double price(int type) const { return prices.at(static_cast<std::size_t>(type - 1)); }
};

/// Closed-form revenue-maximizing menu: (K-k+1)r - (K-k)g(1)r.
PaymentMenu optimal_payment(const EconomicParams& params);

/// Independent check of optimal_payment: solves the simplified payment LP
/// by enumerating its vertices. Only meant for K <= 6.
PaymentMenu payment_oracle(const EconomicParams& params);

enum class ConstraintKind { IndividualRationality, IcDown, IcUp, NonNegative };

std::string_view to_string(ConstraintKind kind);

struct ConstraintResidual {
  ConstraintKind kind;
  int type;       // true type k
  int alt_type;   // deviation l; equals `type` for IR and non-negativity
  double residual;
};

struct ConstraintReport {
  static constexpr double kTolerance = 1e-9;

  std::vector<ConstraintResidual> residuals;

  bool passed() const;
  double min_residual() const;
  std::optional<double> find(ConstraintKind kind, int type, int alt_type) const;
};

ConstraintReport verify_ic_ir(const PaymentMenu& menu, const EconomicParams& params);

struct UserProfile {
  int id = 0;
  Vec2 position;
  int true_type = 1;
  std::vector<double> belief;  // provider's distribution over types
  std::optional<int> reported_type;
};

struct RobotProfile {
  int id = 0;
  int service_type = 1;
  Vec2 start;
};

/// Checks that a belief vector is a distribution over `types` entries.
void validate_belief(std::span<const double> belief, int types);

/// Reported type maximizing g(phi - theta)·r - rho[phi]. Ties (within
/// 1e-9·r) go to the lowest type.
int user_best_response(int true_type, const PaymentMenu& menu, const EconomicParams& params);
inline int user_best_response(const UserProfile& user, const PaymentMenu& menu,
                              const EconomicParams& params) {
  return user_best_response(user.true_type, menu, params);
}

}  // namespace robocontract
