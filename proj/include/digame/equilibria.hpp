#ifndef DIGAME_EQUILIBRIA_HPP
#define DIGAME_EQUILIBRIA_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "digame/game.hpp"

namespace digame {

struct StrategyProfile {
  StrategyMatrix user;
  StrategyMatrix dbms;
};

/// A profitable (or payoff-neutral, for strictness failures) pure single-row
/// rewrite of one player's strategy.
struct DeviationWitness {
  enum class Player { kUser, kDbms };
  Player player;
  std::size_t row;     // intent index for the user, query index for the system
  std::size_t target;  // query (user) or result (system) the row moves to
  double gain;         // payoff change of the rewrite, >= 0 in reports
};

struct EquilibriumReport {
  bool is_nash = false;
  bool is_strict_nash = false;
  bool is_optimal = false;  // filled by check_optimal / enumeration
  double payoff = 0.0;
  double best_user_deviation_gain = 0.0;
  double best_dbms_deviation_gain = 0.0;
  std::vector<DeviationWitness> witnesses;

  /// Nash verdict re-derived from the best-query / best-reply
  /// characterization; must match the deviation-based verdict.
  bool characterization_agrees = true;

  /// Structural conditions that every strict Nash profile must satisfy.
  bool user_pure = false;
  bool dbms_pure = false;
  bool user_onto = false;
  bool dbms_one_to_one = false;

  /// Rows the checker had to treat as trivially satisfied: intents with zero
  /// weight, intents whose every query yields zero payoff, and pooled queries
  /// whose every reply yields zero value.
  std::vector<std::size_t> zero_weight_intents;
  std::vector<std::size_t> zero_payoff_intents;
  std::vector<std::size_t> zero_value_queries;
};

class enumeration_budget_error : public std::runtime_error {
 public:
  enumeration_budget_error(std::size_t required, std::size_t budget)
      : std::runtime_error("pure-profile enumeration needs " +
                           std::to_string(required) + " profiles, budget is " +
                           std::to_string(budget)),
        required_(required) {}
  std::size_t required() const { return required_; }

 private:
  std::size_t required_;
};

inline constexpr std::size_t kDefaultEnumerationBudget = 10'000'000;

/// sum_l D_jl r(e_i, s_l): what intent i earns from submitting query j.
double payoff_of_intent_with_query(const StrategyMatrix& dbms,
                                   const EffectivenessMatrix& r, std::size_t i,
                                   std::size_t j);

/// Intents that use query j with probability above the support threshold.
std::vector<std::size_t> intent_pool(const StrategyMatrix& user, std::size_t j);

/// Pure results maximizing sum_i pi_i U_ij r_il, ties kept. The objective is
/// linear in the reply distribution, so pure maximizers suffice.
std::vector<std::size_t> best_replies(const StrategyMatrix& user,
                                      const ProbabilityVector& prior,
                                      const EffectivenessMatrix& r, std::size_t j);

struct BestResponseCheck {
  bool ok = true;
  /// Queries whose reply puts mass outside the best-reply set.
  std::vector<std::size_t> offending_queries;
};

/// D is a best response to U iff every query's reply is supported inside its
/// best-reply set.
BestResponseCheck is_best_response(const StrategyMatrix& user,
                                   const StrategyMatrix& dbms,
                                   const ProbabilityVector& prior,
                                   const EffectivenessMatrix& r);

/// Strict best response: every query has one and only one best reply and D
/// maps it there with probability one.
bool is_strict_best_response(const StrategyMatrix& user, const StrategyMatrix& dbms,
                             const ProbabilityVector& prior,
                             const EffectivenessMatrix& r);

/// Nash check by exhausting pure single-row deviations (sufficient because
/// the payoff is bilinear), cross-checked against the best-query/best-reply
/// characterization.
EquilibriumReport check_nash(const StrategyProfile& profile, const GameConfig& game);

/// Strict Nash: Nash, both strategies pure, U onto, D one-to-one, and every
/// pure single-row deviation of a row that can earn anything strictly lowers
/// the payoff. Rows with zero weight or zero achievable payoff cannot lose
/// from a rewrite; they are exempted and flagged in the report.
EquilibriumReport check_strict_nash(const StrategyProfile& profile,
                                    const GameConfig& game);

struct EnumeratedEquilibrium {
  StrategyProfile profile;
  EquilibriumReport report;
};

struct EnumerationResult {
  std::vector<EnumeratedEquilibrium> nash;         // includes the strict ones
  std::vector<EnumeratedEquilibrium> strict_nash;  // subset of `nash`
  double max_payoff = 0.0;
  std::vector<StrategyProfile> optimal;  // pure profiles attaining max_payoff
  std::size_t profiles_scanned = 0;
};

/// Scans every pure user strategy (n^m) against every pure system strategy
/// (o^n). Refuses with enumeration_budget_error when the product exceeds the
/// budget.
EnumerationResult enumerate_pure_equilibria(
    const GameConfig& game, std::size_t budget = kDefaultEnumerationBudget);

/// True iff the profile's payoff matches the best payoff any profile can get
/// (the optimum is attained at a pure profile, again by bilinearity).
bool check_optimal(const StrategyProfile& profile, const GameConfig& game,
                   std::size_t budget = kDefaultEnumerationBudget);

/// Verifies the constructive content of the infinitely-many-equilibria lemma:
/// both (U, D) and (U, D2) must already be Nash (else throws
/// std::invalid_argument), then every sampled blend alpha*D + (1-alpha)*D2
/// must keep the payoff constant and remain Nash.
bool nash_convexity_witness(const StrategyMatrix& user, const StrategyMatrix& d_first,
                            const StrategyMatrix& d_second, const GameConfig& game,
                            std::size_t samples);

}  // namespace digame

#endif  // DIGAME_EQUILIBRIA_HPP
