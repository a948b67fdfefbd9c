#ifndef DIGAME_USER_LEARNING_HPP
#define DIGAME_USER_LEARNING_HPP

#include <cstddef>
#include <string>

#include "digame/game.hpp"
#include "digame/matrix.hpp"

namespace digame {

enum class UserModel {
  kBushMosteller,
  kCross,
  kRothErev,
  kRothErevModified,
  kWinStayLoseRandomize,
  kLatestReward,
};

constexpr const char* to_string(UserModel m) {
  switch (m) {
    case UserModel::kBushMosteller: return "bush-mosteller";
    case UserModel::kCross: return "cross";
    case UserModel::kRothErev: return "roth-erev";
    case UserModel::kRothErevModified: return "roth-erev-modified";
    case UserModel::kWinStayLoseRandomize: return "win-stay-lose-randomize";
    case UserModel::kLatestReward: return "latest-reward";
  }
  return "?";
}

UserModel user_model_from_string(const std::string& name);

/// Parameters for the strategy-adaptation models. Defaults are the values
/// fitted on the query workload study; r_min defaults to zero (no expected
/// reward).
struct ModelParams {
  double alpha_bm = 0.14;
  double beta_bm = 0.0;
  double alpha_c = 0.06;
  double beta_c = 0.11;
  double sigma = 0.0;
  double epsilon = 0.18;
  double r_min = 0.0;
  double wslr_threshold = 0.01;
  /// Spread the off-query reinforcement of the modified Roth-Erev rule as
  /// eps/(n-1) per cell instead of the literal eps per cell.
  bool spread_epsilon = false;

  void validate() const;
};

/// One user's adaptive strategy. `U` stays row-stochastic after every update;
/// the Roth-Erev variants additionally keep `U` equal to the row
/// normalization of the positive accumulated-reward matrix `S`.
struct UserLearnerState {
  UserModel model = UserModel::kRothErev;
  ModelParams params;
  Matrix U;  // m x n, row-stochastic
  Matrix S;  // m x n, strictly positive; only maintained for Roth-Erev variants

  static UserLearnerState make(UserModel model, std::size_t intents,
                               std::size_t queries, ModelParams params = {});
  /// Starts from an explicit strategy (and, for Roth-Erev variants, a
  /// strictly positive reward matrix whose normalization must be that
  /// strategy).
  static UserLearnerState from_strategy(UserModel model, const StrategyMatrix& u,
                                        ModelParams params = {});
  static UserLearnerState from_rewards(UserModel model, Matrix s,
                                       ModelParams params = {});

  std::size_t intents() const { return U.rows(); }
  std::size_t queries() const { return U.cols(); }

  bool uses_reward_matrix() const {
    return model == UserModel::kRothErev || model == UserModel::kRothErevModified;
  }

  /// Validated view of the current strategy.
  StrategyMatrix strategy() const { return StrategyMatrix(U); }

  /// Lazy growth for ids met mid-stream: new intents get uniform rows, new
  /// queries get a proportionally renormalized share of each row (for the
  /// Roth-Erev variants this is the all-ones reward convention applied to the
  /// new column).
  void ensure_intent(std::size_t i);
  void ensure_query(std::size_t j);
};

// Each update touches only row `intent` and keeps it exactly stochastic.

/// Fixed-size move toward the chosen query when the reward is nonnegative
/// (zero reward is a no-op). The negative branch frees beta * U_ij* and
/// spreads it evenly over the other queries; it never fires for rewards in
/// [0,1].
void update_bush_mosteller(UserLearnerState& state, std::size_t intent,
                           std::size_t query, double reward);

/// Like Bush-Mosteller but the step size is the adjusted reward
/// R = clamp(alpha_c * reward + beta_c, 0, 1).
void update_cross(UserLearnerState& state, std::size_t intent, std::size_t query,
                  double reward);

/// Adds the reward to S_ij* and renormalizes the row from S.
void update_roth_erev(UserLearnerState& state, std::size_t intent, std::size_t query,
                      double reward);

/// S_ij <- (1-sigma) S_ij + E(j, reward - r_min) for every cell of the row,
/// where E gives (1-eps) of the adjusted reward to the chosen query and eps
/// to each other query (or eps/(n-1) with spread_epsilon).
void update_roth_erev_modified(UserLearnerState& state, std::size_t intent,
                               std::size_t query, double reward);

/// Reward at or above the threshold pins the row on the chosen query;
/// anything below resets the row to uniform.
void update_win_stay_lose_randomize(UserLearnerState& state, std::size_t intent,
                                    std::size_t query, double reward);

/// U_ij* = reward, remaining mass spread evenly over the other queries.
/// A single-query row stays [1] regardless of the reward.
void update_latest_reward(UserLearnerState& state, std::size_t intent,
                          std::size_t query, double reward);

/// Dispatch on state.model.
void apply_update(UserLearnerState& state, std::size_t intent, std::size_t query,
                  double reward);

}  // namespace digame

#endif  // DIGAME_USER_LEARNING_HPP
