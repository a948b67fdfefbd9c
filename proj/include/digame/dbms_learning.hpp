#ifndef DIGAME_DBMS_LEARNING_HPP
#define DIGAME_DBMS_LEARNING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "digame/game.hpp"
#include "digame/rng.hpp"
#include "digame/user_learning.hpp"

namespace digame {

/// System-side reinforcement state: a strictly positive reward matrix R and
/// the strategy D, kept exactly equal to R's row normalization.
struct DbmsLearnerState {
  Matrix R;  // n x o, entries > 0
  Matrix D;  // row normalization of R

  static DbmsLearnerState make(std::size_t queries, std::size_t results);
  static DbmsLearnerState from_rewards(Matrix rewards);

  std::size_t queries() const { return R.rows(); }
  std::size_t results() const { return R.cols(); }

  StrategyMatrix strategy() const { return StrategyMatrix(D); }

  /// Adds `reward` to R_jl and renormalizes row j of D.
  void reinforce(std::size_t j, std::size_t l, double reward);
};

/// One interaction: intent drawn by nature, query chosen, result shown,
/// reward granted, expected payoff after the round's update.
struct InteractionEvent {
  std::size_t t = 0;
  std::size_t intent = 0;
  std::size_t query = 0;
  std::size_t result = 0;
  double reward = 0.0;
  double payoff = 0.0;
};

/// How the system's reinforcement is fed: the effectiveness value r_il of the
/// shown result, or a flat +1 credited to the user's actual intent (the
/// click-style variant; needs m == o).
enum class RewardMode { kEffectiveness, kBinary };

/// Rounds at which the user, not the system, adapts. Empty times = fixed
/// user.
struct SimulationSchedule {
  std::size_t total_rounds = 0;
  std::vector<std::size_t> user_update_times;  // strictly increasing, in [1, total]

  static SimulationSchedule fixed_user(std::size_t total_rounds) {
    return {total_rounds, {}};
  }
  /// User adapts every `period` rounds (t = period, 2*period, ...).
  static SimulationSchedule every(std::size_t total_rounds, std::size_t period);

  void validate() const;
};

/// One round of the system's reinforcement rule: samples intent ~ prior,
/// query ~ U, result ~ D, reinforces R at (query, result) and returns the
/// event with the post-update expected payoff.
InteractionEvent dbms_step(DbmsLearnerState& dbms, const StrategyMatrix& user,
                           const ProbabilityVector& prior,
                           const EffectivenessMatrix& r, Rng& rng,
                           std::size_t t = 0,
                           RewardMode mode = RewardMode::kEffectiveness);

/// Closed-form one-step drift E(D+_jl | F_t) - D_jl of the rule above:
///   D_jl * sum_i pi_i U_ij ( r_il / (Rbar_j + r_il)
///                            - sum_l' D_jl' r_il' / (Rbar_j + r_il') ).
/// Serves as the oracle for Monte Carlo averages of dbms_step.
double dbms_one_step_expectation(const DbmsLearnerState& dbms,
                                 const StrategyMatrix& user,
                                 const ProbabilityVector& prior,
                                 const EffectivenessMatrix& r, std::size_t j,
                                 std::size_t l);

/// One user-adaptation round (system frozen): samples intent ~ prior,
/// query ~ U, decoded intent ~ D, rewards the user's (intent, query) cell
/// with r_{i,decoded} and applies the user's update rule. In the proven
/// regime that reward is the identity indicator (1 iff decoded == intent).
InteractionEvent user_adaptation_step(UserLearnerState& user, const Matrix& dbms_d,
                                      const ProbabilityVector& prior,
                                      const EffectivenessMatrix& r, Rng& rng,
                                      std::size_t t = 0);

struct SimulationOptions {
  UserModel user_model = UserModel::kRothErev;
  ModelParams params;
  RewardMode reward_mode = RewardMode::kEffectiveness;
  /// Allows any user model / reward matrix combination with scheduled user
  /// updates, outside the regime the convergence analysis covers.
  bool free_composition = false;
  std::size_t seeds = 1;
  std::uint64_t master_seed = 0;
  unsigned jobs = 1;
};

/// Payoff trajectories of a batch of seeded runs plus final learner states.
struct TrajectorySet {
  std::vector<std::vector<double>> payoffs;  // [seed][t], length rounds + 1
  std::vector<Matrix> final_user;
  std::vector<Matrix> final_dbms;
  std::vector<Matrix> final_user_rewards;  // empty matrix when not tracked
  std::vector<Matrix> final_dbms_rewards;
  SimulationSchedule schedule;
  std::uint64_t master_seed = 0;
  std::string fingerprint;
};

/// Plays `schedule.total_rounds` rounds per seed: the system adapts on
/// unscheduled rounds, the user on scheduled ones. u(t) is recorded exactly
/// (via expected_payoff) after every round, with u(0) first. Deterministic
/// given the master seed; seeds run on `jobs` threads.
TrajectorySet run_simulation(const GameConfig& game, const SimulationSchedule& schedule,
                             const SimulationOptions& options);

}  // namespace digame

#endif  // DIGAME_DBMS_LEARNING_HPP
