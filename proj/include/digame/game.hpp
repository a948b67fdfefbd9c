#ifndef DIGAME_GAME_HPP
#define DIGAME_GAME_HPP

#include <optional>
#include <string>
#include <vector>

#include "digame/matrix.hpp"

namespace digame {

/// Absolute tolerance for stochasticity checks and payoff identities.
inline constexpr double kStochasticTol = 1e-9;
/// Tolerance for equilibrium payoff comparisons.
inline constexpr double kNashTol = 1e-9;
/// Entries below this are treated as outside a strategy's support.
inline constexpr double kSupportTol = 1e-12;

/// Row-stochastic matrix: user strategies are m×n (intent -> query), system
/// strategies n×o (query -> interpreted result). Construction validates that
/// every entry lies in [0,1] and every row sums to one.
class StrategyMatrix {
 public:
  StrategyMatrix() = default;
  explicit StrategyMatrix(Matrix entries);

  /// All rows 1/cols.
  static StrategyMatrix uniform(std::size_t rows, std::size_t cols);
  /// Row r puts probability one on assignment[r].
  static StrategyMatrix pure(std::size_t rows, std::size_t cols,
                             const std::vector<std::size_t>& assignment);

  std::size_t rows() const { return m_.rows(); }
  std::size_t cols() const { return m_.cols(); }
  double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
  std::span<const double> row(std::size_t r) const { return m_.row(r); }
  const Matrix& matrix() const { return m_; }

  bool is_pure(double tol = kSupportTol) const;

  bool operator==(const StrategyMatrix&) const = default;

 private:
  Matrix m_;
};

/// Reward values r(e_i, s_l), one row per intent, one column per result.
/// Entries must be nonnegative; values above one require
/// `allow_unnormalized`, which exists to reproduce worked examples whose
/// rewards exceed the usual [0,1] effectiveness range.
class EffectivenessMatrix {
 public:
  EffectivenessMatrix() = default;
  explicit EffectivenessMatrix(Matrix entries, bool allow_unnormalized = false);

  static EffectivenessMatrix identity(std::size_t n);

  std::size_t intents() const { return m_.rows(); }
  std::size_t results() const { return m_.cols(); }
  double operator()(std::size_t i, std::size_t l) const { return m_(i, l); }
  const Matrix& matrix() const { return m_; }
  bool unnormalized() const { return unnormalized_; }

  bool is_identity(double tol = kStochasticTol) const;

 private:
  Matrix m_;
  bool unnormalized_ = false;
};

/// How the intent weights enter the payoff: `kDistribution` demands a proper
/// probability vector; `kUnit` accepts arbitrary nonnegative weights (the
/// convention some worked examples use, with every weight set to one).
enum class WeightMode { kDistribution, kUnit };

/// Weights over intents. Validated as a distribution (sums to one) unless the
/// mode is kUnit.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  explicit ProbabilityVector(std::vector<double> w,
                             WeightMode mode = WeightMode::kDistribution);

  static ProbabilityVector uniform(std::size_t n);
  static ProbabilityVector unit(std::size_t n);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const { return w_; }
  WeightMode mode() const { return mode_; }
  double total() const;

 private:
  std::vector<double> w_;
  WeightMode mode_ = WeightMode::kDistribution;
};

struct GameLabels {
  std::vector<std::string> intents;
  std::vector<std::string> queries;
  std::vector<std::string> results;
};

/// A full game: dimensions, intent weights, effectiveness matrix and the
/// initial strategy pair.
struct GameConfig {
  std::size_t m = 0;  // intents
  std::size_t n = 0;  // queries
  std::size_t o = 0;  // interpreted results
  ProbabilityVector prior;
  EffectivenessMatrix effectiveness;
  StrategyMatrix initial_user;
  StrategyMatrix initial_dbms;
  std::optional<GameLabels> labels;
  bool allow_unnormalized_rewards = false;
  /// Optional strictly positive reward-matrix seeds for the learners; when
  /// absent, simulations start from all-ones matrices (scaled initial
  /// strategies).
  std::optional<Matrix> initial_user_rewards;
  std::optional<Matrix> initial_dbms_rewards;

  /// Throws std::invalid_argument when shapes or invariants are off.
  void validate() const;
};

/// Expected payoff of the profile (U, D):
///   sum_i pi_i sum_j U_ij sum_l D_jl r_il.
double expected_payoff(const StrategyMatrix& user, const StrategyMatrix& dbms,
                       const ProbabilityVector& prior,
                       const EffectivenessMatrix& r);

/// Contribution of query j to the expected payoff; these terms sum to
/// expected_payoff over all queries.
double per_query_efficiency(const StrategyMatrix& user,
                            const StrategyMatrix& dbms,
                            const ProbabilityVector& prior,
                            const EffectivenessMatrix& r, std::size_t j);

/// sum_j U_ij D_ji, the chance intent i is decoded back to itself. Only
/// defined in the identity-reward regime (m == o).
double per_intent_efficiency(const StrategyMatrix& user,
                             const StrategyMatrix& dbms, std::size_t i);

}  // namespace digame

#endif  // DIGAME_GAME_HPP
