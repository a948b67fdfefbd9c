#include "digame/game.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace digame {

namespace {

void check_entry_range(const Matrix& m, const char* what) {
  for (double v : m.data()) {
    if (!(v >= 0.0) || !(v <= 1.0))
      throw std::invalid_argument(std::string(what) + ": entry outside [0,1]");
  }
}

}  // namespace

StrategyMatrix::StrategyMatrix(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() == 0 || m_.cols() == 0)
    throw std::invalid_argument("StrategyMatrix: empty shape");
  check_entry_range(m_, "StrategyMatrix");
  for (std::size_t r = 0; r < m_.rows(); ++r) {
    if (std::abs(m_.row_sum(r) - 1.0) > kStochasticTol)
      throw std::invalid_argument("StrategyMatrix: row " + std::to_string(r) +
                                  " does not sum to 1");
  }
}

StrategyMatrix StrategyMatrix::uniform(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0)
    throw std::invalid_argument("StrategyMatrix::uniform: empty shape");
  return StrategyMatrix(Matrix(rows, cols, 1.0 / static_cast<double>(cols)));
}

StrategyMatrix StrategyMatrix::pure(std::size_t rows, std::size_t cols,
                                    const std::vector<std::size_t>& assignment) {
  if (assignment.size() != rows)
    throw std::invalid_argument("StrategyMatrix::pure: assignment size");
  Matrix m(rows, cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    if (assignment[r] >= cols)
      throw std::out_of_range("StrategyMatrix::pure: assignment out of range");
    m(r, assignment[r]) = 1.0;
  }
  return StrategyMatrix(std::move(m));
}

bool StrategyMatrix::is_pure(double tol) const {
  for (double v : m_.data()) {
    if (v > tol && std::abs(v - 1.0) > tol) return false;
  }
  return true;
}

EffectivenessMatrix::EffectivenessMatrix(Matrix entries, bool allow_unnormalized)
    : m_(std::move(entries)), unnormalized_(allow_unnormalized) {
  if (m_.rows() == 0 || m_.cols() == 0)
    throw std::invalid_argument("EffectivenessMatrix: empty shape");
  for (double v : m_.data()) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("EffectivenessMatrix: negative or non-finite entry");
    if (!allow_unnormalized && v > 1.0)
      throw std::invalid_argument(
          "EffectivenessMatrix: entry above 1 without allow_unnormalized_rewards");
  }
}

EffectivenessMatrix EffectivenessMatrix::identity(std::size_t n) {
  return EffectivenessMatrix(Matrix::identity(n));
}

bool EffectivenessMatrix::is_identity(double tol) const {
  if (m_.rows() != m_.cols()) return false;
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t l = 0; l < m_.cols(); ++l)
      if (std::abs(m_(i, l) - (i == l ? 1.0 : 0.0)) > tol) return false;
  return true;
}

ProbabilityVector::ProbabilityVector(std::vector<double> w, WeightMode mode)
    : w_(std::move(w)), mode_(mode) {
  if (w_.empty()) throw std::invalid_argument("ProbabilityVector: empty");
  double sum = 0.0;
  for (double v : w_) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("ProbabilityVector: negative or non-finite weight");
    sum += v;
  }
  if (mode_ == WeightMode::kDistribution && std::abs(sum - 1.0) > kStochasticTol)
    throw std::invalid_argument("ProbabilityVector: weights do not sum to 1");
  if (sum <= 0.0) throw std::invalid_argument("ProbabilityVector: all-zero weights");
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("ProbabilityVector::uniform: n = 0");
  return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbabilityVector ProbabilityVector::unit(std::size_t n) {
  if (n == 0) throw std::invalid_argument("ProbabilityVector::unit: n = 0");
  return ProbabilityVector(std::vector<double>(n, 1.0), WeightMode::kUnit);
}

double ProbabilityVector::total() const {
  double s = 0.0;
  for (double v : w_) s += v;
  return s;
}

void GameConfig::validate() const {
  if (m < 1 || n < 1 || o < 1)
    throw std::invalid_argument("GameConfig: m, n, o must all be >= 1");
  if (prior.size() != m) throw std::invalid_argument("GameConfig: prior length != m");
  if (effectiveness.intents() != m || effectiveness.results() != o)
    throw std::invalid_argument("GameConfig: effectiveness shape != m x o");
  if (initial_user.rows() != m || initial_user.cols() != n)
    throw std::invalid_argument("GameConfig: user strategy shape != m x n");
  if (initial_dbms.rows() != n || initial_dbms.cols() != o)
    throw std::invalid_argument("GameConfig: dbms strategy shape != n x o");
  if (labels) {
    if (!labels->intents.empty() && labels->intents.size() != m)
      throw std::invalid_argument("GameConfig: intent label count");
    if (!labels->queries.empty() && labels->queries.size() != n)
      throw std::invalid_argument("GameConfig: query label count");
    if (!labels->results.empty() && labels->results.size() != o)
      throw std::invalid_argument("GameConfig: result label count");
  }
  auto check_rewards = [](const std::optional<Matrix>& r, std::size_t rows,
                          std::size_t cols, const char* what) {
    if (!r) return;
    if (r->rows() != rows || r->cols() != cols)
      throw std::invalid_argument(std::string("GameConfig: ") + what + " shape");
    for (double v : r->data())
      if (!(v > 0.0))
        throw std::invalid_argument(std::string("GameConfig: ") + what +
                                    " must be strictly positive");
  };
  check_rewards(initial_user_rewards, m, n, "user_rewards");
  check_rewards(initial_dbms_rewards, n, o, "dbms_rewards");
}

namespace {

void check_shapes(const StrategyMatrix& user, const StrategyMatrix& dbms,
                  const ProbabilityVector& prior, const EffectivenessMatrix& r) {
  if (prior.size() != user.rows())
    throw std::invalid_argument("expected_payoff: prior length != user rows");
  if (user.cols() != dbms.rows())
    throw std::invalid_argument("expected_payoff: user cols != dbms rows");
  if (r.intents() != user.rows() || r.results() != dbms.cols())
    throw std::invalid_argument("expected_payoff: effectiveness shape mismatch");
}

}  // namespace

double expected_payoff(const StrategyMatrix& user, const StrategyMatrix& dbms,
                       const ProbabilityVector& prior,
                       const EffectivenessMatrix& r) {
  check_shapes(user, dbms, prior, r);
  double total = 0.0;
  for (std::size_t j = 0; j < user.cols(); ++j)
    total += per_query_efficiency(user, dbms, prior, r, j);
  return total;
}

double per_query_efficiency(const StrategyMatrix& user, const StrategyMatrix& dbms,
                            const ProbabilityVector& prior,
                            const EffectivenessMatrix& r, std::size_t j) {
  check_shapes(user, dbms, prior, r);
  if (j >= user.cols())
    throw std::out_of_range("per_query_efficiency: query index out of range");
  double total = 0.0;
  for (std::size_t i = 0; i < user.rows(); ++i) {
    double w = prior[i] * user(i, j);
    if (w == 0.0) continue;
    double inner = 0.0;
    for (std::size_t l = 0; l < dbms.cols(); ++l) inner += dbms(j, l) * r(i, l);
    total += w * inner;
  }
  return total;
}

double per_intent_efficiency(const StrategyMatrix& user, const StrategyMatrix& dbms,
                             std::size_t i) {
  if (user.cols() != dbms.rows())
    throw std::invalid_argument("per_intent_efficiency: user cols != dbms rows");
  if (user.rows() != dbms.cols())
    throw std::domain_error(
        "per_intent_efficiency: requires m == o (identity-reward regime)");
  if (i >= user.rows())
    throw std::out_of_range("per_intent_efficiency: intent index out of range");
  double total = 0.0;
  for (std::size_t j = 0; j < user.cols(); ++j) total += user(i, j) * dbms(j, i);
  return total;
}

}  // namespace digame
