#include "digame/user_learning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace digame {

UserModel user_model_from_string(const std::string& name) {
  if (name == "bush-mosteller") return UserModel::kBushMosteller;
  if (name == "cross") return UserModel::kCross;
  if (name == "roth-erev") return UserModel::kRothErev;
  if (name == "roth-erev-modified") return UserModel::kRothErevModified;
  if (name == "win-stay-lose-randomize") return UserModel::kWinStayLoseRandomize;
  if (name == "latest-reward") return UserModel::kLatestReward;
  throw std::invalid_argument("unknown user model: " + name);
}

void ModelParams::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(alpha_bm) || !in_unit(beta_bm) || !in_unit(alpha_c) ||
      !in_unit(beta_c) || !in_unit(sigma) || !in_unit(epsilon) || !in_unit(r_min) ||
      !in_unit(wslr_threshold))
    throw std::invalid_argument("model parameter outside [0,1]");
}

UserLearnerState UserLearnerState::make(UserModel model, std::size_t intents,
                                        std::size_t queries, ModelParams params) {
  if (intents == 0 || queries == 0)
    throw std::invalid_argument("UserLearnerState: empty shape");
  params.validate();
  UserLearnerState st;
  st.model = model;
  st.params = params;
  st.U = Matrix(intents, queries, 1.0 / static_cast<double>(queries));
  if (st.uses_reward_matrix()) st.S = Matrix(intents, queries, 1.0);
  return st;
}

UserLearnerState UserLearnerState::from_strategy(UserModel model,
                                                 const StrategyMatrix& u,
                                                 ModelParams params) {
  params.validate();
  UserLearnerState st;
  st.model = model;
  st.params = params;
  st.U = u.matrix();
  if (st.uses_reward_matrix()) {
    // Seed S so that its row normalization reproduces u; requires strictly
    // positive rows, mirroring S(0) > 0.
    st.S = Matrix(u.rows(), u.cols());
    for (std::size_t i = 0; i < u.rows(); ++i)
      for (std::size_t j = 0; j < u.cols(); ++j) {
        double w = u(i, j) * static_cast<double>(u.cols());
        if (w <= 0.0)
          throw std::invalid_argument(
              "Roth-Erev initial strategy must be strictly positive");
        st.S(i, j) = w;
      }
  }
  return st;
}

UserLearnerState UserLearnerState::from_rewards(UserModel model, Matrix s,
                                                ModelParams params) {
  params.validate();
  UserLearnerState st;
  st.model = model;
  st.params = params;
  if (!st.uses_reward_matrix())
    throw std::invalid_argument("from_rewards: model keeps no reward matrix");
  for (double v : s.data())
    if (!(v > 0.0)) throw std::invalid_argument("S(0) must be strictly positive");
  st.S = std::move(s);
  st.U = Matrix(st.S.rows(), st.S.cols());
  for (std::size_t i = 0; i < st.S.rows(); ++i) {
    double total = st.S.row_sum(i);
    for (std::size_t j = 0; j < st.S.cols(); ++j) st.U(i, j) = st.S(i, j) / total;
  }
  return st;
}

void UserLearnerState::ensure_intent(std::size_t i) {
  if (i < U.rows()) return;
  Matrix u2(i + 1, U.cols());
  for (std::size_t r = 0; r < U.rows(); ++r)
    for (std::size_t c = 0; c < U.cols(); ++c) u2(r, c) = U(r, c);
  for (std::size_t r = U.rows(); r <= i; ++r)
    for (std::size_t c = 0; c < U.cols(); ++c)
      u2(r, c) = 1.0 / static_cast<double>(U.cols());
  U = std::move(u2);
  if (uses_reward_matrix()) {
    Matrix s2(i + 1, S.cols(), 1.0);
    for (std::size_t r = 0; r < S.rows(); ++r)
      for (std::size_t c = 0; c < S.cols(); ++c) s2(r, c) = S(r, c);
    S = std::move(s2);
  }
}

void UserLearnerState::ensure_query(std::size_t j) {
  if (j < U.cols()) return;
  std::size_t old_cols = U.cols();
  std::size_t new_cols = j + 1;
  if (uses_reward_matrix()) {
    Matrix s2(S.rows(), new_cols, 1.0);  // fresh columns carry the S(0) = 1 seed
    for (std::size_t r = 0; r < S.rows(); ++r)
      for (std::size_t c = 0; c < old_cols; ++c) s2(r, c) = S(r, c);
    S = std::move(s2);
    U = Matrix(S.rows(), new_cols);
    for (std::size_t r = 0; r < S.rows(); ++r) {
      double total = S.row_sum(r);
      for (std::size_t c = 0; c < new_cols; ++c) U(r, c) = S(r, c) / total;
    }
  } else {
    Matrix u2(U.rows(), new_cols);
    double keep = static_cast<double>(old_cols) / static_cast<double>(new_cols);
    double fresh =
        (1.0 - keep) / static_cast<double>(new_cols - old_cols);
    for (std::size_t r = 0; r < U.rows(); ++r) {
      for (std::size_t c = 0; c < old_cols; ++c) u2(r, c) = U(r, c) * keep;
      for (std::size_t c = old_cols; c < new_cols; ++c) u2(r, c) = fresh;
    }
    U = std::move(u2);
  }
}

namespace {

void check_indices(const UserLearnerState& st, std::size_t i, std::size_t j) {
  if (i >= st.U.rows()) throw std::out_of_range("intent index out of range");
  if (j >= st.U.cols()) throw std::out_of_range("query index out of range");
}

void renormalize_from_rewards(UserLearnerState& st, std::size_t i) {
  double total = st.S.row_sum(i);
  for (std::size_t j = 0; j < st.S.cols(); ++j) st.U(i, j) = st.S(i, j) / total;
}

}  // namespace

void update_bush_mosteller(UserLearnerState& st, std::size_t intent,
                           std::size_t query, double reward) {
  check_indices(st, intent, query);
  auto row = st.U.row(intent);
  if (reward > 0.0) {
    double a = st.params.alpha_bm;
    for (std::size_t j = 0; j < row.size(); ++j)
      row[j] = (j == query) ? row[j] + a * (1.0 - row[j]) : row[j] - a * row[j];
  } else if (reward < 0.0) {
    // Penalty branch, kept stochastic by spreading the freed mass evenly.
    if (row.size() < 2) return;
    double freed = st.params.beta_bm * row[query];
    row[query] -= freed;
    double share = freed / static_cast<double>(row.size() - 1);
    for (std::size_t j = 0; j < row.size(); ++j)
      if (j != query) row[j] += share;
  }
  // reward == 0: nothing to reinforce
}

void update_cross(UserLearnerState& st, std::size_t intent, std::size_t query,
                  double reward) {
  check_indices(st, intent, query);
  double adj = std::clamp(st.params.alpha_c * reward + st.params.beta_c, 0.0, 1.0);
  auto row = st.U.row(intent);
  for (std::size_t j = 0; j < row.size(); ++j)
    row[j] = (j == query) ? row[j] + adj * (1.0 - row[j]) : row[j] - adj * row[j];
}

void update_roth_erev(UserLearnerState& st, std::size_t intent, std::size_t query,
                      double reward) {
  check_indices(st, intent, query);
  if (reward < 0.0) throw std::invalid_argument("roth-erev: negative reward");
  if (reward == 0.0) return;
  st.S(intent, query) += reward;
  renormalize_from_rewards(st, intent);
}

void update_roth_erev_modified(UserLearnerState& st, std::size_t intent,
                               std::size_t query, double reward) {
  check_indices(st, intent, query);
  if (reward < st.params.r_min)
    throw std::invalid_argument("roth-erev-modified: reward below r_min");
  double adj = reward - st.params.r_min;
  std::size_t n = st.S.cols();
  double off = st.params.spread_epsilon && n > 1
                   ? adj * st.params.epsilon / static_cast<double>(n - 1)
                   : adj * st.params.epsilon;
  double keep = 1.0 - st.params.sigma;

  double total = 0.0;
  auto srow = st.S.row(intent);
  std::vector<double> next(n);
  for (std::size_t j = 0; j < n; ++j) {
    next[j] = keep * srow[j] + (j == query ? adj * (1.0 - st.params.epsilon) : off);
    total += next[j];
  }
  if (total <= kSupportTol) return;  // sigma = 1 with zero adjusted reward
  for (std::size_t j = 0; j < n; ++j) srow[j] = next[j];
  renormalize_from_rewards(st, intent);
}

void update_win_stay_lose_randomize(UserLearnerState& st, std::size_t intent,
                                    std::size_t query, double reward) {
  check_indices(st, intent, query);
  auto row = st.U.row(intent);
  if (reward >= st.params.wslr_threshold) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (j == query) ? 1.0 : 0.0;
  } else {
    double p = 1.0 / static_cast<double>(row.size());
    for (double& v : row) v = p;
  }
}

void update_latest_reward(UserLearnerState& st, std::size_t intent,
                          std::size_t query, double reward) {
  check_indices(st, intent, query);
  if (reward < 0.0 || reward > 1.0)
    throw std::invalid_argument("latest-reward: reward outside [0,1]");
  auto row = st.U.row(intent);
  if (row.size() == 1) {
    row[0] = 1.0;
    return;
  }
  double rest = (1.0 - reward) / static_cast<double>(row.size() - 1);
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = (j == query) ? reward : rest;
}

void apply_update(UserLearnerState& st, std::size_t intent, std::size_t query,
                  double reward) {
  switch (st.model) {
    case UserModel::kBushMosteller:
      update_bush_mosteller(st, intent, query, reward);
      break;
    case UserModel::kCross:
      update_cross(st, intent, query, reward);
      break;
    case UserModel::kRothErev:
      update_roth_erev(st, intent, query, reward);
      break;
    case UserModel::kRothErevModified:
      update_roth_erev_modified(st, intent, query, reward);
      break;
    case UserModel::kWinStayLoseRandomize:
      update_win_stay_lose_randomize(st, intent, query, reward);
      break;
    case UserModel::kLatestReward:
      update_latest_reward(st, intent, query, reward);
      break;
  }
}

}  // namespace digame
