#include "digame/dbms_learning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace digame {

namespace {

// Payoff on raw matrices; same summation order as expected_payoff but without
// re-validating the strategies every round.
double payoff_raw(const Matrix& user, const Matrix& dbms,
                  const ProbabilityVector& prior, const EffectivenessMatrix& r) {
  double total = 0.0;
  for (std::size_t j = 0; j < user.cols(); ++j) {
    for (std::size_t i = 0; i < user.rows(); ++i) {
      double w = prior[i] * user(i, j);
      if (w == 0.0) continue;
      double inner = 0.0;
      for (std::size_t l = 0; l < dbms.cols(); ++l) inner += dbms(j, l) * r(i, l);
      total += w * inner;
    }
  }
  return total;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < len; ++k) {
    h ^= p[k];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_matrix(std::uint64_t h, const Matrix& m) {
  h = fnv1a(h, m.data().data(), m.data().size() * sizeof(double));
  return h;
}

InteractionEvent dbms_step_raw(DbmsLearnerState& dbms, const Matrix& user,
                               const ProbabilityVector& prior,
                               const EffectivenessMatrix& r, Rng& rng, std::size_t t,
                               RewardMode mode) {
  std::size_t intent = rng.sample(prior.values(), prior.total());
  std::size_t query = rng.sample(user.row(intent), 1.0);
  std::size_t result = rng.sample(dbms.D.row(query), 1.0);

  InteractionEvent ev;
  ev.t = t;
  ev.intent = intent;
  ev.query = query;
  ev.result = result;
  if (mode == RewardMode::kBinary) {
    ev.reward = 1.0;
    dbms.reinforce(query, intent, 1.0);
  } else {
    ev.reward = r(intent, result);
    dbms.reinforce(query, result, ev.reward);
  }
  ev.payoff = payoff_raw(user, dbms.D, prior, r);
  return ev;
}

}  // namespace

DbmsLearnerState DbmsLearnerState::make(std::size_t queries, std::size_t results) {
  return from_rewards(Matrix(queries, results, 1.0));
}

DbmsLearnerState DbmsLearnerState::from_rewards(Matrix rewards) {
  if (rewards.rows() == 0 || rewards.cols() == 0)
    throw std::invalid_argument("DbmsLearnerState: empty shape");
  for (double v : rewards.data())
    if (!(v > 0.0)) throw std::invalid_argument("R(0) must be strictly positive");
  DbmsLearnerState st;
  st.R = std::move(rewards);
  st.D = Matrix(st.R.rows(), st.R.cols());
  for (std::size_t j = 0; j < st.R.rows(); ++j) {
    double total = st.R.row_sum(j);
    for (std::size_t l = 0; l < st.R.cols(); ++l) st.D(j, l) = st.R(j, l) / total;
  }
  return st;
}

void DbmsLearnerState::reinforce(std::size_t j, std::size_t l, double reward) {
  if (j >= R.rows() || l >= R.cols())
    throw std::out_of_range("reinforce: index out of range");
  if (reward < 0.0) throw std::invalid_argument("reinforce: negative reward");
  if (reward == 0.0) return;
  R(j, l) += reward;
  double total = R.row_sum(j);
  for (std::size_t k = 0; k < R.cols(); ++k) D(j, k) = R(j, k) / total;
}

SimulationSchedule SimulationSchedule::every(std::size_t total_rounds,
                                             std::size_t period) {
  SimulationSchedule s;
  s.total_rounds = total_rounds;
  if (period > 0)
    for (std::size_t t = period; t <= total_rounds; t += period)
      s.user_update_times.push_back(t);
  return s;
}

void SimulationSchedule::validate() const {
  std::size_t prev = 0;
  for (std::size_t t : user_update_times) {
    if (t < 1 || t > total_rounds)
      throw std::invalid_argument("schedule: user update time outside [1, total]");
    if (t <= prev)
      throw std::invalid_argument("schedule: user update times must increase");
    prev = t;
  }
}

InteractionEvent dbms_step(DbmsLearnerState& dbms, const StrategyMatrix& user,
                           const ProbabilityVector& prior,
                           const EffectivenessMatrix& r, Rng& rng, std::size_t t,
                           RewardMode mode) {
  if (user.cols() != dbms.queries() || r.intents() != user.rows() ||
      r.results() != dbms.results() || prior.size() != user.rows())
    throw std::invalid_argument("dbms_step: shape mismatch");
  if (mode == RewardMode::kBinary && user.rows() != dbms.results())
    throw std::domain_error("binary reward mode requires m == o");
  return dbms_step_raw(dbms, user.matrix(), prior, r, rng, t, mode);
}

double dbms_one_step_expectation(const DbmsLearnerState& dbms,
                                 const StrategyMatrix& user,
                                 const ProbabilityVector& prior,
                                 const EffectivenessMatrix& r, std::size_t j,
                                 std::size_t l) {
  if (j >= dbms.queries() || l >= dbms.results())
    throw std::out_of_range("dbms_one_step_expectation: index out of range");
  if (user.cols() != dbms.queries() || r.intents() != user.rows() ||
      r.results() != dbms.results() || prior.size() != user.rows())
    throw std::invalid_argument("dbms_one_step_expectation: shape mismatch");

  double r_bar = dbms.R.row_sum(j);
  double drift = 0.0;
  for (std::size_t i = 0; i < user.rows(); ++i) {
    double w = prior[i] * user(i, j);
    if (w == 0.0) continue;
    double inner = r(i, l) / (r_bar + r(i, l));
    for (std::size_t lp = 0; lp < dbms.results(); ++lp)
      inner -= dbms.D(j, lp) * r(i, lp) / (r_bar + r(i, lp));
    drift += w * inner;
  }
  return dbms.D(j, l) * drift;
}

InteractionEvent user_adaptation_step(UserLearnerState& user, const Matrix& dbms_d,
                                      const ProbabilityVector& prior,
                                      const EffectivenessMatrix& r, Rng& rng,
                                      std::size_t t) {
  if (user.queries() != dbms_d.rows() || r.intents() != user.intents() ||
      r.results() != dbms_d.cols() || prior.size() != user.intents())
    throw std::invalid_argument("user_adaptation_step: shape mismatch");

  std::size_t intent = rng.sample(prior.values(), prior.total());
  std::size_t query = rng.sample(user.U.row(intent), 1.0);
  std::size_t decoded = rng.sample(dbms_d.row(query), 1.0);

  InteractionEvent ev;
  ev.t = t;
  ev.intent = intent;
  ev.query = query;
  ev.result = decoded;
  ev.reward = r(intent, decoded);
  apply_update(user, intent, query, ev.reward);
  ev.payoff = payoff_raw(user.U, dbms_d, prior, r);
  return ev;
}

TrajectorySet run_simulation(const GameConfig& game, const SimulationSchedule& schedule,
                             const SimulationOptions& options) {
  game.validate();
  schedule.validate();
  const bool user_adapts = !schedule.user_update_times.empty();
  if (user_adapts && !options.free_composition) {
    if (options.user_model != UserModel::kRothErev)
      throw std::domain_error(
          "scheduled user updates require the Roth-Erev model "
          "(pass free_composition to override)");
    if (game.m != game.o || !game.effectiveness.is_identity())
      throw std::domain_error(
          "scheduled user updates require identity rewards with m == o "
          "(pass free_composition to override)");
  }
  if (options.reward_mode == RewardMode::kBinary && game.m != game.o)
    throw std::domain_error("binary reward mode requires m == o");
  if (options.seeds == 0) throw std::invalid_argument("need at least one seed");

  TrajectorySet out;
  out.schedule = schedule;
  out.master_seed = options.master_seed;
  out.payoffs.resize(options.seeds);
  out.final_user.resize(options.seeds);
  out.final_dbms.resize(options.seeds);
  out.final_user_rewards.resize(options.seeds);
  out.final_dbms_rewards.resize(options.seeds);

  {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix_u64 = [&](std::uint64_t v) { h = fnv1a(h, &v, sizeof v); };
    mix_u64(game.m);
    mix_u64(game.n);
    mix_u64(game.o);
    h = fnv1a(h, game.prior.values().data(), game.prior.size() * sizeof(double));
    h = hash_matrix(h, game.effectiveness.matrix());
    h = hash_matrix(h, game.initial_user.matrix());
    h = hash_matrix(h, game.initial_dbms.matrix());
    if (game.initial_user_rewards) h = hash_matrix(h, *game.initial_user_rewards);
    if (game.initial_dbms_rewards) h = hash_matrix(h, *game.initial_dbms_rewards);
    mix_u64(static_cast<std::uint64_t>(options.user_model));
    const double param_fields[] = {
        options.params.alpha_bm, options.params.beta_bm,  options.params.alpha_c,
        options.params.beta_c,   options.params.sigma,    options.params.epsilon,
        options.params.r_min,    options.params.wslr_threshold,
        options.params.spread_epsilon ? 1.0 : 0.0};
    h = fnv1a(h, param_fields, sizeof param_fields);
    mix_u64(static_cast<std::uint64_t>(options.reward_mode));
    mix_u64(schedule.total_rounds);
    for (std::size_t t : schedule.user_update_times) mix_u64(t);
    mix_u64(options.master_seed);
    mix_u64(options.seeds);
    std::ostringstream hex;
    hex << std::hex << h;
    out.fingerprint = hex.str();
  }

  auto make_dbms = [&]() {
    if (game.initial_dbms_rewards)
      return DbmsLearnerState::from_rewards(*game.initial_dbms_rewards);
    Matrix r0(game.n, game.o);
    for (std::size_t j = 0; j < game.n; ++j)
      for (std::size_t l = 0; l < game.o; ++l) {
        double v = game.initial_dbms(j, l) * static_cast<double>(game.o);
        if (!(v > 0.0))
          throw std::invalid_argument(
              "simulation needs a strictly positive initial dbms strategy "
              "(or explicit dbms_rewards)");
        r0(j, l) = v;
      }
    return DbmsLearnerState::from_rewards(std::move(r0));
  };

  auto run_one = [&](std::size_t seed_idx) {
    Rng rng = Rng::stream(options.master_seed, seed_idx);
    DbmsLearnerState dbms = make_dbms();

    UserLearnerState user_state;
    Matrix fixed_user = game.initial_user.matrix();
    if (user_adapts) {
      if (game.initial_user_rewards)
        user_state = UserLearnerState::from_rewards(
            options.user_model, *game.initial_user_rewards, options.params);
      else
        user_state = UserLearnerState::from_strategy(
            options.user_model, game.initial_user, options.params);
    }
    const Matrix& user_now = user_adapts ? user_state.U : fixed_user;

    auto& traj = out.payoffs[seed_idx];
    traj.reserve(schedule.total_rounds + 1);
    traj.push_back(payoff_raw(user_now, dbms.D, game.prior, game.effectiveness));

    std::size_t next_user = 0;
    const auto& times = schedule.user_update_times;
    for (std::size_t t = 1; t <= schedule.total_rounds; ++t) {
      if (next_user < times.size() && times[next_user] == t) {
        ++next_user;
        user_adaptation_step(user_state, dbms.D, game.prior, game.effectiveness,
                             rng, t);
      } else {
        dbms_step_raw(dbms, user_now, game.prior, game.effectiveness, rng, t,
                      options.reward_mode);
      }
      traj.push_back(payoff_raw(user_now, dbms.D, game.prior, game.effectiveness));
    }

    out.final_user[seed_idx] = user_now;
    out.final_dbms[seed_idx] = dbms.D;
    out.final_dbms_rewards[seed_idx] = dbms.R;
    if (user_adapts && user_state.uses_reward_matrix())
      out.final_user_rewards[seed_idx] = user_state.S;
  };

  unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1 || options.seeds == 1) {
    for (std::size_t s = 0; s < options.seeds; ++s) run_one(s);
  } else {
    std::vector<std::thread> pool;
    std::size_t per = (options.seeds + jobs - 1) / jobs;
    for (unsigned w = 0; w < jobs; ++w) {
      std::size_t lo = w * per;
      std::size_t hi = std::min<std::size_t>(options.seeds, lo + per);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t s = lo; s < hi; ++s) run_one(s);
      });
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace digame
