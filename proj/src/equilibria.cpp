#include "digame/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace digame {

namespace {

// c_ij = sum_l D_jl r_il: conditional payoff of intent i using query j.
Matrix conditional_payoffs(const StrategyMatrix& dbms, const EffectivenessMatrix& r) {
  Matrix c(r.intents(), dbms.rows(), 0.0);
  for (std::size_t i = 0; i < r.intents(); ++i)
    for (std::size_t j = 0; j < dbms.rows(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < dbms.cols(); ++l) s += dbms(j, l) * r(i, l);
      c(i, j) = s;
    }
  return c;
}

// v_jl = sum_i pi_i U_ij r_il: value of replying l to query j.
Matrix reply_values(const StrategyMatrix& user, const ProbabilityVector& prior,
                    const EffectivenessMatrix& r) {
  Matrix v(user.cols(), r.results(), 0.0);
  for (std::size_t j = 0; j < user.cols(); ++j)
    for (std::size_t l = 0; l < r.results(); ++l) {
      double s = 0.0;
      for (std::size_t i = 0; i < user.rows(); ++i)
        s += prior[i] * user(i, j) * r(i, l);
      v(j, l) = s;
    }
  return v;
}

double row_dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::size_t argmax(std::span<const double> xs) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (xs[k] > xs[best]) best = k;
  return best;
}

void check_profile(const StrategyProfile& p, const GameConfig& g) {
  if (p.user.rows() != g.m || p.user.cols() != g.n || p.dbms.rows() != g.n ||
      p.dbms.cols() != g.o)
    throw std::invalid_argument("profile shape does not match game");
}

bool user_is_onto(const StrategyMatrix& user) {
  for (std::size_t j = 0; j < user.cols(); ++j) {
    bool used = false;
    for (std::size_t i = 0; i < user.rows(); ++i)
      if (user(i, j) > kSupportTol) {
        used = true;
        break;
      }
    if (!used) return false;
  }
  return true;
}

bool dbms_is_one_to_one(const StrategyMatrix& dbms) {
  for (std::size_t l = 0; l < dbms.cols(); ++l) {
    std::size_t users = 0;
    for (std::size_t j = 0; j < dbms.rows(); ++j)
      if (dbms(j, l) > kSupportTol) ++users;
    if (users > 1) return false;
  }
  return true;
}

}  // namespace

double payoff_of_intent_with_query(const StrategyMatrix& dbms,
                                   const EffectivenessMatrix& r, std::size_t i,
                                   std::size_t j) {
  if (i >= r.intents()) throw std::out_of_range("intent index out of range");
  if (j >= dbms.rows()) throw std::out_of_range("query index out of range");
  if (dbms.cols() != r.results())
    throw std::invalid_argument("dbms cols != effectiveness results");
  double s = 0.0;
  for (std::size_t l = 0; l < dbms.cols(); ++l) s += dbms(j, l) * r(i, l);
  return s;
}

std::vector<std::size_t> intent_pool(const StrategyMatrix& user, std::size_t j) {
  if (j >= user.cols()) throw std::out_of_range("query index out of range");
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < user.rows(); ++i)
    if (user(i, j) > kSupportTol) pool.push_back(i);
  return pool;
}

std::vector<std::size_t> best_replies(const StrategyMatrix& user,
                                      const ProbabilityVector& prior,
                                      const EffectivenessMatrix& r, std::size_t j) {
  if (j >= user.cols()) throw std::out_of_range("query index out of range");
  if (prior.size() != user.rows())
    throw std::invalid_argument("prior length != user rows");
  std::vector<double> value(r.results(), 0.0);
  for (std::size_t l = 0; l < r.results(); ++l)
    for (std::size_t i = 0; i < user.rows(); ++i)
      value[l] += prior[i] * user(i, j) * r(i, l);
  double best = *std::max_element(value.begin(), value.end());
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < value.size(); ++l)
    if (value[l] >= best - kNashTol) out.push_back(l);
  return out;
}

BestResponseCheck is_best_response(const StrategyMatrix& user,
                                   const StrategyMatrix& dbms,
                                   const ProbabilityVector& prior,
                                   const EffectivenessMatrix& r) {
  BestResponseCheck out;
  for (std::size_t j = 0; j < dbms.rows(); ++j) {
    auto best = best_replies(user, prior, r, j);
    for (std::size_t l = 0; l < dbms.cols(); ++l) {
      if (dbms(j, l) > kSupportTol &&
          std::find(best.begin(), best.end(), l) == best.end()) {
        out.ok = false;
        out.offending_queries.push_back(j);
        break;
      }
    }
  }
  return out;
}

bool is_strict_best_response(const StrategyMatrix& user, const StrategyMatrix& dbms,
                             const ProbabilityVector& prior,
                             const EffectivenessMatrix& r) {
  for (std::size_t j = 0; j < dbms.rows(); ++j) {
    auto best = best_replies(user, prior, r, j);
    if (best.size() != 1) return false;
    if (std::abs(dbms(j, best[0]) - 1.0) > kStochasticTol) return false;
  }
  return true;
}

EquilibriumReport check_nash(const StrategyProfile& profile, const GameConfig& game) {
  check_profile(profile, game);
  const auto& U = profile.user;
  const auto& D = profile.dbms;
  const auto& prior = game.prior;
  const auto& r = game.effectiveness;

  EquilibriumReport rep;
  rep.payoff = expected_payoff(U, D, prior, r);

  Matrix c = conditional_payoffs(D, r);
  Matrix v = reply_values(U, prior, r);

  // Best pure unilateral deviations. Row rewrites are independent, so the
  // best full deviation reassigns every row to its argmax.
  for (std::size_t i = 0; i < game.m; ++i) {
    if (prior[i] <= kSupportTol) {
      rep.zero_weight_intents.push_back(i);
      continue;
    }
    auto ci = c.row(i);
    std::size_t j_best = argmax(ci);
    double gain = prior[i] * (ci[j_best] - row_dot(U.row(i), ci));
    if (gain > kNashTol)
      rep.witnesses.push_back(
          {DeviationWitness::Player::kUser, i, j_best, gain});
    rep.best_user_deviation_gain += std::max(0.0, gain);
  }
  for (std::size_t j = 0; j < game.n; ++j) {
    auto vj = v.row(j);
    std::size_t l_best = argmax(vj);
    double gain = vj[l_best] - row_dot(D.row(j), vj);
    if (gain > kNashTol)
      rep.witnesses.push_back(
          {DeviationWitness::Player::kDbms, j, l_best, gain});
    rep.best_dbms_deviation_gain += std::max(0.0, gain);
  }
  rep.best_user_deviation_gain = std::max(0.0, rep.best_user_deviation_gain);
  rep.best_dbms_deviation_gain = std::max(0.0, rep.best_dbms_deviation_gain);
  rep.is_nash = rep.best_user_deviation_gain <= kNashTol &&
                rep.best_dbms_deviation_gain <= kNashTol;

  // Characterization route: every used query is a best query for each intent
  // in its pool, and D is a best response. Intents that cannot earn anything
  // are trivially satisfied and flagged.
  bool user_ok = true;
  for (std::size_t i = 0; i < game.m && user_ok; ++i) {
    if (prior[i] <= kSupportTol) continue;
    auto ci = c.row(i);
    double best = ci[argmax(ci)];
    if (best <= kNashTol) {
      rep.zero_payoff_intents.push_back(i);
      continue;
    }
    for (std::size_t j = 0; j < game.n; ++j)
      if (U(i, j) > kSupportTol && ci[j] < best - kNashTol) {
        user_ok = false;
        break;
      }
  }
  bool dbms_ok = is_best_response(U, D, prior, r).ok;
  rep.characterization_agrees = ((user_ok && dbms_ok) == rep.is_nash);

  rep.user_pure = U.is_pure();
  rep.dbms_pure = D.is_pure();
  rep.user_onto = user_is_onto(U);
  rep.dbms_one_to_one = dbms_is_one_to_one(D);
  return rep;
}

EquilibriumReport check_strict_nash(const StrategyProfile& profile,
                                    const GameConfig& game) {
  EquilibriumReport rep = check_nash(profile, game);
  const auto& U = profile.user;
  const auto& D = profile.dbms;
  Matrix c = conditional_payoffs(D, game.effectiveness);
  Matrix v = reply_values(U, game.prior, game.effectiveness);

  bool strict_ok = rep.is_nash && rep.user_pure && rep.dbms_pure && rep.user_onto &&
                   rep.dbms_one_to_one;

  if (strict_ok) {
    for (std::size_t i = 0; i < game.m && strict_ok; ++i) {
      if (game.prior[i] <= kSupportTol) continue;  // flagged by check_nash
      auto ci = c.row(i);
      std::size_t j_star = argmax(U.row(i));
      if (ci[argmax(ci)] <= kNashTol) {
        if (std::find(rep.zero_payoff_intents.begin(), rep.zero_payoff_intents.end(),
                      i) == rep.zero_payoff_intents.end())
          rep.zero_payoff_intents.push_back(i);
        continue;
      }
      for (std::size_t j = 0; j < game.n; ++j) {
        if (j == j_star) continue;
        double change = game.prior[i] * (ci[j] - ci[j_star]);
        if (change > -kNashTol) {  // deviation fails to strictly lose
          strict_ok = false;
          rep.witnesses.push_back(
              {DeviationWitness::Player::kUser, i, j, std::max(0.0, change)});
          break;
        }
      }
    }
    for (std::size_t j = 0; j < game.n && strict_ok; ++j) {
      auto vj = v.row(j);
      std::size_t l_star = argmax(D.row(j));
      if (vj[argmax(vj)] <= kNashTol) {
        rep.zero_value_queries.push_back(j);
        continue;
      }
      for (std::size_t l = 0; l < game.o; ++l) {
        if (l == l_star) continue;
        double change = vj[l] - vj[l_star];
        if (change > -kNashTol) {
          strict_ok = false;
          rep.witnesses.push_back(
              {DeviationWitness::Player::kDbms, j, l, std::max(0.0, change)});
          break;
        }
      }
    }
  }

  rep.is_strict_nash = strict_ok;
  return rep;
}

EnumerationResult enumerate_pure_equilibria(const GameConfig& game,
                                            std::size_t budget) {
  game.validate();
  double count = std::pow(static_cast<double>(game.n), static_cast<double>(game.m)) *
                 std::pow(static_cast<double>(game.o), static_cast<double>(game.n));
  if (count > static_cast<double>(budget))
    throw enumeration_budget_error(
        count > 1e18 ? std::numeric_limits<std::size_t>::max()
                     : static_cast<std::size_t>(count),
        budget);

  EnumerationResult out;
  out.max_payoff = -std::numeric_limits<double>::infinity();

  std::vector<std::size_t> u_assign(game.m, 0);
  for (;;) {
    StrategyMatrix pure_u = StrategyMatrix::pure(game.m, game.n, u_assign);
    std::vector<std::size_t> d_assign(game.n, 0);
    for (;;) {
      StrategyProfile profile{pure_u, StrategyMatrix::pure(game.n, game.o, d_assign)};
      EquilibriumReport rep = check_strict_nash(profile, game);
      ++out.profiles_scanned;

      if (rep.payoff > out.max_payoff + kNashTol) {
        out.max_payoff = rep.payoff;
        out.optimal.clear();
        out.optimal.push_back(profile);
      } else if (rep.payoff >= out.max_payoff - kNashTol) {
        out.optimal.push_back(profile);
      }
      if (rep.is_nash) {
        out.nash.push_back({profile, rep});
        if (rep.is_strict_nash) out.strict_nash.push_back({profile, rep});
      }

      // next pure D (odometer over result assignments)
      std::size_t pos = 0;
      while (pos < game.n && ++d_assign[pos] == game.o) d_assign[pos++] = 0;
      if (pos == game.n) break;
    }
    std::size_t pos = 0;
    while (pos < game.m && ++u_assign[pos] == game.n) u_assign[pos++] = 0;
    if (pos == game.m) break;
  }

  // A first scan with a low running max can leave stale near-max entries;
  // filter against the final maximum.
  std::erase_if(out.optimal, [&](const StrategyProfile& p) {
    return expected_payoff(p.user, p.dbms, game.prior, game.effectiveness) <
           out.max_payoff - kNashTol;
  });
  for (auto& e : out.nash)
    e.report.is_optimal = e.report.payoff >= out.max_payoff - kNashTol;
  for (auto& e : out.strict_nash)
    e.report.is_optimal = e.report.payoff >= out.max_payoff - kNashTol;
  return out;
}

bool check_optimal(const StrategyProfile& profile, const GameConfig& game,
                   std::size_t budget) {
  check_profile(profile, game);
  EnumerationResult enumerated = enumerate_pure_equilibria(game, budget);
  double payoff =
      expected_payoff(profile.user, profile.dbms, game.prior, game.effectiveness);
  bool optimal = payoff >= enumerated.max_payoff - kNashTol;
  if (optimal && !check_nash(profile, game).is_nash)
    throw std::logic_error("optimal profile failed the Nash check");
  return optimal;
}

bool nash_convexity_witness(const StrategyMatrix& user, const StrategyMatrix& d_first,
                            const StrategyMatrix& d_second, const GameConfig& game,
                            std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  StrategyProfile p1{user, d_first};
  StrategyProfile p2{user, d_second};
  if (!check_nash(p1, game).is_nash || !check_nash(p2, game).is_nash)
    throw std::invalid_argument("nash_convexity_witness: endpoints must be Nash");

  double u_ref = expected_payoff(user, d_first, game.prior, game.effectiveness);
  for (std::size_t s = 0; s < samples; ++s) {
    double alpha = static_cast<double>(s) / static_cast<double>(samples - 1);
    Matrix blend(d_first.rows(), d_first.cols());
    for (std::size_t j = 0; j < blend.rows(); ++j)
      for (std::size_t l = 0; l < blend.cols(); ++l)
        blend(j, l) = alpha * d_first(j, l) + (1.0 - alpha) * d_second(j, l);
    StrategyProfile mixed{user, StrategyMatrix(std::move(blend))};
    double u_mix =
        expected_payoff(mixed.user, mixed.dbms, game.prior, game.effectiveness);
    if (std::abs(u_mix - u_ref) > kNashTol) return false;
    if (!check_nash(mixed, game).is_nash) return false;
  }
  return true;
}

}  // namespace digame
