#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "digame/equilibria.hpp"
#include "digame/metrics.hpp"
#include "digame/rng.hpp"

using namespace digame;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Three single-tuple intents over the university instance; precision between
// disjoint answers collapses to the identity matrix.
GameConfig university_game() {
  GameConfig g;
  g.m = 3;
  g.n = 2;
  g.o = 3;
  g.prior = ProbabilityVector::uniform(3);
  g.effectiveness = EffectivenessMatrix::identity(3);
  g.initial_user = StrategyMatrix(from_rows({{0, 1}, {0, 1}, {0, 1}}));
  g.initial_dbms = StrategyMatrix(from_rows({{0, 1, 0}, {0, 1, 0}}));
  return g;
}

StrategyProfile single_query_profile() {
  // everything through the ambiguous query; the system always answers the
  // second intent
  return {StrategyMatrix(from_rows({{0, 1}, {0, 1}, {0, 1}})),
          StrategyMatrix(from_rows({{0, 1, 0}, {0, 1, 0}}))};
}

StrategyProfile split_profile(double eps = 0.5) {
  // the informed profile: the second intent gets its own query, the shared
  // query splits between the other two answers
  return {StrategyMatrix(from_rows({{0, 1}, {1, 0}, {0, 1}})),
          StrategyMatrix(from_rows({{0, 1, 0}, {eps, 0, 1 - eps}}))};
}

// The broad-intent game: answers overlap, so precision is not identity.
// Intents: the Missouri tuple, all four public tuples, the Murray tuple.
GameConfig overlap_game() {
  AnswerSet missouri{{"missouri"}};
  AnswerSet all_public{{"missouri", "mississippi", "murray", "michigan"}};
  AnswerSet murray{{"murray"}};
  std::vector<AnswerSet> answers{missouri, all_public, murray};
  Matrix r(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t l = 0; l < 3; ++l)
      r(i, l) = set_precision(answers[l], answers[i]);
  GameConfig g;
  g.m = 3;
  g.n = 2;
  g.o = 3;
  g.prior = ProbabilityVector::uniform(3);
  g.effectiveness = EffectivenessMatrix(std::move(r));
  g.initial_user = StrategyMatrix(from_rows({{1, 0}, {1, 0}, {0, 1}}));
  g.initial_dbms = StrategyMatrix(from_rows({{1, 0, 0}, {0, 0, 1}}));
  return g;
}

GameConfig showcase_game() {
  GameConfig g;
  g.m = 3;
  g.n = 2;
  g.o = 3;
  g.prior = ProbabilityVector::unit(3);
  g.allow_unnormalized_rewards = true;
  g.effectiveness =
      EffectivenessMatrix(from_rows({{1, 0, 0}, {0, 2, 0.1}, {0, 0, 3}}), true);
  g.initial_user = StrategyMatrix(from_rows({{0, 1}, {1, 0}, {1, 0}}));
  g.initial_dbms = StrategyMatrix(from_rows({{0, 0, 1}, {1, 0, 0}}));
  return g;
}

StrategyMatrix random_stochastic(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = rng.next_unit() + 1e-3;
      sum += m(i, j);
    }
    for (std::size_t j = 0; j < cols; ++j) m(i, j) /= sum;
  }
  return StrategyMatrix(std::move(m));
}

GameConfig random_game(Rng& rng, std::size_t max_dim = 3, double reward_floor = 0.0) {
  GameConfig g;
  g.m = 1 + rng.next_u64() % max_dim;
  g.n = 1 + rng.next_u64() % max_dim;
  g.o = 1 + rng.next_u64() % max_dim;
  std::vector<double> w(g.m);
  double total = 0.0;
  for (double& v : w) total += v = rng.next_unit() + 0.05;
  for (double& v : w) v /= total;
  g.prior = ProbabilityVector(std::move(w));
  Matrix r(g.m, g.o);
  for (double& v : r.data())
    v = reward_floor + (1.0 - reward_floor) * rng.next_unit();
  g.effectiveness = EffectivenessMatrix(std::move(r));
  g.initial_user = StrategyMatrix::uniform(g.m, g.n);
  g.initial_dbms = StrategyMatrix::uniform(g.n, g.o);
  return g;
}

StrategyProfile random_profile(Rng& rng, const GameConfig& g, bool pure) {
  if (!pure)
    return {random_stochastic(rng, g.m, g.n), random_stochastic(rng, g.n, g.o)};
  std::vector<std::size_t> ua(g.m), da(g.n);
  for (auto& v : ua) v = rng.next_u64() % g.n;
  for (auto& v : da) v = rng.next_u64() % g.o;
  return {StrategyMatrix::pure(g.m, g.n, ua), StrategyMatrix::pure(g.n, g.o, da)};
}

double payoff_of(const StrategyProfile& p, const GameConfig& g) {
  return expected_payoff(p.user, p.dbms, g.prior, g.effectiveness);
}

// Independent Nash oracle: try every pure single-row rewrite of either
// strategy and look for a payoff improvement.
bool nash_oracle(const StrategyProfile& p, const GameConfig& g) {
  double base = payoff_of(p, g);
  for (std::size_t i = 0; i < g.m; ++i)
    for (std::size_t j = 0; j < g.n; ++j) {
      Matrix u = p.user.matrix();
      for (std::size_t k = 0; k < g.n; ++k) u(i, k) = k == j ? 1.0 : 0.0;
      if (payoff_of({StrategyMatrix(u), p.dbms}, g) > base + 1e-9) return false;
    }
  for (std::size_t q = 0; q < g.n; ++q)
    for (std::size_t l = 0; l < g.o; ++l) {
      Matrix d = p.dbms.matrix();
      for (std::size_t k = 0; k < g.o; ++k) d(q, k) = k == l ? 1.0 : 0.0;
      if (payoff_of({p.user, StrategyMatrix(d)}, g) > base + 1e-9) return false;
    }
  return true;
}

// Independent strict-Nash oracle straight from the definition restricted to
// pure single-row rewrites (sufficient for generic rewards).
bool strict_oracle(const StrategyProfile& p, const GameConfig& g) {
  double base = payoff_of(p, g);
  for (std::size_t i = 0; i < g.m; ++i)
    for (std::size_t j = 0; j < g.n; ++j) {
      Matrix u = p.user.matrix();
      bool differs = std::abs(u(i, j) - 1.0) > 1e-12;
      for (std::size_t k = 0; k < g.n; ++k) u(i, k) = k == j ? 1.0 : 0.0;
      if (differs && payoff_of({StrategyMatrix(u), p.dbms}, g) >= base - 1e-9)
        return false;
    }
  for (std::size_t q = 0; q < g.n; ++q)
    for (std::size_t l = 0; l < g.o; ++l) {
      Matrix d = p.dbms.matrix();
      bool differs = std::abs(d(q, l) - 1.0) > 1e-12;
      for (std::size_t k = 0; k < g.o; ++k) d(q, k) = k == l ? 1.0 : 0.0;
      if (differs && payoff_of({p.user, StrategyMatrix(d)}, g) >= base - 1e-9)
        return false;
    }
  return true;
}

}  // namespace

TEST_CASE("payoff of an intent with a query") {
  GameConfig g = overlap_game();
  // pure system row hands back the matching reward entry
  CHECK(payoff_of_intent_with_query(g.initial_dbms, g.effectiveness, 0, 0) ==
        doctest::Approx(1.0));
  CHECK(payoff_of_intent_with_query(g.initial_dbms, g.effectiveness, 1, 1) ==
        doctest::Approx(1.0));

  // the split row of the university profile pays the mid intent nothing
  GameConfig uni = university_game();
  auto split = split_profile();
  CHECK(payoff_of_intent_with_query(split.dbms, uni.effectiveness, 1, 1) ==
        doctest::Approx(0.0));

  auto d = StrategyMatrix::uniform(1, 3);
  auto r = EffectivenessMatrix(from_rows({{0.2, 0.4, 0.6}}));
  CHECK(payoff_of_intent_with_query(d, r, 0, 0) == doctest::Approx(0.4));

  CHECK_THROWS_AS(payoff_of_intent_with_query(d, r, 1, 0), std::out_of_range);
  CHECK_THROWS_AS(payoff_of_intent_with_query(d, r, 0, 5), std::out_of_range);
}

TEST_CASE("intent pools") {
  auto single = single_query_profile();
  CHECK(intent_pool(single.user, 1) == std::vector<std::size_t>{0, 1, 2});
  CHECK(intent_pool(single.user, 0).empty());

  auto pure = StrategyMatrix::pure(3, 3, {2, 0, 1});
  for (std::size_t j = 0; j < 3; ++j) CHECK(intent_pool(pure, j).size() == 1);
}

TEST_CASE("best replies") {
  GameConfig uni = university_game();
  auto split = split_profile();
  // the dedicated query pools only the mid intent, whose unique best reply is
  // its own answer
  CHECK(best_replies(split.user, uni.prior, uni.effectiveness, 0) ==
        std::vector<std::size_t>{1});
  // the shared query ties between the two pooled answers
  CHECK(best_replies(split.user, uni.prior, uni.effectiveness, 1) ==
        std::vector<std::size_t>{0, 2});

  // constant reward column: everything ties
  auto u = StrategyMatrix::uniform(2, 2);
  auto flat = EffectivenessMatrix(from_rows({{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}}));
  CHECK(best_replies(u, ProbabilityVector::uniform(2), flat, 0).size() == 3);

  Rng rng(41);
  for (int rep = 0; rep < 60; ++rep) {
    GameConfig g = random_game(rng);
    auto user = random_stochastic(rng, g.m, g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
      auto best = best_replies(user, g.prior, g.effectiveness, j);
      // brute-force scan over all pure replies
      std::vector<double> value(g.o, 0.0);
      for (std::size_t l = 0; l < g.o; ++l)
        for (std::size_t i = 0; i < g.m; ++i)
          value[l] += g.prior[i] * user(i, j) * g.effectiveness(i, l);
      double top = *std::max_element(value.begin(), value.end());
      for (std::size_t l = 0; l < g.o; ++l) {
        bool in = std::find(best.begin(), best.end(), l) != best.end();
        CHECK(in == (value[l] >= top - 1e-9));
      }
    }
  }
}

TEST_CASE("best response verification") {
  GameConfig uni = university_game();
  auto single = single_query_profile();
  auto split = split_profile();
  CHECK(is_best_response(single.user, single.dbms, uni.prior, uni.effectiveness).ok);
  CHECK(is_best_response(split.user, split.dbms, uni.prior, uni.effectiveness).ok);

  // a reply supported on a dominated result
  auto bad = StrategyMatrix(from_rows({{0, 1, 0}, {0, 1, 0}}));
  auto check = is_best_response(split.user, bad, uni.prior, uni.effectiveness);
  CHECK_FALSE(check.ok);
  CHECK_FALSE(check.offending_queries.empty());

  Rng rng(43);
  for (int rep = 0; rep < 100; ++rep) {
    GameConfig g = random_game(rng);
    auto user = random_stochastic(rng, g.m, g.n);
    auto dbms = random_stochastic(rng, g.n, g.o);
    bool lib = is_best_response(user, dbms, g.prior, g.effectiveness).ok;

    // oracle: no pure reply assignment beats the current payoff
    double base = expected_payoff(user, dbms, g.prior, g.effectiveness);
    bool beaten = false;
    std::vector<std::size_t> assign(g.n, 0);
    for (;;) {
      auto cand = StrategyMatrix::pure(g.n, g.o, assign);
      if (expected_payoff(user, cand, g.prior, g.effectiveness) > base + 1e-9) {
        beaten = true;
        break;
      }
      std::size_t pos = 0;
      while (pos < g.n && ++assign[pos] == g.o) assign[pos++] = 0;
      if (pos == g.n) break;
    }
    CHECK(lib == !beaten);
  }
}

TEST_CASE("strict best response") {
  // identity game with distinct rewards: the matching pure map is strict
  GameConfig g;
  g.m = g.n = g.o = 2;
  g.prior = ProbabilityVector::uniform(2);
  g.effectiveness = EffectivenessMatrix(from_rows({{0.9, 0.1}, {0.2, 0.8}}));
  g.initial_user = StrategyMatrix::pure(2, 2, {0, 1});
  g.initial_dbms = StrategyMatrix::pure(2, 2, {0, 1});
  CHECK(is_strict_best_response(g.initial_user, g.initial_dbms, g.prior,
                                g.effectiveness));

  // duplicate best replies (overlapping answers under precision): never strict
  GameConfig ov = overlap_game();
  auto broad_user = StrategyMatrix(from_rows({{0, 1}, {1, 0}, {0, 1}}));
  auto any_dbms = StrategyMatrix::pure(2, 3, {1, 1});
  // query 0 pools only the broad intent; every answer is a subset of it, so
  // all three replies tie and no strict best response exists
  CHECK(best_replies(broad_user, ov.prior, ov.effectiveness, 0).size() == 3);
  CHECK_FALSE(
      is_strict_best_response(broad_user, any_dbms, ov.prior, ov.effectiveness));

  Rng rng(47);
  for (int rep = 0; rep < 100; ++rep) {
    GameConfig rg = random_game(rng);
    auto user = random_stochastic(rng, rg.m, rg.n);
    auto dbms = random_stochastic(rng, rg.n, rg.o);
    bool lib = is_strict_best_response(user, dbms, rg.prior, rg.effectiveness);

    double base = expected_payoff(user, dbms, rg.prior, rg.effectiveness);
    bool strict = true;
    std::vector<std::size_t> assign(rg.n, 0);
    for (;;) {
      auto cand = StrategyMatrix::pure(rg.n, rg.o, assign);
      if (!(cand == dbms) &&
          expected_payoff(user, cand, rg.prior, rg.effectiveness) >= base - 1e-9) {
        strict = false;
        break;
      }
      std::size_t pos = 0;
      while (pos < rg.n && ++assign[pos] == rg.o) assign[pos++] = 0;
      if (pos == rg.n) break;
    }
    CHECK(lib == strict);
  }
}

TEST_CASE("university profiles are Nash, the split one is better") {
  GameConfig uni = university_game();
  auto single = single_query_profile();
  auto rep1 = check_nash(single, uni);
  CHECK(rep1.is_nash);
  CHECK(rep1.payoff == doctest::Approx(1.0 / 3.0));
  CHECK(rep1.characterization_agrees);

  auto split = split_profile();
  auto rep2 = check_nash(split, uni);
  CHECK(rep2.is_nash);
  CHECK(rep2.payoff == doctest::Approx(2.0 / 3.0));
  CHECK(rep2.payoff > rep1.payoff);
  CHECK(rep2.characterization_agrees);
}

TEST_CASE("the whole blend family stays Nash") {
  GameConfig uni = university_game();
  for (double eps : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
    auto p = split_profile(eps);
    auto rep = check_nash(p, uni);
    CHECK(rep.is_nash);
    CHECK(rep.payoff == doctest::Approx(2.0 / 3.0));
  }
}

TEST_CASE("deviation verdict matches the brute-force oracle") {
  Rng rng(53);
  int checked = 0;
  for (int rep = 0; rep < 400; ++rep) {
    GameConfig g = random_game(rng);
    auto p = random_profile(rng, g, rep % 2 == 0);
    auto report = check_nash(p, g);
    CHECK(report.is_nash == nash_oracle(p, g));
    CHECK(report.characterization_agrees);
    CHECK(report.best_user_deviation_gain >= 0.0);
    CHECK(report.best_dbms_deviation_gain >= 0.0);
    ++checked;
  }
  CHECK(checked == 400);
}

TEST_CASE("pure deviations dominate sampled mixed deviations") {
  Rng rng(59);
  for (int rep = 0; rep < 200; ++rep) {
    GameConfig g = random_game(rng);
    auto p = random_profile(rng, g, false);
    auto report = check_nash(p, g);
    double base = payoff_of(p, g);
    double best_mixed = 0.0;
    for (int s = 0; s < 1000; ++s) {
      if (s % 2 == 0) {
        auto u = random_stochastic(rng, g.m, g.n);
        best_mixed = std::max(best_mixed, payoff_of({u, p.dbms}, g) - base);
      } else {
        auto d = random_stochastic(rng, g.n, g.o);
        best_mixed = std::max(best_mixed, payoff_of({p.user, d}, g) - base);
      }
    }
    double best_pure =
        std::max(report.best_user_deviation_gain, report.best_dbms_deviation_gain);
    CHECK(best_mixed <= best_pure + 1e-6);
  }
}

TEST_CASE("showcase profiles are strict Nash; only the second is optimal") {
  GameConfig g = showcase_game();
  StrategyProfile p1{g.initial_user, g.initial_dbms};
  StrategyProfile p2{StrategyMatrix(from_rows({{0, 1}, {0, 1}, {1, 0}})),
                     StrategyMatrix(from_rows({{0, 0, 1}, {0, 1, 0}}))};

  auto rep1 = check_strict_nash(p1, g);
  CHECK(rep1.is_nash);
  CHECK(rep1.is_strict_nash);
  CHECK(rep1.payoff == doctest::Approx(4.1));
  CHECK(rep1.zero_payoff_intents.empty());

  auto rep2 = check_strict_nash(p2, g);
  CHECK(rep2.is_nash);
  CHECK(rep2.is_strict_nash);
  CHECK(rep2.payoff == doctest::Approx(5.0));
  // the first intent earns nothing anywhere under this system strategy; the
  // checker exempts and flags it
  CHECK(rep2.zero_payoff_intents == std::vector<std::size_t>{0});

  CHECK_FALSE(check_optimal(p1, g));
  CHECK(check_optimal(p2, g));
}

TEST_CASE("blend family members are never strict") {
  GameConfig uni = university_game();
  auto rep = check_strict_nash(split_profile(0.5), uni);
  CHECK(rep.is_nash);
  CHECK_FALSE(rep.is_strict_nash);
  CHECK_FALSE(rep.dbms_pure);

  // even the pure endpoint fails: the split row's two replies tie
  auto rep_end = check_strict_nash(split_profile(1.0), uni);
  CHECK(rep_end.is_nash);
  CHECK_FALSE(rep_end.is_strict_nash);
}

TEST_CASE("non-pure rows are never strict") {
  Rng rng(61);
  for (int rep = 0; rep < 50; ++rep) {
    GameConfig g = random_game(rng);
    auto p = random_profile(rng, g, false);
    if (p.user.is_pure() && p.dbms.is_pure()) continue;
    CHECK_FALSE(check_strict_nash(p, g).is_strict_nash);
  }
}

TEST_CASE("broad-intent profile: Nash but not strict, the tie is real") {
  GameConfig g = overlap_game();
  StrategyProfile p{g.initial_user, g.initial_dbms};
  CHECK(g.effectiveness(1, 0) == doctest::Approx(1.0));
  CHECK(g.effectiveness(1, 2) == doctest::Approx(1.0));

  auto rep = check_strict_nash(p, g);
  CHECK(rep.is_nash);
  CHECK(rep.payoff == doctest::Approx(1.0));
  CHECK(rep.user_pure);
  CHECK(rep.dbms_pure);
  CHECK(rep.user_onto);
  CHECK(rep.dbms_one_to_one);
  // the system side is even strictly best
  CHECK(is_strict_best_response(p.user, p.dbms, g.prior, g.effectiveness));
  // ... but the broad intent is indifferent between the two queries, so the
  // profile cannot be a strict equilibrium
  CHECK_FALSE(rep.is_strict_nash);
  bool found_tie_witness = false;
  for (const auto& w : rep.witnesses)
    if (w.player == DeviationWitness::Player::kUser && w.row == 1)
      found_tie_witness = true;
  CHECK(found_tie_witness);
}

TEST_CASE("enumeration: matched permutations of the 2x2 identity game") {
  GameConfig g;
  g.m = g.n = g.o = 2;
  g.prior = ProbabilityVector::uniform(2);
  g.effectiveness = EffectivenessMatrix::identity(2);
  g.initial_user = StrategyMatrix::uniform(2, 2);
  g.initial_dbms = StrategyMatrix::uniform(2, 2);

  auto res = enumerate_pure_equilibria(g);
  CHECK(res.profiles_scanned == 4 * 4);
  CHECK(res.max_payoff == doctest::Approx(1.0));
  CHECK(res.strict_nash.size() == 2);  // identity/identity and swap/swap
  for (const auto& e : res.strict_nash) {
    CHECK(e.report.payoff == doctest::Approx(1.0));
    CHECK(e.report.is_optimal);
    // D is the transpose of U
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(e.profile.user(i, j) == doctest::Approx(e.profile.dbms(j, i)));
  }
}

TEST_CASE("enumeration agrees with the direct checks on the university game") {
  GameConfig uni = university_game();
  auto res = enumerate_pure_equilibria(uni);
  // the enumerator's best payoff matches the split profile's payoff
  CHECK(res.max_payoff == doctest::Approx(2.0 / 3.0));
  for (const auto& e : res.nash) CHECK(nash_oracle(e.profile, uni));
}

TEST_CASE("enumeration finds both showcase strict equilibria") {
  GameConfig g = showcase_game();
  auto res = enumerate_pure_equilibria(g);
  CHECK(res.max_payoff == doctest::Approx(5.0));

  bool found_41 = false, found_5 = false;
  for (const auto& e : res.strict_nash) {
    if (std::abs(e.report.payoff - 4.1) < 1e-9) {
      found_41 = true;
      CHECK_FALSE(e.report.is_optimal);
    }
    if (std::abs(e.report.payoff - 5.0) < 1e-9) {
      found_5 = true;
      CHECK(e.report.is_optimal);
    }
  }
  // a strict equilibrium that is not efficient exists
  CHECK(found_41);
  CHECK(found_5);
}

TEST_CASE("enumeration respects its budget") {
  GameConfig g;
  g.m = 10;
  g.n = 10;
  g.o = 10;
  g.prior = ProbabilityVector::uniform(10);
  g.effectiveness = EffectivenessMatrix::identity(10);
  g.initial_user = StrategyMatrix::uniform(10, 10);
  g.initial_dbms = StrategyMatrix::uniform(10, 10);
  CHECK_THROWS_AS(enumerate_pure_equilibria(g, 1000), enumeration_budget_error);
  try {
    enumerate_pure_equilibria(g, 1000);
  } catch (const enumeration_budget_error& e) {
    CHECK(e.required() > 1000);
  }
}

TEST_CASE("strict equilibria are pure, onto, one-to-one, and pass the "
          "definition-level test") {
  Rng rng(67);
  int games = 0, strict_found = 0;
  while (games < 200) {
    GameConfig g = random_game(rng, 3, 0.05);
    ++games;
    auto res = enumerate_pure_equilibria(g);
    for (const auto& e : res.strict_nash) {
      ++strict_found;
      CHECK(e.report.user_pure);
      CHECK(e.report.dbms_pure);
      CHECK(e.report.user_onto);
      CHECK(e.report.dbms_one_to_one);
      CHECK(strict_oracle(e.profile, g));
    }
    // and conversely: anything the definition-level oracle calls strict must
    // be labeled strict by the checker
    for (const auto& e : res.nash) {
      if (strict_oracle(e.profile, g))
        CHECK(check_strict_nash(e.profile, g).is_strict_nash);
    }
  }
  CHECK(strict_found > 0);
}

TEST_CASE("optimal profiles are equilibria") {
  Rng rng(71);
  for (int rep = 0; rep < 40; ++rep) {
    GameConfig g = random_game(rng);
    auto res = enumerate_pure_equilibria(g);
    for (const auto& p : res.optimal) {
      CHECK(check_optimal(p, g));  // also asserts Nash internally
      CHECK(check_nash(p, g).is_nash);
    }
  }
}

TEST_CASE("identity game: matched permutation is optimal") {
  GameConfig g;
  g.m = g.n = g.o = 3;
  g.prior = ProbabilityVector::uniform(3);
  g.effectiveness = EffectivenessMatrix::identity(3);
  g.initial_user = StrategyMatrix::pure(3, 3, {1, 2, 0});
  g.initial_dbms = StrategyMatrix::pure(3, 3, {2, 0, 1});
  StrategyProfile p{g.initial_user, g.initial_dbms};
  CHECK(payoff_of(p, g) == doctest::Approx(1.0));
  CHECK(check_optimal(p, g));
}

TEST_CASE("no single-row rewrite improves a Nash profile") {
  Rng rng(73);
  for (int rep = 0; rep < 40; ++rep) {
    GameConfig g = random_game(rng);
    auto res = enumerate_pure_equilibria(g);
    for (const auto& e : res.nash) {
      double base = e.report.payoff;
      for (int s = 0; s < 20; ++s) {
        Matrix u = e.profile.user.matrix();
        std::size_t i = rng.next_u64() % g.m;
        double sum = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) sum += u(i, j) = rng.next_unit() + 1e-3;
        for (std::size_t j = 0; j < g.n; ++j) u(i, j) /= sum;
        CHECK(payoff_of({StrategyMatrix(u), e.profile.dbms}, g) <= base + 1e-9);
      }
    }
  }
}

TEST_CASE("convexity witness on the blend family") {
  GameConfig uni = university_game();
  auto p0 = split_profile(0.0);
  auto p1 = split_profile(1.0);
  CHECK(nash_convexity_witness(p0.user, p0.dbms, p1.dbms, uni, 11));
  // D = D' is trivially fine
  CHECK(nash_convexity_witness(p0.user, p0.dbms, p0.dbms, uni, 5));
}

TEST_CASE("convexity witness rejects non-Nash endpoints") {
  GameConfig uni = university_game();
  auto p0 = split_profile(0.0);
  // deliberately bad second endpoint: answers the shared query with the
  // dominated middle result
  auto bad = StrategyMatrix(from_rows({{0, 1, 0}, {0, 1, 0}}));
  StrategyProfile check{p0.user, bad};
  REQUIRE_FALSE(check_nash(check, uni).is_nash);
  CHECK_THROWS_AS(nash_convexity_witness(p0.user, p0.dbms, bad, uni, 5),
                  std::invalid_argument);
}

TEST_CASE("zero-weight intents cannot block equilibrium") {
  GameConfig g;
  g.m = 2;
  g.n = 2;
  g.o = 2;
  g.prior = ProbabilityVector({1.0, 0.0});
  g.effectiveness = EffectivenessMatrix::identity(2);
  g.initial_user = StrategyMatrix::pure(2, 2, {0, 0});
  g.initial_dbms = StrategyMatrix::pure(2, 2, {0, 1});
  auto rep = check_nash({g.initial_user, g.initial_dbms}, g);
  CHECK(rep.is_nash);
  CHECK(rep.zero_weight_intents == std::vector<std::size_t>{1});
}
