#include "digame/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "digame/dbms_learning.hpp"
#include "digame/metrics.hpp"
#include "digame/rng.hpp"

namespace digame {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return out;
}

std::vector<std::string> split_spaces(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

std::vector<LogRecord> read_log(const std::string& path, std::size_t expected_results) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open log file: " + path);
  std::vector<LogRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() < 4)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected at least 4 tab-separated columns");
    LogRecord rec;
    rec.query_id = cols[0];
    rec.cookie_id = cols[1];
    rec.timestamp = std::stoll(cols[2]);
    rec.results = split_spaces(cols[3]);
    if (cols.size() >= 5)
      for (const auto& c : split_spaces(cols[4])) rec.clicks.push_back(std::stoi(c));
    if (rec.results.empty())
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": record has no results");
    if (expected_results == 0) expected_results = rec.results.size();
    if (rec.results.size() != expected_results)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": result list length differs from " +
                                  std::to_string(expected_results));
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RelevanceJudgment> read_judgments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open judgments file: " + path);
  std::vector<RelevanceJudgment> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 3)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected 3 tab-separated columns");
    RelevanceJudgment j{cols[0], cols[1], std::stoi(cols[2])};
    if (j.score < 0 || j.score > kMaxRelevanceGrade)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": score outside 0..4");
    out.push_back(std::move(j));
  }
  return out;
}

void write_log(const std::string& path, const std::vector<LogRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write log file: " + path);
  for (const auto& rec : records) {
    out << rec.query_id << '\t' << rec.cookie_id << '\t' << rec.timestamp << '\t';
    for (std::size_t k = 0; k < rec.results.size(); ++k) {
      if (k) out << ' ';
      out << rec.results[k];
    }
    if (!rec.clicks.empty()) {
      out << '\t';
      for (std::size_t k = 0; k < rec.clicks.size(); ++k) {
        if (k) out << ' ';
        out << rec.clicks[k];
      }
    }
    out << '\n';
  }
}

void write_judgments(const std::string& path,
                     const std::vector<RelevanceJudgment>& judgments) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write judgments file: " + path);
  for (const auto& j : judgments)
    out << j.query_id << '\t' << j.result_id << '\t' << j.score << '\n';
}

JudgmentIndex index_judgments(const std::vector<RelevanceJudgment>& judgments) {
  JudgmentIndex idx;
  for (const auto& j : judgments) {
    auto [it, fresh] = idx[j.query_id].try_emplace(j.result_id, j.score);
    if (!fresh && it->second != j.score)
      throw std::invalid_argument("conflicting judgment for query " + j.query_id +
                                  ", result " + j.result_id);
  }
  return idx;
}

IntentMap derive_intents(const std::vector<LogRecord>& log,
                         const std::vector<RelevanceJudgment>& judgments) {
  JudgmentIndex idx = index_judgments(judgments);
  IntentMap out;
  std::map<std::set<std::string>, std::size_t> seen_sets;
  std::set<std::string> handled;
  for (const auto& rec : log) {
    if (!handled.insert(rec.query_id).second) continue;
    auto it = idx.find(rec.query_id);
    if (it == idx.end()) {
      ++out.dropped_uncovered;
      continue;
    }
    std::set<std::string> answers;
    for (const auto& [res, score] : it->second)
      if (score > 0) answers.insert(res);
    if (answers.empty()) {
      ++out.dropped_empty;
      continue;
    }
    auto [sit, fresh] = seen_sets.try_emplace(answers, out.intent_answers.size());
    if (fresh) out.intent_answers.push_back(answers);
    out.query_to_intent.emplace(rec.query_id, sit->second);
  }
  return out;
}

double event_reward(const LogRecord& record, const JudgmentIndex& judgments) {
  if (record.results.empty())
    throw std::invalid_argument("event_reward: record has no results");
  RankedResult ranked;
  ranked.items.reserve(record.results.size());
  auto it = judgments.find(record.query_id);
  for (const auto& res : record.results) {
    int grade = 0;
    if (it != judgments.end()) {
      auto jt = it->second.find(res);
      if (jt != it->second.end()) grade = jt->second;
    }
    ranked.items.emplace_back(res, grade);
  }
  return ndcg(ranked, ranked.items.size());
}

ReplayData build_replay(const std::vector<LogRecord>& log,
                        const std::vector<RelevanceJudgment>& judgments) {
  ReplayData rd;
  rd.intents = derive_intents(log, judgments);
  JudgmentIndex idx = index_judgments(judgments);
  std::set<std::string> cookies;
  for (const auto& rec : log) {
    auto it = rd.intents.query_to_intent.find(rec.query_id);
    if (it == rd.intents.query_to_intent.end()) continue;  // dropped query
    auto [qit, fresh] = rd.query_index.try_emplace(rec.query_id, rd.query_ids.size());
    if (fresh) rd.query_ids.push_back(rec.query_id);
    rd.events.push_back({it->second, qit->second, event_reward(rec, idx)});
    cookies.insert(rec.cookie_id);
  }
  rd.users_covered = cookies.size();
  return rd;
}

namespace {

// Squared distance between the learner's current row and the observed pure
// choice; the learner is grown before prediction so the observed ids are
// always inside the row.
double prediction_error(const UserLearnerState& st, std::size_t intent,
                        std::size_t query) {
  auto row = st.U.row(intent);
  double err = 1.0;  // (U_ij* - 1)^2 expands to 1 - 2 U_ij* + sum_j U_ij^2
  err -= 2.0 * row[query];
  for (double v : row) err += v * v;
  return err;
}

struct ReplayOutcome {
  double sse = 0.0;        // over [sse_from, end)
  double msd = 0.0;        // normalized mean distance over the same range
  UserLearnerState state;  // final learner
};

ReplayOutcome replay_events(UserModel model, const ModelParams& params,
                            std::span<const ReplayEvent> events,
                            std::size_t sse_from = 0) {
  ReplayOutcome out;
  out.state = UserLearnerState::make(model, 1, 1, params);
  std::size_t counted = 0;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& ev = events[k];
    out.state.ensure_intent(ev.intent);
    out.state.ensure_query(ev.query);
    if (k >= sse_from) {
      double err = prediction_error(out.state, ev.intent, ev.query);
      out.sse += err;
      out.msd += err / static_cast<double>(out.state.queries());
      ++counted;
    }
    apply_update(out.state, ev.intent, ev.query, ev.reward);
  }
  if (counted > 0) out.msd /= static_cast<double>(counted);
  return out;
}

std::vector<ModelParams> make_grid(UserModel model, double step) {
  if (step <= 0.0 || step > 1.0)
    throw std::invalid_argument("grid step must be in (0, 1]");
  std::vector<double> axis;
  for (double v = 0.0; v < 1.0 + 1e-12; v += step)
    axis.push_back(std::min(v, 1.0));
  std::vector<ModelParams> grid;
  ModelParams base;  // r_min stays 0 for the fits
  switch (model) {
    case UserModel::kBushMosteller:
      for (double a : axis) {
        base.alpha_bm = a;
        grid.push_back(base);
      }
      break;
    case UserModel::kCross:
      for (double a : axis)
        for (double b : axis) {
          base.alpha_c = a;
          base.beta_c = b;
          grid.push_back(base);
        }
      break;
    case UserModel::kRothErevModified:
      for (double s : axis)
        for (double e : axis) {
          base.sigma = s;
          base.epsilon = e;
          grid.push_back(base);
        }
      break;
    case UserModel::kWinStayLoseRandomize:
      for (double t : axis) {
        base.wslr_threshold = t;
        grid.push_back(base);
      }
      break;
    case UserModel::kRothErev:
    case UserModel::kLatestReward:
      break;  // nothing to fit
  }
  return grid;
}

}  // namespace

std::pair<double, double> evaluate_msd(const Matrix& strategy,
                                       const std::vector<ReplayEvent>& events) {
  if (events.empty()) throw std::invalid_argument("evaluate_msd: no test events");
  if (strategy.rows() == 0 || strategy.cols() == 0)
    throw std::invalid_argument("evaluate_msd: empty strategy");
  std::size_t n = strategy.cols();
  std::vector<double> dists;
  dists.reserve(events.size());
  double uniform = 1.0 / static_cast<double>(n);
  for (const auto& ev : events) {
    double err = 0.0;
    bool unknown_query = ev.query >= n;
    if (ev.intent < strategy.rows()) {
      auto row = strategy.row(ev.intent);
      for (double v : row) err += v * v;
      err += unknown_query ? 1.0 : 1.0 - 2.0 * row[ev.query];
    } else {
      err = static_cast<double>(n) * uniform * uniform;
      err += unknown_query ? 1.0 : 1.0 - 2.0 * uniform;
    }
    dists.push_back(err / static_cast<double>(n));
  }
  double mean = 0.0;
  for (double d : dists) mean += d;
  mean /= static_cast<double>(dists.size());
  double var = 0.0;
  for (double d : dists) var += (d - mean) * (d - mean);
  var /= static_cast<double>(dists.size());
  return {mean, std::sqrt(var)};
}

FitReport fit_models(const std::vector<LogRecord>& log,
                     const std::vector<RelevanceJudgment>& judgments,
                     const FitOptions& options) {
  ReplayData rd = build_replay(log, judgments);
  const auto& events = rd.events;
  if (events.empty()) throw std::invalid_argument("fit_models: no replayable events");

  FitReport report;
  report.events_total = events.size();
  std::size_t fit_end = std::min(options.fit_count, events.size());
  std::size_t train_end = std::min(fit_end + options.train_count, events.size());
  report.fit_events = fit_end;
  report.train_events = train_end - fit_end;

  {
    std::set<std::size_t> intents, queries;
    for (std::size_t k = 0; k < train_end; ++k) {
      intents.insert(events[k].intent);
      queries.insert(events[k].query);
    }
    report.intents_covered = intents.size();
    report.queries_covered = queries.size();
    report.users_covered = rd.users_covered;
  }

  // Test protocol: the first post-training event of each distinct intent.
  std::vector<ReplayEvent> test_events;
  {
    std::set<std::size_t> seen;
    for (std::size_t k = train_end; k < events.size(); ++k) {
      if (test_events.size() >= options.test_count) break;
      if (seen.insert(events[k].intent).second) test_events.push_back(events[k]);
    }
  }
  report.test_events = test_events.size();

  std::span<const ReplayEvent> fit_span{events.data(), fit_end};
  std::span<const ReplayEvent> train_span{events.data(), train_end};

  for (UserModel model : options.models) {
    ModelFitResult fit;
    fit.model = model;
    auto grid = make_grid(model, options.grid_step);
    if (grid.empty()) {
      fit.params = ModelParams{};
      fit.fit_sse = replay_events(model, fit.params, fit_span).sse;
    } else {
      std::vector<double> sse(grid.size());
      unsigned jobs = std::max(1u, options.jobs);
      if (jobs == 1 || grid.size() == 1) {
        for (std::size_t g = 0; g < grid.size(); ++g)
          sse[g] = replay_events(model, grid[g], fit_span).sse;
      } else {
        std::vector<std::thread> pool;
        std::size_t per = (grid.size() + jobs - 1) / jobs;
        for (unsigned w = 0; w < jobs; ++w) {
          std::size_t lo = w * per;
          std::size_t hi = std::min(grid.size(), lo + per);
          if (lo >= hi) break;
          pool.emplace_back([&, lo, hi] {
            for (std::size_t g = lo; g < hi; ++g)
              sse[g] = replay_events(model, grid[g], fit_span).sse;
          });
        }
        for (auto& th : pool) th.join();
      }
      std::size_t best = 0;
      for (std::size_t g = 1; g < grid.size(); ++g)
        if (sse[g] < sse[best]) best = g;
      fit.params = grid[best];
      fit.fit_sse = sse[best];
    }

    ReplayOutcome trained = replay_events(model, fit.params, train_span, fit_end);
    fit.train_msd = trained.msd;
    fit.trained_strategy = trained.state.U;
    if (!test_events.empty()) {
      auto [msd, sd] = evaluate_msd(fit.trained_strategy, test_events);
      fit.test_msd = msd;
      fit.test_stddev = sd;
    }
    report.models.push_back(std::move(fit));
  }
  return report;
}

SyntheticLog generate_synthetic_log(const SyntheticWorld& world, std::size_t rounds,
                                    std::uint64_t seed) {
  if (world.intents == 0 || world.queries_per_intent == 0 ||
      world.answers_per_intent == 0 || world.list_length == 0)
    throw std::invalid_argument("generate_synthetic_log: degenerate world");
  if (world.dbms_accuracy < 0.0 || world.dbms_accuracy > 1.0)
    throw std::invalid_argument("generate_synthetic_log: accuracy outside [0,1]");

  std::size_t m = world.intents;
  std::size_t qpi = world.queries_per_intent;
  std::size_t n = m * qpi;
  std::size_t k_list = world.list_length;

  SyntheticLog out;
  auto query_id = [&](std::size_t j) { return "q" + std::to_string(j); };

  out.true_intent_answers.resize(m);
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t a = 0; a < world.answers_per_intent; ++a)
      out.true_intent_answers[g].insert("i" + std::to_string(g) + "_r" +
                                        std::to_string(a));
  }
  for (std::size_t j = 0; j < n; ++j) out.query_truth[query_id(j)] = j / qpi;

  // Graded judgments shared by every query of an intent.
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t g = j / qpi;
    std::size_t a = 0;
    for (const auto& res : out.true_intent_answers[g]) {
      int grade = static_cast<int>(kMaxRelevanceGrade - (a % kMaxRelevanceGrade));
      out.judgments.push_back({query_id(j), res, grade});
      ++a;
    }
  }

  if (rounds == 0) return out;

  Rng rng = Rng::stream(seed, 0);
  UserLearnerState user;
  if (!world.fixed_pure_user)
    user = UserLearnerState::make(world.model, m, n, world.params);
  DbmsLearnerState dbms;
  if (world.adapting_dbms) dbms = DbmsLearnerState::make(n, m);

  std::vector<std::string> fillers;
  for (std::size_t f = 0; f < k_list; ++f)
    fillers.push_back("x" + std::to_string(f));

  auto idx = index_judgments(out.judgments);
  out.log.reserve(rounds);
  for (std::size_t t = 1; t <= rounds; ++t) {
    std::size_t intent = rng.next_u64() % m;

    std::size_t query;
    if (world.fixed_pure_user) {
      query = intent * qpi;
    } else {
      // The user stays faithful to her intent: the choice is her current row
      // restricted to the intent's own vocabulary.
      std::vector<double> w(qpi);
      double total = 0.0;
      for (std::size_t k = 0; k < qpi; ++k) {
        w[k] = user.U(intent, intent * qpi + k);
        total += w[k];
      }
      std::size_t pick = total > kSupportTol
                             ? rng.sample(w, total)
                             : rng.next_u64() % qpi;
      query = intent * qpi + pick;
    }

    std::size_t decoded;
    if (world.adapting_dbms) {
      decoded = rng.sample(dbms.D.row(query), 1.0);
    } else if (m == 1 || rng.next_unit() < world.dbms_accuracy) {
      decoded = query / qpi;
    } else {
      decoded = rng.next_u64() % (m - 1);
      if (decoded >= query / qpi) ++decoded;
    }

    // Ranked list: the decoded intent's answers in random order, padded with
    // never-relevant fillers.
    std::vector<std::string> ranked(out.true_intent_answers[decoded].begin(),
                                    out.true_intent_answers[decoded].end());
    for (std::size_t k = ranked.size(); k > 1; --k)
      std::swap(ranked[k - 1], ranked[rng.next_u64() % k]);
    if (ranked.size() > k_list) ranked.resize(k_list);
    for (std::size_t f = 0; ranked.size() < k_list; ++f)
      ranked.push_back(fillers[f % fillers.size()]);

    LogRecord rec;
    rec.query_id = query_id(query);
    rec.cookie_id = "u" + std::to_string(rng.next_u64() % world.cookie_pool);
    rec.timestamp = static_cast<long long>(t);
    rec.results = std::move(ranked);
    double reward = event_reward(rec, idx);

    if (!world.fixed_pure_user) apply_update(user, intent, query, reward);
    if (world.adapting_dbms) dbms.reinforce(query, decoded, reward);
    out.log.push_back(std::move(rec));
  }
  return out;
}

}  // namespace digame
