#ifndef DIGAME_WORKLOAD_HPP
#define DIGAME_WORKLOAD_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "digame/user_learning.hpp"

namespace digame {

/// One query-log line: tab-separated QueryID, CookieID, TimeStampID and the
/// space-separated result ids shown (a fixed-length list, 10 by default). An
/// optional fifth column lists clicked positions.
struct LogRecord {
  std::string query_id;
  std::string cookie_id;
  long long timestamp = 0;
  std::vector<std::string> results;
  std::vector<int> clicks;
};

/// Tab-separated QueryID, ResultID, Score with scores in 0..4.
struct RelevanceJudgment {
  std::string query_id;
  std::string result_id;
  int score = 0;
};

std::vector<LogRecord> read_log(const std::string& path,
                                std::size_t expected_results = 0);
std::vector<RelevanceJudgment> read_judgments(const std::string& path);
void write_log(const std::string& path, const std::vector<LogRecord>& records);
void write_judgments(const std::string& path,
                     const std::vector<RelevanceJudgment>& judgments);

/// Judgments grouped per query: result -> score.
using JudgmentIndex = std::unordered_map<std::string, std::map<std::string, int>>;
JudgmentIndex index_judgments(const std::vector<RelevanceJudgment>& judgments);

/// Query -> intent mapping derived from the judgments: a query's intent is
/// its set of positively scored results, and queries with identical sets
/// share an intent index (assigned in order of first appearance in the log).
struct IntentMap {
  std::unordered_map<std::string, std::size_t> query_to_intent;
  std::vector<std::set<std::string>> intent_answers;
  std::size_t dropped_uncovered = 0;  // queries with no judgments at all
  std::size_t dropped_empty = 0;      // queries whose scores are all zero

  std::size_t intents() const { return intent_answers.size(); }
};

IntentMap derive_intents(const std::vector<LogRecord>& log,
                         const std::vector<RelevanceJudgment>& judgments);

/// NDCG of the record's ranked results, graded by the judgments for its
/// query (missing judgments count as grade zero).
double event_reward(const LogRecord& record, const JudgmentIndex& judgments);

/// A log record reduced to indices: the intent behind the query, the query
/// chosen, and the NDCG reward observed.
struct ReplayEvent {
  std::size_t intent = 0;
  std::size_t query = 0;
  double reward = 0.0;
};

/// Indexed view of a log: replayable events plus the id universes behind the
/// indices. Query indices are assigned in order of first appearance;
/// records whose query has no derivable intent are skipped.
struct ReplayData {
  std::vector<ReplayEvent> events;
  IntentMap intents;
  std::vector<std::string> query_ids;  // index -> id
  std::unordered_map<std::string, std::size_t> query_index;
  std::size_t users_covered = 0;  // distinct cookies among replayed records
};

ReplayData build_replay(const std::vector<LogRecord>& log,
                        const std::vector<RelevanceJudgment>& judgments);

/// Mean (and population standard deviation) of the per-event normalized
/// squared distance d = (1/n) sum_j (U_ij - [j == chosen])^2 between a
/// strategy's row and the observed choice. Events with intents the strategy
/// never saw are scored against a uniform row; queries it never saw extend
/// the distance by the missed unit mass.
std::pair<double, double> evaluate_msd(const Matrix& strategy,
                                       const std::vector<ReplayEvent>& events);

struct ModelFitResult {
  UserModel model = UserModel::kRothErev;
  ModelParams params;        // fitted parameters (defaults for grid-free models)
  double fit_sse = 0.0;      // grid objective at the chosen point
  double train_msd = 0.0;    // one-step MSD over the training replay
  double test_msd = 0.0;
  double test_stddev = 0.0;
  Matrix trained_strategy;   // rows/cols cover the ids seen while training
};

struct FitReport {
  std::vector<ModelFitResult> models;
  std::size_t events_total = 0;
  std::size_t fit_events = 0;
  std::size_t train_events = 0;
  std::size_t test_events = 0;
  std::size_t intents_covered = 0;
  std::size_t queries_covered = 0;
  std::size_t users_covered = 0;
  /// The per-event distance is normalized by the query count so values are
  /// comparable across games; this is a choice of this toolkit, so absolute
  /// magnitudes are not comparable to other implementations.
  std::string msd_note =
      "per-event squared distance normalized by the number of queries";
};

struct FitOptions {
  std::size_t fit_count = 500;     // events used for the parameter grid search
  std::size_t train_count = 10000; // further events replayed with chosen params
  std::size_t test_count = 500;    // cap on distinct-intent test events
  double grid_step = 0.01;
  unsigned jobs = 1;
  std::vector<UserModel> models = {
      UserModel::kBushMosteller,       UserModel::kCross,
      UserModel::kRothErev,            UserModel::kRothErevModified,
      UserModel::kWinStayLoseRandomize, UserModel::kLatestReward};
};

/// Grid-fits each model's parameters on the leading events by one-step
/// squared prediction error, replays the training window with the chosen
/// parameters, and evaluates the trained strategy on the first post-training
/// event of each distinct test intent.
FitReport fit_models(const std::vector<LogRecord>& log,
                     const std::vector<RelevanceJudgment>& judgments,
                     const FitOptions& options = {});

/// Synthetic-world shape for the log generator. Queries are partitioned
/// among intents (queries_per_intent each); every query of an intent scores
/// the intent's answers with graded relevance and everything else zero.
struct SyntheticWorld {
  std::size_t intents = 25;
  std::size_t queries_per_intent = 2;
  std::size_t answers_per_intent = 6;
  std::size_t list_length = 10;
  std::size_t cookie_pool = 50;
  /// Chance the (non-adapting) system decodes a query to its own intent.
  double dbms_accuracy = 0.75;
  /// Retrieval quality per vocabulary position, cycled across each intent's
  /// queries: quality q means a decode through that query returns
  /// ceil(q * answers_per_intent) of the decoded intent's answers before
  /// filler. Empty means full quality everywhere.
  std::vector<double> query_quality;
  /// Replace the fixed decoder with an adapting reinforcement learner.
  bool adapting_dbms = false;
  /// Pin every intent on its first query and skip user updates.
  bool fixed_pure_user = false;
  UserModel model = UserModel::kRothErev;
  ModelParams params;
};

struct SyntheticLog {
  std::vector<LogRecord> log;
  std::vector<RelevanceJudgment> judgments;
  std::vector<std::set<std::string>> true_intent_answers;   // per intent
  std::unordered_map<std::string, std::size_t> query_truth; // query id -> intent
};

/// Simulates `rounds` interactions of a learning user against the world's
/// decoder and emits them in the log/judgment file formats. Deterministic
/// per seed.
SyntheticLog generate_synthetic_log(const SyntheticWorld& world, std::size_t rounds,
                                    std::uint64_t seed);

}  // namespace digame

#endif  // DIGAME_WORKLOAD_HPP
