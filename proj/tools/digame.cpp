#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "digame/config_io.hpp"
#include "digame/dbms_learning.hpp"
#include "digame/diagnostics.hpp"
#include "digame/equilibria.hpp"
#include "digame/workload.hpp"

namespace {

constexpr const char* kVersion = "digame 1.0.0";

using json = nlohmann::ordered_json;
using namespace digame;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument("expected a non-empty array of rows");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(r, c) = rows[r][c].get<double>();
  return m;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

/// Tracks a command's output files so a failure never leaves data files
/// behind without their manifest.
class OutputSet {
 public:
  OutputSet(std::string subcommand, std::optional<std::string> config,
            std::optional<std::uint64_t> seed)
      : subcommand_(std::move(subcommand)),
        config_(std::move(config)),
        seed_(seed) {}

  void add(const std::string& path, const std::string& content) {
    write_text(path, content);
    written_.push_back(path);
  }

  void finish(const std::string& manifest_path) {
    json m;
    m["subcommand"] = subcommand_;
    m["config"] = config_ ? json(*config_) : json(nullptr);
    m["seed"] = seed_ ? json(*seed_) : json(nullptr);
    m["outputs"] = written_;
    m["tool_version"] = kVersion;
    m["wall_clock_utc"] = utc_now();
    write_text(manifest_path, m.dump(2) + "\n");
    done_ = true;
  }

  ~OutputSet() {
    if (done_) return;
    for (const auto& p : written_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }

 private:
  std::string subcommand_;
  std::optional<std::string> config_;
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> written_;
  bool done_ = false;
};

json report_to_json(const EquilibriumReport& rep) {
  json out;
  out["payoff"] = rep.payoff;
  out["is_nash"] = rep.is_nash;
  out["is_strict_nash"] = rep.is_strict_nash;
  out["is_optimal"] = rep.is_optimal;
  out["best_user_deviation_gain"] = rep.best_user_deviation_gain;
  out["best_dbms_deviation_gain"] = rep.best_dbms_deviation_gain;
  out["characterization_agrees"] = rep.characterization_agrees;
  out["user_pure"] = rep.user_pure;
  out["dbms_pure"] = rep.dbms_pure;
  out["user_onto"] = rep.user_onto;
  out["dbms_one_to_one"] = rep.dbms_one_to_one;
  out["zero_weight_intents"] = rep.zero_weight_intents;
  out["zero_payoff_intents"] = rep.zero_payoff_intents;
  out["zero_value_queries"] = rep.zero_value_queries;
  json ws = json::array();
  for (const auto& w : rep.witnesses) {
    json j;
    j["player"] = w.player == DeviationWitness::Player::kUser ? "user" : "dbms";
    j["row"] = w.row;
    j["target"] = w.target;
    j["gain"] = w.gain;
    ws.push_back(std::move(j));
  }
  out["witnesses"] = std::move(ws);
  return out;
}

struct ModelFlagValues {
  ModelParams params;
  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha-bm", params.alpha_bm, "Bush-Mosteller step size");
    cmd->add_option("--beta-bm", params.beta_bm, "Bush-Mosteller penalty size");
    cmd->add_option("--alpha-c", params.alpha_c, "Cross reward coefficient");
    cmd->add_option("--beta-c", params.beta_c, "Cross static increment");
    cmd->add_option("--sigma", params.sigma, "modified Roth-Erev forget rate");
    cmd->add_option("--epsilon", params.epsilon,
                    "modified Roth-Erev off-query weight");
    cmd->add_option("--r-min", params.r_min, "modified Roth-Erev reward floor");
    cmd->add_option("--wslr-threshold", params.wslr_threshold,
                    "win-stay/lose-randomize threshold");
    cmd->add_flag("--spread-epsilon", params.spread_epsilon,
                  "divide the off-query share by n-1");
  }
};

int cmd_payoff(const std::string& config_path, const std::string& out_path) {
  GameConfig g = load_game(config_path);
  double u = expected_payoff(g.initial_user, g.initial_dbms, g.prior, g.effectiveness);
  std::printf("%.12g\n", u);
  if (!out_path.empty()) {
    OutputSet outs("payoff", config_path, std::nullopt);
    json j;
    j["payoff"] = u;
    json per_query = json::array();
    for (std::size_t q = 0; q < g.n; ++q)
      per_query.push_back(per_query_efficiency(g.initial_user, g.initial_dbms,
                                               g.prior, g.effectiveness, q));
    j["per_query_efficiency"] = std::move(per_query);
    outs.add(out_path, j.dump(2) + "\n");
    outs.finish(out_path + ".manifest.json");
  }
  return 0;
}

int cmd_equilibria(const std::string& config_path, bool enumerate,
                   std::size_t budget, const std::string& out_path) {
  GameConfig g = load_game(config_path);
  StrategyProfile profile{g.initial_user, g.initial_dbms};
  EquilibriumReport rep = check_strict_nash(profile, g);

  json j;
  j["config"] = config_path;
  json prof = report_to_json(rep);
  bool optimal = false;
  std::optional<EnumerationResult> enumerated;
  try {
    enumerated = enumerate_pure_equilibria(g, budget);
    optimal = rep.payoff >= enumerated->max_payoff - kNashTol;
  } catch (const enumeration_budget_error& e) {
    j["enumeration_skipped"] = e.what();
  }
  prof["is_optimal"] = optimal;
  j["profile"] = std::move(prof);

  if (enumerate && enumerated) {
    json en;
    en["profiles_scanned"] = enumerated->profiles_scanned;
    en["max_payoff"] = enumerated->max_payoff;
    en["nash_count"] = enumerated->nash.size();
    en["strict_nash_count"] = enumerated->strict_nash.size();
    en["optimal_count"] = enumerated->optimal.size();
    json list = json::array();
    for (const auto& e : enumerated->nash) {
      json one;
      one["user"] = matrix_to_json(e.profile.user.matrix());
      one["dbms"] = matrix_to_json(e.profile.dbms.matrix());
      one["payoff"] = e.report.payoff;
      one["is_strict_nash"] = e.report.is_strict_nash;
      one["is_optimal"] = e.report.is_optimal;
      list.push_back(std::move(one));
    }
    en["nash"] = std::move(list);
    j["enumeration"] = std::move(en);
  }

  std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) {
    OutputSet outs("equilibria", config_path, std::nullopt);
    outs.add(out_path, text);
    outs.finish(out_path + ".manifest.json");
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, std::size_t rounds,
                 std::size_t seeds, std::uint64_t master_seed,
                 std::size_t user_every, const std::string& model_name,
                 const ModelFlagValues& flags, bool binary_reward,
                 bool free_composition, unsigned jobs,
                 const std::string& out_prefix) {
  GameConfig g = load_game(config_path);
  SimulationSchedule schedule = SimulationSchedule::every(rounds, user_every);
  SimulationOptions opt;
  opt.user_model = user_model_from_string(model_name);
  opt.params = flags.params;
  opt.reward_mode = binary_reward ? RewardMode::kBinary : RewardMode::kEffectiveness;
  opt.free_composition = free_composition;
  opt.seeds = seeds;
  opt.master_seed = master_seed;
  opt.jobs = jobs;

  TrajectorySet t = run_simulation(g, schedule, opt);

  std::ostringstream csv;
  csv << "t,seed,u\n";
  for (std::size_t s = 0; s < t.payoffs.size(); ++s)
    for (std::size_t k = 0; k < t.payoffs[s].size(); ++k)
      csv << k << ',' << s << ',' << fmt_double(t.payoffs[s][k]) << '\n';

  json fin;
  fin["fingerprint"] = t.fingerprint;
  fin["master_seed"] = t.master_seed;
  fin["rounds"] = schedule.total_rounds;
  fin["user_update_every"] = user_every;
  json per_seed = json::array();
  for (std::size_t s = 0; s < t.payoffs.size(); ++s) {
    json one;
    one["seed"] = s;
    one["final_payoff"] = t.payoffs[s].back();
    one["user"] = matrix_to_json(t.final_user[s]);
    one["dbms"] = matrix_to_json(t.final_dbms[s]);
    one["dbms_rewards"] = matrix_to_json(t.final_dbms_rewards[s]);
    if (!t.final_user_rewards[s].empty())
      one["user_rewards"] = matrix_to_json(t.final_user_rewards[s]);
    per_seed.push_back(std::move(one));
  }
  fin["seeds"] = std::move(per_seed);

  OutputSet outs("simulate", config_path, master_seed);
  outs.add(out_prefix + "_trajectories.csv", csv.str());
  outs.add(out_prefix + "_final.json", fin.dump(2) + "\n");
  outs.finish(out_prefix + ".manifest.json");
  std::cout << "wrote " << out_prefix << "_trajectories.csv (" << seeds
            << " seeds x " << rounds << " rounds)\n";
  return 0;
}

int cmd_gen_log(const SyntheticWorld& world, std::size_t rounds, std::uint64_t seed,
                const std::string& log_path, const std::string& judgments_path) {
  SyntheticLog out = generate_synthetic_log(world, rounds, seed);

  std::ostringstream log_text;
  for (const auto& rec : out.log) {
    log_text << rec.query_id << '\t' << rec.cookie_id << '\t' << rec.timestamp
             << '\t';
    for (std::size_t k = 0; k < rec.results.size(); ++k) {
      if (k) log_text << ' ';
      log_text << rec.results[k];
    }
    log_text << '\n';
  }
  std::ostringstream jd_text;
  for (const auto& j : out.judgments)
    jd_text << j.query_id << '\t' << j.result_id << '\t' << j.score << '\n';

  OutputSet outs("gen-log", std::nullopt, seed);
  outs.add(log_path, log_text.str());
  outs.add(judgments_path, jd_text.str());
  outs.finish(log_path + ".manifest.json");
  std::cout << "wrote " << out.log.size() << " records, " << out.judgments.size()
            << " judgments\n";
  return 0;
}

json fit_report_to_json(const FitReport& report) {
  json j;
  j["events_total"] = report.events_total;
  j["fit_events"] = report.fit_events;
  j["train_events"] = report.train_events;
  j["test_events"] = report.test_events;
  j["intents_covered"] = report.intents_covered;
  j["queries_covered"] = report.queries_covered;
  j["users_covered"] = report.users_covered;
  j["msd_note"] = report.msd_note;
  json models = json::array();
  for (const auto& m : report.models) {
    json one;
    one["model"] = to_string(m.model);
    json params = json::object();
    switch (m.model) {
      case UserModel::kBushMosteller:
        params["alpha_bm"] = m.params.alpha_bm;
        break;
      case UserModel::kCross:
        params["alpha_c"] = m.params.alpha_c;
        params["beta_c"] = m.params.beta_c;
        break;
      case UserModel::kRothErevModified:
        params["sigma"] = m.params.sigma;
        params["epsilon"] = m.params.epsilon;
        break;
      case UserModel::kWinStayLoseRandomize:
        params["threshold"] = m.params.wslr_threshold;
        break;
      default:
        break;
    }
    one["params"] = std::move(params);
    one["fit_sse"] = m.fit_sse;
    one["train_msd"] = m.train_msd;
    one["test_msd"] = m.test_msd;
    one["test_stddev"] = m.test_stddev;
    models.push_back(std::move(one));
  }
  j["models"] = std::move(models);
  return j;
}

void print_fit_table(const FitReport& report) {
  std::printf("%-26s %-12s %-12s %s\n", "Method", "Test MSD", "Std Dev",
              "Parameters");
  for (const auto& m : report.models) {
    std::string params;
    switch (m.model) {
      case UserModel::kBushMosteller:
        params = "alpha=" + fmt_double(m.params.alpha_bm);
        break;
      case UserModel::kCross:
        params = "alpha=" + fmt_double(m.params.alpha_c) +
                 " beta=" + fmt_double(m.params.beta_c);
        break;
      case UserModel::kRothErevModified:
        params = "sigma=" + fmt_double(m.params.sigma) +
                 " epsilon=" + fmt_double(m.params.epsilon);
        break;
      case UserModel::kWinStayLoseRandomize:
        params = "threshold=" + fmt_double(m.params.wslr_threshold);
        break;
      default:
        break;
    }
    std::printf("%-26s %-12.5f %-12.5f %s\n", to_string(m.model), m.test_msd,
                m.test_stddev, params.c_str());
  }
}

int cmd_fit(const std::string& log_path, const std::string& judgments_path,
            const FitOptions& options, const std::string& out_path,
            const std::string& strategies_path) {
  auto log = read_log(log_path);
  auto judgments = read_judgments(judgments_path);
  FitReport report = fit_models(log, judgments, options);
  print_fit_table(report);

  if (!out_path.empty() || !strategies_path.empty()) {
    OutputSet outs("fit", log_path, std::nullopt);
    if (!out_path.empty())
      outs.add(out_path, fit_report_to_json(report).dump(2) + "\n");
    if (!strategies_path.empty()) {
      // Strategy bundle for `eval`: matrices plus the id universes their
      // indices refer to.
      ReplayData rd = build_replay(log, judgments);
      json bundle;
      bundle["query_ids"] = rd.query_ids;
      json intents = json::array();
      for (const auto& answers : rd.intents.intent_answers)
        intents.push_back(std::vector<std::string>(answers.begin(), answers.end()));
      bundle["intent_answers"] = std::move(intents);
      json models;
      for (const auto& m : report.models)
        models[to_string(m.model)] = matrix_to_json(m.trained_strategy);
      bundle["models"] = std::move(models);
      outs.add(strategies_path, bundle.dump(2) + "\n");
    }
    outs.finish((out_path.empty() ? strategies_path : out_path) +
                ".manifest.json");
  }
  return 0;
}

int cmd_eval(const std::string& log_path, const std::string& judgments_path,
             const std::string& strategy_path, const std::string& model_name,
             std::size_t skip, bool all_events, const std::string& out_path) {
  auto log = read_log(log_path);
  auto judgments = read_judgments(judgments_path);

  std::ifstream in(strategy_path);
  if (!in) throw std::runtime_error("cannot open " + strategy_path);
  json bundle = json::parse(in);
  Matrix strategy = matrix_from_json(bundle.at("models").at(model_name));

  // Map this log's ids onto the trained indices: queries by id, intents by
  // answer-set equality.
  std::unordered_map<std::string, std::size_t> query_index;
  {
    std::size_t k = 0;
    for (const auto& q : bundle.at("query_ids"))
      query_index.emplace(q.get<std::string>(), k++);
  }
  std::map<std::set<std::string>, std::size_t> intent_index;
  {
    std::size_t k = 0;
    for (const auto& ans : bundle.at("intent_answers")) {
      std::set<std::string> s;
      for (const auto& r : ans) s.insert(r.get<std::string>());
      intent_index.emplace(std::move(s), k++);
    }
  }

  ReplayData rd = build_replay(log, judgments);
  std::vector<ReplayEvent> events;
  std::set<std::size_t> seen;
  for (std::size_t k = skip; k < rd.events.size(); ++k) {
    const auto& ev = rd.events[k];
    if (!all_events && !seen.insert(ev.intent).second) continue;
    auto iit = intent_index.find(rd.intents.intent_answers[ev.intent]);
    auto qit = query_index.find(rd.query_ids[ev.query]);
    ReplayEvent mapped;
    mapped.intent = iit != intent_index.end() ? iit->second : strategy.rows();
    mapped.query = qit != query_index.end() ? qit->second : strategy.cols();
    mapped.reward = ev.reward;
    events.push_back(mapped);
  }
  auto [msd, sd] = evaluate_msd(strategy, events);

  json j;
  j["model"] = model_name;
  j["events"] = events.size();
  j["msd"] = msd;
  j["stddev"] = sd;
  std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) {
    OutputSet outs("eval", log_path, std::nullopt);
    outs.add(out_path, text);
    outs.finish(out_path + ".manifest.json");
  }
  return 0;
}

int cmd_diagnose(const std::string& trajectories_path, std::size_t window,
                 std::size_t tail, double tol, const std::string& out_path) {
  std::ifstream in(trajectories_path);
  if (!in) throw std::runtime_error("cannot open " + trajectories_path);
  std::string line;
  if (!std::getline(in, line) || line != "t,seed,u")
    throw std::runtime_error("expected a t,seed,u header in " + trajectories_path);
  std::vector<std::vector<double>> payoffs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t c1 = line.find(',');
    std::size_t c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("malformed trajectory row: " + line);
    std::size_t seed = std::stoull(line.substr(c1 + 1, c2 - c1 - 1));
    double u = std::stod(line.substr(c2 + 1));
    if (seed >= payoffs.size()) payoffs.resize(seed + 1);
    payoffs[seed].push_back(u);
  }

  TrendReport trend = trend_test(payoffs, window);
  json j;
  j["seeds"] = trend.seeds;
  j["length"] = trend.length;
  j["window"] = trend.window;
  j["net_gain"] = trend.net_gain;
  j["max_windowed_decrease"] = trend.max_windowed_decrease;
  j["max_windowed_decrease_se"] = trend.max_windowed_decrease_se;
  if (tail > 0) {
    ConvergenceReport conv = convergence_test(payoffs, tail, tol);
    j["tail"] = conv.tail;
    j["tol"] = conv.tol;
    j["converged_fraction"] = conv.fraction;
    j["converged"] = conv.converged;
  }
  std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) {
    OutputSet outs("diagnose", trajectories_path, std::nullopt);
    outs.add(out_path, text);
    outs.finish(out_path + ".manifest.json");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"data-interaction signaling game toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // payoff
  std::string payoff_config, payoff_out;
  auto* payoff_cmd =
      app.add_subcommand("payoff", "expected payoff of a game's strategy profile");
  payoff_cmd->add_option("--config", payoff_config, "game definition file")
      ->required();
  payoff_cmd->add_option("--out", payoff_out, "optional JSON output path");

  // equilibria
  std::string eq_config, eq_out;
  bool eq_enumerate = false;
  std::size_t eq_budget = kDefaultEnumerationBudget;
  auto* eq_cmd = app.add_subcommand(
      "equilibria", "classify a profile and enumerate pure equilibria");
  eq_cmd->add_option("--config", eq_config, "game definition file")->required();
  eq_cmd->add_flag("--enumerate", eq_enumerate, "include the full enumeration");
  eq_cmd->add_option("--budget", eq_budget, "pure-profile enumeration budget");
  eq_cmd->add_option("--out", eq_out, "JSON report path");

  // simulate
  std::string sim_config, sim_prefix, sim_model = "roth-erev";
  std::size_t sim_rounds = 1000, sim_seeds = 1, sim_user_every = 0;
  std::uint64_t sim_master = 0;
  unsigned sim_jobs = 1;
  bool sim_binary = false, sim_free = false;
  ModelFlagValues sim_flags;
  auto* sim_cmd = app.add_subcommand("simulate", "run seeded learning trajectories");
  sim_cmd->add_option("--config", sim_config, "game definition file")->required();
  sim_cmd->add_option("--rounds", sim_rounds, "rounds per trajectory");
  sim_cmd->add_option("--seeds", sim_seeds, "number of seeded trajectories");
  sim_cmd->add_option("--master-seed", sim_master, "master seed");
  sim_cmd->add_option("--user-update-every", sim_user_every,
                      "user adapts every K rounds (0 = fixed user)");
  sim_cmd->add_option("--model", sim_model, "user model for scheduled updates");
  sim_cmd->add_flag("--binary-reward", sim_binary,
                    "+1 to the true intent instead of the effectiveness value");
  sim_cmd->add_flag("--free-composition", sim_free,
                    "allow model/reward combinations outside the proven regime");
  sim_cmd->add_option("--jobs", sim_jobs, "worker threads for seeds");
  sim_cmd->add_option("--out-prefix", sim_prefix, "output path prefix")->required();
  sim_flags.attach(sim_cmd);

  // gen-log
  SyntheticWorld world;
  std::string gen_model = "roth-erev", gen_log_path, gen_jd_path;
  std::size_t gen_rounds = 10000;
  std::uint64_t gen_seed = 0;
  ModelFlagValues gen_flags;
  auto* gen_cmd = app.add_subcommand("gen-log", "generate a synthetic query log");
  gen_cmd->add_option("--rounds", gen_rounds, "number of log records");
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_option("--intents", world.intents, "intent count");
  gen_cmd->add_option("--queries-per-intent", world.queries_per_intent,
                      "vocabulary size per intent");
  gen_cmd->add_option("--answers-per-intent", world.answers_per_intent,
                      "answer-set size per intent");
  gen_cmd->add_option("--list-length", world.list_length, "results per record");
  gen_cmd->add_option("--cookie-pool", world.cookie_pool, "distinct user cookies");
  gen_cmd->add_option("--dbms-accuracy", world.dbms_accuracy,
                      "fixed decoder accuracy in [0,1]");
  gen_cmd->add_flag("--adapting-dbms", world.adapting_dbms,
                    "use an adapting reinforcement decoder");
  gen_cmd->add_flag("--fixed-pure-user", world.fixed_pure_user,
                    "pin each intent on one query, no learning");
  gen_cmd->add_option("--model", gen_model, "generating user model");
  gen_cmd->add_option("--out-log", gen_log_path, "log output path")->required();
  gen_cmd->add_option("--out-judgments", gen_jd_path, "judgments output path")
      ->required();
  gen_flags.attach(gen_cmd);

  // fit
  std::string fit_log, fit_jd, fit_out, fit_strategies, fit_models_arg;
  FitOptions fit_opts;
  auto* fit_cmd = app.add_subcommand("fit", "fit the user models to a query log");
  fit_cmd->add_option("--log", fit_log, "query log path")->required();
  fit_cmd->add_option("--judgments", fit_jd, "relevance judgments path")->required();
  fit_cmd->add_option("--fit-count", fit_opts.fit_count,
                      "events for the parameter grid search");
  fit_cmd->add_option("--train-count", fit_opts.train_count,
                      "events replayed with the fitted parameters");
  fit_cmd->add_option("--test-count", fit_opts.test_count,
                      "cap on distinct-intent test events");
  fit_cmd->add_option("--grid-step", fit_opts.grid_step, "parameter grid step");
  fit_cmd->add_option("--jobs", fit_opts.jobs, "worker threads for the grid");
  fit_cmd->add_option("--models", fit_models_arg,
                      "comma-separated model subset (default: all six)");
  fit_cmd->add_option("--out", fit_out, "JSON report path");
  fit_cmd->add_option("--strategies", fit_strategies,
                      "trained-strategy bundle path (for eval)");

  // eval
  std::string eval_log, eval_jd, eval_strategy, eval_model = "roth-erev", eval_out;
  std::size_t eval_skip = 0;
  bool eval_all = false;
  auto* eval_cmd = app.add_subcommand(
      "eval", "evaluate a trained strategy's predictions on a log");
  eval_cmd->add_option("--log", eval_log, "query log path")->required();
  eval_cmd->add_option("--judgments", eval_jd, "relevance judgments path")
      ->required();
  eval_cmd->add_option("--strategy", eval_strategy, "bundle written by fit")
      ->required();
  eval_cmd->add_option("--model", eval_model, "model name inside the bundle");
  eval_cmd->add_option("--skip", eval_skip, "events to skip before testing");
  eval_cmd->add_flag("--all-events", eval_all,
                     "score every event, not just each intent's first");
  eval_cmd->add_option("--out", eval_out, "JSON output path");

  // diagnose
  std::string diag_csv, diag_out;
  std::size_t diag_window = 100, diag_tail = 500;
  double diag_tol = 1e-2;
  auto* diag_cmd = app.add_subcommand(
      "diagnose", "trend and convergence summary of trajectory CSVs");
  diag_cmd->add_option("--trajectories", diag_csv, "CSV written by simulate")
      ->required();
  diag_cmd->add_option("--window", diag_window, "trend window in rounds");
  diag_cmd->add_option("--tail", diag_tail,
                       "convergence tail length (0 skips the check)");
  diag_cmd->add_option("--tol", diag_tol, "convergence tolerance");
  diag_cmd->add_option("--out", diag_out, "JSON report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (payoff_cmd->parsed()) return cmd_payoff(payoff_config, payoff_out);
    if (eq_cmd->parsed())
      return cmd_equilibria(eq_config, eq_enumerate, eq_budget, eq_out);
    if (sim_cmd->parsed())
      return cmd_simulate(sim_config, sim_rounds, sim_seeds, sim_master,
                          sim_user_every, sim_model, sim_flags, sim_binary,
                          sim_free, sim_jobs, sim_prefix);
    if (gen_cmd->parsed()) {
      world.model = user_model_from_string(gen_model);
      world.params = gen_flags.params;
      return cmd_gen_log(world, gen_rounds, gen_seed, gen_log_path, gen_jd_path);
    }
    if (fit_cmd->parsed()) {
      if (!fit_models_arg.empty()) {
        fit_opts.models.clear();
        std::istringstream in(fit_models_arg);
        std::string name;
        while (std::getline(in, name, ','))
          fit_opts.models.push_back(user_model_from_string(name));
      }
      return cmd_fit(fit_log, fit_jd, fit_opts, fit_out, fit_strategies);
    }
    if (eval_cmd->parsed())
      return cmd_eval(eval_log, eval_jd, eval_strategy, eval_model, eval_skip,
                      eval_all, eval_out);
    if (diag_cmd->parsed())
      return cmd_diagnose(diag_csv, diag_window, diag_tail, diag_tol, diag_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
