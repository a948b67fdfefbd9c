#include "digame/config_io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace digame {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_row(const std::string& line, const std::string& origin) {
  std::istringstream in(line);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) {
    std::string bad;
    in.clear();
    in >> bad;
    throw std::invalid_argument(origin + ": bad numeric token '" + bad + "'");
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& origin) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(origin + ": expected boolean, got '" + v + "'");
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows,
                 std::size_t want_rows, std::size_t want_cols,
                 const std::string& what, const std::string& origin) {
  if (rows.size() != want_rows)
    throw std::invalid_argument(origin + ": " + what + " has " +
                                std::to_string(rows.size()) + " rows, expected " +
                                std::to_string(want_rows));
  Matrix m(want_rows, want_cols);
  for (std::size_t r = 0; r < want_rows; ++r) {
    if (rows[r].size() != want_cols)
      throw std::invalid_argument(origin + ": " + what + " row " + std::to_string(r) +
                                  " has " + std::to_string(rows[r].size()) +
                                  " columns, expected " + std::to_string(want_cols));
    for (std::size_t c = 0; c < want_cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

GameConfig load_game_from_stream(std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::vector<double>>> matrices;

  std::string line;
  std::string open_matrix;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string t = strip(line);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq != std::string::npos) {
      std::string key = strip(t.substr(0, eq));
      std::string value = strip(t.substr(eq + 1));
      if (key.empty()) throw std::invalid_argument(origin + ": empty key");
      if (value.empty()) {
        open_matrix = key;
        matrices[key];  // matrix block follows
      } else {
        open_matrix.clear();
        scalars[key] = value;
      }
    } else {
      if (open_matrix.empty())
        throw std::invalid_argument(origin + ": stray row outside a matrix block: '" +
                                    t + "'");
      matrices[open_matrix].push_back(parse_row(t, origin));
    }
  }

  auto need_count = [&](const char* key) {
    auto it = scalars.find(key);
    if (it == scalars.end())
      throw std::invalid_argument(origin + ": missing required key '" + key + "'");
    long v = std::stol(it->second);
    if (v < 1) throw std::invalid_argument(origin + ": '" + key + "' must be >= 1");
    return static_cast<std::size_t>(v);
  };

  GameConfig g;
  g.m = need_count("m");
  g.n = need_count("n");
  g.o = need_count("o");

  WeightMode mode = WeightMode::kDistribution;
  if (auto it = scalars.find("weights"); it != scalars.end()) {
    if (it->second == "unit")
      mode = WeightMode::kUnit;
    else if (it->second != "distribution")
      throw std::invalid_argument(origin + ": weights must be 'unit' or 'distribution'");
  }
  if (auto it = scalars.find("allow_unnormalized_rewards"); it != scalars.end())
    g.allow_unnormalized_rewards = parse_bool(it->second, origin);

  if (auto it = scalars.find("prior"); it != scalars.end()) {
    g.prior = ProbabilityVector(parse_row(it->second, origin), mode);
  } else {
    g.prior = mode == WeightMode::kUnit ? ProbabilityVector::unit(g.m)
                                        : ProbabilityVector::uniform(g.m);
  }

  if (auto it = matrices.find("effectiveness"); it != matrices.end()) {
    g.effectiveness =
        EffectivenessMatrix(to_matrix(it->second, g.m, g.o, "effectiveness", origin),
                            g.allow_unnormalized_rewards);
  } else if (g.m == g.o) {
    g.effectiveness = EffectivenessMatrix::identity(g.m);
  } else {
    throw std::invalid_argument(origin +
                                ": effectiveness matrix required when m != o");
  }

  if (auto it = matrices.find("user"); it != matrices.end())
    g.initial_user = StrategyMatrix(to_matrix(it->second, g.m, g.n, "user", origin));
  else
    g.initial_user = StrategyMatrix::uniform(g.m, g.n);

  if (auto it = matrices.find("dbms"); it != matrices.end())
    g.initial_dbms = StrategyMatrix(to_matrix(it->second, g.n, g.o, "dbms", origin));
  else
    g.initial_dbms = StrategyMatrix::uniform(g.n, g.o);

  if (auto it = matrices.find("user_rewards"); it != matrices.end())
    g.initial_user_rewards = to_matrix(it->second, g.m, g.n, "user_rewards", origin);
  if (auto it = matrices.find("dbms_rewards"); it != matrices.end())
    g.initial_dbms_rewards = to_matrix(it->second, g.n, g.o, "dbms_rewards", origin);

  GameLabels labels;
  bool any_labels = false;
  if (auto it = scalars.find("labels_intents"); it != scalars.end()) {
    labels.intents = split_words(it->second);
    any_labels = true;
  }
  if (auto it = scalars.find("labels_queries"); it != scalars.end()) {
    labels.queries = split_words(it->second);
    any_labels = true;
  }
  if (auto it = scalars.find("labels_results"); it != scalars.end()) {
    labels.results = split_words(it->second);
    any_labels = true;
  }
  if (any_labels) g.labels = std::move(labels);

  g.validate();
  return g;
}

GameConfig load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open game config: " + path);
  return load_game_from_stream(in, path);
}

}  // namespace digame
