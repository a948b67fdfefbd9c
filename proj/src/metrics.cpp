#include "digame/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace digame {

double set_precision(const AnswerSet& returned, const AnswerSet& desired) {
  if (returned.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : returned.tuples) hits += desired.tuples.count(t);
  return static_cast<double>(hits) / static_cast<double>(returned.size());
}

double precision_at_k(const RankedResult& ranked, const AnswerSet& desired,
                      std::size_t k) {
  if (k == 0) throw std::invalid_argument("precision_at_k: k must be >= 1");
  std::size_t depth = std::min(k, ranked.size());
  if (depth == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t pos = 0; pos < depth; ++pos)
    hits += desired.tuples.count(ranked.items[pos].first);
  return static_cast<double>(hits) / static_cast<double>(depth);
}

namespace {

double dcg(const std::vector<int>& grades, std::size_t k) {
  double total = 0.0;
  std::size_t depth = std::min(k, grades.size());
  for (std::size_t pos = 0; pos < depth; ++pos) {
    double gain = std::exp2(static_cast<double>(grades[pos])) - 1.0;
    total += gain / std::log2(static_cast<double>(pos) + 2.0);
  }
  return total;
}

}  // namespace

double ndcg(const RankedResult& ranked, std::size_t k) {
  if (ranked.items.empty())
    throw std::invalid_argument("ndcg: ranked list must be nonempty");
  if (k == 0) throw std::invalid_argument("ndcg: k must be >= 1");
  std::vector<int> grades;
  grades.reserve(ranked.size());
  for (const auto& [id, g] : ranked.items) {
    if (g < 0 || g > kMaxRelevanceGrade)
      throw std::invalid_argument("ndcg: grade outside 0..4");
    grades.push_back(g);
  }
  std::vector<int> ideal = grades;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = dcg(ideal, k);
  if (idcg == 0.0) return 0.0;
  return dcg(grades, k) / idcg;
}

}  // namespace digame
