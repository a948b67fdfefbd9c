#ifndef DIGAME_METRICS_HPP
#define DIGAME_METRICS_HPP

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace digame {

/// Answer of an intent over the toy instance: a set of opaque tuple ids.
/// May be empty (under-specified queries get relaxed by the system; the
/// precision of an empty returned set is defined as zero).
struct AnswerSet {
  std::set<std::string> tuples;

  bool empty() const { return tuples.empty(); }
  std::size_t size() const { return tuples.size(); }
};

inline constexpr int kMaxRelevanceGrade = 4;

/// Ranked list of (tuple id, relevance grade in 0..4).
struct RankedResult {
  std::vector<std::pair<std::string, int>> items;

  std::size_t size() const { return items.size(); }
};

/// |returned ∩ desired| / |returned|; zero when nothing was returned.
double set_precision(const AnswerSet& returned, const AnswerSet& desired);

/// Fraction of the first min(k, list length) items whose id is in `desired`.
/// The list is truncated, never padded. k must be at least one.
double precision_at_k(const RankedResult& ranked, const AnswerSet& desired,
                      std::size_t k);

/// NDCG@k with gain 2^grade - 1 and discount 1/log2(rank + 1), ranks starting
/// at 1. Returns zero when every grade in the ideal ranking is zero.
double ndcg(const RankedResult& ranked, std::size_t k);

}  // namespace digame

#endif  // DIGAME_METRICS_HPP
