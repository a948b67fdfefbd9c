#include "digame/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace digame {

namespace {

void check_aligned(const std::vector<std::vector<double>>& payoffs) {
  if (payoffs.empty()) throw std::invalid_argument("no trajectories");
  std::size_t len = payoffs.front().size();
  if (len == 0) throw std::invalid_argument("empty trajectories");
  for (const auto& p : payoffs)
    if (p.size() != len)
      throw std::invalid_argument("trajectories must have equal length");
}

}  // namespace

TrendReport trend_test(const std::vector<std::vector<double>>& payoffs,
                       std::size_t window) {
  check_aligned(payoffs);
  if (payoffs.size() < 30)
    throw std::invalid_argument(
        "trend_test: need at least 30 seeds for standard errors");
  if (window == 0) throw std::invalid_argument("trend_test: window must be >= 1");

  std::size_t seeds = payoffs.size();
  std::size_t len = payoffs.front().size();

  TrendReport rep;
  rep.seeds = seeds;
  rep.length = len;
  rep.window = window;
  rep.mean.resize(len);
  rep.se.resize(len);
  double inv = 1.0 / static_cast<double>(seeds);
  for (std::size_t t = 0; t < len; ++t) {
    double m = 0.0;
    for (const auto& p : payoffs) m += p[t];
    m *= inv;
    double var = 0.0;
    for (const auto& p : payoffs) var += (p[t] - m) * (p[t] - m);
    var *= inv;
    rep.mean[t] = m;
    rep.se[t] = std::sqrt(var * inv);
  }
  rep.net_gain = rep.mean.back() - rep.mean.front();

  rep.max_windowed_decrease = 0.0;
  rep.max_windowed_decrease_se = 0.0;
  if (len > window) {
    for (std::size_t t = 0; t + window < len; ++t) {
      double drop = rep.mean[t] - rep.mean[t + window];
      rep.max_windowed_decrease = std::max(rep.max_windowed_decrease, drop);
      if (drop <= 0.0) continue;
      // paired per-seed differences give the SE of this window's drop
      double dm = 0.0;
      for (const auto& p : payoffs) dm += p[t] - p[t + window];
      dm *= inv;
      double dvar = 0.0;
      for (const auto& p : payoffs) {
        double d = p[t] - p[t + window] - dm;
        dvar += d * d;
      }
      double se = std::sqrt(dvar * inv * inv);
      double units = se > 0.0 ? drop / se
                              : std::numeric_limits<double>::infinity();
      rep.max_windowed_decrease_se = std::max(rep.max_windowed_decrease_se, units);
    }
  }
  return rep;
}

ConvergenceReport convergence_test(const std::vector<std::vector<double>>& payoffs,
                                   std::size_t tail, double tol) {
  check_aligned(payoffs);
  std::size_t len = payoffs.front().size();
  if (tail == 0 || tail >= len)
    throw std::invalid_argument("convergence_test: need 0 < tail < length");
  if (tol < 0.0) throw std::invalid_argument("convergence_test: negative tol");

  ConvergenceReport rep;
  rep.tail = tail;
  rep.tol = tol;
  rep.converged.reserve(payoffs.size());
  std::size_t hits = 0;
  for (const auto& p : payoffs) {
    auto begin = p.end() - static_cast<std::ptrdiff_t>(tail);
    auto [lo, hi] = std::minmax_element(begin, p.end());
    bool ok = (*hi - *lo) <= tol;
    rep.converged.push_back(ok);
    if (ok) ++hits;
  }
  rep.fraction = static_cast<double>(hits) / static_cast<double>(payoffs.size());
  return rep;
}

}  // namespace digame
