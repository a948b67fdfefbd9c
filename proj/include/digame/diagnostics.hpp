#ifndef DIGAME_DIAGNOSTICS_HPP
#define DIGAME_DIAGNOSTICS_HPP

#include <cstddef>
#include <vector>

namespace digame {

struct TrendReport {
  std::size_t seeds = 0;
  std::size_t length = 0;  // trajectory length (rounds + 1)
  std::size_t window = 0;
  double net_gain = 0.0;                 // mean(end) - mean(0)
  double max_windowed_decrease = 0.0;    // largest drop of the seed mean
  double max_windowed_decrease_se = 0.0; // same drop in standard-error units
  std::vector<double> mean;              // seed mean per round
  std::vector<double> se;                // standard error per round
};

/// Seed-mean trend summary over aligned payoff trajectories. The windowed
/// decrease at t is mean(t) - mean(t + window); its SE scale comes from the
/// per-seed paired differences. Needs at least 30 seeds for the standard
/// errors to mean anything.
TrendReport trend_test(const std::vector<std::vector<double>>& payoffs,
                       std::size_t window);

struct ConvergenceReport {
  std::vector<bool> converged;  // per seed
  double fraction = 0.0;
  std::size_t tail = 0;
  double tol = 0.0;
};

/// A seed converged when its payoff range over the final `tail` rounds stays
/// within `tol`.
ConvergenceReport convergence_test(const std::vector<std::vector<double>>& payoffs,
                                   std::size_t tail, double tol);

}  // namespace digame

#endif  // DIGAME_DIAGNOSTICS_HPP
